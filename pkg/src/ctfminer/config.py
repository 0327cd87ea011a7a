"""Service configuration: YAML/JSON config file, environment overrides,
and explicit flag overrides; flags win over environment, environment wins
over file."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import yaml

ENV_PREFIX = "CTF_MINER_"


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8080
    data_dir: str = "./data"
    log_level: str = "info"

    def to_json(self) -> dict:
        return {"port": self.port, "data_dir": self.data_dir, "log_level": self.log_level}


def load_config(
    config_file: Optional[str] = None,
    port: Optional[int] = None,
    data_dir: Optional[str] = None,
    log_level: Optional[str] = None,
) -> ServiceConfig:
    values = {"port": 8080, "data_dir": "./data", "log_level": "info"}
    if config_file:
        text = Path(config_file).read_text()
        doc = yaml.safe_load(text) or {}
        if not isinstance(doc, dict):
            raise ValueError(f"config file {config_file} must contain a mapping")
        for key in values:
            if key in doc:
                values[key] = doc[key]
    env_map = {"port": "PORT", "data_dir": "DATA_DIR", "log_level": "LOG_LEVEL"}
    for key, suffix in env_map.items():
        env = os.environ.get(ENV_PREFIX + suffix)
        if env is not None:
            values[key] = env
    for key, flag in (("port", port), ("data_dir", data_dir), ("log_level", log_level)):
        if flag is not None:
            values[key] = flag
    return ServiceConfig(
        port=int(values["port"]),
        data_dir=str(values["data_dir"]),
        log_level=str(values["log_level"]).lower(),
    )
