"""Canonical JSON serialization: sorted keys, compact separators, floats
rounded to 9 significant digits.  Golden files and the CLI/HTTP parity
checks compare this byte representation."""

from __future__ import annotations

import json
import math


def _canonize(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite float in canonical output: {obj}")
        if obj == int(obj) and abs(obj) < 1e15:
            return obj if obj != 0 else 0.0
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {str(k): _canonize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonize(v) for v in obj]
    return obj


def canonical_dumps(obj) -> str:
    return json.dumps(_canonize(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_dump_pretty(obj) -> str:
    return json.dumps(_canonize(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
