"""Deterministic synthetic training datasets.

The public training exports are not redistributable with this repository,
so the golden datasets used by the test suite are generated here.  They
reproduce the published headline figures exactly (trainee counts and raw
per-class event totals) on a six-level scenario: network scan, CVE
lookup, exploitation, history forensics, key cracking, and wrap-up.

Generation is fully seeded; the same dataset id always yields the same
byte-identical normalized event file.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np

from .events import Event, EventClass, EventLog

LEVELS = (1, 2, 3, 4, 5, 6)

DATASET_SPECS = {
    "dataset1": {"seed": 1001, "trainees": 52, "bash": 2749, "msf": 904, "game": 1617},
    "dataset2": {"seed": 1002, "trainees": 48, "bash": 2920, "msf": 1587, "game": 1980},
}

# Index of the scripted low-engagement trainee (hints and solutions,
# almost no commands).
LOW_ENGAGEMENT_INDEX = 7

_BASH_BASES = [
    ("nmap", ["-sV 10.1.26.9", "-sS 10.1.26.9", "-p- 10.1.26.9", "-sV -p 10000 10.1.26.9", "10.1.26.0/24"]),
    ("ls", ["", "-la", "-l /root", "-a", "/tmp"]),
    ("cd", ["/root", "..", "/home/user", "/tmp", "/etc"]),
    ("cat", ["/root/flag.txt", ".bash_history", "note.txt", "/etc/passwd", "id_rsa"]),
    ("ssh", ["root@10.1.26.9", "kali@10.1.26.9", "root@172.18.1.5", "kali@172.18.1.5", "-4 -a root@10.1.26.9"]),
    ("scp", ["backup.tar root@10.1.26.23:", "root@10.1.26.23:/root/backup ."]),
    ("john", ["--wordlist=rockyou.txt hash.txt", "--show hash.txt", "key_hash.txt"]),
    ("curl", ["http://10.1.26.9:10000", "-v https://10.1.26.9", "10.1.26.9"]),
    ("wget", ["http://10.1.26.9/exploit.sh", "10.1.26.9/backup.tar"]),
    ("grep", ["scp .bash_history", "-r flag /root", "CVE notes.txt"]),
    ("chmod", ["+x exploit.sh", "600 id_rsa"]),
    ("python3", ["exploit.py", "-m http.server", "ssh2john.py id_rsa"]),
    ("find", ["/ -name flag.txt", ". -name *.key"]),
    ("tar", ["-xvf backup.tar", "-tf backup.tar"]),
    ("ping", ["10.1.26.9", "-c 3 10.1.26.23"]),
    ("ifconfig", ["", "eth0"]),
    ("history", [""]),
    ("pwd", [""]),
    ("man", ["nmap", "john", "scp"]),
    ("sudo", ["su", "cat /etc/shadow", "-l"]),
]

_MSF_BASES = [
    ("search", ["webmin", "CVE-2019-15107", "type:exploit webmin"]),
    ("use", ["exploit/linux/http/webmin_backdoor", "0", "1"]),
    ("set", ["RHOSTS 10.1.26.9", "LHOST 10.1.26.10", "RPORT 10000", "SSL true", "PAYLOAD cmd/unix/reverse_perl"]),
    ("show", ["options", "payloads", "targets"]),
    ("run", [""]),
    ("exploit", ["", "-j"]),
    ("check", [""]),
    ("options", [""]),
    ("info", [""]),
    ("sessions", ["-i 1", "-l"]),
]

_PASTE_LINES = [
    "MIIEpAIBAAKCAQEA7f2Kq9mXg4VZp1nO3tRb5cS8dU0eW2fY6hJ4kL7mN9pQ1rS3",
    "tU5vW7xY9zA1bC3dE5fG7hI9jK1lM3nO5pQ7rS9tU1vW3xY5zA7bC9dE1fG3hI5j",
    "K7lM9nO1pQ3rS5tU7vW9xY1zA3bC5dE7fG9hI1jK3lM5nO7pQ9rS1tU3vW5xY7zA",
    "9bC1dE3fG5hI7jK9lM1nO3pQ5rS7tU9vW1xY3zA5bC7dE9fG1hI3jK5lM7nO9pQ1",
    "rS3tU5vW7xY9zA1bC3dE5fG7hI9jK1lM3nO5pQ7rS9tU1vW3xY5zA7bC9dE1fG3h",
    "I5jK7lM9nO1pQ3rS5tU7vW9xY1zA3bC5dE7fG9hI1jK3lM5nO7pQ9rS1tU3vW5xY",
    "7zA9bC1dE3fG5hI7jK9lM1nO3pQ5rS7tU9vW1xY3zA5bC7dE9fG1hI3jK5lM7nO9",
    "pQ1rS3tU5vW7xY9zA1bC3dE5fG7hI9jK1lM3nO5pQ7rS9tU1vW3xY5zA7bC9dE1f",
    "G3hI5jK7lM9nO1pQ3rS5tU7vW9xY1zA3bC5dE7fG9hI1jK3lM5nO7pQ9rS1tU3vW",
    "5xY7zA9bC1dE3fG5hI7jK9lM1nO3pQ5rS7tU9vW1xY3zA5bC7dE9fG1hI3jK5lM7",
]

_OPTIONAL_KINDS = ("HintTaken", "WrongAnswerSubmitted", "SolutionDisplayed")
_OPTIONAL_WEIGHTS = (0.5, 0.35, 0.15)


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer allocation summing exactly to `total`."""
    raw = weights / weights.sum() * total
    counts = np.floor(raw).astype(int)
    remainder = total - counts.sum()
    order = np.argsort(-(raw - counts), kind="stable")
    counts[order[:remainder]] += 1
    return counts


def _command_line(rng: np.random.Generator, bases) -> str:
    base, args = bases[int(rng.integers(len(bases)))]
    arg = args[int(rng.integers(len(args)))]
    return f"{base} {arg}".strip()


def generate(dataset_id: str) -> EventLog:
    if dataset_id not in DATASET_SPECS:
        raise KeyError(f"unknown synthetic dataset {dataset_id!r}; choose from {sorted(DATASET_SPECS)}")
    spec = DATASET_SPECS[dataset_id]
    rng = np.random.default_rng(spec["seed"])
    n = spec["trainees"]
    trainee_ids = [f"T{i + 1:03d}" for i in range(n)]
    low_id = trainee_ids[LOW_ENGAGEMENT_INDEX]

    base_time = datetime(2022, 3, 1, 10, 0, 0, tzinfo=timezone.utc)

    # Level windows per trainee: start offset and per-level durations.
    level_bounds: dict[tuple[str, int], tuple[datetime, datetime]] = {}
    for i, tid in enumerate(trainee_ids):
        t = base_time + timedelta(seconds=float(i * 11 + rng.integers(0, 30)))
        for level in LEVELS:
            duration = float(300 + rng.integers(0, 600))
            level_bounds[(tid, level)] = (t, t + timedelta(seconds=duration))
            t = t + timedelta(seconds=duration + float(rng.integers(5, 40)))

    events: list[Event] = []

    def place(tid: str, level: int, rel: float) -> datetime:
        start, end = level_bounds[(tid, level)]
        span = (end - start).total_seconds()
        # Keep generated events strictly inside the level window.
        sec = 1.0 + rel * (span - 2.0)
        return start + timedelta(milliseconds=round(sec * 1000))

    # Mandatory progress events.
    game_count = 0
    for tid in trainee_ids:
        first_start, _ = level_bounds[(tid, LEVELS[0])]
        events.append(
            Event(first_start - timedelta(seconds=20), tid, LEVELS[0], EventClass.GAME, "TrainingStarted")
        )
        for level in LEVELS:
            start, end = level_bounds[(tid, level)]
            events.append(Event(start, tid, level, EventClass.GAME, "LevelStarted"))
            events.append(Event(end, tid, level, EventClass.GAME, "CorrectAnswerSubmitted"))
        _, last_end = level_bounds[(tid, LEVELS[-1])]
        events.append(
            Event(last_end + timedelta(seconds=15), tid, LEVELS[-1], EventClass.GAME, "TrainingFinished")
        )
        game_count += 2 + 2 * len(LEVELS)

    # Optional game events: the scripted low-engagement trainee takes many
    # hints and solutions; the remainder is spread across the cohort.
    extras_total = spec["game"] - game_count
    low_extras = []
    for level in LEVELS:
        low_extras += [("HintTaken", level)] * 3 + [("SolutionDisplayed", level), ("WrongAnswerSubmitted", level)]
    if len(low_extras) > extras_total:
        raise AssertionError("scripted extras exceed the game-event budget")
    for kind, level in low_extras:
        events.append(Event(place(low_id, level, float(rng.random())), low_id, level, EventClass.GAME, kind))
    others = [t for t in trainee_ids if t != low_id]
    for _ in range(extras_total - len(low_extras)):
        tid = others[int(rng.integers(len(others)))]
        level = LEVELS[int(rng.integers(len(LEVELS)))]
        kind = str(rng.choice(_OPTIONAL_KINDS, p=_OPTIONAL_WEIGHTS))
        events.append(Event(place(tid, level, float(rng.random())), tid, level, EventClass.GAME, kind))

    # Bash commands.  Some trainees paste file content into the terminal
    # (recorded as per-line garbage events) and some re-submit the same
    # command in quick succession; both count toward the raw totals.
    low_bash = len(LEVELS)  # one token command per level
    burst_trainees = [t for j, t in enumerate(trainee_ids) if j % 6 == 2]
    dup_trainees = [t for j, t in enumerate(trainee_ids) if j % 5 == 1 and t != low_id]
    noise_budget = len(burst_trainees) * len(_PASTE_LINES) + len(dup_trainees) * 3
    organic_total = spec["bash"] - low_bash - noise_budget
    weights = rng.random(len(others)) + 0.5
    per_trainee = _largest_remainder(weights, organic_total)

    for tid in trainee_ids:
        if tid == low_id:
            for level in LEVELS:
                events.append(
                    Event(place(tid, level, float(rng.random())), tid, level, EventClass.BASH,
                          content=_command_line(rng, _BASH_BASES))
                )
            continue
        count = int(per_trainee[others.index(tid)])
        level_weights = rng.random(len(LEVELS)) + 0.5
        per_level = _largest_remainder(level_weights, count)
        for level, c in zip(LEVELS, per_level):
            for _ in range(int(c)):
                events.append(
                    Event(place(tid, level, float(rng.random())), tid, level, EventClass.BASH,
                          content=_command_line(rng, _BASH_BASES))
                )
        if tid in dup_trainees:
            ts = place(tid, 2, 0.5)
            cmd = "cat .bash_history"
            for rep in range(2):
                events.append(
                    Event(ts + timedelta(milliseconds=200 * (rep + 1)), tid, 2, EventClass.BASH, content=cmd)
                )
            # Pair the duplicates with an original at the same spot.
            events.append(Event(ts, tid, 2, EventClass.BASH, content=cmd))
        if tid in burst_trainees:
            ts = place(tid, 5, 0.6)
            for j, line in enumerate(_PASTE_LINES):
                events.append(
                    Event(ts + timedelta(milliseconds=90 * j), tid, 5, EventClass.BASH, content=line)
                )

    # Metasploit commands, concentrated in the exploitation levels.
    msf_levels = (3, 4)
    weights = rng.random(len(others)) + 0.5
    per_trainee = _largest_remainder(weights, spec["msf"])
    for tid, count in zip(others, per_trainee):
        for _ in range(int(count)):
            level = msf_levels[int(rng.integers(len(msf_levels)))]
            events.append(
                Event(place(tid, level, float(rng.random())), tid, level, EventClass.MSF,
                      content=_command_line(rng, _MSF_BASES))
            )

    log = EventLog.from_events(dataset_id, events)
    counts = {"game": 0, "bash": 0, "msf": 0}
    for ev in log.events:
        counts[ev.event_class.value] += 1
    assert counts == {"game": spec["game"], "bash": spec["bash"], "msf": spec["msf"]}, counts
    assert len(log.trainees) == n
    return log
