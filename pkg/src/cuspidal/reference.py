"""Bundled reference table of factored orders at prime level."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .crosscheck import parse_value


def reference_table_path() -> Path:
    return Path(resources.files("cuspidal").joinpath("data/table1.csv"))


@lru_cache(maxsize=1)
def reference_table() -> dict[int, str]:
    """p -> canonical factored order string for the bundled reference rows."""
    out: dict[int, str] = {}
    for raw in reference_table_path().read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line == "p,factorization":
            continue
        p_str, factored = line.split(",", 1)
        out[int(p_str)] = factored.strip()
    return out


def reference_order(p: int) -> int:
    return parse_value(reference_table()[p])
