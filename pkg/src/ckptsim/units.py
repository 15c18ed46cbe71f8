"""Duration parsing and formatting.

Every quantity inside the package is a number of seconds stored as a
double-precision float.  Human-facing strings accept a unit suffix:
``s`` (seconds), ``mn`` (minutes), ``h`` (hours), ``d`` (days) and
``y`` (years of 365 days).  A bare number is taken as seconds.
"""

from __future__ import annotations

import math
import re

SECONDS_PER = {
    "s": 1.0,
    "mn": 60.0,
    "h": 3600.0,
    "d": 86400.0,
    "y": 365.0 * 86400.0,
}

_DURATION_RE = re.compile(r"^\s*([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*([a-z]*)\s*$")


def parse_duration(text: str | float | int) -> float:
    """Parse a duration like ``"10mn"``, ``"125y"`` or ``300`` into seconds."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _DURATION_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse duration {text!r}")
    value, unit = m.groups()
    if unit == "":
        unit = "s"
    if unit not in SECONDS_PER:
        raise ValueError(f"unknown duration unit {unit!r} in {text!r} "
                         f"(expected one of {sorted(SECONDS_PER)})")
    return float(value) * SECONDS_PER[unit]


def format_duration(seconds: float) -> str:
    """Render seconds with the largest unit that keeps the value >= 1."""
    if math.isinf(seconds):
        return "inf"
    for unit in ("y", "d", "h", "mn"):
        if abs(seconds) >= SECONDS_PER[unit]:
            return f"{seconds / SECONDS_PER[unit]:.4g}{unit}"
    return f"{seconds:.4g}s"
