"""Parsing of unit-suffixed quantities from config files.

Internal units are microseconds for time and rad/us for angular frequencies
and rates.  Frequency units written as Hz multiples denote cycles and are
converted with a factor 2 pi ("1 MHz" -> 2 pi rad/us), matching the usual
"omega / 2 pi = 1 MHz" convention; rate units (/us, 1/ns, rad/us) convert
without it.
"""

from __future__ import annotations

import re

__all__ = ["parse_time", "parse_rate", "UnitError"]

_TWO_PI = 6.283185307179586476925287

_TIME_UNITS = {
    "ns": 1e-3,
    "us": 1.0,
    "µs": 1.0,
    "ms": 1e3,
    "s": 1e6,
}

# angular-rate units: factor to rad/us
_RATE_UNITS = {
    "rad/ns": 1e3,
    "rad/us": 1.0,
    "rad/µs": 1.0,
    "rad/ms": 1e-3,
    "rad/s": 1e-6,
    "/ns": 1e3,
    "/us": 1.0,
    "/µs": 1.0,
    "/ms": 1e-3,
    "/s": 1e-6,
    "1/ns": 1e3,
    "1/us": 1.0,
    "1/µs": 1.0,
    "1/ms": 1e-3,
    "1/s": 1e-6,
    "ns^-1": 1e3,
    "us^-1": 1.0,
    "ms^-1": 1e-3,
    "s^-1": 1e-6,
}

# cycle-frequency units: factor to rad/us includes 2 pi
_FREQ_UNITS = {
    "hz": _TWO_PI * 1e-6,
    "khz": _TWO_PI * 1e-3,
    "mhz": _TWO_PI,
    "ghz": _TWO_PI * 1e3,
    "thz": _TWO_PI * 1e6,
}

_NUMBER = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*)$")


class UnitError(ValueError):
    """A quantity string could not be parsed."""


def _split(text) -> tuple[float, str]:
    if isinstance(text, (int, float)):
        return float(text), ""
    m = _NUMBER.match(str(text))
    if not m:
        raise UnitError(f"cannot parse quantity {text!r}")
    return float(m.group(1)), m.group(2).strip()


def parse_time(text, default_unit: str | None = None) -> float:
    """Parse a time like '500 ns' into microseconds."""
    value, unit = _split(text)
    unit = unit or (default_unit or "")
    if not unit:
        raise UnitError(f"time {text!r} needs a unit suffix (ns/us/ms/s)")
    try:
        return value * _TIME_UNITS[unit.lower()]
    except KeyError:
        raise UnitError(f"unknown time unit {unit!r} in {text!r}") from None


def parse_rate(text, default_unit: str | None = None) -> float:
    """Parse an angular frequency or rate into rad/us.

    Accepts cycle frequencies ('1 GHz' -> 2 pi * 1e3 rad/us), angular rates
    ('6.28 rad/us'), and plain rates ('0.9 /us').
    """
    value, unit = _split(text)
    unit = unit or (default_unit or "")
    if not unit:
        raise UnitError(
            f"rate {text!r} needs a unit suffix (GHz/MHz/rad/us//us)"
        )
    key = unit.replace(" ", "")
    if key in _RATE_UNITS:
        return value * _RATE_UNITS[key]
    if key.lower() in _FREQ_UNITS:
        return value * _FREQ_UNITS[key.lower()]
    raise UnitError(f"unknown rate unit {unit!r} in {text!r}")
