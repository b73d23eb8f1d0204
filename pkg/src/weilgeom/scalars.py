"""Scalar modes: exact rationals (``Fraction``) and IEEE doubles (``float``).

Every algebra in this package is generic over its coefficient ring; the mode
of a computation is simply the Python type of the innermost coefficients.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT64 = "float64"
MODES = (EXACT, FLOAT64)

DEFAULT_RTOL = 1e-9

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")


class ExactModeError(ValueError):
    """A value with no exact rational representation was requested."""


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown scalar mode {mode!r}; expected one of {MODES}")
    return mode


def parse_scalar(text: str, mode: str = EXACT) -> Scalar:
    """Parse ``"p/q"``, an integer, or a finite decimal literal."""
    text = str(text).strip()
    m = _RATIONAL.match(text)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        value = Fraction(int(m.group(1)), den)
    elif _DECIMAL.match(text):
        value = Fraction(text)
    else:
        raise ValueError(f"not a rational or decimal literal: {text!r}")
    return convert(value, mode)


def convert(x, mode: str) -> Scalar:
    if mode == EXACT:
        if isinstance(x, float):
            raise ExactModeError(f"float {x!r} in exact mode")
        return Fraction(x)
    return float(x)


def format_scalar(x) -> str:
    """Serialize a scalar; rationals are always ``p/q`` in lowest terms."""
    if isinstance(x, float):
        return repr(x)
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Return the rational square root of ``x`` if it has one, else ``None``."""
    x = Fraction(x)
    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


def sqrt(x: Scalar) -> Scalar:
    if is_exact(x):
        r = exact_sqrt(x)
        if r is None:
            raise ExactModeError(f"{format_scalar(x)} has no rational square root")
        return r
    return math.sqrt(x)


def close(a: Scalar, b: Scalar, rtol: float = DEFAULT_RTOL, scale: float = 1.0) -> bool:
    """Exact equality for rationals, relative tolerance otherwise."""
    if is_exact(a) and is_exact(b):
        return a == b
    a, b = float(a), float(b)
    return abs(a - b) <= rtol * max(scale, abs(a), abs(b))


def is_zero(x: Scalar, rtol: float = DEFAULT_RTOL, scale: float = 1.0) -> bool:
    if is_exact(x):
        return x == 0
    return abs(float(x)) <= rtol * scale
