"""Exact rational parsing and formatting ("p/q" strings)."""

from fractions import Fraction
from typing import Union

from .errors import InputError

RationalLike = Union[Fraction, int, str]


def parse_rational(value: RationalLike) -> Fraction:
    """
    Parse a rational from a "p/q" or "n" string (or an int / Fraction).

    Floats are rejected: they cannot be represented losslessly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"Rational must be given as 'p/q' string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise InputError(f"Rational must be given as 'p/q' string, got {value!r}")
    text = value.strip()
    if "." in text or "e" in text.lower():
        raise InputError(f"Rational must be 'p/q' or 'n', got {value!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"Invalid rational: {value!r}")


def format_rational(value: RationalLike) -> str:
    """Format a rational as "p/q" in lowest terms with q > 0 (always with the slash)."""
    frac = parse_rational(value)
    return f"{frac.numerator}/{frac.denominator}"
