"""Exact rational parsing and formatting.

All quantities in this package are `fractions.Fraction` values; floats are
never introduced.  Accepted text forms: integers ("3"), explicit fractions
("5/4"), and finite decimals ("0.75"), all parsed exactly.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import GraphFormatError


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", an integer, or a finite decimal into an exact Fraction."""
    token = text.strip()
    if not token:
        raise GraphFormatError("empty rational literal")
    try:
        if "/" in token:
            num, den = token.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise GraphFormatError(f"bad rational literal {token!r}") from exc


def format_rational(value: Fraction) -> str:
    """Canonical text form: "p" for integers, "p/q" otherwise."""
    return str(value)
