"""Exact rational parsing and formatting shared by the frontend, cache and backends."""

from __future__ import annotations

import re
from fractions import Fraction

_DECIMAL = re.compile(r"^(-?)(\d+)(?:\.(\d+))?$")
_RATIO = re.compile(r"^(-?\d+)/(\d+)$")


def parse_rational(text: str) -> Fraction:
    """Parse ``3.25``, ``-7``, or ``13/4`` exactly. Floats are never involved."""
    s = text.strip()
    m = _DECIMAL.match(s)
    if m:
        sign, whole, frac = m.groups()
        q = Fraction(int(whole + (frac or "")), 10 ** len(frac or ""))
        return -q if sign else q
    m = _RATIO.match(s)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)
    raise ValueError(f"not a rational literal: {text!r}")


def terminating_digits(q: Fraction) -> int | None:
    """Number of decimal places needed to write ``q`` exactly, or None if it repeats."""
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    return max(twos, fives) if d == 1 else None


def format_decimal(q: Fraction, force_point: bool = False) -> str | None:
    """Exact decimal text for ``q`` (``13/4`` -> ``3.25``), or None when it does not terminate."""
    places = terminating_digits(q)
    if places is None:
        return None
    sign = "-" if q < 0 else ""
    a = abs(q)
    if places == 0:
        text = str(a.numerator)
        return sign + (text + ".0" if force_point else text)
    scaled = a.numerator * (10**places) // a.denominator
    whole, frac = divmod(scaled, 10**places)
    return f"{sign}{whole}.{str(frac).rjust(places, '0')}"


def format_ratio(q: Fraction) -> str:
    """Lowest-terms ``p/q`` with optional leading minus; integers keep the ``/1``."""
    return f"{q.numerator}/{q.denominator}"
