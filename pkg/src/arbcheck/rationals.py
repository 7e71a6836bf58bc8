"""Exact rational values.

Everything in this library is a `fractions.Fraction`: always in lowest terms
with a positive denominator, exact under +, -, *, / and comparison.  Floats
are rejected everywhere, including decimal strings like "0.5"; the accepted
text forms are "p/q" and plain integers.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Vec = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value: Fraction | int | str) -> Fraction:
    """Convert an exact input to a Fraction, rejecting anything inexact."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE"):
            raise ValueError(f"not an exact rational literal: {value!r}")
        return Fraction(text)
    raise TypeError(f"exact rational expected, got {type(value).__name__}")


def rat_str(value: Fraction) -> str:
    """Render as "p/q" or "p", the inverse of :func:`rat`."""
    return str(value)


def vec(*entries: Fraction | int | str) -> Vec:
    return tuple(rat(e) for e in entries)


def as_vec(entries) -> Vec:
    return tuple(rat(e) for e in entries)


def vzero(n: int) -> Vec:
    return (ZERO,) * n


def vadd(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vsub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vneg(u: Vec) -> Vec:
    return tuple(-a for a in u)


def vscale(c: Fraction, u: Vec) -> Vec:
    return tuple(c * a for a in u)


def dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), ZERO)


def is_zero_vec(u: Vec) -> bool:
    return all(a == 0 for a in u)


def primitive(u: Vec) -> Vec:
    """Scale a rational vector to a primitive integer vector.

    The first nonzero entry keeps its sign; the zero vector is returned as is.
    Used to canonicalize rays and hyperplane normals so duplicates collapse.
    """
    if is_zero_vec(u):
        return u
    denom_lcm = 1
    for a in u:
        denom_lcm = denom_lcm * a.denominator // gcd(denom_lcm, a.denominator)
    ints = [int(a * denom_lcm) for a in u]
    g = 0
    for value in ints:
        g = gcd(g, abs(value))
    return tuple(Fraction(value // g) for value in ints)
