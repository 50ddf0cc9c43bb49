"""Tiny helpers for sparse vectors stored as dict key -> Fraction.

Zero coefficients are always dropped, so equality of dicts is equality of
vectors.
"""

from __future__ import annotations

from fractions import Fraction


def add_into(acc: dict, key, coeff) -> None:
    if coeff == 0:
        return
    new = acc.get(key, 0) + coeff
    if new == 0:
        acc.pop(key, None)
    else:
        acc[key] = new


def combine(a: dict, b: dict, factor=1) -> dict:
    out = dict(a)
    for k, v in b.items():
        add_into(out, k, factor * v)
    return out


def scaled(a: dict, factor) -> dict:
    if factor == 0:
        return {}
    return {k: factor * v for k, v in a.items()}


def from_items(items) -> dict:
    out: dict = {}
    for k, v in items:
        add_into(out, k, v)
    return out
