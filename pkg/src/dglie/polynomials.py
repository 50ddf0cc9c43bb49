"""Multivariate polynomials over Q with string variables.

Just enough exact polynomial arithmetic for the deformation-theory solvers:
addition, multiplication, substitution, degree, and linear-part extraction.
Monomials are canonical sorted tuples of (variable, exponent) pairs.
"""

from __future__ import annotations

from fractions import Fraction

Monomial = tuple  # sorted tuple of (var, exponent)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict[str, int] = {}
    for v, e in a:
        exps[v] = exps.get(v, 0) + e
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in exps.items() if e))


class Poly:
    """Immutable polynomial; supports +, -, *, ** and substitution."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[tuple(mono)] = clean.get(tuple(mono), Fraction(0)) + c
        object.__setattr__(self, "terms", {m: c for m, c in clean.items() if c})

    def __setattr__(self, *_):
        raise AttributeError("Poly is immutable")

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): Fraction(1)})

    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly.const(1)
        for _ in range(int(n)):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e for _, e in m) for m in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def linear(self):
        """(constant, {var: coeff}) when degree <= 1, else None."""
        if self.degree() > 1:
            return None
        coeffs = {}
        for m, c in self.terms.items():
            if m:
                coeffs[m[0][0]] = c
        return self.constant(), coeffs

    def substitute(self, mapping: dict[str, "Poly"]) -> "Poly":
        out = Poly()
        for m, c in self.terms.items():
            term = Poly.const(c)
            for v, e in m:
                base = mapping.get(v)
                if base is None:
                    base = Poly.var(v)
                term = term * base ** e
            out = out + term
        return out

    def evaluate(self, values: dict[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                if v not in values:
                    raise KeyError(f"no value for variable {v}")
                val *= Fraction(values[v]) ** e
            total += val
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if mono:
                parts.append(f"{c}*{mono}" if c != 1 else mono)
            else:
                parts.append(str(c))
        return " + ".join(parts)


def poly_span_equal(polys_a: list[Poly], polys_b: list[Poly]) -> bool:
    """Whether two finite sets of polynomials have the same Q-linear span."""
    from . import linalg

    monos = sorted(
        {m for p in polys_a for m in p.terms} | {m for p in polys_b for m in p.terms}
    )
    col = {m: j for j, m in enumerate(monos)}

    def rows(polys):
        out = []
        for p in polys:
            row = [Fraction(0)] * len(monos)
            for m, c in p.terms.items():
                row[col[m]] = c
            out.append(row)
        return out

    ra, rb = rows(polys_a), rows(polys_b)
    rank_a = linalg.rank(ra)
    rank_b = linalg.rank(rb)
    return rank_a == rank_b == linalg.rank(ra + rb)
