"""Local artinian test algebras and the Maurer-Cartan deformation functor.

The functor realized here sends a local artinian Q-algebra R with maximal
ideal m and a dg-Lie algebra g to the solutions of

    d x + (1/2) [x, x] = 0,        x in (m ⊗ g) of degree -1,

solved exactly, order by order along the powers of m.  At each stage the
obstruction to lifting is a class in H_{-2}(g) tensored with m^i/m^{i+1};
the solver records those classes and the polynomial constraints they impose
on the parameters of the lower stages.  Gauge orbits are computed where the
action is a translation (square-zero ideal, abelian relevant brackets, or a
trivial gauge group), which covers the classical tangent-space computations;
other cases are reported as not linearized rather than approximated.

A configuration switch selects the rescaled convention dx = [x, x] instead;
the two produce bijective solution sets over Q (x maps to -2x).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg, sparse
from .core import ChainComplex, GradedLinearMap, GradedVectorSpace, homology, zero_map
from .dgla import DgLieAlgebra, Violation
from .errors import (
    DglieError,
    MalformedInput,
    TargetMismatch,
    UnsupportedPresentation,
)
from .polynomials import Poly, poly_span_equal

TENSOR_SEPARATOR = "⊗"  # ⊗


# ---------------------------------------------------------------------------
# artinian algebras
# ---------------------------------------------------------------------------


class ArtinAlgebra:
    """Finite-dimensional commutative unital Q-algebra with augmentation.

    labels[0] names the unit.  product entries are (i, j, k, coeff); the
    augmentation is the list of values on basis elements.  Nothing is assumed
    valid until ``validate_artin`` has passed.
    """

    def __init__(self, labels, product_entries, augmentation):
        self.labels = tuple(labels)
        self.dimension = len(self.labels)
        if len(set(self.labels)) != self.dimension or self.dimension == 0:
            raise MalformedInput("basis labels must be nonempty and distinct")
        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for i, j, k, coeff in product_entries:
            i, j, k = int(i), int(j), int(k)
            if max(i, j, k) >= self.dimension:
                raise MalformedInput(f"product entry ({i},{j},{k}) out of range")
            vec = table.setdefault((i, j), {})
            sparse.add_into(vec, k, Fraction(coeff))
        self.table = {key: vec for key, vec in table.items() if vec}
        self.augmentation = tuple(Fraction(a) for a in augmentation)
        if len(self.augmentation) != self.dimension:
            raise MalformedInput("augmentation length must match the dimension")

    def unit_vector(self):
        v = [Fraction(0)] * self.dimension
        v[0] = Fraction(1)
        return v

    def basis_vector(self, i: int):
        v = [Fraction(0)] * self.dimension
        v[i] = Fraction(1)
        return v

    def multiply(self, a, b, zero=Fraction(0)):
        """Product of two coordinate vectors; works over Q or over Poly."""
        out = [zero] * self.dimension
        for (i, j), vec in self.table.items():
            ca = a[i]
            cb = b[j]
            if isinstance(ca, Fraction) and ca == 0:
                continue
            if isinstance(cb, Fraction) and cb == 0:
                continue
            prod = ca * cb
            for k, c in vec.items():
                out[k] = out[k] + c * prod
        return out

    def augment(self, a) -> Fraction:
        return sum((c * x for c, x in zip(self.augmentation, a)), Fraction(0))

    def maximal_ideal_rows(self):
        """RREF basis of ker(augmentation), as row vectors."""
        return linalg.kernel_basis([list(self.augmentation)], self.dimension)

    def ideal_power_rows(self, k: int):
        """RREF basis of m^k (m^0 = R)."""
        if k == 0:
            rows, _ = linalg.rref(linalg.identity(self.dimension))
            return rows
        current = self.maximal_ideal_rows()
        m_rows = current
        for _ in range(k - 1):
            products = [
                self.multiply(u, v) for u in m_rows for v in current
            ]
            current, _ = linalg.rref(products)
            if not current:
                return []
        reduced, _ = linalg.rref(current)
        return reduced

    def nilpotence_degree(self):
        """Smallest N <= dimension with m^N = 0, or None if there is none."""
        for n in range(1, self.dimension + 1):
            if not self.ideal_power_rows(n):
                return n
        return None

    def adapted_ideal_basis(self):
        """Basis of m adapted to the m-adic filtration: list of (vector, order).

        Vectors of adic order k span m^k modulo m^{k+1}; ordering is by
        ascending order, then by the RREF enumeration, so it is canonical.
        """
        n = self.nilpotence_degree()
        if n is None:
            raise MalformedInput("maximal ideal is not nilpotent")
        chosen: list[tuple[list[Fraction], int]] = []
        chosen_rows: list[list[Fraction]] = []
        for k in range(n - 1, 0, -1):
            for v in self.ideal_power_rows(k):
                stacked = chosen_rows + [v]
                if linalg.rank(stacked) > len(chosen_rows):
                    chosen.append((v, k))
                    chosen_rows.append(v)
        chosen.sort(key=lambda pair: pair[1])
        grouped: list[tuple[list[Fraction], int]] = []
        for order in range(1, n):
            grouped.extend(p for p in chosen if p[1] == order)
        return grouped

    def __eq__(self, other):
        return (
            isinstance(other, ArtinAlgebra)
            and self.labels == other.labels
            and self.table == other.table
            and self.augmentation == other.augmentation
        )

    def __repr__(self):
        return f"ArtinAlgebra({', '.join(self.labels)})"


@dataclass
class ArtinReport:
    ok: bool
    violations: list[Violation]
    nilpotence_degree: int | None


def validate_artin(R: ArtinAlgebra) -> ArtinReport:
    """Commutativity, associativity, unit, augmentation, and nilpotence of m."""
    violations: list[Violation] = []
    dim = R.dimension
    basis = [R.basis_vector(i) for i in range(dim)]
    unit = R.unit_vector()

    for i in range(dim):
        left = R.multiply(unit, basis[i])
        right = R.multiply(basis[i], unit)
        if left != basis[i] or right != basis[i]:
            violations.append(Violation("unit", (R.labels[i],), {}))
    for i in range(dim):
        for j in range(i + 1, dim):
            ab = R.multiply(basis[i], basis[j])
            ba = R.multiply(basis[j], basis[i])
            if ab != ba:
                violations.append(
                    Violation("commutativity", (R.labels[i], R.labels[j]), {})
                )
    for i, j, k in itertools.product(range(dim), repeat=3):
        left = R.multiply(R.multiply(basis[i], basis[j]), basis[k])
        right = R.multiply(basis[i], R.multiply(basis[j], basis[k]))
        if left != right:
            violations.append(
                Violation(
                    "associativity", (R.labels[i], R.labels[j], R.labels[k]), {}
                )
            )
    if R.augment(unit) != 1:
        violations.append(Violation("augmentation_unit", (R.labels[0],), {}))
    for i in range(dim):
        for j in range(dim):
            prod = R.multiply(basis[i], basis[j])
            if R.augment(prod) != R.augment(basis[i]) * R.augment(basis[j]):
                violations.append(
                    Violation(
                        "augmentation_multiplicative",
                        (R.labels[i], R.labels[j]),
                        {},
                    )
                )
    n = R.nilpotence_degree() if not violations else None
    if not violations and n is None:
        violations.append(Violation("nilpotence", (), {}))
    return ArtinReport(not violations, violations, n)


# ---------------------------------------------------------------------------
# algebra surjections and fiber products
# ---------------------------------------------------------------------------


class AlgebraSurjection:
    """Unital augmented algebra surjection, as a matrix on coordinates."""

    def __init__(self, source: ArtinAlgebra, target: ArtinAlgebra, matrix,
                 check=True):
        self.source = source
        self.target = target
        self.matrix = [[Fraction(x) for x in row] for row in matrix]
        if len(self.matrix) != target.dimension or any(
            len(row) != source.dimension for row in self.matrix
        ):
            raise MalformedInput("surjection matrix has the wrong shape")
        if check:
            problems = self.violations()
            if problems:
                raise MalformedInput(f"not an algebra surjection: {problems}")

    def apply(self, vec, zero=Fraction(0)):
        out = [zero] * self.target.dimension
        for r, row in enumerate(self.matrix):
            for c, x in enumerate(row):
                if x:
                    out[r] = out[r] + x * vec[c]
        return out

    def violations(self) -> list[str]:
        out = []
        src, tgt = self.source, self.target
        if self.apply(src.unit_vector()) != tgt.unit_vector():
            out.append("unit")
        for i in range(src.dimension):
            for j in range(src.dimension):
                lhs = self.apply(src.multiply(src.basis_vector(i), src.basis_vector(j)))
                rhs = tgt.multiply(
                    self.apply(src.basis_vector(i)), self.apply(src.basis_vector(j))
                )
                if lhs != rhs:
                    out.append(f"multiplicativity at ({src.labels[i]},{src.labels[j]})")
        for i in range(src.dimension):
            if tgt.augment(self.apply(src.basis_vector(i))) != src.augment(
                src.basis_vector(i)
            ):
                out.append(f"augmentation at {src.labels[i]}")
        if linalg.rank(self.matrix) < tgt.dimension:
            out.append("surjectivity")
        return out

    def compose(self, other: "AlgebraSurjection") -> "AlgebraSurjection":
        return AlgebraSurjection(
            other.source, self.target, linalg.mat_mul(self.matrix, other.matrix),
            check=False,
        )

    def __repr__(self):
        return f"AlgebraSurjection({self.source!r} -> {self.target!r})"


def identity_surjection(R: ArtinAlgebra) -> AlgebraSurjection:
    return AlgebraSurjection(R, R, linalg.identity(R.dimension), check=False)


@dataclass
class FiberProductResult:
    algebra: ArtinAlgebra
    proj0: AlgebraSurjection
    proj1: AlgebraSurjection
    basis_vectors: list[list[Fraction]]  # in R0 ⊕ R1 coordinates


def fiber_product(f0: AlgebraSurjection, f1: AlgebraSurjection) -> FiberProductResult:
    """R0 x_{R01} R1 with componentwise product and the two projections."""
    if f0.target != f1.target:
        raise TargetMismatch("surjections must share their target")
    R0, R1 = f0.source, f1.source
    n0, n1 = R0.dimension, R1.dimension
    matched = [
        f0.matrix[t] + [-x for x in f1.matrix[t]] for t in range(f0.target.dimension)
    ]
    unit = R0.unit_vector() + R1.unit_vector()
    # augmentation-ideal part: also impose vanishing augmentation
    aug_row = [list(R0.augmentation) + [Fraction(0)] * n1]
    ideal_part = linalg.kernel_basis(matched + aug_row, n0 + n1)
    basis_vectors = [unit] + ideal_part
    expected = n0 + n1 - f0.target.dimension
    if len(basis_vectors) != expected:
        raise MalformedInput(
            f"fiber product dimension {len(basis_vectors)} != {expected}; "
            f"are the maps really surjective?"
        )
    columns = linalg.transpose(basis_vectors)

    def coords(vec):
        sol = linalg.solve(columns, vec)
        if sol is None:
            raise MalformedInput("componentwise product left the fiber product")
        return sol

    labels = ["1"] + [f"x{t}" for t in range(1, len(basis_vectors))]
    entries = []
    for i, vi in enumerate(basis_vectors):
        for j, vj in enumerate(basis_vectors):
            prod = R0.multiply(vi[:n0], vj[:n0]) + R1.multiply(vi[n0:], vj[n0:])
            for k, c in enumerate(coords(prod)):
                if c:
                    entries.append((i, j, k, c))
    augmentation = [Fraction(1)] + [Fraction(0)] * (len(basis_vectors) - 1)
    algebra = ArtinAlgebra(labels, entries, augmentation)
    proj0 = AlgebraSurjection(
        algebra, R0, linalg.transpose([v[:n0] for v in basis_vectors]), check=False
    )
    proj1 = AlgebraSurjection(
        algebra, R1, linalg.transpose([v[n0:] for v in basis_vectors]), check=False
    )
    return FiberProductResult(algebra, proj0, proj1, basis_vectors)


# ---------------------------------------------------------------------------
# smallness certificates
# ---------------------------------------------------------------------------


@dataclass
class SmallStep:
    surjection: AlgebraSurjection
    kernel_vector: list[Fraction]

    def verify(self) -> bool:
        src = self.surjection.source
        if self.surjection.violations():
            return False
        if self.surjection.target.dimension != src.dimension - 1:
            return False
        if any(x for x in self.surjection.apply(self.kernel_vector)):
            return False
        if all(x == 0 for x in self.kernel_vector):
            return False
        for m_vec in src.maximal_ideal_rows():
            if any(x for x in src.multiply(m_vec, self.kernel_vector)):
                return False
        return True


@dataclass
class SmallnessCertificate:
    algebra: ArtinAlgebra
    steps: list[SmallStep]

    def verify(self) -> bool:
        if len(self.steps) != self.algebra.dimension - 1:
            return False
        if self.steps and self.steps[-1].surjection.target.dimension != 1:
            return False
        current = self.algebra
        for step in self.steps:
            if step.surjection.source is not current and not (
                step.surjection.source == current
            ):
                return False
            if not step.verify():
                return False
            current = step.surjection.target
        return True


def _epsilon_adapted_iso(R: ArtinAlgebra):
    """An isomorphic copy whose augmentation is (1, 0, ..., 0)."""
    if R.augmentation == tuple(
        [Fraction(1)] + [Fraction(0)] * (R.dimension - 1)
    ):
        return R, linalg.identity(R.dimension)
    columns = linalg.transpose([R.unit_vector()] + R.maximal_ideal_rows())
    if len(columns[0]) != R.dimension:
        raise MalformedInput("augmentation has no complement; not augmented?")
    labels = ["1"] + [f"x{t}" for t in range(1, R.dimension)]
    iso_rows = []
    for i in range(R.dimension):
        rhs = R.basis_vector(i)
        sol = linalg.solve(columns, rhs)
        if sol is None:
            raise MalformedInput("unit and maximal ideal do not span")
        iso_rows.append(sol)
    iso = linalg.transpose(iso_rows)  # coords in the new basis
    basis_vectors = [R.unit_vector()] + R.maximal_ideal_rows()
    entries = []
    for i, vi in enumerate(basis_vectors):
        for j, vj in enumerate(basis_vectors):
            prod = R.multiply(vi, vj)
            coords = linalg.mat_vec(iso, prod)
            for k, c in enumerate(coords):
                if c:
                    entries.append((i, j, k, c))
    augmentation = [Fraction(1)] + [Fraction(0)] * (R.dimension - 1)
    return ArtinAlgebra(labels, entries, augmentation), iso


def smallness_certificate(R: ArtinAlgebra) -> SmallnessCertificate:
    """Greedy socle peeling: quotient by a top-power line until the field.

    Each step kills one basis vector of the highest nonvanishing power of m;
    such a vector is annihilated by m, so the quotient map is an elementary
    (square-zero by Q) extension.  The chain has length dim R - 1.
    """
    report = validate_artin(R)
    if not report.ok:
        raise MalformedInput(f"not a valid artinian algebra: {report.violations[:3]}")
    steps: list[SmallStep] = []
    current, accumulated = _epsilon_adapted_iso(R)
    original: ArtinAlgebra | None = R
    while current.dimension > 1:
        n = current.nilpotence_degree()
        top_rows = current.ideal_power_rows(n - 1)
        v = top_rows[0]
        pivot = next(t for t in range(current.dimension) if v[t] != 0)
        if pivot == 0:
            raise DglieError("socle vector touches the unit; validator bug")
        keep = [t for t in range(current.dimension) if t != pivot]
        proj = linalg.zeros(current.dimension - 1, current.dimension)
        for r, t in enumerate(keep):
            proj[r][t] = Fraction(1)
            proj[r][pivot] = -v[t] / v[pivot]
        labels = [current.labels[t] for t in keep]
        entries = []
        for a, ta in enumerate(keep):
            for b, tb in enumerate(keep):
                prod = current.multiply(
                    current.basis_vector(ta), current.basis_vector(tb)
                )
                coords = linalg.mat_vec(proj, prod)
                for k, c in enumerate(coords):
                    if c:
                        entries.append((a, b, k, c))
        augmentation = [current.augmentation[t] for t in keep]
        quotient = ArtinAlgebra(labels, entries, augmentation)
        matrix = linalg.mat_mul(proj, accumulated)
        source = original if original is not None else current
        kernel = linalg.kernel_basis(matrix, source.dimension)
        if len(kernel) != 1:
            raise DglieError("elementary step kernel is not a line")
        steps.append(
            SmallStep(AlgebraSurjection(source, quotient, matrix, check=False),
                      kernel[0])
        )
        current = quotient
        accumulated = linalg.identity(current.dimension)
        original = None
    return SmallnessCertificate(R, steps)


# ---------------------------------------------------------------------------
# presentations, Spec points, Zariski tangent space
# ---------------------------------------------------------------------------


@dataclass
class Presentation:
    """Finitely presented augmented algebra Q[generators]/(relations).

    Relations are Polys in the generator variables; the augmentation sends
    every generator to 0, so relations must have zero constant term.
    """

    generators: list[str]
    relations: list[Poly]

    def __post_init__(self):
        gens = set(self.generators)
        for rel in self.relations:
            if rel.constant() != 0:
                raise MalformedInput("relation has a constant term; the origin is not a point")
            if not rel.variables() <= gens:
                raise MalformedInput("relation uses an undeclared generator")


MAX_RELATION_DEGREE = 6
MAX_GENERATORS = 8


def _check_presentation_bounds(pres: Presentation, max_degree, max_generators):
    if len(pres.generators) > max_generators:
        raise UnsupportedPresentation(
            f"{len(pres.generators)} generators exceed the bound {max_generators}"
        )
    for rel in pres.relations:
        if rel.degree() > max_degree:
            raise UnsupportedPresentation(
                f"relation degree {rel.degree()} exceeds the bound {max_degree}"
            )


@dataclass
class SpecPointsResult:
    variables: list[str]
    variable_table: dict[str, tuple[str, str]]  # var -> (generator, ideal label)
    equations: list[Poly]
    kind: str                       # "affine" | "empty" | "variety"
    parameter_dimension: int | None
    parametrization: dict[str, Poly]
    residual_equations: list[Poly]


def _resolve_constraints(equations: list[Poly]):
    """Solve linear and single-monomial constraints; return (subst, residual, empty).

    Substitutions are composed so that applying the returned mapping once to
    any polynomial in the original variables is fully reduced.
    """
    pending = [p for p in equations if not p.is_zero()]
    subst: dict[str, Poly] = {}
    residual: list[Poly] = []
    changed = True
    while changed:
        changed = False
        nxt: list[Poly] = []
        for p in pending + residual:
            p = p.substitute(subst)
            if p.is_zero():
                continue
            lin = p.linear()
            if lin is not None:
                const, coeffs = lin
                if not coeffs:
                    return subst, [p], True  # nonzero constant: inconsistent
                var = sorted(coeffs)[0]
                expr = Poly.const(-const / coeffs[var])
                for v, c in coeffs.items():
                    if v != var:
                        expr = expr - (c / coeffs[var]) * Poly.var(v)
                subst = {k: q.substitute({var: expr}) for k, q in subst.items()}
                subst[var] = expr
                changed = True
                continue
            terms = list(p.terms.items())
            if len(terms) == 1 and len(terms[0][0]) == 1:
                var = terms[0][0][0][0]  # c * v^k = 0 over a field: v = 0
                subst = {k: q.substitute({var: Poly()}) for k, q in subst.items()}
                subst[var] = Poly()
                changed = True
                continue
            nxt.append(p)
        pending, residual = [], nxt
    return subst, residual, False


def spec_points(pres: Presentation, R: ArtinAlgebra, max_degree=MAX_RELATION_DEGREE,
                max_generators=MAX_GENERATORS) -> SpecPointsResult:
    """Augmented algebra maps from the presented algebra into R.

    Generators range over the maximal ideal of R; the relations become an
    exact polynomial system in the coordinates, which is solved as far as
    linear and single-monomial constraints reach.  Residual equations are
    reported rather than approximated.
    """
    _check_presentation_bounds(pres, max_degree, max_generators)
    report = validate_artin(R)
    if not report.ok:
        raise MalformedInput("target is not a valid artinian algebra")
    m_basis = R.adapted_ideal_basis()
    variables: list[str] = []
    variable_table: dict[str, tuple[str, str]] = {}
    values: dict[str, list[Poly]] = {}
    for gen in pres.generators:
        vec = [Poly() for _ in range(R.dimension)]
        for j, (m_vec, _) in enumerate(m_basis):
            var = f"{gen}.m{j}"
            variables.append(var)
            variable_table[var] = (gen, _ideal_label(R, m_vec, j))
            for t, c in enumerate(m_vec):
                if c:
                    vec[t] = vec[t] + c * Poly.var(var)
        values[gen] = vec

    equations: list[Poly] = []
    unit_poly = _poly_vector_from(R.unit_vector())
    for rel in pres.relations:
        acc = [Poly() for _ in range(R.dimension)]
        for mono, coeff in sorted(rel.terms.items()):
            term = [p * coeff for p in unit_poly]
            for var, exp in mono:
                for _ in range(exp):
                    term = R.multiply(term, values[var], zero=Poly())
            acc = [a + t for a, t in zip(acc, term)]
        equations.extend(p for p in acc if not p.is_zero())

    subst, residual, empty = _resolve_constraints(equations)
    if empty:
        return SpecPointsResult(variables, variable_table, equations, "empty",
                                None, {}, residual)
    parametrization = {
        v: subst.get(v, Poly.var(v)) for v in variables
    }
    if residual:
        return SpecPointsResult(variables, variable_table, equations, "variety",
                                None, parametrization, residual)
    free = sorted(
        {v for p in parametrization.values() for v in p.variables()}
        | {v for v in variables if v not in subst}
    )
    return SpecPointsResult(variables, variable_table, equations, "affine",
                            len(free), parametrization, [])


def _poly_vector_from(vec) -> list[Poly]:
    return [Poly.const(c) if c else Poly() for c in vec]


def _ideal_label(R: ArtinAlgebra, m_vec, j: int) -> str:
    hits = [t for t, c in enumerate(m_vec) if c]
    if len(hits) == 1 and m_vec[hits[0]] == 1:
        return R.labels[hits[0]]
    return f"m{j}"


def zariski_tangent(pres: Presentation, max_degree=MAX_RELATION_DEGREE,
                    max_generators=MAX_GENERATORS):
    """dim (m/m^2)^dual at the augmentation point, with a kernel basis.

    Computed from the Jacobian of the relations at the origin: the tangent
    space is the null space of the linear parts.
    """
    _check_presentation_bounds(pres, max_degree, max_generators)
    gens = pres.generators
    rows = []
    for rel in pres.relations:
        row = [Fraction(0)] * len(gens)
        for mono, coeff in rel.terms.items():
            if len(mono) == 1 and mono[0][1] == 1:
                row[gens.index(mono[0][0])] = coeff
        rows.append(row)
    if not gens:
        return 0, []
    basis = linalg.kernel_basis(rows, len(gens))
    return len(basis), basis


# ---------------------------------------------------------------------------
# tensor dg-Lie algebra m_R ⊗ g
# ---------------------------------------------------------------------------


class TensorDgla(DgLieAlgebra):
    """m_R ⊗ g with differential 1 ⊗ d and bracket [a⊗x, b⊗y] = ab ⊗ [x,y].

    Carries the bookkeeping from its basis keys back to (adapted ideal basis
    index, g basis key) pairs, plus the adic order of each ideal vector.
    """

    def __init__(self, artin: ArtinAlgebra, lie: DgLieAlgebra):
        self.artin = artin
        self.lie = lie
        self.m_vectors = artin.adapted_ideal_basis()
        m_dim = len(self.m_vectors)
        g_space = lie.space

        basis: dict[int, list[str]] = {}
        self.pair_of: dict[tuple, tuple[int, tuple]] = {}
        self.key_of: dict[tuple[int, tuple], tuple] = {}
        for p in g_space.support:
            labels = []
            for j in range(m_dim):
                m_label = _ideal_label(artin, self.m_vectors[j][0], j)
                for i, g_label in enumerate(g_space.labels(p)):
                    key = (p, len(labels))
                    labels.append(f"{m_label}{TENSOR_SEPARATOR}{g_label}")
                    self.pair_of[key] = (j, (p, i))
                    self.key_of[(j, (p, i))] = key
            if labels:
                basis[p] = labels
        space = GradedVectorSpace(basis)

        blocks: dict[int, list[list[Fraction]]] = {}
        for key, (j, gk) in self.pair_of.items():
            for gk2, c in lie.d_key(gk).items():
                deg = key[0]
                mat = blocks.setdefault(
                    deg, linalg.zeros(space.dim(deg - 1), space.dim(deg))
                )
                mat[self.key_of[(j, gk2)][1]][key[1]] += c
        cx = ChainComplex(space, GradedLinearMap(space, space, -1, blocks),
                          check=False)

        m_columns = linalg.transpose([v for v, _ in self.m_vectors])
        entries = []
        pairs = sorted(self.pair_of.items())
        for key_a, (ja, gka) in pairs:
            for key_b, (jb, gkb) in pairs:
                bracket = lie.bracket_keys(gka, gkb)
                if not bracket:
                    continue
                prod = artin.multiply(self.m_vectors[ja][0], self.m_vectors[jb][0])
                if all(x == 0 for x in prod):
                    continue
                coords = linalg.solve(m_columns, prod)
                if coords is None:
                    raise MalformedInput("ideal product left the ideal; invalid algebra")
                for l, cm in enumerate(coords):
                    if not cm:
                        continue
                    for gk2, cg in bracket.items():
                        entries.append(
                            (key_a, key_b, self.key_of[(l, gk2)][1], cm * cg)
                        )
        super().__init__(cx, entries)

    def order_of_key(self, key) -> int:
        j, _ = self.pair_of[key]
        return self.m_vectors[j][1]


def tensor_dgla(R: ArtinAlgebra, g: DgLieAlgebra) -> TensorDgla:
    return TensorDgla(R, g)


# ---------------------------------------------------------------------------
# Maurer-Cartan solver
# ---------------------------------------------------------------------------


@dataclass
class MCStage:
    order: int
    new_params: list[str]
    constraints: list[Poly]
    obstruction_classes: dict[int, list[Poly]]  # ideal index -> class over H reps


@dataclass
class MCSolvedProblem:
    """Exact staged solution of dx + (1/2)[x,x] = 0 in (m ⊗ g)_{-1}."""

    algebra: ArtinAlgebra
    lie: DgLieAlgebra
    tensor: TensorDgla
    convention: str
    variables: list[str]
    var_key: dict[str, tuple]
    system: list[tuple[tuple, Poly]]
    stages: list[MCStage]
    solution: dict[str, Poly]
    parameters: list[str]
    residual_constraints: list[Poly]
    homology_reps: list[list[Fraction]]

    @property
    def is_full(self) -> bool:
        """True when every stage lifted without constraints (full lift tree)."""
        return not self.residual_constraints and all(
            not s.constraints for s in self.stages
        )

    def obstruction_at(self, values: dict[str, Fraction]):
        """Evaluate stage constraints at given parameter values.

        Returns (order, class values) of the first stage whose obstruction
        class is a nonzero constant under the partial assignment, or None.
        """
        mapping = {v: Poly.const(c) for v, c in values.items()}
        for stage in self.stages:
            evaluated = {}
            obstructed = False
            for j, classes in stage.obstruction_classes.items():
                vals = [p.substitute(mapping) for p in classes]
                evaluated[j] = vals
                for p in vals:
                    if p.is_zero():
                        continue
                    if not p.variables():
                        obstructed = True
            if obstructed:
                return stage.order, evaluated
        return None

    def solution_point(self, values: dict[str, Fraction]) -> dict[tuple, Fraction]:
        """A concrete ambient point from parameter values (unset params = 0)."""
        out = {}
        for var, poly in self.solution.items():
            filled = {v: values.get(v, Fraction(0)) for v in poly.variables()}
            c = poly.evaluate(filled)
            if c:
                out[self.var_key[var]] = c
        return out


def _reduce_poly_vector(vec: list[Poly], rows, pivots) -> list[Poly]:
    out = list(vec)
    for row, p in zip(rows, pivots):
        coeff = out[p]
        if not coeff.is_zero():
            out = [x - coeff * Fraction(c) for x, c in zip(out, row)]
    return out


def _solve_linear_poly(mat, rhs: list[Poly], ncols: int):
    """Solve A x = rhs with Fraction matrix and Poly right-hand side."""
    rows = [list(r) for r in mat]
    b = list(rhs)
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        b[r], b[pivot_row] = b[pivot_row], b[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [x / pv for x in rows[r]]
            b[r] = b[r] * (Fraction(1) / pv)
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                b[i] = b[i] - f * b[r]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if not b[i].is_zero():
            return None
    x = [Poly() for _ in range(ncols)]
    for row_idx, p in enumerate(pivots):
        x[p] = b[row_idx]
    return x


def mc_elements(R: ArtinAlgebra, g: DgLieAlgebra,
                convention: str = "standard") -> MCSolvedProblem:
    """Solve the Maurer-Cartan equation in (m_R ⊗ g)_{-1}, order by order.

    convention "standard" solves dx + (1/2)[x,x] = 0; "paper-literal" solves
    dx - [x,x] = 0 (the two solution sets are exchanged by x -> -2x).
    """
    if convention not in ("standard", "paper-literal"):
        raise MalformedInput(f"unknown convention {convention!r}")
    bracket_factor = Fraction(1, 2) if convention == "standard" else Fraction(-1)
    t = tensor_dgla(R, g)

    amb_keys = [(-1, i) for i in range(t.space.dim(-1))]
    variables = []
    var_key = {}
    key_var = {}
    for key in amb_keys:
        j, gk = t.pair_of[key]
        var = f"c{j}_{gk[1]}"
        variables.append(var)
        var_key[var] = key
        key_var[key] = var

    # assemble the quadratic system on the degree -2 components
    system_map: dict[tuple, Poly] = {}
    for key in amb_keys:
        for k2, c in t.d_key(key).items():
            system_map[k2] = system_map.get(k2, Poly()) + c * Poly.var(key_var[key])
    for ka in amb_keys:
        for kb in amb_keys:
            for k2, c in t.bracket_keys(ka, kb).items():
                system_map[k2] = system_map.get(k2, Poly()) + (
                    bracket_factor * c
                ) * Poly.var(key_var[ka]) * Poly.var(key_var[kb])
    system = sorted(
        ((k, p) for k, p in system_map.items() if not p.is_zero()),
        key=lambda kp: kp[0],
    )

    # homology data of g at degree -2
    h_dim, h_reps = homology(g.complex, -2)
    d_block = g.complex.d(-1)  # g_{-1} -> g_{-2}
    im_rows, im_pivots = linalg.rref(linalg.transpose(d_block))
    rep_pivots = []
    for rep in h_reps:
        rep_pivots.append(next(i for i, x in enumerate(rep) if x != 0))

    max_order = max((o for _, o in t.m_vectors), default=0)
    g_minus1 = g.space.dim(-1)
    g_minus2 = g.space.dim(-2)

    stages: list[MCStage] = []
    solution: dict[str, Poly] = {}
    global_subst: dict[str, Poly] = {}
    residual: list[Poly] = []

    def current(poly: Poly) -> Poly:
        return poly.substitute(solution).substitute(global_subst)

    for order in range(1, max_order + 1):
        ideal_indices = [
            j for j, (_, o) in enumerate(t.m_vectors) if o == order
        ]
        new_params: list[str] = []
        stage_constraints: list[Poly] = []
        obstruction: dict[int, list[Poly]] = {}
        # first pass: obstruction classes per ideal direction of this order
        stage_rhs: dict[int, list[Poly]] = {}
        for j in ideal_indices:
            q = [Poly() for _ in range(g_minus2)]
            for key, poly in system:
                kj, gk = t.pair_of[key]
                if kj != j:
                    continue
                rest = current(
                    poly.substitute(
                        {key_var[t.key_of[(j, (-1, i))]]: Poly()
                         for i in range(g_minus1)
                         if t.key_of.get((j, (-1, i))) is not None}
                    )
                )
                q[gk[1]] = rest
            target = [-p for p in q]
            reduced = _reduce_poly_vector(target, im_rows, im_pivots)
            classes = []
            for rep, piv in zip(h_reps, rep_pivots):
                coeff = reduced[piv]
                classes.append(coeff)
                reduced = [x - coeff * Fraction(c) for x, c in zip(reduced, rep)]
            obstruction[j] = classes
            leftovers = [p for p in reduced if not p.is_zero()]
            stage_constraints.extend(p for p in classes if not p.is_zero())
            stage_constraints.extend(leftovers)
            stage_rhs[j] = target
        # second pass: impose the constraints, then solve each block
        if stage_constraints:
            subst, res, empty = _resolve_constraints(stage_constraints)
            if empty:
                raise DglieError("MC system inconsistent; zero is always a solution")
            residual.extend(res)
            global_subst = {
                k: p.substitute(subst) for k, p in global_subst.items()
            }
            global_subst.update(subst)
            solution = {v: p.substitute(subst) for v, p in solution.items()}
        reduced_d, d_pivots = linalg.rref(d_block)
        free_cols = [c for c in range(g_minus1) if c not in set(d_pivots)]
        kernel = linalg.kernel_basis(d_block, g_minus1)
        for j in ideal_indices:
            if residual:
                continue  # cannot stage past unresolved constraints
            target = [p.substitute(global_subst) for p in stage_rhs[j]]
            particular = _solve_linear_poly(d_block, target, g_minus1)
            if particular is None:
                raise DglieError("stage solvability lost after constraints")
            for i in range(g_minus1):
                var = key_var[t.key_of[(j, (-1, i))]]
                expr = particular[i]
                for fc, vec in zip(free_cols, kernel):
                    if vec[i]:
                        pvar = key_var[t.key_of[(j, (-1, fc))]]
                        expr = expr + Fraction(vec[i]) * Poly.var(pvar)
                solution[var] = expr
            for fc in free_cols:
                new_params.append(key_var[t.key_of[(j, (-1, fc))]])
        stages.append(MCStage(order, new_params, stage_constraints, obstruction))

    # final parametrization and verification
    params = []
    for var in variables:
        if var not in solution and var not in global_subst:
            solution[var] = Poly.var(var)
    solution = {v: p.substitute(global_subst) for v, p in solution.items()}
    seen = set()
    for var in variables:
        for v in solution[var].variables():
            if v not in seen:
                seen.add(v)
    params = [v for v in variables if v in seen]
    solved = MCSolvedProblem(
        R, g, t, convention, variables, var_key, system, stages, solution,
        params, residual, h_reps,
    )
    if not residual:
        for _, poly in system:
            check = poly.substitute(solution)
            if not check.is_zero():
                raise DglieError("MC solution fails to satisfy the system")
    return solved


# ---------------------------------------------------------------------------
# gauge quotient and tangent spaces
# ---------------------------------------------------------------------------


@dataclass
class GaugeOrbits:
    kind: str  # "linear" | "trivial-group" | "not-linearized"
    dimension: int | None
    representative_directions: list[list[Fraction]] | None
    basepoint: list[Fraction] | None


@dataclass
class DeformationValue:
    mc_solutions: MCSolvedProblem
    gauge_orbits: GaugeOrbits
    tangent_dimension: int | None


def _affine_family(solved: MCSolvedProblem):
    """(basepoint, directions by parameter) when the family is affine."""
    if solved.residual_constraints:
        return None
    n = len(solved.variables)
    x0 = [Fraction(0)] * n
    directions: dict[str, list[Fraction]] = {p: [Fraction(0)] * n
                                             for p in solved.parameters}
    for idx, var in enumerate(solved.variables):
        poly = solved.solution[var]
        lin = poly.linear()
        if lin is None:
            return None
        const, coeffs = lin
        x0[idx] = const
        for v, c in coeffs.items():
            directions[v][idx] = c
    return x0, [directions[p] for p in solved.parameters]


def gauge_quotient(solved: MCSolvedProblem) -> DeformationValue:
    """Orbit description of the MC solutions under the unipotent gauge group.

    Exact in the cases where the action is an affine translation x -> x - da
    (square-zero ideal, relevant brackets abelian) or the gauge group is
    trivial; otherwise the orbits are reported as not linearized.
    """
    t = solved.tensor
    gauge_dim = t.space.dim(0)
    amb_dim = t.space.dim(-1)
    family = _affine_family(solved)

    if gauge_dim == 0:
        dim = len(solved.parameters) if family is not None else None
        orbits = GaugeOrbits(
            "trivial-group",
            dim,
            family[1] if family else None,
            family[0] if family else None,
        )
        return DeformationValue(solved, orbits, dim)

    action_is_translation = True
    for i in range(gauge_dim):
        for j in range(amb_dim):
            if t.bracket_keys((0, i), (-1, j)):
                action_is_translation = False
        for j in range(gauge_dim):
            if t.bracket_keys((0, i), (0, j)):
                action_is_translation = False

    if not action_is_translation or family is None:
        return DeformationValue(
            solved, GaugeOrbits("not-linearized", None, None, None), None
        )

    x0, directions = family
    boundaries = []
    for i in range(gauge_dim):
        dvec = t.d_key((0, i))
        row = [Fraction(0)] * amb_dim
        for (deg, idx), c in dvec.items():
            if deg == -1:
                row[idx] = c
        boundaries.append(row)
    b_rows, b_pivots = linalg.rref(boundaries)
    reduced_dirs = []
    for row in directions:
        res = linalg.row_reduce_vector(row, b_rows, b_pivots)
        if any(x != 0 for x in res):
            reduced_dirs.append(res)
    reps, _ = linalg.rref(reduced_dirs)
    base = linalg.row_reduce_vector(x0, b_rows, b_pivots)
    dim = len(reps)
    return DeformationValue(
        solved, GaugeOrbits("linear", dim, reps, base), dim
    )


def tangent_space(g: DgLieAlgebra) -> int:
    """dim H_{-1}(g), computed by both the MC route and the homology route."""
    h_dim, _ = homology(g.complex, -1)
    dual = truncated_polynomial_algebra(2)
    value = gauge_quotient(mc_elements(dual, g))
    if value.tangent_dimension != h_dim:
        raise DglieError(
            f"tangent space mismatch: MC route {value.tangent_dimension}, "
            f"homology route {h_dim}"
        )
    return h_dim


# ---------------------------------------------------------------------------
# fiber-product commutation of MC solution sets
# ---------------------------------------------------------------------------


@dataclass
class FiberCheckReport:
    ok: bool
    fiber_dimension: int
    system_sizes: tuple[int, int, int]


def _mc_system_polys(R: ArtinAlgebra, g: DgLieAlgebra):
    solved = mc_elements(R, g)
    return solved, [p for _, p in solved.system]


def _projection_substitution(proj: AlgebraSurjection, fp_solved: MCSolvedProblem,
                             side_solved: MCSolvedProblem):
    """Map side-system variables to linear expressions in fiber variables."""
    t_fp = fp_solved.tensor
    t_side = side_solved.tensor
    side_columns = linalg.transpose([v for v, _ in t_side.m_vectors])
    mapping: dict[str, Poly] = {}
    for var in side_solved.variables:
        mapping[var] = Poly()
    for fp_var in fp_solved.variables:
        j, gk = t_fp.pair_of[fp_solved.var_key[fp_var]]
        image = proj.apply(t_fp.m_vectors[j][0])
        coords = linalg.solve(side_columns, image)
        if coords is None:
            raise DglieError("projection left the ideal")
        for l, c in enumerate(coords):
            if not c:
                continue
            side_key = t_side.key_of.get((l, gk))
            if side_key is None:
                continue
            side_var = next(
                v for v, k in side_solved.var_key.items() if k == side_key
            )
            mapping[side_var] = mapping[side_var] + c * Poly.var(fp_var)
    return mapping


def mc_fiber_product_check(f0: AlgebraSurjection, f1: AlgebraSurjection,
                           g: DgLieAlgebra) -> FiberCheckReport:
    """Set-level pullback property of the MC functor on a fiber product.

    Verifies that the MC polynomial system of R0 x_{R01} R1 has the same
    Q-linear span as the union of the pulled-back systems of R0 and R1 after
    the coordinate identification, which proves the solution sets are equal.
    """
    result = fiber_product(f0, f1)
    fp_solved, fp_polys = _mc_system_polys(result.algebra, g)
    s0_solved, s0_polys = _mc_system_polys(f0.source, g)
    s1_solved, s1_polys = _mc_system_polys(f1.source, g)
    map0 = _projection_substitution(result.proj0, fp_solved, s0_solved)
    map1 = _projection_substitution(result.proj1, fp_solved, s1_solved)
    pulled = [p.substitute(map0) for p in s0_polys] + [
        p.substitute(map1) for p in s1_polys
    ]
    ok = poly_span_equal(fp_polys, pulled)
    return FiberCheckReport(
        ok, result.algebra.dimension,
        (len(fp_polys), len(s0_polys), len(s1_polys)),
    )


def induced_mc_map(surj: AlgebraSurjection, g: DgLieAlgebra):
    """Variable substitution sending MC data over the source to the target.

    Returns (source solved, target solved, mapping) where mapping expresses
    each target-side variable as a linear form in source-side variables, so
    that composing a source solution family with it lands in the target
    solution set.
    """
    src_solved = mc_elements(surj.source, g)
    tgt_solved = mc_elements(surj.target, g)
    t_src = src_solved.tensor
    t_tgt = tgt_solved.tensor
    tgt_columns = linalg.transpose([v for v, _ in t_tgt.m_vectors])
    mapping: dict[str, Poly] = {v: Poly() for v in tgt_solved.variables}
    for var in src_solved.variables:
        j, gk = t_src.pair_of[src_solved.var_key[var]]
        image = surj.apply(t_src.m_vectors[j][0])
        if all(x == 0 for x in image):
            continue
        coords = linalg.solve(tgt_columns, image)
        if coords is None:
            raise DglieError("surjection does not respect the ideals")
        for l, c in enumerate(coords):
            if not c:
                continue
            tgt_key = t_tgt.key_of.get((l, gk))
            if tgt_key is None:
                continue
            tvar = next(v for v, k in tgt_solved.var_key.items() if k == tgt_key)
            mapping[tvar] = mapping[tvar] + c * Poly.var(var)
    return src_solved, tgt_solved, mapping


# ---------------------------------------------------------------------------
# stock algebras
# ---------------------------------------------------------------------------


def rational_field() -> ArtinAlgebra:
    return ArtinAlgebra(["1"], [(0, 0, 0, 1)], [Fraction(1)])


def truncated_polynomial_algebra(n: int, var: str = "t") -> ArtinAlgebra:
    """Q[var]/(var^n); n = 2 is the dual numbers."""
    if n < 1:
        raise MalformedInput("need n >= 1")
    labels = ["1"] + [var if k == 1 else f"{var}^{k}" for k in range(1, n)]
    entries = []
    for i in range(n):
        for j in range(n):
            if i + j < n:
                entries.append((i, j, i + j, 1))
    augmentation = [Fraction(1)] + [Fraction(0)] * (n - 1)
    return ArtinAlgebra(labels, entries, augmentation)


def square_zero_algebra(ideal_labels) -> ArtinAlgebra:
    """Q ⊕ V with V·V = 0; for two labels this is Q[x,y]/(x,y)^2."""
    labels = ["1"] + list(ideal_labels)
    n = len(labels)
    entries = []
    for i in range(n):
        entries.append((0, i, i, 1))
        if i:
            entries.append((i, 0, i, 1))
    augmentation = [Fraction(1)] + [Fraction(0)] * (n - 1)
    return ArtinAlgebra(labels, entries, augmentation)


def truncation_surjection(src: ArtinAlgebra, tgt: ArtinAlgebra) -> AlgebraSurjection:
    """Label-matching surjection (e.g. Q[t]/(t^3) -> Q[t]/(t^2))."""
    matrix = linalg.zeros(tgt.dimension, src.dimension)
    for c, label in enumerate(src.labels):
        if label in tgt.labels:
            matrix[tgt.labels.index(label)][c] = Fraction(1)
    return AlgebraSurjection(src, tgt, matrix)


def augmentation_surjection(R: ArtinAlgebra) -> AlgebraSurjection:
    return AlgebraSurjection(R, rational_field(), [list(R.augmentation)])
