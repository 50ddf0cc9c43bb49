"""Differential graded Lie algebras presented by structure constants.

A dg-Lie algebra here is a chain complex (g, d) plus a bracket given by a
finite table of structure constants on basis elements.  The axioms checked by
``validate_dgla`` are, for x in degree p, y in degree q, z in degree l:

    antisymmetry   [x,y] + (-1)^{pq} [y,x] = 0
    Jacobi         (-1)^{pl}[x,[y,z]] + (-1)^{pq}[y,[z,x]] + (-1)^{ql}[z,[x,y]] = 0
    derivation     d[x,y] = [dx,y] + (-1)^p [x,dy]

No [x,x] = 0 axiom is imposed beyond what antisymmetry forces: over Q the
square of an even element must vanish, while [x,x] of an odd element may be
nonzero.

Structure constants are stored once per ordered basis pair (x, y) with
x <= y in the (degree, index) order, plus the diagonal x = y in odd degrees;
the remaining values are derived from antisymmetry.  The raw input table is
kept as well so that the validator can detect inconsistent two-sided input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg, sparse
from .core import (
    ChainComplex,
    ChainMap,
    GradedLinearMap,
    GradedVectorSpace,
    homology_dims,
    identity_map,
    is_quasi_iso,
    zero_map,
)
from .errors import CutoffTooLarge, MalformedInput

Key = tuple  # (degree, index) of a basis element

DIM_BOUND_DEFAULT = 20000


def _dim_bound() -> int:
    import os

    value = os.environ.get("DGLIE_DIM_BOUND")
    return int(value) if value else DIM_BOUND_DEFAULT


class DgLieAlgebra:
    """Chain complex plus bracket structure constants.

    bracket_entries: iterable of ((p, i), (q, j), k, coeff) meaning
    [x_{p,i}, y_{q,j}] has coefficient coeff on the degree p+q basis element
    of index k.  Entries for the same triple accumulate.
    """

    def __init__(self, complex: ChainComplex, bracket_entries=()):
        self.complex = complex
        space = complex.space
        raw: dict[tuple[Key, Key], dict[Key, Fraction]] = {}
        for (p, i), (q, j), k, coeff in bracket_entries:
            p, i, q, j, k = int(p), int(i), int(q), int(j), int(k)
            coeff = Fraction(coeff)
            if i >= space.dim(p) or j >= space.dim(q):
                raise MalformedInput(
                    f"bracket entry references missing basis element "
                    f"({p},{i}) or ({q},{j})"
                )
            if k >= space.dim(p + q):
                raise MalformedInput(
                    f"bracket of degrees {p},{q} lands at index {k} "
                    f"but degree {p + q} has dimension {space.dim(p + q)}"
                )
            table = raw.setdefault(((p, i), (q, j)), {})
            sparse.add_into(table, (p + q, k), coeff)
        self._raw = {pair: vec for pair, vec in raw.items() if vec}
        self._cache: dict[tuple[Key, Key], dict[Key, Fraction]] = {}

    # -- basis bookkeeping -------------------------------------------------

    @property
    def space(self) -> GradedVectorSpace:
        return self.complex.space

    def keys(self) -> list[Key]:
        return [
            (p, i) for p in self.space.support for i in range(self.space.dim(p))
        ]

    def label(self, key: Key) -> str:
        p, i = key
        return self.space.labels(p)[i]

    def d_key(self, key: Key) -> dict[Key, Fraction]:
        p, i = key
        col = self.complex.d(p)
        return sparse.from_items(
            ((p - 1, r), col[r][i]) for r in range(self.space.dim(p - 1))
        )

    # -- bracket -----------------------------------------------------------

    def bracket_keys(self, x: Key, y: Key) -> dict[Key, Fraction]:
        """Effective bracket [x, y]: stored value, or derived by antisymmetry."""
        cached = self._cache.get((x, y))
        if cached is not None:
            return cached
        if (x, y) in self._raw:
            value = self._raw[(x, y)]
        elif (y, x) in self._raw:
            sign = -1 if (x[0] * y[0]) % 2 == 0 else 1
            value = sparse.scaled(self._raw[(y, x)], sign)
        else:
            value = {}
        self._cache[(x, y)] = value
        return value

    def bracket_key_vec(self, x: Key, vec: dict[Key, Fraction]) -> dict[Key, Fraction]:
        out: dict[Key, Fraction] = {}
        for z, c in vec.items():
            for k, v in self.bracket_keys(x, z).items():
                sparse.add_into(out, k, c * v)
        return out

    def bracket_vec(self, a: dict[Key, Fraction], b: dict[Key, Fraction]):
        out: dict[Key, Fraction] = {}
        for x, cx in a.items():
            for y, cy in b.items():
                for k, v in self.bracket_keys(x, y).items():
                    sparse.add_into(out, k, cx * cy * v)
        return out

    def is_abelian(self) -> bool:
        return not self._raw

    def homology_dims(self) -> dict[int, int]:
        return homology_dims(self.complex)

    def __repr__(self):
        return f"DgLieAlgebra({self.space!r}, {len(self._raw)} bracket entries)"


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[str, ...]
    defect: dict


@dataclass
class ValidationReport:
    ok: bool
    violations: list[Violation]

    def first(self, axiom: str):
        for v in self.violations:
            if v.axiom == axiom:
                return v
        return None

    def axioms_failed(self) -> list[str]:
        seen = []
        for v in self.violations:
            if v.axiom not in seen:
                seen.append(v.axiom)
        return seen


def _defect_by_label(g: DgLieAlgebra, vec: dict) -> dict:
    return {g.label(k): c for k, c in sorted(vec.items())}


def validate_dgla(g: DgLieAlgebra) -> ValidationReport:
    """Check all dg-Lie axioms; report every violation with witnesses.

    Witnesses are reported in lexicographic (degree, index) order of the
    basis tuples, so the first violation is deterministic.
    """
    violations: list[Violation] = []
    keys = g.keys()

    if g.complex.dd_failures():
        for n in g.complex.dd_failures():
            violations.append(Violation("d_squared", (str(n),), {}))

    # antisymmetry: stored two-sided entries must agree; even squares vanish
    for x, y in itertools.combinations_with_replacement(keys, 2):
        p, q = x[0], y[0]
        sign = Fraction(1) if (p * q) % 2 == 0 else Fraction(-1)
        if x == y:
            if p % 2 == 0:
                vec = g.bracket_keys(x, x)
                if vec:
                    violations.append(
                        Violation(
                            "antisymmetry",
                            (g.label(x), g.label(x)),
                            _defect_by_label(g, sparse.scaled(vec, 2)),
                        )
                    )
            continue
        if (x, y) in g._raw and (y, x) in g._raw:
            defect = sparse.combine(g._raw[(x, y)], g._raw[(y, x)], sign)
            if defect:
                violations.append(
                    Violation(
                        "antisymmetry",
                        (g.label(x), g.label(y)),
                        _defect_by_label(g, defect),
                    )
                )

    # graded Jacobi on unordered triples (repetitions included)
    for x, y, z in itertools.combinations_with_replacement(keys, 3):
        p, q, l = x[0], y[0], z[0]
        s1 = -1 if (p * l) % 2 else 1
        s2 = -1 if (p * q) % 2 else 1
        s3 = -1 if (q * l) % 2 else 1
        term1 = sparse.scaled(g.bracket_key_vec(x, g.bracket_keys(y, z)), s1)
        term2 = sparse.scaled(g.bracket_key_vec(y, g.bracket_keys(z, x)), s2)
        term3 = sparse.scaled(g.bracket_key_vec(z, g.bracket_keys(x, y)), s3)
        defect = sparse.combine(sparse.combine(term1, term2), term3)
        if defect:
            violations.append(
                Violation(
                    "jacobi",
                    (g.label(x), g.label(y), g.label(z)),
                    _defect_by_label(g, defect),
                )
            )

    # d is a derivation of the bracket
    for x, y in itertools.product(keys, repeat=2):
        p = x[0]
        lhs: dict = {}
        for k, c in g.bracket_keys(x, y).items():
            for k2, c2 in g.d_key(k).items():
                sparse.add_into(lhs, k2, c * c2)
        rhs: dict = {}
        for k, c in g.d_key(x).items():
            for k2, c2 in g.bracket_keys(k, y).items():
                sparse.add_into(rhs, k2, c * c2)
        sgn = -1 if p % 2 else 1
        for k, c in g.d_key(y).items():
            for k2, c2 in g.bracket_keys(x, k).items():
                sparse.add_into(rhs, k2, sgn * c * c2)
        defect = sparse.combine(lhs, rhs, -1)
        if defect:
            violations.append(
                Violation(
                    "derivation",
                    (g.label(x), g.label(y)),
                    _defect_by_label(g, defect),
                )
            )

    return ValidationReport(not violations, violations)


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------


class DgLieMorphism:
    """Chain map between dg-Lie algebras respecting the brackets."""

    def __init__(self, source: DgLieAlgebra, target: DgLieAlgebra, chain_map: ChainMap,
                 check=True):
        self.source = source
        self.target = target
        self.chain_map = chain_map
        if check:
            bad = self.bracket_failures()
            if bad:
                raise MalformedInput(
                    f"map does not respect the bracket at pairs {bad[:3]}"
                )

    def apply_key(self, key: Key) -> dict[Key, Fraction]:
        p, i = key
        block = self.chain_map.map.block(p)
        return sparse.from_items(
            ((p, r), block[r][i]) for r in range(self.target.space.dim(p))
        )

    def apply_vec(self, vec: dict[Key, Fraction]) -> dict[Key, Fraction]:
        out: dict[Key, Fraction] = {}
        for k, c in vec.items():
            for k2, c2 in self.apply_key(k).items():
                sparse.add_into(out, k2, c * c2)
        return out

    def bracket_failures(self) -> list[tuple[str, str]]:
        bad = []
        for x, y in itertools.combinations_with_replacement(self.source.keys(), 2):
            lhs = self.apply_vec(self.source.bracket_keys(x, y))
            rhs = self.target.bracket_vec(self.apply_key(x), self.apply_key(y))
            if sparse.combine(lhs, rhs, -1):
                bad.append((self.source.label(x), self.source.label(y)))
        return bad

    def compose(self, other: "DgLieMorphism") -> "DgLieMorphism":
        return DgLieMorphism(
            other.source,
            self.target,
            self.chain_map.compose(other.chain_map),
            check=False,
        )

    def __repr__(self):
        return f"DgLieMorphism({self.source!r} -> {self.target!r})"


def identity_morphism(g: DgLieAlgebra) -> DgLieMorphism:
    cm = ChainMap(g.complex, g.complex, identity_map(g.space), check=False)
    return DgLieMorphism(g, g, cm, check=False)


def zero_morphism(g: DgLieAlgebra, h: DgLieAlgebra) -> DgLieMorphism:
    cm = ChainMap(g.complex, h.complex, zero_map(g.space, h.space), check=False)
    return DgLieMorphism(g, h, cm, check=False)


def zero_dgla() -> DgLieAlgebra:
    space = GradedVectorSpace({})
    cx = ChainComplex(space, zero_map(space, space, -1), check=False)
    return DgLieAlgebra(cx)


# ---------------------------------------------------------------------------
# cone
# ---------------------------------------------------------------------------

EPSILON = "ε"  # ε


def cone(g: DgLieAlgebra) -> tuple[DgLieAlgebra, DgLieMorphism]:
    """The acyclic cone on g, with the canonical inclusion.

    Degree n of the cone is g_n ⊕ g_{n-1}; the second summand's labels carry
    an ε prefix.  The differential is d(x + εy) = dx + y - εdy and the
    bracket is [x + εy, x' + εy'] = [x,x'] + ε([y,x'] + (-1)^p [x,y']).
    Validation failures of g propagate.
    """
    report = validate_dgla(g)
    if not report.ok:
        raise MalformedInput(
            f"cone input fails axioms: {report.axioms_failed()}"
        )
    space = g.space
    basis: dict[int, list[str]] = {}
    degrees = sorted(set(space.support) | {p + 1 for p in space.support})
    index: dict[tuple[str, Key], int] = {}  # ("x"|"eps", g-key) -> cone index
    for n in degrees:
        labels = []
        for i, lab in enumerate(space.labels(n)):
            index[("x", (n, i))] = len(labels)
            labels.append(lab)
        for i, lab in enumerate(space.labels(n - 1)):
            candidate = f"{EPSILON}{lab}"
            while candidate in labels:  # iterated cones reuse ε-prefixed names
                candidate += "′"
            index[("eps", (n - 1, i))] = len(labels)
            labels.append(candidate)
        if labels:
            basis[n] = labels
    cone_space = GradedVectorSpace(basis)

    def ckey(kind: str, gk: Key) -> Key:
        n = gk[0] if kind == "x" else gk[0] + 1
        return (n, index[(kind, gk)])

    blocks: dict[int, list[list[Fraction]]] = {}
    for n in cone_space.support:
        mat = linalg.zeros(cone_space.dim(n - 1), cone_space.dim(n))
        for i in range(space.dim(n)):  # plain x: d(x) = dx
            for k, c in g.d_key((n, i)).items():
                mat[ckey("x", k)[1]][index[("x", (n, i))]] += c
        for i in range(space.dim(n - 1)):  # εy: d(εy) = y - ε dy
            col = index[("eps", (n - 1, i))]
            mat[ckey("x", (n - 1, i))[1]][col] += 1
            for k, c in g.d_key((n - 1, i)).items():
                mat[ckey("eps", k)[1]][col] -= c
        if not linalg.is_zero_matrix(mat):
            blocks[n] = mat
    cone_cx = ChainComplex(
        cone_space, GradedLinearMap(cone_space, cone_space, -1, blocks), check=False
    )

    entries = []

    def emit(kind_a, ka, kind_b, kb, vec, kind_out, sign=1):
        a = ckey(kind_a, ka)
        b = ckey(kind_b, kb)
        for k, c in vec.items():
            out = ckey(kind_out, k)
            entries.append((a, b, out[1], sign * c))

    for x in g.keys():
        for y in g.keys():
            vec = g.bracket_keys(x, y)
            if not vec:
                continue
            # [x, x'] = [x,x']   (plain ⋅ plain)
            emit("x", x, "x", y, vec, "x")
            # [εy, x'] = ε [y, x']
            emit("eps", x, "x", y, vec, "eps")
            # [x, εy'] = (-1)^p ε [x, y'],  p = deg x
            emit("x", x, "eps", y, vec, "eps", sign=(-1 if x[0] % 2 else 1))
    cn = DgLieAlgebra(cone_cx, entries)

    inc_blocks = {}
    for n in space.support:
        mat = linalg.zeros(cone_space.dim(n), space.dim(n))
        for i in range(space.dim(n)):
            mat[index[("x", (n, i))]][i] = Fraction(1)
        inc_blocks[n] = mat
    inc_cm = ChainMap(
        g.complex, cone_cx, GradedLinearMap(space, cone_space, 0, inc_blocks)
    )
    return cn, DgLieMorphism(g, cn, inc_cm, check=False)


# ---------------------------------------------------------------------------
# disc and boundary complexes
# ---------------------------------------------------------------------------


def disc_and_boundary(n: int) -> tuple[ChainComplex, ChainComplex, ChainMap]:
    """The acyclic two-term complex E(n) and its boundary subcomplex.

    E(n) is Q in degrees n and n-1 with the identity differential; its
    boundary is the degree n-1 part.  Returns (E(n), ∂E(n), inclusion).
    """
    top, bottom = f"e{n}", f"e{n - 1}"
    en_space = GradedVectorSpace({n: [top], n - 1: [bottom]})
    en = ChainComplex(
        en_space,
        GradedLinearMap(en_space, en_space, -1, {n: [[Fraction(1)]]}),
        check=False,
    )
    b_space = GradedVectorSpace({n - 1: [bottom]})
    boundary = ChainComplex(b_space, zero_map(b_space, b_space, -1), check=False)
    inc = ChainMap(
        boundary,
        en,
        GradedLinearMap(b_space, en_space, 0, {n - 1: [[Fraction(1)]]}),
    )
    return en, boundary, inc


# ---------------------------------------------------------------------------
# free dg-Lie algebras (weight-truncated), realized inside the tensor algebra
# ---------------------------------------------------------------------------


def _word_degree(word: tuple[Key, ...]) -> int:
    return sum(k[0] for k in word)


def _tensor_concat(a: dict, b: dict) -> dict:
    out: dict = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            sparse.add_into(out, wa + wb, ca * cb)
    return out


def _tensor_commutator(a: dict, b: dict, deg_a: int, deg_b: int) -> dict:
    sign = -1 if (deg_a * deg_b) % 2 else 1
    return sparse.combine(_tensor_concat(a, b), _tensor_concat(b, a), -sign)


def _tensor_d(expansion: dict, d_of_gen) -> dict:
    """Extend the generator differential to tensor words by the Leibniz rule."""
    out: dict = {}
    for word, coeff in expansion.items():
        sign = 1
        for i, letter in enumerate(word):
            dv = d_of_gen(letter)
            for gk, c in dv.items():
                sparse.add_into(out, word[:i] + (gk,) + word[i + 1 :], sign * coeff * c)
            if letter[0] % 2:
                sign = -sign
    return out


class FreeDglaPresentation:
    """Free graded Lie algebra on dg generators, truncated at a bracket weight.

    The weight-(> cutoff) part is set to zero, i.e. the realization is the
    free nilpotent quotient of class ``weight_cutoff``; this keeps every
    axiom exactly true while staying finite.  Basis elements are left-normed
    bracket monomials chosen greedily inside the tensor algebra.
    """

    def __init__(self, generators: ChainComplex, weight_cutoff: int,
                 realized: DgLieAlgebra, monomials, weights, expansions):
        self.generators = generators
        self.weight_cutoff = weight_cutoff
        self.realized = realized
        self.monomials = monomials      # realized key -> tuple of generator keys
        self.weights = weights          # realized key -> weight
        self.expansions = expansions    # realized key -> tensor-word dict

    def weight_dims(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for w in self.weights.values():
            out[w] = out.get(w, 0) + 1
        return out

    def keys_of_weight(self, w: int):
        return [k for k, wt in self.weights.items() if wt == w]


def _left_normed_label(labels: tuple[str, ...]) -> str:
    out = labels[0]
    for lab in labels[1:]:
        out = f"[{out},{lab}]"
    return out


def free_dgla(generators: ChainComplex, weight_cutoff: int) -> FreeDglaPresentation:
    """Free dg-Lie algebra on the generator complex, through the given weight.

    Raises CutoffTooLarge when the tensor-algebra workspace would exceed the
    configured dimension bound (env DGLIE_DIM_BOUND).
    """
    if weight_cutoff < 1:
        raise MalformedInput("weight_cutoff must be >= 1")
    gen_space = generators.space
    gen_keys = [
        (p, i) for p in gen_space.support for i in range(gen_space.dim(p))
    ]
    if not gen_keys:
        return FreeDglaPresentation(
            generators, weight_cutoff, zero_dgla(), {}, {}, {}
        )
    n_gens = len(gen_keys)
    words_total = sum(n_gens ** m for m in range(1, weight_cutoff + 1))
    if words_total > _dim_bound():
        raise CutoffTooLarge(
            f"free algebra workspace of {words_total} tensor words exceeds "
            f"the bound {_dim_bound()}"
        )

    def d_of_gen(key: Key) -> dict[Key, Fraction]:
        p, i = key
        col = generators.d(p)
        return sparse.from_items(
            ((p - 1, r), col[r][i]) for r in range(gen_space.dim(p - 1))
        )

    # choose left-normed monomials that are pivotal in the tensor algebra
    basis_by_weight: dict[int, list[tuple[tuple[Key, ...], dict]]] = {}
    for m in range(1, weight_cutoff + 1):
        chosen: list[tuple[tuple[Key, ...], dict]] = []
        rref_rows: list[dict] = []  # running reduced expansions, keyed by word
        pivots: list[tuple] = []
        for tup in itertools.product(gen_keys, repeat=m):
            exp = {(tup[0],): Fraction(1)}
            deg = tup[0][0]
            for letter in tup[1:]:
                exp = _tensor_commutator(
                    exp, {(letter,): Fraction(1)}, deg, letter[0]
                )
                deg += letter[0]
            residual = dict(exp)
            for row, piv in zip(rref_rows, pivots):
                c = residual.get(piv)
                if c:
                    residual = sparse.combine(residual, row, -c)
            if residual:
                piv = min(residual)
                c = residual[piv]
                row = sparse.scaled(residual, Fraction(1) / c)
                for prev in rref_rows:
                    pc = prev.get(piv)
                    if pc:
                        prev_update = sparse.combine(prev, row, -pc)
                        prev.clear()
                        prev.update(prev_update)
                rref_rows.append(row)
                pivots.append(piv)
                chosen.append((tup, exp))
        basis_by_weight[m] = chosen

    # assemble the realized graded space, ordered by (weight, enumeration)
    basis: dict[int, list[str]] = {}
    monomials: dict[Key, tuple[Key, ...]] = {}
    weights: dict[Key, int] = {}
    expansions: dict[Key, dict] = {}
    labels_of = lambda tup: tuple(
        gen_space.labels(k[0])[k[1]] for k in tup
    )
    for m in range(1, weight_cutoff + 1):
        for tup, exp in basis_by_weight[m]:
            deg = _word_degree(tup)
            labels = basis.setdefault(deg, [])
            key = (deg, len(labels))
            labels.append(_left_normed_label(labels_of(tup)))
            monomials[key] = tup
            weights[key] = m
            expansions[key] = exp
    space = GradedVectorSpace(basis)

    # per-weight solver: express a tensor element in the chosen basis
    solver: dict[int, tuple[list[Key], list[tuple[Key, ...]], list[list[Fraction]]]] = {}
    for m in range(1, weight_cutoff + 1):
        keys_m = [k for k, wt in weights.items() if wt == m]
        words = sorted({w for k in keys_m for w in expansions[k]})
        word_index = {w: r for r, w in enumerate(words)}
        mat = linalg.zeros(len(words), len(keys_m))
        for c, k in enumerate(keys_m):
            for w, coeff in expansions[k].items():
                mat[word_index[w]][c] = coeff
        solver[m] = (keys_m, words, mat)

    def express(weight: int, element: dict) -> dict[Key, Fraction]:
        if not element:
            return {}
        keys_m, words, mat = solver[weight]
        word_index = {w: r for r, w in enumerate(words)}
        rhs = [Fraction(0)] * len(words)
        for w, c in element.items():
            if w not in word_index:
                raise MalformedInput("element outside the free Lie span")
            rhs[word_index[w]] = c
        sol = linalg.solve(mat, rhs)
        if sol is None:
            raise MalformedInput("element outside the free Lie span")
        return sparse.from_items(zip(keys_m, sol))

    # differential on basis monomials (weight-preserving)
    d_blocks: dict[int, list[list[Fraction]]] = {}
    for key, exp in expansions.items():
        image = _tensor_d(exp, d_of_gen)
        if not image:
            continue
        coords = express(weights[key], image)
        deg = key[0]
        mat = d_blocks.setdefault(
            deg, linalg.zeros(space.dim(deg - 1), space.dim(deg))
        )
        for k2, c in coords.items():
            mat[k2[1]][key[1]] += c
    cx = ChainComplex(space, GradedLinearMap(space, space, -1, d_blocks), check=False)

    # brackets: commutator in the tensor algebra, zero beyond the cutoff
    entries = []
    all_keys = list(weights)
    for a in all_keys:
        for b in all_keys:
            wa, wb = weights[a], weights[b]
            if wa + wb > weight_cutoff:
                continue
            prod = _tensor_commutator(
                expansions[a], expansions[b], a[0], b[0]
            )
            for k, c in express(wa + wb, prod).items():
                entries.append((a, b, k[1], c))
    realized = DgLieAlgebra(cx, entries)
    return FreeDglaPresentation(
        generators, weight_cutoff, realized, monomials, weights, expansions
    )


def free_dgla_map(
    src: FreeDglaPresentation, tgt: FreeDglaPresentation, gen_map
) -> DgLieMorphism:
    """Morphism of truncated free algebras induced by a map of generators.

    gen_map sends a source generator key to a sparse vector of target
    generator keys (same degree).
    """
    if src.weight_cutoff != tgt.weight_cutoff:
        raise MalformedInput("free algebra cutoffs differ")
    tgt_solver_cache: dict[int, dict] = {}

    def express_in_tgt(weight: int, element: dict) -> dict[Key, Fraction]:
        keys_m = tgt.keys_of_weight(weight)
        mat_key = weight
        if mat_key not in tgt_solver_cache:
            words = sorted({w for k in keys_m for w in tgt.expansions[k]})
            word_index = {w: r for r, w in enumerate(words)}
            mat = linalg.zeros(len(words), len(keys_m))
            for c, k in enumerate(keys_m):
                for w, coeff in tgt.expansions[k].items():
                    mat[word_index[w]][c] = coeff
            tgt_solver_cache[mat_key] = (keys_m, words, word_index, mat)
        keys_m, words, word_index, mat = tgt_solver_cache[mat_key]
        if not element:
            return {}
        rhs = [Fraction(0)] * len(words)
        for w, c in element.items():
            if w not in word_index:
                raise MalformedInput("image outside the target free Lie span")
            rhs[word_index[w]] = c
        sol = linalg.solve(mat, rhs)
        if sol is None:
            raise MalformedInput("image outside the target free Lie span")
        return sparse.from_items(zip(keys_m, sol))

    blocks: dict[int, list[list[Fraction]]] = {}
    src_space = src.realized.space
    tgt_space = tgt.realized.space
    for key, exp in src.expansions.items():
        mapped: dict = {}
        for word, coeff in exp.items():
            partial = {(): coeff}
            for letter in word:
                nxt: dict = {}
                for prefix, c in partial.items():
                    for gk, gc in gen_map(letter).items():
                        sparse.add_into(nxt, prefix + (gk,), c * gc)
                partial = nxt
            for w, c in partial.items():
                sparse.add_into(mapped, w, c)
        coords = express_in_tgt(src.weights[key], mapped)
        deg = key[0]
        mat = blocks.setdefault(
            deg, linalg.zeros(tgt_space.dim(deg), src_space.dim(deg))
        )
        for k2, c in coords.items():
            mat[k2[1]][key[1]] += c
    cm = ChainMap(
        src.realized.complex,
        tgt.realized.complex,
        GradedLinearMap(src_space, tgt_space, 0, blocks),
    )
    return DgLieMorphism(src.realized, tgt.realized, cm)


def generating_cofibration(n: int, weight_cutoff: int) -> DgLieMorphism:
    """The truncated free morphism on the boundary inclusion ∂E(n) -> E(n)."""
    en, boundary, _ = disc_and_boundary(n)
    src = free_dgla(boundary, weight_cutoff)
    tgt = free_dgla(en, weight_cutoff)

    def gen_map(key: Key) -> dict[Key, Fraction]:
        # ∂E(n)'s single generator matches E(n)'s degree n-1 generator by label
        p, i = key
        label = boundary.space.labels(p)[i]
        return {(p, en.space.labels(p).index(label)): Fraction(1)}

    return free_dgla_map(src, tgt, gen_map)


# ---------------------------------------------------------------------------
# model-structure classifiers
# ---------------------------------------------------------------------------


def is_fibration(f: DgLieMorphism) -> tuple[bool, int | None]:
    """Degreewise surjectivity of the underlying map, with a failing degree."""
    degrees = sorted(
        set(f.source.space.support) | set(f.target.space.support)
    )
    for n in degrees:
        tgt_dim = f.target.space.dim(n)
        if tgt_dim == 0:
            continue
        if linalg.rank(f.chain_map.map.block(n)) < tgt_dim:
            return False, n
    return True, None


def is_weak_equivalence(f: DgLieMorphism) -> bool:
    ok, _ = is_quasi_iso(f.chain_map)
    return ok
