"""Differential graded associative algebras and truncated enveloping algebras.

The enveloping algebra of a dg-Lie algebra g is realized on its PBW monomial
basis: words in the basis elements of g that are weakly ascending in the
(degree, index) order, with odd-degree letters appearing at most once.
Products are computed by rewriting a concatenation to normal form with

    x y  ->  (-1)^{|x||y|} y x + [x, y]        (x > y in the order)
    x x  ->  (1/2) [x, x]                      (x odd)

which strictly lowers (length, lexicographic) and therefore terminates.  A
product whose length would exceed the cutoff raises OutOfWindow instead of
being silently truncated; everything inside the window is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg, sparse
from .core import ChainComplex, GradedLinearMap, GradedVectorSpace
from .dgla import DgLieAlgebra, ValidationReport, Violation
from .errors import IndexOutOfFiltration, MalformedInput, OutOfWindow

Key = tuple

HALF = Fraction(1, 2)


class DgAlgebra:
    """Associative algebra object in chain complexes, by structure constants.

    product_entries: ((p,i), (q,j), k, coeff) with the result index k in
    degree p+q.  When ``partial`` is true, pairs absent from the table are
    treated as undefined (out of window) rather than zero; validation then
    only checks tuples whose products are all defined.
    """

    def __init__(self, complex: ChainComplex, unit: Key, product_entries=(),
                 partial=False, defined_pairs=None):
        self.complex = complex
        self.unit = tuple(unit)
        self.partial = partial
        space = complex.space
        if self.unit[0] != 0 or self.unit[1] >= space.dim(0):
            raise MalformedInput("unit must be a degree-0 basis element")
        table: dict[tuple[Key, Key], dict[Key, Fraction]] = {}
        for (p, i), (q, j), k, coeff in product_entries:
            p, i, q, j, k = int(p), int(i), int(q), int(j), int(k)
            if i >= space.dim(p) or j >= space.dim(q) or k >= space.dim(p + q):
                raise MalformedInput(
                    f"product entry ({p},{i})*({q},{j}) -> index {k} is "
                    f"degree-inconsistent"
                )
            vec = table.setdefault(((p, i), (q, j)), {})
            sparse.add_into(vec, (p + q, k), Fraction(coeff))
        self._table = table
        self._defined = set(defined_pairs) if defined_pairs is not None else None

    @property
    def space(self) -> GradedVectorSpace:
        return self.complex.space

    def keys(self) -> list[Key]:
        return [(p, i) for p in self.space.support for i in range(self.space.dim(p))]

    def label(self, key: Key) -> str:
        return self.space.labels(key[0])[key[1]]

    def d_key(self, key: Key) -> dict[Key, Fraction]:
        p, i = key
        col = self.complex.d(p)
        return sparse.from_items(
            ((p - 1, r), col[r][i]) for r in range(self.space.dim(p - 1))
        )

    def defined(self, x: Key, y: Key) -> bool:
        if not self.partial:
            return True
        return self._defined is None or (x, y) in self._defined

    def product_keys(self, x: Key, y: Key) -> dict[Key, Fraction]:
        if not self.defined(x, y):
            raise OutOfWindow(f"product {self.label(x)}*{self.label(y)} undefined")
        return self._table.get((x, y), {})

    def product_vec(self, a: dict, b: dict) -> dict[Key, Fraction]:
        out: dict[Key, Fraction] = {}
        for x, cx in a.items():
            for y, cy in b.items():
                for k, v in self.product_keys(x, y).items():
                    sparse.add_into(out, k, cx * cy * v)
        return out


def validate_dg_algebra(A: DgAlgebra) -> ValidationReport:
    """Unit laws, associativity, and the Leibniz rule on basis tuples."""
    violations: list[Violation] = []
    keys = A.keys()
    u = A.unit
    for x in keys:
        if A.defined(u, x):
            left = A.product_keys(u, x)
            if left != {x: Fraction(1)}:
                violations.append(Violation("unit", (A.label(x),),
                                            {A.label(k): c for k, c in left.items()}))
        if A.defined(x, u):
            right = A.product_keys(x, u)
            if right != {x: Fraction(1)}:
                violations.append(Violation("unit", (A.label(x),),
                                            {A.label(k): c for k, c in right.items()}))
    for x, y, z in itertools.product(keys, repeat=3):
        if not (A.defined(x, y) and A.defined(y, z)):
            continue
        xy = A.product_keys(x, y)
        yz = A.product_keys(y, z)
        try:
            left = A.product_vec(xy, {z: Fraction(1)})
            right = A.product_vec({x: Fraction(1)}, yz)
        except OutOfWindow:
            continue
        defect = sparse.combine(left, right, -1)
        if defect:
            violations.append(
                Violation("associativity", (A.label(x), A.label(y), A.label(z)),
                          {A.label(k): c for k, c in sorted(defect.items())})
            )
    for x, y in itertools.product(keys, repeat=2):
        if not A.defined(x, y):
            continue
        lhs: dict = {}
        for k, c in A.product_keys(x, y).items():
            for k2, c2 in A.d_key(k).items():
                sparse.add_into(lhs, k2, c * c2)
        rhs: dict = {}
        ok = True
        try:
            for k, c in A.d_key(x).items():
                for k2, c2 in A.product_keys(k, y).items():
                    sparse.add_into(rhs, k2, c * c2)
            sgn = -1 if x[0] % 2 else 1
            for k, c in A.d_key(y).items():
                for k2, c2 in A.product_keys(x, k).items():
                    sparse.add_into(rhs, k2, sgn * c * c2)
        except OutOfWindow:
            ok = False
        if ok:
            defect = sparse.combine(lhs, rhs, -1)
            if defect:
                violations.append(
                    Violation("leibniz", (A.label(x), A.label(y)),
                              {A.label(k): c for k, c in sorted(defect.items())})
                )
    return ValidationReport(not violations, violations)


def commutator_lie(A: DgAlgebra) -> DgLieAlgebra:
    """The dg-Lie algebra on A with [x,y] = xy - (-1)^{pq} yx."""
    if A.partial:
        raise MalformedInput("commutator bracket needs a total product table")
    report = validate_dg_algebra(A)
    if not report.ok:
        raise MalformedInput(f"algebra fails axioms: {report.axioms_failed()}")
    entries = []
    for x in A.keys():
        for y in A.keys():
            sign = -1 if (x[0] * y[0]) % 2 else 1
            vec = sparse.combine(A.product_keys(x, y), A.product_keys(y, x), -sign)
            for k, c in vec.items():
                entries.append((x, y, k[1], c))
    return DgLieAlgebra(A.complex, entries)


# ---------------------------------------------------------------------------
# PBW normal form
# ---------------------------------------------------------------------------


def _first_violation(word: tuple[Key, ...]) -> int | None:
    for t in range(len(word) - 1):
        a, b = word[t], word[t + 1]
        if a > b or (a == b and a[0] % 2):
            return t
    return None


def pbw_normalize(g: DgLieAlgebra, word: tuple[Key, ...], coeff=Fraction(1),
                  pick=None) -> dict[tuple[Key, ...], Fraction]:
    """Rewrite a tensor word to the PBW normal form, as a word -> coeff dict.

    ``pick`` optionally chooses which violating position to rewrite first
    (given the word and the list of violating positions); the result is
    independent of this choice, which the test suite exercises.
    """
    out: dict[tuple[Key, ...], Fraction] = {}
    stack = [(tuple(word), Fraction(coeff))]
    while stack:
        w, c = stack.pop()
        if pick is None:
            t = _first_violation(w)
        else:
            spots = [
                t for t in range(len(w) - 1)
                if w[t] > w[t + 1] or (w[t] == w[t + 1] and w[t][0] % 2)
            ]
            t = pick(w, spots) if spots else None
        if t is None:
            sparse.add_into(out, w, c)
            continue
        a, b = w[t], w[t + 1]
        if a == b:  # odd square: x·x = ½ [x,x]
            for k, v in g.bracket_keys(a, a).items():
                stack.append((w[:t] + (k,) + w[t + 2:], c * HALF * v))
        else:
            sign = -1 if (a[0] * b[0]) % 2 else 1
            stack.append((w[:t] + (b, a) + w[t + 2:], c * sign))
            for k, v in g.bracket_keys(a, b).items():
                stack.append((w[:t] + (k,) + w[t + 1 + 1:], c * v))
    return out


def _word_degree(word: tuple[Key, ...]) -> int:
    return sum(k[0] for k in word)


def _normal_words(g_keys: list[Key], max_len: int):
    """All PBW normal words of length <= max_len, by (length, lex) order."""
    for m in range(max_len + 1):
        for word in itertools.combinations_with_replacement(g_keys, m):
            if any(
                word[t] == word[t + 1] and word[t][0] % 2
                for t in range(m - 1)
            ):
                continue
            yield word


MULT_SEPARATOR = "·"  # ·


class FilteredEnvelope:
    """U(g) truncated at a PBW filtration level, with exact in-window products."""

    def __init__(self, lie_source: DgLieAlgebra, cutoff: int):
        if cutoff < 0:
            raise MalformedInput("cutoff must be >= 0")
        self.lie_source = lie_source
        self.cutoff = cutoff
        g_keys = lie_source.keys()
        self.words: list[tuple[Key, ...]] = list(_normal_words(g_keys, cutoff))

        basis: dict[int, list[str]] = {}
        self.word_key: dict[tuple[Key, ...], Key] = {}
        self.key_word: dict[Key, tuple[Key, ...]] = {}
        for w in self.words:
            deg = _word_degree(w)
            labels = basis.setdefault(deg, [])
            key = (deg, len(labels))
            labels.append(self._word_label(w))
            self.word_key[w] = key
            self.key_word[key] = w
        space = GradedVectorSpace(basis)

        # differential: Leibniz extension of d, then rewrite to normal form
        blocks: dict[int, list[list[Fraction]]] = {}
        for w in self.words:
            image: dict[tuple[Key, ...], Fraction] = {}
            sign = Fraction(1)
            for t, letter in enumerate(w):
                for gk, c in lie_source.d_key(letter).items():
                    for w2, c2 in pbw_normalize(
                        lie_source, w[:t] + (gk,) + w[t + 1:], sign * c
                    ).items():
                        sparse.add_into(image, w2, c2)
                if letter[0] % 2:
                    sign = -sign
            if not image:
                continue
            deg = _word_degree(w)
            mat = blocks.setdefault(
                deg, linalg.zeros(space.dim(deg - 1), space.dim(deg))
            )
            col = self.word_key[w][1]
            for w2, c in image.items():
                mat[self.word_key[w2][1]][col] += c
        self.complex = ChainComplex(
            space, GradedLinearMap(space, space, -1, blocks), check=False
        )
        self._algebra: DgAlgebra | None = None

    @property
    def algebra(self) -> DgAlgebra:
        """The realized dg-algebra; built lazily (the table is quadratic)."""
        if self._algebra is None:
            entries = []
            defined = set()
            for wa in self.words:
                for wb in self.words:
                    if len(wa) + len(wb) > self.cutoff:
                        continue
                    ka, kb = self.word_key[wa], self.word_key[wb]
                    defined.add((ka, kb))
                    for w2, c in pbw_normalize(self.lie_source, wa + wb).items():
                        entries.append((ka, kb, self.word_key[w2][1], c))
            self._algebra = DgAlgebra(
                self.complex, self.word_key[()], entries, partial=True,
                defined_pairs=defined,
            )
        return self._algebra

    def _word_label(self, word: tuple[Key, ...]) -> str:
        if not word:
            return "1"
        return MULT_SEPARATOR.join(self.lie_source.label(k) for k in word)

    # -- elements ----------------------------------------------------------

    def include_lie_key(self, gk: Key) -> Key:
        """The image of a g basis element in filtration level 1."""
        return self.word_key[(gk,)]

    def multiply(self, a: dict, b: dict) -> dict[Key, Fraction]:
        """Product of two envelope elements; OutOfWindow if any term leaves."""
        out: dict[Key, Fraction] = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                wa, wb = self.key_word[ka], self.key_word[kb]
                if len(wa) + len(wb) > self.cutoff:
                    raise OutOfWindow(
                        f"product of filtration levels {len(wa)} and {len(wb)} "
                        f"leaves the cutoff {self.cutoff}"
                    )
                for w2, c in pbw_normalize(self.lie_source, wa + wb).items():
                    sparse.add_into(out, self.word_key[w2], ca * cb * c)
        return out

    def filtration_level(self, m: int) -> GradedVectorSpace:
        """The subspace spanned by words of length <= m."""
        if m < 0 or m > self.cutoff:
            raise IndexOutOfFiltration(f"level {m} not in 0..{self.cutoff}")
        basis: dict[int, list[str]] = {}
        for w in self.words:
            if len(w) <= m:
                basis.setdefault(_word_degree(w), []).append(self._word_label(w))
        return GradedVectorSpace(basis)

    def filtration_dims(self) -> list[int]:
        return [self.filtration_level(m).total_dim() for m in range(self.cutoff + 1)]


def universal_enveloping(g: DgLieAlgebra, cutoff: int) -> FilteredEnvelope:
    """U(g) through PBW filtration level ``cutoff``."""
    return FilteredEnvelope(g, cutoff)


def associated_graded(e: FilteredEnvelope, m: int) -> GradedVectorSpace:
    """gr^m U = U^{<=m} / U^{<=m-1}, on the length-m monomial basis."""
    if m < 0 or m > e.cutoff:
        raise IndexOutOfFiltration(f"level {m} not in 0..{e.cutoff}")
    basis: dict[int, list[str]] = {}
    for w in e.words:
        if len(w) == m:
            basis.setdefault(_word_degree(w), []).append(e._word_label(w))
    return GradedVectorSpace(basis)


# ---------------------------------------------------------------------------
# graded symmetric powers (independent dimension oracle) and the PBW check
# ---------------------------------------------------------------------------


def sym_component_dims(space: GradedVectorSpace, m: int) -> dict[int, int]:
    """Dimension table of Sym^m(space), by generating function.

    Even-degree basis vectors contribute polynomial factors 1/(1 - t z^p),
    odd ones (1 + t z^p); the coefficient of t^m is extracted.  This route
    never enumerates monomials, so it is independent of the PBW basis.
    """
    poly: dict[tuple[int, int], int] = {(0, 0): 1}  # (weight, degree) -> count
    for p in space.support:
        for _ in range(space.dim(p)):
            if p % 2 == 0:
                new: dict[tuple[int, int], int] = {}
                for (w, d), c in poly.items():
                    k = 0
                    while w + k <= m:
                        key = (w + k, d + k * p)
                        new[key] = new.get(key, 0) + c
                        k += 1
                poly = new
            else:
                new = dict(poly)
                for (w, d), c in poly.items():
                    if w + 1 <= m:
                        key = (w + 1, d + p)
                        new[key] = new.get(key, 0) + c
                poly = new
    return {d: c for (w, d), c in sorted(poly.items()) if w == m and c}


def _koszul_permutation_sign(word: tuple[Key, ...], perm: tuple[int, ...]) -> int:
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b] and (word[perm[a]][0] * word[perm[b]][0]) % 2:
                sign = -sign
    return sign


def symmetrization_map(e: FilteredEnvelope, word: tuple[Key, ...]) -> dict:
    """Average of the products over all permutations of the word.

    This is the canonical splitting Sym^m(g) -> U(g)^{<=m}; composing with
    the projection to gr^m realizes the PBW comparison that
    ``sym_vs_gr_check`` verifies at the dimension level.
    """
    m = len(word)
    out: dict[Key, Fraction] = {}
    factor = Fraction(1, math.factorial(m))
    for perm in itertools.permutations(range(m)):
        sign = _koszul_permutation_sign(word, perm)
        permuted = tuple(word[t] for t in perm)
        for w2, c in pbw_normalize(e.lie_source, permuted, factor * sign).items():
            sparse.add_into(out, e.word_key[w2], c)
    return out


@dataclass
class PbwReport:
    ok: bool
    dims_checked: list[tuple[int, int, int, int]]   # (level, degree, gr, sym)
    failures: list[tuple[int, int, int, int]]
    averaging_ok: bool


def sym_vs_gr_check(g: DgLieAlgebra, cutoff: int) -> PbwReport:
    """Per-level, per-degree comparison of gr^m U(g) against Sym^m(g).

    Also checks that the symmetrization map hits a complement of U^{<=m-1},
    i.e. that its projection to gr^m has full rank.
    """
    e = universal_enveloping(g, cutoff)
    checked, failures = [], []
    averaging_ok = True
    for m in range(cutoff + 1):
        gr = associated_graded(e, m).dims()
        sym = sym_component_dims(g.space, m)
        for deg in sorted(set(gr) | set(sym)):
            row = (m, deg, gr.get(deg, 0), sym.get(deg, 0))
            checked.append(row)
            if row[2] != row[3]:
                failures.append(row)
        # averaging-map rank on gr^m, one degree at a time
        level_words = [w for w in e.words if len(w) == m]
        by_degree: dict[int, list[tuple[Key, ...]]] = {}
        for w in level_words:
            by_degree.setdefault(_word_degree(w), []).append(w)
        for deg, words in by_degree.items():
            cols = {w: t for t, w in enumerate(words)}
            rows = []
            for w in words:
                image = symmetrization_map(e, w)
                row = [Fraction(0)] * len(words)
                for k, c in image.items():
                    ww = e.key_word[k]
                    if len(ww) == m:
                        row[cols[ww]] = c
                rows.append(row)
            if linalg.rank(rows) != len(words):
                averaging_ok = False
    return PbwReport(not failures and averaging_ok, checked, failures, averaging_ok)
