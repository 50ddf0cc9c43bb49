"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's code paths: rank comes
from fraction-free Bareiss elimination, free-Lie dimensions from the
necklace (Moebius) count, axiom checking from a from-scratch brute-force
sweep with its own sign computations, and symmetric-power dimensions from
first principles where needed.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from dglie.core import (
    ChainComplex,
    ChainMap,
    GradedLinearMap,
    GradedVectorSpace,
    identity_map,
    zero_map,
)
from dglie.dgla import DgLieAlgebra, DgLieMorphism
from dglie import linalg


# ---------------------------------------------------------------------------
# independent linear-algebra oracle: fraction-free Bareiss elimination
# ---------------------------------------------------------------------------


def bareiss_rank(matrix) -> int:
    """Rank over Q via fraction-free Bareiss elimination on integers."""
    if not matrix or not matrix[0]:
        return 0
    denom = 1
    for row in matrix:
        for x in row:
            denom = denom * Fraction(x).denominator // _gcd(
                denom, Fraction(x).denominator
            )
    m = [[int(Fraction(x) * denom) for x in row] for row in matrix]
    rows, cols = len(m), len(m[0])
    rank = 0
    prev = 1
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        rank += 1
        r += 1
        if r == rows:
            break
    return rank


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def oracle_homology_dim(complex_obj, n: int) -> int:
    """dim ker - rank of the incoming block, ranks via the Bareiss oracle."""
    dim_n = complex_obj.space.dim(n)
    if dim_n == 0:
        return 0
    rank_out = bareiss_rank(complex_obj.d(n))
    rank_in = bareiss_rank(complex_obj.d(n + 1))
    return dim_n - rank_out - rank_in


# ---------------------------------------------------------------------------
# independent dg-Lie axiom checker
# ---------------------------------------------------------------------------


def brute_force_dgla_ok(g: DgLieAlgebra) -> bool:
    """From-scratch axiom sweep with freshly recomputed Koszul signs.

    Interprets the stored structure constants the same way the library does
    (one-sided entries extended by antisymmetry), but checks every ordered
    tuple and uses the adjoint (Leibniz) formulation of the Jacobi identity,
    which under antisymmetry is equivalent to the cyclic graded form.
    """
    keys = g.keys()

    def br(x, y):
        if (x, y) in g._raw:
            return dict(g._raw[(x, y)])
        if (y, x) in g._raw:
            sign = 1 if (x[0] * y[0]) % 2 else -1
            return {k: sign * c for k, c in g._raw[(y, x)].items()}
        return {}

    def br_vec(x, vec):
        out = {}
        for z, c in vec.items():
            for k, v in br(x, z).items():
                out[k] = out.get(k, Fraction(0)) + c * v
        return {k: v for k, v in out.items() if v}

    def add(a, b, s=1):
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, Fraction(0)) + s * v
        return {k: v for k, v in out.items() if v}

    def d_vec(vec):
        out = {}
        for z, c in vec.items():
            for k, v in g.d_key(z).items():
                out[k] = out.get(k, Fraction(0)) + c * v
        return {k: v for k, v in out.items() if v}

    for x in keys:
        if d_vec(g.d_key(x)):
            return False
    for x, y in itertools.product(keys, repeat=2):
        sign = -1 if (x[0] * y[0]) % 2 else 1
        if add(br(x, y), br(y, x), sign):
            return False
    for x, y in itertools.product(keys, repeat=2):
        lhs = d_vec(br(x, y))
        rhs = {}
        for xk, c in g.d_key(x).items():
            for k, v in br(xk, y).items():
                rhs[k] = rhs.get(k, Fraction(0)) + c * v
        sgn = -1 if x[0] % 2 else 1
        for yk, c in g.d_key(y).items():
            for k, v in br(x, yk).items():
                rhs[k] = rhs.get(k, Fraction(0)) + sgn * c * v
        if add(lhs, rhs, -1):
            return False
    for x, y, z in itertools.product(keys, repeat=3):
        lhs = br_vec(x, br(y, z))
        rhs = {}
        for k, v in br(x, y).items():
            for k2, v2 in br(k, z).items():
                rhs[k2] = rhs.get(k2, Fraction(0)) + v * v2
        sgn = -1 if (x[0] * y[0]) % 2 else 1
        for k, v in br_vec(y, br(x, z)).items():
            rhs[k] = rhs.get(k, Fraction(0)) + sgn * v
        if add(lhs, rhs, -1):
            return False
    return True


# ---------------------------------------------------------------------------
# necklace-count oracle for free Lie algebra dimensions (even generators)
# ---------------------------------------------------------------------------


def moebius(n: int) -> int:
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def witt_dimension(n_generators: int, weight: int) -> int:
    """Necklace count: dim of the weight-w part of the free Lie algebra."""
    total = 0
    for d in range(1, weight + 1):
        if weight % d == 0:
            total += moebius(d) * n_generators ** (weight // d)
    return total // weight


# ---------------------------------------------------------------------------
# standard algebras
# ---------------------------------------------------------------------------


def abelian_complex(basis, diff_blocks=None) -> ChainComplex:
    space = GradedVectorSpace(basis)
    differential = GradedLinearMap(space, space, -1, diff_blocks or {})
    return ChainComplex(space, differential, check=False)


def make_sl2() -> DgLieAlgebra:
    cx = abelian_complex({0: ["e", "f", "h"]})
    return DgLieAlgebra(
        cx,
        [((0, 0), (0, 1), 2, 1), ((0, 2), (0, 0), 0, 2), ((0, 2), (0, 1), 1, -2)],
    )


def make_heisenberg() -> DgLieAlgebra:
    cx = abelian_complex({0: ["x", "y", "z"]})
    return DgLieAlgebra(cx, [((0, 0), (0, 1), 2, 1)])


def make_abelian2() -> DgLieAlgebra:
    return DgLieAlgebra(abelian_complex({0: ["a", "b"]}), [])


def make_en1_dgla() -> DgLieAlgebra:
    cx = abelian_complex({1: ["e1"], 0: ["e0"]}, {1: [[Fraction(1)]]})
    return DgLieAlgebra(cx, [])


def make_x_minus1() -> DgLieAlgebra:
    return DgLieAlgebra(abelian_complex({-1: ["x"]}), [])


def make_obstruction(with_bracket=True) -> DgLieAlgebra:
    cx = abelian_complex({-1: ["x"], -2: ["y"]})
    entries = [((-1, 0), (-1, 0), 0, 1)] if with_bracket else []
    return DgLieAlgebra(cx, entries)


@pytest.fixture
def sl2():
    return make_sl2()


@pytest.fixture
def heisenberg():
    return make_heisenberg()


def catalog_dglas():
    """The dg-Lie algebras every catalog-wide test sweeps over."""
    from dglie.dgla import cone, free_dgla

    free = free_dgla(abelian_complex({0: ["u", "v"]}), 3).realized
    return {
        "sl2": make_sl2(),
        "heisenberg": make_heisenberg(),
        "abelian2": make_abelian2(),
        "en1": make_en1_dgla(),
        "x_deg_minus1": make_x_minus1(),
        "obstruction": make_obstruction(),
        "obstruction_free": make_obstruction(with_bracket=False),
        "free2gen_w3": free,
        "cone_sl2": cone(make_sl2())[0],
    }


# ---------------------------------------------------------------------------
# randomized valid inputs
# ---------------------------------------------------------------------------


def random_invertible(rng: random.Random, n: int):
    while True:
        mat = [
            [Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)
        ]
        if bareiss_rank(mat) == n:
            return mat


def random_chain_complex(rng: random.Random, total_dim: int, degree_span=(-2, 3)):
    """A random complex with d^2 = 0: canonical pieces under a basis change.

    Built as a sum of two-term acyclic pieces and points, then conjugated by
    random invertible block matrices, so the differential is exactly square
    zero but has dense-looking entries.
    """
    degrees = list(range(degree_span[0], degree_span[1] + 1))
    alloc = {n: 0 for n in degrees}
    pieces = []  # (top degree, top slot, bottom slot); slots never overlap
    budget = total_dim
    while budget > 0:
        if budget >= 2 and rng.random() < 0.6:
            n = rng.choice(degrees[1:])
            top, bot = alloc[n], alloc[n - 1]
            alloc[n] += 1
            alloc[n - 1] += 1
            pieces.append((n, top, bot))
            budget -= 2
        else:
            alloc[rng.choice(degrees)] += 1
            budget -= 1
    basis = {n: [f"g{n}_{i}" for i in range(c)] for n, c in alloc.items() if c}
    space = GradedVectorSpace(basis)
    blocks = {}
    for n, top, bot in pieces:
        mat = blocks.setdefault(
            n, linalg.zeros(space.dim(n - 1), space.dim(n))
        )
        mat[bot][top] = Fraction(1)
    conj = {
        n: random_invertible(rng, space.dim(n)) for n in space.support
    }
    inv = {}
    for n, mat in conj.items():
        size = len(mat)
        aug = [list(row) + linalg.identity(size)[i] for i, row in enumerate(mat)]
        reduced, _ = linalg.rref(aug)
        inv[n] = [row[size:] for row in reduced]
    new_blocks = {}
    for n, mat in blocks.items():
        if space.dim(n) and space.dim(n - 1):
            new_blocks[n] = linalg.mat_mul(
                linalg.mat_mul(conj[n - 1], mat), inv[n]
            )
    cx = ChainComplex(space, GradedLinearMap(space, space, -1, new_blocks))
    return cx


def conjugated_dgla(rng: random.Random, g: DgLieAlgebra) -> DgLieAlgebra:
    """Transport the structure constants through a random basis change."""
    space = g.space
    conj = {n: random_invertible(rng, space.dim(n)) for n in space.support}
    inv = {}
    for n, mat in conj.items():
        size = len(mat)
        aug = [list(row) + linalg.identity(size)[i] for i, row in enumerate(mat)]
        reduced, _ = linalg.rref(aug)
        inv[n] = [row[size:] for row in reduced]
    blocks = {}
    for n in space.support:
        if space.dim(n - 1):
            blocks[n] = linalg.mat_mul(
                linalg.mat_mul(conj[n - 1], g.complex.d(n)), inv[n]
            )
    cx = ChainComplex(space, GradedLinearMap(space, space, -1, blocks), check=False)
    entries = []
    for p in space.support:
        for q in space.support:
            if not space.dim(p + q):
                continue
            for i in range(space.dim(p)):
                for j in range(space.dim(q)):
                    # [phi^-1 e_i, phi^-1 e_j] transported forward
                    vec_i = [inv[p][r][i] for r in range(space.dim(p))]
                    vec_j = [inv[q][r][j] for r in range(space.dim(q))]
                    acc = {}
                    for a, ca in enumerate(vec_i):
                        if not ca:
                            continue
                        for b, cb in enumerate(vec_j):
                            if not cb:
                                continue
                            for k, c in g.bracket_keys((p, a), (q, b)).items():
                                acc[k] = acc.get(k, Fraction(0)) + ca * cb * c
                    for (dk, kk), c in acc.items():
                        col = [conj[dk][r][kk] for r in range(space.dim(dk))]
                        for r, cc in enumerate(col):
                            if cc:
                                entries.append(((p, i), (q, j), r, c * cc))
    return DgLieAlgebra(cx, entries)


def random_valid_dgla(rng: random.Random, max_dim=6) -> DgLieAlgebra:
    """A random valid dg-Lie algebra: complexes, conjugates, or tensors."""
    from dglie.moduli import tensor_dgla, truncated_polynomial_algebra

    choice = rng.random()
    if choice < 0.45:
        return DgLieAlgebra(
            random_chain_complex(rng, rng.randint(2, max_dim)), []
        )
    if choice < 0.75:
        base = rng.choice([make_sl2(), make_heisenberg(), make_obstruction()])
        return conjugated_dgla(rng, base)
    R = truncated_polynomial_algebra(rng.choice([2, 3]))
    base = rng.choice([make_heisenberg(), make_obstruction()])
    g = tensor_dgla(R, base)
    if g.space.total_dim() <= max_dim:
        return g
    return conjugated_dgla(rng, make_heisenberg())


def identity_dgla_morphism(g: DgLieAlgebra) -> DgLieMorphism:
    cm = ChainMap(g.complex, g.complex, identity_map(g.space), check=False)
    return DgLieMorphism(g, g, cm, check=False)


def zero_into(g: DgLieAlgebra, h: DgLieAlgebra) -> DgLieMorphism:
    cm = ChainMap(g.complex, h.complex, zero_map(g.space, h.space), check=False)
    return DgLieMorphism(g, h, cm, check=False)
