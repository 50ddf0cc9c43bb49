"""Graded vector spaces over Q, chain complexes, and homology.

Grading is homological: the differential of a chain complex lowers degree by
one.  Every object is finitely supported on integer degrees inside the window
[-64, 64], immutable after construction, and all arithmetic is exact rational
(``fractions.Fraction``); rank and sign correctness is the entire point, so
there is no floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .errors import DegreeOutOfBounds, InvalidComplex, MalformedInput, NotAChainMap

DEGREE_BOUND = 64

ZERO = Fraction(0)
ONE = Fraction(1)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise MalformedInput(f"not an exact rational: {x!r}")


class GradedVectorSpace:
    """Finitely supported integer-graded space with named basis vectors.

    basis: dict degree -> ordered list of distinct string labels.  Degrees
    with no basis vectors are dropped from the support.
    """

    __slots__ = ("basis",)

    def __init__(self, basis: dict[int, list[str]]):
        clean: dict[int, tuple[str, ...]] = {}
        for deg, labels in basis.items():
            deg = int(deg)
            labels = tuple(labels)
            if not labels:
                continue
            if abs(deg) > DEGREE_BOUND:
                raise DegreeOutOfBounds(
                    f"degree {deg} outside [-{DEGREE_BOUND}, {DEGREE_BOUND}]"
                )
            if len(set(labels)) != len(labels):
                raise MalformedInput(f"duplicate basis labels in degree {deg}")
            clean[deg] = labels
        object.__setattr__(self, "basis", dict(sorted(clean.items())))

    def __setattr__(self, *_):
        raise AttributeError("GradedVectorSpace is immutable")

    @property
    def support(self) -> list[int]:
        return list(self.basis)

    def dim(self, degree: int) -> int:
        return len(self.basis.get(degree, ()))

    def total_dim(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def labels(self, degree: int) -> tuple[str, ...]:
        return self.basis.get(degree, ())

    def dims(self) -> dict[int, int]:
        return {d: len(v) for d, v in self.basis.items()}

    def index(self, degree: int, label: str) -> int:
        return self.basis[degree].index(label)

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedVectorSpace) and self.basis == other.basis

    def __hash__(self):
        return hash(tuple((d, v) for d, v in self.basis.items()))

    def __repr__(self):
        dims = ", ".join(f"{d}:{len(v)}" for d, v in self.basis.items())
        return f"GradedVectorSpace({{{dims}}})"


def zero_space() -> GradedVectorSpace:
    return GradedVectorSpace({})


class GradedLinearMap:
    """Degree-homogeneous linear map between graded spaces.

    blocks[n] is the matrix of the component source_n -> target_{n+shift},
    rows indexed by the target basis, columns by the source basis.  Missing
    blocks are zero.
    """

    __slots__ = ("source", "target", "shift", "blocks")

    def __init__(self, source, target, shift, blocks: dict[int, list[list[Fraction]]]):
        clean = {}
        for n, mat in blocks.items():
            n = int(n)
            rows = target.dim(n + shift)
            cols = source.dim(n)
            if len(mat) != rows or any(len(r) != cols for r in mat):
                raise MalformedInput(
                    f"block at degree {n} has shape "
                    f"{(len(mat), len(mat[0]) if mat else 0)}, expected {(rows, cols)}"
                )
            mat = [[_as_fraction(x) for x in r] for r in mat]
            if any(x != 0 for r in mat for x in r):
                clean[n] = mat
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "shift", int(shift))
        object.__setattr__(self, "blocks", dict(sorted(clean.items())))

    def __setattr__(self, *_):
        raise AttributeError("GradedLinearMap is immutable")

    def block(self, n: int) -> list[list[Fraction]]:
        b = self.blocks.get(n)
        if b is not None:
            return b
        return linalg.zeros(self.target.dim(n + self.shift), self.source.dim(n))

    def apply(self, degree: int, vec: list[Fraction]) -> list[Fraction]:
        return linalg.mat_vec(self.block(degree), vec)

    def compose(self, other: "GradedLinearMap") -> "GradedLinearMap":
        """self after other (self ∘ other)."""
        if other.target.basis != self.source.basis:
            raise MalformedInput("composition: inner spaces do not coincide")
        blocks = {}
        for n in other.source.support:
            blocks[n] = linalg.mat_mul(self.block(n + other.shift), other.block(n))
        return GradedLinearMap(
            other.source, self.target, self.shift + other.shift, blocks
        )

    def add(self, other: "GradedLinearMap") -> "GradedLinearMap":
        if (self.source, self.target, self.shift) != (
            other.source,
            other.target,
            other.shift,
        ):
            raise MalformedInput("sum of maps with different shapes")
        degrees = set(self.blocks) | set(other.blocks)
        blocks = {
            n: [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.block(n), other.block(n))
            ]
            for n in degrees
        }
        return GradedLinearMap(self.source, self.target, self.shift, blocks)

    def scale(self, c) -> "GradedLinearMap":
        c = _as_fraction(c)
        return GradedLinearMap(
            self.source,
            self.target,
            self.shift,
            {n: [[c * x for x in r] for r in m] for n, m in self.blocks.items()},
        )

    def is_zero(self) -> bool:
        return not self.blocks

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedLinearMap)
            and self.source == other.source
            and self.target == other.target
            and self.shift == other.shift
            and self.blocks == other.blocks
        )

    def __repr__(self):
        return f"GradedLinearMap(shift={self.shift}, blocks at {list(self.blocks)})"


def zero_map(source, target, shift=0) -> GradedLinearMap:
    return GradedLinearMap(source, target, shift, {})


def identity_map(space) -> GradedLinearMap:
    return GradedLinearMap(
        space, space, 0, {n: linalg.identity(space.dim(n)) for n in space.support}
    )


class ChainComplex:
    """Graded space with a degree -1 differential squaring to zero."""

    __slots__ = ("space", "differential")

    def __init__(self, space, differential, check=True):
        if differential.shift != -1:
            raise MalformedInput("differential must have degree -1")
        if differential.source is not space or differential.source.basis != space.basis:
            raise MalformedInput("differential not defined on the complex's space")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "differential", differential)
        if check:
            bad = self.dd_failures()
            if bad:
                raise InvalidComplex(f"d*d != 0 at degrees {bad}")

    def __setattr__(self, *_):
        raise AttributeError("ChainComplex is immutable")

    def dd_failures(self) -> list[int]:
        d = self.differential
        out = []
        for n in self.space.support:
            prod = linalg.mat_mul(d.block(n - 1), d.block(n))
            if not linalg.is_zero_matrix(prod):
                out.append(n)
        return out

    def d(self, n: int) -> list[list[Fraction]]:
        return self.differential.block(n)

    def __repr__(self):
        return f"ChainComplex({self.space!r})"


class ChainMap:
    """Degree-0 map of complexes commuting with the differentials."""

    __slots__ = ("source", "target", "map")

    def __init__(self, source: ChainComplex, target: ChainComplex, gmap, check=True):
        if gmap.shift != 0:
            raise MalformedInput("chain maps have degree shift 0")
        if gmap.source.basis != source.space.basis or gmap.target.basis != target.space.basis:
            raise MalformedInput("underlying map does not match the complexes")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "map", gmap)
        if check:
            bad = self.commutation_failures()
            if bad:
                raise NotAChainMap(f"fails to commute with d at degrees {bad}")

    def __setattr__(self, *_):
        raise AttributeError("ChainMap is immutable")

    def commutation_failures(self) -> list[int]:
        out = []
        degrees = set(self.source.space.support) | set(self.target.space.support)
        for n in sorted(degrees):
            left = linalg.mat_mul(self.target.d(n), self.map.block(n))
            right = linalg.mat_mul(self.map.block(n - 1), self.source.d(n))
            if linalg.is_zero_matrix(left) and linalg.is_zero_matrix(right):
                continue  # degenerate shapes: a zero map is a zero map
            if left != right:
                out.append(n)
        return out

    def compose(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(other.source, self.target, self.map.compose(other.map), check=False)

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"


# ---------------------------------------------------------------------------
# constructions on graded spaces
# ---------------------------------------------------------------------------

TENSOR_SEPARATOR = "⊗"  # ⊗


def tensor(V: GradedVectorSpace, W: GradedVectorSpace) -> GradedVectorSpace:
    """Tensor product; (V ⊗ W)_n = sum over p+q=n of V_p ⊗ W_q.

    Basis labels are the ordered pairs "v⊗w", listed by ascending p, then by
    the basis orders of V_p and W_{n-p}.
    """
    basis: dict[int, list[str]] = {}
    for p in V.support:
        for q in W.support:
            n = p + q
            labels = basis.setdefault(n, [])
            for v in V.labels(p):
                for w in W.labels(q):
                    labels.append(f"{v}{TENSOR_SEPARATOR}{w}")
    return GradedVectorSpace(basis)


def tensor_pairs(V: GradedVectorSpace, W: GradedVectorSpace, n: int):
    """The (p, i, q, j) index quadruples behind tensor(V, W)'s degree-n basis."""
    out = []
    for p in V.support:
        q = n - p
        for i in range(V.dim(p)):
            for j in range(W.dim(q)):
                out.append((p, i, q, j))
    return out


def braiding(V: GradedVectorSpace, W: GradedVectorSpace) -> GradedLinearMap:
    """The symmetry V⊗W -> W⊗V sending v⊗w to (-1)^{pq} w⊗v."""
    src = tensor(V, W)
    tgt = tensor(W, V)
    blocks = {}
    for n in src.support:
        src_idx = tensor_pairs(V, W, n)
        tgt_idx = {t: k for k, t in enumerate(tensor_pairs(W, V, n))}
        mat = linalg.zeros(tgt.dim(n), src.dim(n))
        for col, (p, i, q, j) in enumerate(src_idx):
            row = tgt_idx[(q, j, p, i)]
            mat[row][col] = ONE if (p * q) % 2 == 0 else -ONE
        blocks[n] = mat
    return GradedLinearMap(src, tgt, 0, blocks)


def shift(V: GradedVectorSpace, n: int) -> GradedVectorSpace:
    """Graded shift; shift(V, n) has V's degree p-n basis in degree p."""
    return GradedVectorSpace({p + n: list(labels) for p, labels in V.basis.items()})


DUAL_MARK = "∨"  # ∨


def graded_dual(V: GradedVectorSpace) -> GradedVectorSpace:
    """Graded dual; degree p of the dual is the dual of V at degree -p."""
    return GradedVectorSpace(
        {-p: [f"{x}{DUAL_MARK}" for x in labels] for p, labels in V.basis.items()}
    )


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------


def homology(C: ChainComplex, n: int) -> tuple[int, list[list[Fraction]]]:
    """Dimension and canonical cycle representatives of H_n(C).

    Representatives are kernel vectors reduced modulo the image of d_{n+1}
    and put in reduced row echelon form, so the output is deterministic under
    any construction order.  Raises InvalidComplex if d*d != 0.
    """
    bad = C.dd_failures()
    if bad:
        raise InvalidComplex(f"d*d != 0 at degrees {bad}")
    return _homology_unchecked(C, n)


def _homology_unchecked(C: ChainComplex, n: int):
    dim_n = C.space.dim(n)
    if dim_n == 0:
        return 0, []
    ker = linalg.kernel_basis(C.d(n), dim_n)
    img_rows, img_pivots = linalg.rref(linalg.transpose(C.d(n + 1)))
    residuals = []
    for v in ker:
        r = linalg.row_reduce_vector(v, img_rows, img_pivots)
        if any(x != 0 for x in r):
            residuals.append(r)
    reps, _ = linalg.rref(residuals)
    return len(reps), reps


def homology_dims(C: ChainComplex) -> dict[int, int]:
    degrees = set(C.space.support)
    out = {}
    for n in sorted(degrees):
        dim, _ = homology(C, n)
        if dim:
            out[n] = dim
    return out


def is_quasi_iso(f: ChainMap, degrees=None) -> tuple[bool, list[int]]:
    """Whether f induces isomorphisms on homology, with failing degrees.

    degrees restricts the check (used by callers working inside a truncation
    window); by default every degree in the union of the supports is checked.
    """
    bad = f.commutation_failures()
    if bad:
        raise NotAChainMap(f"fails to commute with d at degrees {bad}")
    if degrees is None:
        degrees = sorted(set(f.source.space.support) | set(f.target.space.support))
    failures = []
    for n in degrees:
        hs, src_reps = _homology_unchecked(f.source, n)
        ht, _ = _homology_unchecked(f.target, n)
        if hs != ht:
            failures.append(n)
            continue
        if hs == 0:
            continue
        img_rows, _ = linalg.rref(linalg.transpose(f.target.d(n + 1)))
        mapped = [linalg.mat_vec(f.map.block(n), v) for v in src_reps]
        stacked = img_rows + mapped
        if linalg.rank(stacked) - len(img_rows) != hs:
            failures.append(n)
    return not failures, failures
