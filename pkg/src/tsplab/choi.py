"""Choi-matrix machinery for linear maps between matrix algebras.

A map P: M_{d_in} -> M_{d_out} is carried around as a decomposition
P(X) = sum_i A_i tr(B_i^T X) with A_i of size d_out and B_i of size d_in.
Its Choi matrix is

    C_P = (1/d_in) sum_i A_i (x) B_i  in  M_{d_out} (x) M_{d_in},

output factor on the left, input factor on the right.  Every partial
transpose taken in the completely-co-positive checks acts on the input
(second) factor.  This single convention is asserted by the tests and is
the one written into the matrix files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .epsfield import EpsComplex, EpsRational
from .hypermat import (
    BipartiteDims,
    DimensionMismatch,
    EpsMatrix,
    PsdVerdict,
    kron,
    partial_trace,
    partial_transpose,
    psd_check,
    _row_reduce,
)


class ResourceLimit(RuntimeError):
    """A dense object would exceed the configured size cap."""


DEFAULT_MAX_DIM = 2000


@dataclass(frozen=True)
class MapDecomposition:
    """A linear map as a list of (A_i, B_i) pairs."""

    d_in: int
    d_out: int
    terms: tuple[tuple[EpsMatrix, EpsMatrix], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a map needs at least one term")
        for a, b in self.terms:
            if a.rows != self.d_out or a.cols != self.d_out:
                raise DimensionMismatch("A_i must be d_out x d_out")
            if b.rows != self.d_in or b.cols != self.d_in:
                raise DimensionMismatch("B_i must be d_in x d_in")

    @property
    def rank_bound(self) -> int:
        return len(self.terms)

    def to_json(self) -> dict:
        return {"d_in": self.d_in, "d_out": self.d_out,
                "terms": [{"A": a.to_json(), "B": b.to_json()} for a, b in self.terms]}

    @classmethod
    def from_json(cls, obj: dict) -> "MapDecomposition":
        terms = tuple((EpsMatrix.from_json(t["A"]), EpsMatrix.from_json(t["B"]))
                      for t in obj["terms"])
        return cls(d_in=obj["d_in"], d_out=obj["d_out"], terms=terms)


@dataclass(frozen=True)
class ChoiMatrix:
    """A Choi matrix together with its output (x) input split."""

    matrix: EpsMatrix
    dims: BipartiteDims  # dA = d_out, dB = d_in

    @property
    def d_out(self) -> int:
        return self.dims.dA

    @property
    def d_in(self) -> int:
        return self.dims.dB

    def input_transpose(self) -> "ChoiMatrix":
        return ChoiMatrix(partial_transpose(self.matrix, self.dims), self.dims)


MapLike = Union[MapDecomposition, ChoiMatrix]


# ---------------------------------------------------------------------------
# core correspondence
# ---------------------------------------------------------------------------


def choi_from_decomposition(p: MapDecomposition) -> ChoiMatrix:
    """C_P = (1/d_in) sum_i kron(A_i, B_i)."""
    acc = EpsMatrix.zeros(p.d_out * p.d_in)
    for a, b in p.terms:
        acc = acc + kron(a, b)
    return ChoiMatrix(acc.scale(Fraction(1, p.d_in)), BipartiteDims(p.d_out, p.d_in))


def apply_map(p: MapDecomposition, x: EpsMatrix) -> EpsMatrix:
    """P(X) = sum_i A_i tr(B_i^T X), evaluated exactly."""
    if x.rows != p.d_in or x.cols != p.d_in:
        raise DimensionMismatch("input must be d_in x d_in")
    out = EpsMatrix.zeros(p.d_out)
    for a, b in p.terms:
        coef = EpsComplex(0)
        for i in range(p.d_in):
            for j in range(p.d_in):
                bij = b[i, j]
                if not bij.is_zero:
                    coef = coef + bij * x[i, j]
        if not coef.is_zero:
            out = out + a.scale(coef)
    return out


def choi_tensor_power(p: MapDecomposition, n: int,
                      max_dim: int = DEFAULT_MAX_DIM) -> ChoiMatrix:
    """Choi matrix of the n-fold tensor power, output factors grouped left.

    The grouped matrix is built entrywise as products of single-copy Choi
    entries: with multi-indices a, i, b, j running over n-tuples,
    out[(a,i),(b,j)] = prod_l C[(a_l,i_l),(b_l,j_l)].  The giant permutation
    of a plain Kronecker power is never materialized.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    c = choi_from_decomposition(p)
    dim = (p.d_out * p.d_in) ** n
    if dim > max_dim:
        raise ResourceLimit(f"dense Choi power dim {dim} exceeds cap {max_dim}")
    do, di = p.d_out, p.d_in
    base = c.matrix
    nz = [(a, i, b, j, base[a * di + i, b * di + j])
          for a in range(do) for i in range(di)
          for b in range(do) for j in range(di)
          if not base[a * di + i, b * di + j].is_zero]
    entries = {(0, 0, 0, 0): EpsComplex(1)}  # (A, I, B, J) multi-index -> value
    for _ in range(n):
        nxt: dict[tuple[int, int, int, int], EpsComplex] = {}
        for (A, I, B, J), v in entries.items():
            for a, i, b, j, cv in nz:
                nxt[(A * do + a, I * di + i, B * do + b, J * di + j)] = v * cv
        entries = nxt
    no, ni = do ** n, di ** n
    flat = [EpsComplex(0)] * (dim * dim)
    for (A, I, B, J), v in entries.items():
        flat[(A * ni + I) * dim + (B * ni + J)] = v
    return ChoiMatrix(EpsMatrix(dim, dim, flat), BipartiteDims(no, ni))


def decomposition_from_choi(c: ChoiMatrix) -> MapDecomposition:
    """Operator-Schmidt style splitting of a Choi matrix into (A_i, B_i) pairs.

    Reshuffle R[(a,b),(i,j)] = d_in * C[(a,i),(b,j)], then a rank
    factorization R = (pivot columns) @ (reduced rows) by exact elimination.
    No orthogonality is claimed; terms are linearly independent.
    """
    do, di = c.d_out, c.d_in
    m = c.matrix
    r_rows, r_cols = do * do, di * di
    resh = [[EpsComplex(0)] * r_cols for _ in range(r_rows)]
    for a in range(do):
        for b in range(do):
            for i in range(di):
                for j in range(di):
                    resh[a * do + b][i * di + j] = m[a * di + i, b * di + j] * di
    work = [row[:] for row in resh]
    red, piv = _row_reduce(work)
    if not piv:
        # the zero map; keep a single zero term
        return MapDecomposition(d_in=di, d_out=do,
                                terms=((EpsMatrix.zeros(do), EpsMatrix.zeros(di)),))
    terms = []
    for k, pc in enumerate(piv):
        col = [resh[r][pc] for r in range(r_rows)]
        a_mat = EpsMatrix(do, do, col)
        b_mat = EpsMatrix(di, di, red[k])
        terms.append((a_mat, b_mat))
    return MapDecomposition(d_in=di, d_out=do, terms=tuple(terms))


# ---------------------------------------------------------------------------
# positivity-class predicates
# ---------------------------------------------------------------------------


def _as_choi(p: MapLike) -> ChoiMatrix:
    return p if isinstance(p, ChoiMatrix) else choi_from_decomposition(p)


def is_cp(p: MapLike) -> PsdVerdict:
    """Completely positive iff the Choi matrix is psd (exact)."""
    return psd_check(_as_choi(p).matrix)


def is_cocp(p: MapLike) -> PsdVerdict:
    """Completely co-positive iff the input-transposed Choi matrix is psd."""
    return psd_check(_as_choi(p).input_transpose().matrix)


def eb_witness_check(p: MapDecomposition) -> bool:
    """True when every A_i and B_i of the supplied decomposition is psd.

    Sufficient condition only: it certifies the Choi matrix separable, hence
    the map entanglement breaking.  False does not mean "not entanglement
    breaking"; it only means this decomposition is not a witness.
    """
    for a, b in p.terms:
        if not (a.is_hermitian() and b.is_hermitian()):
            return False
        if not (psd_check(a).is_psd and psd_check(b).is_psd):
            return False
    return True


def compose_with_transpose(p: MapDecomposition) -> MapDecomposition:
    """Decomposition of theta o P: every A_i is transposed."""
    return MapDecomposition(d_in=p.d_in, d_out=p.d_out,
                            terms=tuple((a.transpose(), b) for a, b in p.terms))


# ---------------------------------------------------------------------------
# map algebra and the standard maps
# ---------------------------------------------------------------------------


def map_sum(p: MapDecomposition, q: MapDecomposition) -> MapDecomposition:
    if (p.d_in, p.d_out) != (q.d_in, q.d_out):
        raise DimensionMismatch("map dims differ")
    return MapDecomposition(d_in=p.d_in, d_out=p.d_out, terms=p.terms + q.terms)


def map_scale(p: MapDecomposition, s) -> MapDecomposition:
    return MapDecomposition(d_in=p.d_in, d_out=p.d_out,
                            terms=tuple((a.scale(s), b) for a, b in p.terms))


def identity_map(d: int) -> MapDecomposition:
    terms = tuple((EpsMatrix.basis(d, k, l), EpsMatrix.basis(d, k, l))
                  for k in range(d) for l in range(d))
    return MapDecomposition(d_in=d, d_out=d, terms=terms)


def transpose_map(d: int) -> MapDecomposition:
    terms = tuple((EpsMatrix.basis(d, k, l), EpsMatrix.basis(d, l, k))
                  for k in range(d) for l in range(d))
    return MapDecomposition(d_in=d, d_out=d, terms=terms)


def depolarizing_map(d_in: int, d_out: Optional[int] = None) -> MapDecomposition:
    """X -> tr(X) * identity; entanglement breaking in the (1, 1) form."""
    d_out = d_in if d_out is None else d_out
    return MapDecomposition(d_in=d_in, d_out=d_out,
                            terms=((EpsMatrix.identity(d_out), EpsMatrix.identity(d_in)),))


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def save_map(p: MapDecomposition, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(p.to_json(), fh)


def load_map(path: str) -> MapDecomposition:
    with open(path) as fh:
        return MapDecomposition.from_json(json.load(fh))
