"""Dense matrices over Q(e)+iQ(e) with exact positivity decisions.

Index conventions used throughout the package:

* matrices are row-major; Kronecker products put the left factor on the
  slow index, matching ``numpy.kron``;
* a bipartite matrix on dims (dA, dB) indexes basis vectors |a,b> as
  a*dB + b (zero-based);
* the partial transpose acts on the second factor:
  <ab|M^TB|cd> = <ad|M|cb>.

The psd decision is Hermitian diagonal pivoting over the ordered field:
a positive pivot reduces to its Schur complement, a zero diagonal entry
forces its whole row to vanish (otherwise an explicit 2x2 witness exists),
and a negative diagonal entry is itself a witness.  Eigenvalues never
appear; they generally live outside Q(e).  Every NotPSD verdict carries a
witness vector that is re-verified exactly before being returned.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .epsfield import EpsComplex, EpsRational

EntryLike = Union[int, Fraction, EpsRational, EpsComplex]


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes for the requested operation."""


class NotHermitian(ValueError):
    """A Hermitian matrix was required."""


@dataclass(frozen=True)
class BipartiteDims:
    """The tensor split dA x dB of a (dA*dB)-dimensional space."""

    dA: int
    dB: int

    @property
    def dim(self) -> int:
        return self.dA * self.dB

    def check(self, n: int) -> None:
        if self.dim != n:
            raise DimensionMismatch(f"split {self.dA}x{self.dB} does not match dim {n}")


@dataclass
class PsdVerdict:
    """Outcome of an exact psd decision.

    ``pivots`` (PSD case) are the positive diagonal pivots of the
    elimination; evaluating the matrix at any e-value where all pivots stay
    positive keeps it psd, which is what the layered checks use.
    ``witness`` (NotPSD case) satisfies <v, M v> = value < 0 exactly.
    """

    status: str  # "PSD" | "NotPSD"
    witness: Optional[list[EpsComplex]] = None
    value: Optional[EpsRational] = None
    pivots: list[EpsRational] = field(default_factory=list)

    @property
    def is_psd(self) -> bool:
        return self.status == "PSD"

    def __bool__(self) -> bool:
        return self.is_psd

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.witness is not None:
            out["witness"] = [w.to_json() for w in self.witness]
        if self.value is not None:
            out["value"] = self.value.to_json()
        return out


class EpsMatrix:
    """Immutable dense matrix with EpsComplex entries."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, rows: int, cols: int, entries: Sequence[EntryLike]):
        if len(entries) != rows * cols:
            raise DimensionMismatch(f"{rows}x{cols} matrix needs {rows*cols} entries")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_e", [EpsComplex.coerce(x) for x in entries])

    def __setattr__(self, *args):
        raise AttributeError("EpsMatrix is immutable")

    # construction -----------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[EntryLike]]) -> "EpsMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat: list[EntryLike] = []
        for row in rows:
            if len(row) != c:
                raise DimensionMismatch("ragged rows")
            flat.extend(row)
        return cls(r, c, flat)

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> "EpsMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, [EpsComplex(0)] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "EpsMatrix":
        m = [EpsComplex(0)] * (n * n)
        one = EpsComplex(1)
        for i in range(n):
            m[i * n + i] = one
        return cls(n, n, m)

    @classmethod
    def basis(cls, d: int, i: int, j: int) -> "EpsMatrix":
        """The matrix unit E_ij of size d."""
        m = [EpsComplex(0)] * (d * d)
        m[i * d + j] = EpsComplex(1)
        return cls(d, d, m)

    @classmethod
    def diagonal(cls, values: Sequence[EntryLike]) -> "EpsMatrix":
        n = len(values)
        m = [EpsComplex(0)] * (n * n)
        for i, v in enumerate(values):
            m[i * n + i] = EpsComplex.coerce(v)
        return cls(n, n, m)

    # access ------------------------------------------------------------------

    def __getitem__(self, idx: tuple[int, int]) -> EpsComplex:
        i, j = idx
        return self._e[i * self.cols + j]

    def row(self, i: int) -> list[EpsComplex]:
        return self._e[i * self.cols:(i + 1) * self.cols]

    def to_lists(self) -> list[list[EpsComplex]]:
        return [self.row(i) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    # arithmetic ---------------------------------------------------------------

    def _same_shape(self, other: "EpsMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("shape mismatch")

    def __add__(self, other: "EpsMatrix") -> "EpsMatrix":
        self._same_shape(other)
        return EpsMatrix(self.rows, self.cols,
                         [a + b for a, b in zip(self._e, other._e)])

    def __sub__(self, other: "EpsMatrix") -> "EpsMatrix":
        self._same_shape(other)
        return EpsMatrix(self.rows, self.cols,
                         [a - b for a, b in zip(self._e, other._e)])

    def __neg__(self) -> "EpsMatrix":
        return EpsMatrix(self.rows, self.cols, [-a for a in self._e])

    def scale(self, s: EntryLike) -> "EpsMatrix":
        s = EpsComplex.coerce(s)
        return EpsMatrix(self.rows, self.cols, [a * s for a in self._e])

    def __mul__(self, s: EntryLike) -> "EpsMatrix":
        return self.scale(s)

    __rmul__ = __mul__

    def __matmul__(self, other: "EpsMatrix") -> "EpsMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch("matmul shape mismatch")
        out = [EpsComplex(0)] * (self.rows * other.cols)
        for i in range(self.rows):
            ri = self.row(i)
            for k, a in enumerate(ri):
                if a.is_zero:
                    continue
                rk = other.row(k)
                base = i * other.cols
                for j, b in enumerate(rk):
                    if not b.is_zero:
                        out[base + j] = out[base + j] + a * b
        return EpsMatrix(self.rows, other.cols, out)

    def transpose(self) -> "EpsMatrix":
        return EpsMatrix(self.cols, self.rows,
                         [self._e[j * self.cols + i]
                          for i in range(self.cols) for j in range(self.rows)])

    def conj(self) -> "EpsMatrix":
        return EpsMatrix(self.rows, self.cols, [a.conjugate() for a in self._e])

    def dagger(self) -> "EpsMatrix":
        return self.transpose().conj()

    def trace(self) -> EpsComplex:
        if not self.is_square:
            raise DimensionMismatch("trace of non-square matrix")
        acc = EpsComplex(0)
        for i in range(self.rows):
            acc = acc + self._e[i * self.cols + i]
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpsMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self._e == other._e

    def is_hermitian(self) -> bool:
        if not self.is_square:
            return False
        n = self.rows
        for i in range(n):
            for j in range(i, n):
                if self._e[i * n + j] != self._e[j * n + i].conjugate():
                    return False
        return True

    def is_real(self) -> bool:
        return all(a.is_real for a in self._e)

    # analysis -------------------------------------------------------------------

    def shadow(self) -> "EpsMatrix":
        """Entrywise standard part; raises InfiniteElement on infinite entries."""
        out = []
        for a in self._e:
            re, im = a.shadow()
            out.append(EpsComplex(re, im))
        return EpsMatrix(self.rows, self.cols, out)

    def to_float_array(self) -> np.ndarray:
        """Shadow, then floats.  Float work elsewhere always runs on shadows."""
        arr = np.empty((self.rows, self.cols), dtype=complex)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self._e[i * self.cols + j]
                re, im = a.shadow()
                arr[i, j] = float(re) + 1j * float(im)
        return arr

    def __repr__(self) -> str:
        return f"EpsMatrix({self.rows}x{self.cols})"

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [a.to_json() for a in self._e]}

    @classmethod
    def from_json(cls, obj: dict) -> "EpsMatrix":
        return cls(obj["rows"], obj["cols"],
                   [EpsComplex.from_json(x) for x in obj["entries"]])


# ---------------------------------------------------------------------------
# structural operations
# ---------------------------------------------------------------------------


def kron(a: EpsMatrix, b: EpsMatrix) -> EpsMatrix:
    """Kronecker product, left factor on the slow index."""
    rows = a.rows * b.rows
    cols = a.cols * b.cols
    out = [EpsComplex(0)] * (rows * cols)
    for i in range(a.rows):
        for j in range(a.cols):
            x = a[i, j]
            if x.is_zero:
                continue
            for k in range(b.rows):
                base = (i * b.rows + k) * cols + j * b.cols
                brow = b.row(k)
                for l, y in enumerate(brow):
                    if not y.is_zero:
                        out[base + l] = x * y
    return EpsMatrix(rows, cols, out)


def kron_all(mats: Sequence[EpsMatrix]) -> EpsMatrix:
    out = mats[0]
    for m in mats[1:]:
        out = kron(out, m)
    return out


def partial_transpose(m: EpsMatrix, dims: BipartiteDims) -> EpsMatrix:
    """Transpose the second tensor factor: <ab|out|cd> = <ad|m|cb>."""
    if not m.is_square:
        raise DimensionMismatch("partial transpose of non-square matrix")
    dims.check(m.rows)
    dA, dB = dims.dA, dims.dB
    n = m.rows
    out = [EpsComplex(0)] * (n * n)
    for a in range(dA):
        for b in range(dB):
            for c in range(dA):
                for d in range(dB):
                    out[(a * dB + b) * n + (c * dB + d)] = m[a * dB + d, c * dB + b]
    return EpsMatrix(n, n, out)


def partial_trace(m: EpsMatrix, dims: BipartiteDims, keep: str = "first") -> EpsMatrix:
    """Trace out one factor; ``keep`` selects the surviving factor."""
    if not m.is_square:
        raise DimensionMismatch("partial trace of non-square matrix")
    dims.check(m.rows)
    dA, dB = dims.dA, dims.dB
    if keep == "first":
        out = [EpsComplex(0)] * (dA * dA)
        for a in range(dA):
            for c in range(dA):
                acc = EpsComplex(0)
                for b in range(dB):
                    acc = acc + m[a * dB + b, c * dB + b]
                out[a * dA + c] = acc
        return EpsMatrix(dA, dA, out)
    if keep == "second":
        out = [EpsComplex(0)] * (dB * dB)
        for b in range(dB):
            for d in range(dB):
                acc = EpsComplex(0)
                for a in range(dA):
                    acc = acc + m[a * dB + b, a * dB + d]
                out[b * dB + d] = acc
        return EpsMatrix(dB, dB, out)
    raise ValueError("keep must be 'first' or 'second'")


def flip_operator(d: int) -> EpsMatrix:
    """The swap F with F|ij> = |ji>."""
    n = d * d
    m = [EpsComplex(0)] * (n * n)
    for i in range(d):
        for j in range(d):
            m[(i * d + j) * n + (j * d + i)] = EpsComplex(1)
    return EpsMatrix(n, n, m)


def max_ent_projector(d: int) -> EpsMatrix:
    """Projector onto the maximally entangled direction, (1/d) sum |ii><jj|.

    Only the projector is exposed; the 1/sqrt(d) vector normalization never
    appears, so all entries stay rational.
    """
    n = d * d
    m = [EpsComplex(0)] * (n * n)
    w = EpsComplex(Fraction(1, d))
    for i in range(d):
        for j in range(d):
            m[(i * d + i) * n + (j * d + j)] = w
    return EpsMatrix(n, n, m)


# ---------------------------------------------------------------------------
# vectors and quadratic forms
# ---------------------------------------------------------------------------


def as_vector(entries: Sequence[EntryLike]) -> list[EpsComplex]:
    return [EpsComplex.coerce(x) for x in entries]


def basis_vector(n: int, i: int) -> list[EpsComplex]:
    v = [EpsComplex(0)] * n
    v[i] = EpsComplex(1)
    return v


def mat_vec(m: EpsMatrix, v: Sequence[EpsComplex]) -> list[EpsComplex]:
    if m.cols != len(v):
        raise DimensionMismatch("mat_vec shape mismatch")
    out = []
    for i in range(m.rows):
        acc = EpsComplex(0)
        for a, x in zip(m.row(i), v):
            if not (a.is_zero or x.is_zero):
                acc = acc + a * x
        out.append(acc)
    return out


def quadratic_form(m: EpsMatrix, v: Sequence[EpsComplex]) -> EpsComplex:
    """<v, M v> with the conjugation on the left argument."""
    mv = mat_vec(m, v)
    acc = EpsComplex(0)
    for x, y in zip(v, mv):
        acc = acc + x.conjugate() * y
    return acc


def vec_kron(a: Sequence[EpsComplex], b: Sequence[EpsComplex]) -> list[EpsComplex]:
    return [x * y for x in a for y in b]


# ---------------------------------------------------------------------------
# exact psd decision
# ---------------------------------------------------------------------------


def psd_check(m: EpsMatrix) -> PsdVerdict:
    """Exact psd decision over the ordered field, with certified outputs.

    Recursive Hermitian pivoting: positive pivot -> Schur complement; zero
    diagonal entry with a nonzero row entry -> explicit 2x2 witness; negative
    diagonal entry -> basis witness.  NotPSD witnesses are back-substituted
    to the full space and re-verified before returning.
    """
    if not m.is_hermitian():
        raise NotHermitian("psd_check requires a Hermitian matrix")
    work = m.to_lists()
    pivots: list[EpsRational] = []
    outcome = _pivot(work, pivots)
    if outcome is None:
        return PsdVerdict("PSD", pivots=pivots)
    value = quadratic_form(m, outcome)
    if not value.is_real or value.re.sign() >= 0:
        raise AssertionError("internal error: witness failed exact re-verification")
    return PsdVerdict("NotPSD", witness=outcome, value=value.re)


def _pivot(a: list[list[EpsComplex]], pivots: list[EpsRational]) -> Optional[list[EpsComplex]]:
    """Returns None if psd, else a witness vector in the current coordinates."""
    n = len(a)
    if n == 0:
        return None
    d = a[0][0].re  # hermitian diagonal is real
    s = d.sign()
    if s < 0:
        return basis_vector(n, 0)
    if s == 0:
        off = next((j for j in range(1, n) if not a[0][j].is_zero), None)
        if off is not None:
            # v = t e0 + e_off with t = -(c+1)/(2 conj(m)) gives value exactly -1
            mval = a[0][off]
            c = a[off][off].re
            t = EpsComplex(-(c + 1)) / (mval.conjugate() * 2)
            v = [EpsComplex(0)] * n
            v[0] = t
            v[off] = EpsComplex(1)
            return v
        sub = [row[1:] for row in a[1:]]
        w = _pivot(sub, pivots)
        if w is None:
            return None
        return [EpsComplex(0)] + w
    pivots.append(d)
    col = [a[i][0] for i in range(1, n)]
    sub = []
    for i in range(1, n):
        ci = col[i - 1]
        row = []
        for j in range(1, n):
            row.append(a[i][j] - ci * a[0][j] / d)
        sub.append(row)
    w = _pivot(sub, pivots)
    if w is None:
        return None
    # lift: t = -(c^dag w)/d where c^dag w = sum_j a[0][j+1] w_j
    acc = EpsComplex(0)
    for j, wj in enumerate(w):
        if not wj.is_zero:
            acc = acc + a[0][j + 1] * wj
    t = -acc / d
    return [t] + w


# ---------------------------------------------------------------------------
# exact rank / kernel
# ---------------------------------------------------------------------------


def _row_reduce(a: list[list[EpsComplex]]) -> tuple[list[list[EpsComplex]], list[int]]:
    rows = len(a)
    cols = len(a[0]) if rows else 0
    piv_cols: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if not a[i][c].is_zero), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(rows):
            if i != r and not a[i][c].is_zero:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    return a, piv_cols


def rank(m: EpsMatrix) -> int:
    _, piv = _row_reduce(m.to_lists())
    return len(piv)


def kernel_basis(m: EpsMatrix) -> list[list[EpsComplex]]:
    """Exact kernel basis; every returned v satisfies M v = 0 (re-verified)."""
    red, piv = _row_reduce(m.to_lists())
    cols = m.cols
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [EpsComplex(0)] * cols
        v[f] = EpsComplex(1)
        for r, c in enumerate(piv):
            v[c] = -red[r][f]
        if any(not x.is_zero for x in mat_vec(m, v)):
            raise AssertionError("internal error: kernel vector failed M v = 0")
        basis.append(v)
    return basis


def is_product_vector(v: Sequence[EpsComplex], dims: BipartiteDims) -> bool:
    """True iff the dA x dB reshape of v has rank <= 1 (exact)."""
    if len(v) != dims.dim:
        raise DimensionMismatch("vector length does not match split")
    resh = EpsMatrix(dims.dA, dims.dB, list(v))
    return rank(resh) <= 1


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def save_matrix(m: EpsMatrix, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(m.to_json(), fh)


def load_matrix(path: str) -> EpsMatrix:
    with open(path) as fh:
        return EpsMatrix.from_json(json.load(fh))
