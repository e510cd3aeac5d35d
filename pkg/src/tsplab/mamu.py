"""The matrix-multiplication projector, MPO diagonals, and decision loops.

The projector chi_n is built from the vector

    |chi_n> = sum |i1,i2> (x) |i2,i3> (x) ... (x) |in,i1>,

a ring of unnormalized maximally entangled pairs over n sites of local
dimension d^2.  An MPO tensor C = (C_i), i = 1..t, with s x s rational
matrices defines the diagonal

    tau_n(C) = sum tr(C_{i1} ... C_{in}) |i1..in><i1..in|,

and for s = d^2 the tensor reduces to a map P with A_i = |i><i| and B_i the
index reshuffle B_i[(mu,lam),(nu,rho)] = C_i[(mu,nu),(lam,rho)], for which
P^{(x)n}(chi_n) = tau_n(C) exactly.  Multi-index packing is (mu,nu) ->
mu*d + nu, zero-based, used consistently on both sides of the reshuffle;
tuple indexing of tau values is lexicographic with i1 slowest.

Two independent evaluation routes are kept:

* transfer route (fast): the coefficient of a tuple is the trace of a
  product of per-site transfer matrices U[(k,j),(k',j')] = B[(k,k'),(j,j')];
* dense route (cross-check): the same coefficient as the explicit quadratic
  form of (x) B_i^T against the chi_n vector, feasible for small n.

Everything here is exact over the rationals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .epsfield import EpsComplex, EpsRational
from .hypermat import DimensionMismatch, EpsMatrix, PsdVerdict, kron, psd_check
from .choi import MapDecomposition, ResourceLimit

FracMatrix = tuple[tuple[Fraction, ...], ...]

DEFAULT_MAX_DENSE_DIM = 2000
DEFAULT_MAX_DIAG = 2_000_000


class NotPerfectSquare(ValueError):
    """The bond dimension must be a perfect square to reduce to a map."""


# ---------------------------------------------------------------------------
# rational matrix plumbing
# ---------------------------------------------------------------------------


def _frac_matrix(rows: Sequence[Sequence]) -> FracMatrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _frac_matmul(a: FracMatrix, b: FracMatrix) -> FracMatrix:
    n, k, m = len(a), len(b), len(b[0])
    bt = list(zip(*b))
    return tuple(tuple(sum(ra[x] * cb[x] for x in range(k)) for cb in bt) for ra in a)


def _frac_trace(a: FracMatrix) -> Fraction:
    return sum(a[i][i] for i in range(len(a)))


def _eps_to_frac(m: EpsMatrix) -> FracMatrix:
    rows = []
    for i in range(m.rows):
        row = []
        for j in range(m.cols):
            z = m[i, j]
            if not z.im.is_zero or not z.re.is_rational:
                raise ValueError("rational entries required")
            row.append(z.re.as_rational())
        rows.append(tuple(row))
    return tuple(rows)


def _frac_to_eps(a: FracMatrix) -> EpsMatrix:
    return EpsMatrix.from_rows([list(row) for row in a])


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MpoTensor:
    """Bond dimension s, physical dimension t, and t rational s x s matrices."""

    s: int
    t: int
    matrices: tuple[FracMatrix, ...]

    def __post_init__(self):
        if len(self.matrices) != self.t:
            raise DimensionMismatch("need exactly t matrices")
        for m in self.matrices:
            if len(m) != self.s or any(len(r) != self.s for r in m):
                raise DimensionMismatch("every matrix must be s x s")

    @classmethod
    def from_rows(cls, matrices: Sequence[Sequence[Sequence]]) -> "MpoTensor":
        mats = tuple(_frac_matrix(m) for m in matrices)
        return cls(s=len(mats[0]), t=len(mats), matrices=mats)

    def to_json(self) -> dict:
        return {"s": self.s, "t": self.t,
                "matrices": [_frac_to_eps(m).to_json() for m in self.matrices]}

    @classmethod
    def from_json(cls, obj: dict) -> "MpoTensor":
        mats = tuple(_eps_to_frac(EpsMatrix.from_json(m)) for m in obj["matrices"])
        out = cls(s=obj["s"], t=obj["t"], matrices=mats)
        return out


@dataclass
class MamuDiagonal:
    """tau_n values, one rational per index tuple, i1 slowest (lexicographic)."""

    t: int
    n: int
    values: list[Fraction]

    def index_tuple(self, flat: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n):
            flat, r = divmod(flat, self.t)
            out.append(r)
        return tuple(reversed(out))

    def first_negative(self) -> Optional[tuple[tuple[int, ...], Fraction]]:
        for k, v in enumerate(self.values):
            if v < 0:
                return self.index_tuple(k), v
        return None

    def to_json(self) -> dict:
        return {"t": self.t, "n": self.n, "values": [str(v) for v in self.values]}


@dataclass
class MamuImage:
    """P^{(x)n}(chi_n) in compressed form.

    ``uniform``: a scalar multiple of the identity (all A_i scalar),
    ``diagonal``: an explicit diagonal (all A_i diagonal),
    ``dense``: a full matrix.  Values are exact rationals throughout.
    """

    kind: str
    dim: int
    n: int
    value: Optional[Fraction] = None
    values: Optional[list[Fraction]] = None
    matrix: Optional[EpsMatrix] = None

    def diagonal_values(self) -> list[Fraction]:
        if self.kind == "uniform":
            return [self.value] * self.dim
        if self.kind == "diagonal":
            return list(self.values)
        m = self.matrix
        return [m[i, i].re.as_rational() for i in range(m.rows)]

    def psd_verdict(self) -> PsdVerdict:
        if self.kind == "uniform":
            if self.value >= 0:
                return PsdVerdict("PSD")
            return PsdVerdict("NotPSD",
                              witness=[EpsComplex(1)] + [EpsComplex(0)] * (self.dim - 1),
                              value=EpsRational.from_rational(self.value))
        if self.kind == "diagonal":
            for k, v in enumerate(self.values):
                if v < 0:
                    w = [EpsComplex(0)] * self.dim
                    w[k] = EpsComplex(1)
                    return PsdVerdict("NotPSD", witness=w, value=EpsRational.from_rational(v))
            return PsdVerdict("PSD")
        return psd_check(self.matrix)


@dataclass
class BoundedVerdict:
    """Outcome of a first-failure loop over n = 1..n_max (zero-based tuples)."""

    status: str  # "NoViolationUpTo" | "Violation"
    n: int
    index_tuple: Optional[tuple[int, ...]] = None
    value: Optional[Fraction] = None

    @property
    def violated(self) -> bool:
        return self.status == "Violation"

    def to_json(self) -> dict:
        out = {"status": self.status, "n": self.n}
        if self.index_tuple is not None:
            out["index_tuple"] = list(self.index_tuple)
        if self.value is not None:
            out["value"] = str(self.value)
        return out


# ---------------------------------------------------------------------------
# the projector and the diagonal
# ---------------------------------------------------------------------------


def mamu_vector_positions(d: int, n: int) -> list[int]:
    """Flat positions of the d^n unit coordinates of |chi_n>, i1 slowest."""
    positions = []
    for flat in range(d ** n):
        tup = []
        f = flat
        for _ in range(n):
            f, r = divmod(f, d)
            tup.append(r)
        tup.reverse()
        pos = 0
        for l in range(n):
            site = tup[l] * d + tup[(l + 1) % n]
            pos = pos * (d * d) + site
        positions.append(pos)
    return positions


def mamu_projector(d: int, n: int, max_dim: int = DEFAULT_MAX_DENSE_DIM) -> EpsMatrix:
    """chi_n = |chi_n><chi_n| with integer entries; <chi_n|chi_n> = d^n."""
    dim = (d * d) ** n
    if dim > max_dim:
        raise ResourceLimit(f"projector dim {dim} exceeds cap {max_dim}")
    pos = mamu_vector_positions(d, n)
    flat = [EpsComplex(0)] * (dim * dim)
    one = EpsComplex(1)
    for u in pos:
        base = u * dim
        for v in pos:
            flat[base + v] = one
    return EpsMatrix(dim, dim, flat)


def tau_n(c: MpoTensor, n: int, max_values: int = DEFAULT_MAX_DIAG) -> MamuDiagonal:
    """Exact traces of all n-fold products, prefix products memoized via DFS."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if c.t ** n > max_values:
        raise ResourceLimit(f"tau_n would hold {c.t ** n} values, cap {max_values}")
    values: list[Fraction] = []

    def descend(prefix: Optional[FracMatrix], depth: int):
        if depth == n:
            values.append(_frac_trace(prefix))
            return
        for m in c.matrices:
            nxt = m if prefix is None else _frac_matmul(prefix, m)
            descend(nxt, depth + 1)

    descend(None, 0)
    return MamuDiagonal(t=c.t, n=n, values=values)


# ---------------------------------------------------------------------------
# the reduction and its inverse
# ---------------------------------------------------------------------------


def reduce_mpo_to_map(c: MpoTensor) -> MapDecomposition:
    """Map with A_i = |i><i| and B_i the reshuffle of C_i (s = d^2 required)."""
    d = math.isqrt(c.s)
    if d * d != c.s:
        raise NotPerfectSquare(f"bond dimension {c.s} is not a perfect square")
    terms = []
    for mat in c.matrices:
        b = [[Fraction(0)] * c.s for _ in range(c.s)]
        for mu in range(d):
            for nu in range(d):
                for lam in range(d):
                    for rho in range(d):
                        b[mu * d + lam][nu * d + rho] = mat[mu * d + nu][lam * d + rho]
        terms.append(b)
    a_mats = [EpsMatrix.basis(c.t, i, i) for i in range(c.t)]
    return MapDecomposition(
        d_in=c.s, d_out=c.t,
        terms=tuple((a_mats[i], _frac_to_eps(_frac_matrix(terms[i]))) for i in range(c.t)))


def unreduce_map_to_mpo(p: MapDecomposition) -> MpoTensor:
    """Invert the reshuffle (it is an involution of index positions)."""
    d = math.isqrt(p.d_in)
    if d * d != p.d_in:
        raise NotPerfectSquare(f"input dimension {p.d_in} is not a perfect square")
    mats = []
    for _, b_eps in p.terms:
        b = _eps_to_frac(b_eps)
        m = [[Fraction(0)] * p.d_in for _ in range(p.d_in)]
        for mu in range(d):
            for nu in range(d):
                for lam in range(d):
                    for rho in range(d):
                        m[mu * d + nu][lam * d + rho] = b[mu * d + lam][nu * d + rho]
        mats.append(m)
    return MpoTensor.from_rows(mats)


def transfer_matrix(b: FracMatrix, d: int) -> FracMatrix:
    """U[(k,j),(k',j')] = B[(k,k'),(j,j')]; tuple coefficients are tr-products."""
    u = [[Fraction(0)] * (d * d) for _ in range(d * d)]
    for k in range(d):
        for j in range(d):
            for kp in range(d):
                for jp in range(d):
                    u[k * d + j][kp * d + jp] = b[k * d + kp][j * d + jp]
    return tuple(tuple(row) for row in u)


# ---------------------------------------------------------------------------
# applying tensor powers to the projector
# ---------------------------------------------------------------------------


def _term_coefficients_transfer(bs: list[FracMatrix], d: int, n: int) -> list[Fraction]:
    """Coefficient per index tuple via transfer-matrix trace, DFS-memoized."""
    transfers = [transfer_matrix(b, d) for b in bs]
    out: list[Fraction] = []

    def descend(prefix: Optional[FracMatrix], depth: int):
        if depth == n:
            out.append(_frac_trace(prefix))
            return
        for u in transfers:
            nxt = u if prefix is None else _frac_matmul(prefix, u)
            descend(nxt, depth + 1)

    descend(None, 0)
    return out


def _term_coefficients_dense(bs: list[FracMatrix], d: int, n: int) -> list[Fraction]:
    """Same coefficients as explicit <chi_n| (x)B^T |chi_n> quadratic forms."""
    pos = mamu_vector_positions(d, n)
    dd = d * d
    r = len(bs)
    out: list[Fraction] = []
    for flat in range(r ** n):
        tup = []
        f = flat
        for _ in range(n):
            f, rm = divmod(f, r)
            tup.append(rm)
        tup.reverse()
        acc = Fraction(0)
        for u in pos:
            for v in pos:
                term = Fraction(1)
                uu, vv = u, v
                # site indices, last site fastest
                sites_u = []
                sites_v = []
                for _ in range(n):
                    uu, su = divmod(uu, dd)
                    vv, sv = divmod(vv, dd)
                    sites_u.append(su)
                    sites_v.append(sv)
                sites_u.reverse()
                sites_v.reverse()
                for l in range(n):
                    # (x) B^T entry at (row sites_u, col sites_v)
                    term *= bs[tup[l]][sites_v[l]][sites_u[l]]
                    if term == 0:
                        break
                acc += term
        out.append(acc)
    return out


def apply_power_to_mamu(p: MapDecomposition, n: int, method: str = "transfer",
                        max_dense_dim: int = DEFAULT_MAX_DENSE_DIM,
                        max_diag: int = DEFAULT_MAX_DIAG) -> MamuImage:
    """P^{(x)n}(chi_n), exact, in the tightest available representation.

    ``method`` selects the coefficient route ("transfer" or "dense"); the
    two are independent implementations and agree on every input, which
    the reduction verifier exploits.
    """
    d = math.isqrt(p.d_in)
    if d * d != p.d_in:
        raise NotPerfectSquare(f"input dimension {p.d_in} is not a perfect square")
    bs = [_eps_to_frac(b) for _, b in p.terms]
    a_fracs = [_eps_to_frac(a) for a, _ in p.terms]
    r = len(bs)
    t = p.d_out

    if method == "transfer":
        coefs = _term_coefficients_transfer(bs, d, n)
    elif method == "dense":
        if (d * d) ** n > max_dense_dim:
            raise ResourceLimit("dense coefficient route exceeds the cap")
        coefs = _term_coefficients_dense(bs, d, n)
    else:
        raise ValueError("method must be 'transfer' or 'dense'")

    def is_scalar(a: FracMatrix) -> Optional[Fraction]:
        lam = a[0][0]
        for i in range(t):
            for j in range(t):
                if a[i][j] != (lam if i == j else 0):
                    return None
        return lam

    def single_diag(a: FracMatrix) -> Optional[tuple[int, Fraction]]:
        hit = None
        for i in range(t):
            for j in range(t):
                if i != j and a[i][j] != 0:
                    return None
            if a[i][i] != 0:
                if hit is not None:
                    return None
                hit = (i, a[i][i])
        return hit

    scalars = [is_scalar(a) for a in a_fracs]
    if all(s is not None for s in scalars):
        total = Fraction(0)
        for flat, coef in enumerate(coefs):
            f = flat
            prod = coef
            for _ in range(n):
                f, i = divmod(f, r)
                prod *= scalars[i]
            total += prod
        return MamuImage(kind="uniform", dim=t ** n, n=n, value=total)

    singles = [single_diag(a) for a in a_fracs]
    if all(s is not None for s in singles):
        if t ** n > max_diag:
            raise ResourceLimit(f"diagonal image would hold {t ** n} values")
        values = [Fraction(0)] * (t ** n)
        for flat, coef in enumerate(coefs):
            f = flat
            tup = []
            for _ in range(n):
                f, i = divmod(f, r)
                tup.append(i)
            tup.reverse()
            prod = coef
            pos = 0
            for i in tup:
                k, lam = singles[i]
                prod *= lam
                pos = pos * t + k
            values[pos] += prod
        return MamuImage(kind="diagonal", dim=t ** n, n=n, values=values)

    if t ** n > max_dense_dim:
        raise ResourceLimit(f"dense image dim {t ** n} exceeds cap {max_dense_dim}")
    acc = EpsMatrix.zeros(t ** n)
    for flat, coef in enumerate(coefs):
        if coef == 0:
            continue
        f = flat
        tup = []
        for _ in range(n):
            f, i = divmod(f, r)
            tup.append(i)
        tup.reverse()
        m = _frac_to_eps(a_fracs[tup[0]])
        for i in tup[1:]:
            m = kron(m, _frac_to_eps(a_fracs[i]))
        acc = acc + m.scale(coef)
    return MamuImage(kind="dense", dim=t ** n, n=n, matrix=acc)


# ---------------------------------------------------------------------------
# the verifier and the bounded decision loops
# ---------------------------------------------------------------------------


@dataclass
class ReductionCheck:
    ok: bool
    first_mismatch: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_reduction(c: MpoTensor, n_max: int, dense_up_to: int = 2) -> ReductionCheck:
    """tau_n(C) == P^{(x)n}(chi_n) entrywise for all n <= n_max.

    The map side runs the transfer route for every n and additionally the
    independent dense route for n <= dense_up_to.
    """
    p = reduce_mpo_to_map(c)
    for n in range(1, n_max + 1):
        tau = tau_n(c, n)
        routes = [("transfer", apply_power_to_mamu(p, n, method="transfer"))]
        if n <= dense_up_to and c.s ** n <= DEFAULT_MAX_DENSE_DIM:
            routes.append(("dense", apply_power_to_mamu(p, n, method="dense")))
        for route, img in routes:
            got = img.diagonal_values()
            for k, (x, y) in enumerate(zip(tau.values, got)):
                if x != y:
                    return ReductionCheck(False, {
                        "n": n, "route": route,
                        "index_tuple": tau.index_tuple(k),
                        "tau": str(x), "map_side": str(y)})
    return ReductionCheck(True)


def bounded_tsp_mamu(p: MapDecomposition, n_max: int,
                     max_dense_dim: int = DEFAULT_MAX_DENSE_DIM,
                     max_diag: int = DEFAULT_MAX_DIAG) -> BoundedVerdict:
    """First n <= n_max with P^{(x)n}(chi_n) not psd, or NoViolationUpTo."""
    for n in range(1, n_max + 1):
        img = apply_power_to_mamu(p, n, max_dense_dim=max_dense_dim, max_diag=max_diag)
        if img.kind == "uniform":
            if img.value < 0:
                return BoundedVerdict("Violation", n=n, index_tuple=(0,) * n,
                                      value=img.value)
            continue
        if img.kind == "diagonal":
            hit = MamuDiagonal(t=p.d_out, n=n, values=img.values).first_negative()
            if hit is not None:
                return BoundedVerdict("Violation", n=n, index_tuple=hit[0], value=hit[1])
            continue
        verdict = img.psd_verdict()
        if not verdict.is_psd:
            return BoundedVerdict("Violation", n=n, index_tuple=None,
                                  value=None)
    return BoundedVerdict("NoViolationUpTo", n=n_max)


def bounded_positive_mpo(c: MpoTensor, n_max: int,
                         max_diag: int = DEFAULT_MAX_DIAG) -> BoundedVerdict:
    """First n <= n_max with a negative tau entry, or NoViolationUpTo."""
    for n in range(1, n_max + 1):
        tau = tau_n(c, n, max_values=max_diag)
        hit = tau.first_negative()
        if hit is not None:
            return BoundedVerdict("Violation", n=n, index_tuple=hit[0], value=hit[1])
    return BoundedVerdict("NoViolationUpTo", n=n_max)


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def save_mpo(c: MpoTensor, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(c.to_json(), fh)


def load_mpo(path: str) -> MpoTensor:
    with open(path) as fh:
        return MpoTensor.from_json(json.load(fh))


def random_mpo(s: int, t: int, seed: int, span: int = 2,
               denominators: Sequence[int] = (1, 1, 2)) -> MpoTensor:
    """Seeded random rational tensor with small entries."""
    import random as _random
    rng = _random.Random(seed)
    mats = []
    for _ in range(t):
        mats.append([[Fraction(rng.randint(-span, span), rng.choice(denominators))
                      for _ in range(s)] for _ in range(s)])
    return MpoTensor.from_rows(mats)
