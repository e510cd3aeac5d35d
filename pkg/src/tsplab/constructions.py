"""Concrete objects and end-to-end pipelines.

The base Choi matrix lives in M_{d1} (x) M_{d2} (d1, d2 > 2):

    C = (|11>+|22>)(<11|+<22|) + |12><12| + |21><21|
        + sum_{i>2 or j>2} |ij><ij|,

equal to the identity plus the (|11>,|22>) cross terms.  It is PPT with a
one-dimensional kernel spanned by |11>-|22>, whose reshape has rank 2, so
the kernel holds no product vector.  Subtracting eps times the identity
yields a matrix that is neither psd nor psd after partial transpose while
all its tensor powers stay block positive for small enough real eps; over
Q(e) with the infinitesimal eps this is the essential perturbation the rest
of the package studies.

The state pipeline follows the published recipe for turning the perturbed
Choi matrix into a candidate NPT bound-entangled state: a rank-two local
filter, the twirl onto span{identity, flip}, then exact trace
normalization.  The recipe's printed closed-form coefficients are kept as a
reference; the pipeline recomputes everything and reports any discrepancy
rather than absorbing it (the closed form is treated as authoritative for
the state checks, and both coefficient pairs are carried in the report).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .epsfield import EPS, EpsComplex, EpsRational
from .hypermat import (
    BipartiteDims,
    DimensionMismatch,
    EpsMatrix,
    NotHermitian,
    PsdVerdict,
    flip_operator,
    is_product_vector,
    kernel_basis,
    kron,
    mat_vec,
    max_ent_projector,
    partial_transpose,
    psd_check,
    quadratic_form,
    rank,
)
from .choi import (
    ChoiMatrix,
    MapDecomposition,
    apply_map,
    choi_from_decomposition,
    eb_witness_check,
    map_scale,
    map_sum,
)


class DimensionTooSmall(ValueError):
    """The base Choi matrix needs both local dimensions above 2."""


class NotEBWitnessed(ValueError):
    """The supplied map has no all-psd decomposition witness."""


class PipelineStageError(RuntimeError):
    """A pipeline check failed; the message names the first failed stage."""


# ---------------------------------------------------------------------------
# the base Choi matrix and its structural profile
# ---------------------------------------------------------------------------


def seed_choi(d1: int = 3, d2: int = 3) -> ChoiMatrix:
    """The rank-deficient PPT Choi matrix with a product-vector-free kernel."""
    if d1 <= 2 or d2 <= 2:
        raise DimensionTooSmall("both local dimensions must exceed 2")
    n = d1 * d2
    m = EpsMatrix.identity(n)
    # the (|11>+|22>)(<11|+<22|) block adds the two cross terms
    i11 = 0 * d2 + 0
    i22 = 1 * d2 + 1
    m = m + EpsMatrix.basis(n, i11, i22) + EpsMatrix.basis(n, i22, i11)
    return ChoiMatrix(m, BipartiteDims(d1, d2))


@dataclass
class ChoiPropertiesReport:
    """Separability consistency, rank deficiency, and kernel structure."""

    separability: str  # "witnessed" | "asserted-PPT-consistent" | "failed"
    ppt: PsdVerdict
    rank: int
    rank_deficient: bool
    kernel_dim: int
    kernel_product_free: Optional[bool]
    offending_vector: Optional[list[EpsComplex]] = None
    exact: bool = True

    def to_json(self) -> dict:
        return {
            "separability": self.separability,
            "ppt": self.ppt.to_json()["status"],
            "rank": self.rank,
            "rank_deficient": self.rank_deficient,
            "kernel_dim": self.kernel_dim,
            "kernel_product_free": self.kernel_product_free,
            "exact": self.exact,
        }


def verify_choi_properties(c: ChoiMatrix,
                           separability_witness: Optional[MapDecomposition] = None,
                           ) -> ChoiPropertiesReport:
    """Exact rank/kernel profile plus the separability consistency check.

    Separability itself is not decided (that problem is out of reach); the
    report records either a user-supplied all-psd decomposition witness or
    PPT consistency.  The product-vector-free kernel check is exact for the
    kernel dimensions that occur here: dimension 0 or 1 always, and any
    kernel of codimension <= 2 inside a 3x3 (x) 3x3 space, where a product
    vector can be constructed by solving at most two bilinear constraints.
    Other intermediate cases fall back to candidate enumeration and are
    flagged ``exact=False`` when nothing is found.
    """
    m = c.matrix
    if not m.is_hermitian():
        raise NotHermitian("properties report needs a Hermitian Choi matrix")
    n = m.rows
    rk = rank(m)
    kernel = kernel_basis(m)

    if separability_witness is not None and eb_witness_check(separability_witness):
        separability = "witnessed"
        ppt = psd_check(partial_transpose(m, c.dims))
    else:
        ppt = psd_check(partial_transpose(m, c.dims))
        separability = "asserted-PPT-consistent" if ppt.is_psd else "failed"

    product_free: Optional[bool]
    offender = None
    exact = True
    if not kernel:
        product_free = True
    elif len(kernel) == 1:
        product_free = not is_product_vector(kernel[0], c.dims)
        if not product_free:
            offender = kernel[0]
    else:
        # rank < dA guarantees a constructible product vector, so the helper
        # is complete there; otherwise a None return is inconclusive
        offender = _product_vector_in_kernel(m, kernel, c.dims)
        if offender is not None:
            product_free = False
        else:
            product_free = None
            exact = False
    return ChoiPropertiesReport(
        separability=separability,
        ppt=ppt,
        rank=rk,
        rank_deficient=rk < n,
        kernel_dim=len(kernel),
        kernel_product_free=product_free,
        offending_vector=offender,
        exact=exact,
    )


def _product_vector_in_kernel(m: EpsMatrix, kernel: Sequence[list[EpsComplex]],
                              dims: BipartiteDims) -> Optional[list[EpsComplex]]:
    """Try to construct a nonzero product vector annihilated by m.

    Strategy, all exact: computational product basis vectors, kernel basis
    vectors of reshape rank 1, and the codimension-<=2 construction (fix b,
    solve the remaining linear system for a; with at most two independent
    constraints a solution space always remains).
    """
    dA, dB = dims.dA, dims.dB
    # computational product vectors
    for i in range(dA):
        for j in range(dB):
            v = [EpsComplex(0)] * dims.dim
            v[i * dB + j] = EpsComplex(1)
            if all(x.is_zero for x in mat_vec(m, v)):
                return v
    # kernel basis vectors that happen to be product
    for v in kernel:
        if is_product_vector(v, dims):
            return v
    # codimension <= 2: for each b in the computational basis, a must solve
    # at most codim linear equations; a nonzero a exists whenever codim < dA
    codim = m.rows - len(kernel)
    if codim < dA:
        constraints = _independent_rows(m)
        for j in range(dB):
            rows = []
            for w in constraints:
                rows.append([w[i * dB + j] for i in range(dA)])
            sys_m = EpsMatrix.from_rows(rows) if rows else None
            if sys_m is None:
                continue
            null = kernel_basis(sys_m)
            if null:
                a = null[0]
                v = [EpsComplex(0)] * dims.dim
                for i in range(dA):
                    v[i * dB + j] = a[i]
                if all(x.is_zero for x in mat_vec(m, v)):
                    return v
    return None


def _independent_rows(m: EpsMatrix) -> list[list[EpsComplex]]:
    """A maximal independent set of rows of m (the kernel constraints)."""
    rows = m.to_lists()
    out: list[list[EpsComplex]] = []
    probe: list[list[EpsComplex]] = []
    for r in rows:
        probe.append(r)
        if rank(EpsMatrix.from_rows(probe)) == len(out) + 1:
            out.append(r)
        else:
            probe.pop()
    return out


# ---------------------------------------------------------------------------
# the essential perturbation
# ---------------------------------------------------------------------------


def perturbed_choi(c: ChoiMatrix, eta: EpsRational = EPS) -> ChoiMatrix:
    """C - eta * identity over Q(e); eta defaults to the infinitesimal."""
    eye = EpsMatrix.identity(c.matrix.rows)
    return ChoiMatrix(c.matrix - eye.scale(eta), c.dims)


def essentialness_check(c: ChoiMatrix) -> tuple[PsdVerdict, PsdVerdict]:
    """Exact NotPSD verdicts for C - eps*1 and C^TB - eps*1.

    A rank-deficient C loses psd-ness under any positive subtraction; over
    Q(e) the infinitesimal eps makes that a single exact check.  Both
    witnesses come back re-verified with strictly negative values.
    """
    eye = EpsMatrix.identity(c.matrix.rows)
    direct = psd_check(c.matrix - eye.scale(EPS))
    swapped = psd_check(partial_transpose(c.matrix, c.dims) - eye.scale(EPS))
    return direct, swapped


# ---------------------------------------------------------------------------
# local filter and twirl
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FilterMatrix:
    """A local filter A = sqrt(square_scale) * N with integer N.

    A enters the sandwich (A^dag (x) 1) C (A (x) 1) twice, so only
    square_scale appears and every output entry stays in Q(e).
    """

    matrix: EpsMatrix
    square_scale: Fraction

    def gram(self) -> EpsMatrix:
        """A^dag A, exact."""
        return (self.matrix.dagger() @ self.matrix).scale(self.square_scale)


def filter_matrix() -> FilterMatrix:
    """The fixed rank-two antisymmetric 3x3 filter, scale 1/sqrt(2)."""
    n = EpsMatrix.from_rows([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    return FilterMatrix(matrix=n, square_scale=Fraction(1, 2))


def local_filter(c: ChoiMatrix, f: FilterMatrix) -> EpsMatrix:
    """D = (A^dag (x) 1) C (A (x) 1), with the square scale tracked exactly."""
    d_local = f.matrix.rows
    if c.d_out != d_local:
        raise DimensionMismatch("filter acts on the first (output) factor")
    eye = EpsMatrix.identity(c.d_in)
    left = kron(f.matrix.dagger(), eye)
    right = kron(f.matrix, eye)
    return (left @ c.matrix @ right).scale(f.square_scale)


def u_twirl(d_mat: EpsMatrix, d: int = 3) -> EpsMatrix:
    """Twirl onto span{1 (x) 1, F}: the unique combination preserving
    tr(D) and tr(D F).  For d=3 the coefficients are
    (tr(D)/8 - tr(DF)/24) on the identity and -(tr(D)/24 - tr(DF)/8) on F.
    """
    n = d * d
    if d_mat.rows != n or d_mat.cols != n:
        raise DimensionMismatch(f"twirl expects a {n}x{n} matrix")
    f = flip_operator(d)
    tr_d = d_mat.trace()
    tr_df = (d_mat @ f).trace()
    if not (tr_d.is_real and tr_df.is_real):
        raise NotHermitian("twirl inputs here are Hermitian; traces must be real")
    # coefficients solve [[d^2, d],[d, d^2]] [x, y] = [tr(D), tr(DF)];
    # at d=3 this is x = tr(D)/8 - tr(DF)/24, y = -(tr(D)/24 - tr(DF)/8)
    denom = Fraction(1, d * (d * d - 1))
    x = (tr_d.re * d - tr_df.re) * denom
    y = (tr_df.re * d - tr_d.re) * denom
    eye = EpsMatrix.identity(n)
    return eye.scale(x) + f.scale(y)


def max_ent_overlap_of_input_transpose(d_mat: EpsMatrix, d: int = 3) -> EpsRational:
    """<Omega| D^TB |Omega> = tr(D F)/d, exact; negative means NPT evidence."""
    f = flip_operator(d)
    val = (d_mat @ f).trace()
    if not val.is_real:
        raise NotHermitian("expected a Hermitian input")
    return val.re / d


# ---------------------------------------------------------------------------
# the flip-line state family and the reference closed form
# ---------------------------------------------------------------------------


def flip_family_state(alpha: EpsRational, beta: EpsRational, d: int = 3) -> EpsMatrix:
    """alpha * identity - beta * flip; diagonal alpha-beta on |ii>, alpha
    elsewhere, off-diagonal -beta at (|ij>,|ji>)."""
    return EpsMatrix.identity(d * d).scale(alpha) - flip_operator(d).scale(beta)


def reference_coefficients(eta: EpsRational) -> tuple[EpsRational, EpsRational]:
    """The published closed-form coefficient pair for the pipeline state:
    alpha = (1/8)(1 + eta/(6(1-eta))), beta = (1/8)(1/3 + eta/(2(1-eta)))."""
    one = EpsRational.from_rational(1)
    alpha = Fraction(1, 8) * (one + eta / ((one - eta) * 6))
    beta = Fraction(1, 8) * (Fraction(1, 3) + eta / ((one - eta) * 2))
    return alpha, beta


@dataclass
class ThresholdReport:
    """Exact sign analysis of the flip-family state in a real parameter.

    ``psd_up_to``: the state alpha(t)1 - beta(t)F stays psd on [0, value];
    ``npt_on``: open interval of t with a negative partial transpose.
    Derived from the roots of linear numerators; both are reported next to
    the source's stated values (psd for eta <= 0.5, NPT on (0, 3/2)), which
    are looser/other than the exact ones.
    """

    psd_up_to: Fraction
    npt_on: tuple[Fraction, Fraction]
    stated_psd_up_to: Fraction = Fraction(1, 2)
    stated_npt_on: tuple[Fraction, Fraction] = (Fraction(0), Fraction(3, 2))

    def to_json(self) -> dict:
        return {"psd_up_to": str(self.psd_up_to),
                "npt_on": [str(self.npt_on[0]), str(self.npt_on[1])],
                "stated_psd_up_to": str(self.stated_psd_up_to),
                "stated_npt_on": [str(self.stated_npt_on[0]), str(self.stated_npt_on[1])]}


def _positive_root_of_linear(f: EpsRational) -> Optional[Fraction]:
    """Root of the (linear) numerator of f, if positive."""
    num = f.num
    if len(num) != 2:
        return None
    root = Fraction(-num[0], num[1])
    return root if root > 0 else None


def state_thresholds(alpha: EpsRational, beta: EpsRational) -> ThresholdReport:
    """Thresholds for alpha(eta)1 - beta(eta)F with eta read as a real in (0,1).

    Eigenvalues are alpha-beta (symmetric sector) and alpha+beta
    (antisymmetric); the partial transpose has eigenvalues alpha (8-fold)
    and alpha-3beta.  All four are rational functions with linear
    numerators here, so the thresholds are exact rationals.
    """
    candidates = []
    for expr in (alpha - beta, alpha + beta):
        r = _positive_root_of_linear(expr)
        if r is not None:
            candidates.append(r)
    psd_up_to = min(candidates) if candidates else Fraction(1)
    npt_expr = alpha - beta * 3
    hi = _positive_root_of_linear(npt_expr) or Fraction(1)
    # the family is NPT exactly where alpha - 3 beta < 0; at eta just above 0
    # the expression is negative (checked by its field sign), up to min(hi, 1)
    if npt_expr.sign() >= 0:
        npt = (Fraction(0), Fraction(0))
    else:
        npt = (Fraction(0), min(hi, Fraction(1)))
    return ThresholdReport(psd_up_to=min(psd_up_to, Fraction(1)), npt_on=npt)


# ---------------------------------------------------------------------------
# the full state pipeline
# ---------------------------------------------------------------------------


@dataclass
class RhoPipelineReport:
    """Everything the filter-twirl-normalize pipeline produced and checked.

    ``rho`` is the reference closed-form state (authoritative for the psd /
    NPT / shadow checks); ``rho_computed`` is the normalized twirl output.
    When the two disagree, ``matches_closed_form`` is False and both
    coefficient pairs are reported; nothing is silently absorbed.
    """

    filtered: EpsMatrix                      # D
    filter_overlap: EpsRational              # <Omega|D^TB|Omega>, exact
    twirled: EpsMatrix                       # pre-normalization twirl output
    normalization: EpsRational               # trace removed by normalization
    rho: EpsMatrix                           # reference closed-form state
    rho_computed: EpsMatrix                  # normalized pipeline output
    matches_closed_form: bool
    computed_alpha: EpsRational
    computed_beta: EpsRational
    reference_alpha: EpsRational
    reference_beta: EpsRational
    trace_one: bool
    psd: PsdVerdict
    npt: PsdVerdict
    shadow_ppt: PsdVerdict
    psd_computed: PsdVerdict
    npt_computed: PsdVerdict
    shadow_ppt_computed: PsdVerdict
    thresholds_computed: ThresholdReport
    thresholds_reference: ThresholdReport

    def to_json(self) -> dict:
        return {
            "matches_closed_form": self.matches_closed_form,
            "computed_alpha": self.computed_alpha.to_text(),
            "computed_beta": self.computed_beta.to_text(),
            "reference_alpha": self.reference_alpha.to_text(),
            "reference_beta": self.reference_beta.to_text(),
            "filter_overlap": self.filter_overlap.to_text(),
            "normalization": self.normalization.to_text(),
            "trace_one": self.trace_one,
            "psd": self.psd.status,
            "npt": self.npt.status,
            "shadow_ppt": self.shadow_ppt.status,
            "psd_computed": self.psd_computed.status,
            "npt_computed": self.npt_computed.status,
            "shadow_ppt_computed": self.shadow_ppt_computed.status,
            "thresholds_computed": self.thresholds_computed.to_json(),
            "thresholds_reference": self.thresholds_reference.to_json(),
        }


def rho_eta_pipeline() -> RhoPipelineReport:
    """Base Choi -> infinitesimal perturbation -> filter -> twirl -> normalize.

    All stages are exact over Q(e) with the perturbation set to the field's
    own infinitesimal.  Real-parameter experiments evaluate the resulting
    rational functions with :func:`state_at_real_eta`.
    """
    base = seed_choi(3, 3)
    pert = perturbed_choi(base)
    d_mat = local_filter(pert, filter_matrix())
    if not d_mat.is_hermitian():
        raise PipelineStageError("local_filter output is not Hermitian")

    overlap = max_ent_overlap_of_input_transpose(d_mat)
    if overlap.sign() >= 0:
        raise PipelineStageError("filtered matrix lost the negative overlap")

    twirled = u_twirl(d_mat)
    scale = twirled.trace()
    if not scale.is_real or scale.re.sign() <= 0:
        raise PipelineStageError("twirl produced a non-positive trace")
    rho_computed = twirled.scale(EpsRational.from_rational(1) / scale.re)

    computed_alpha = rho_computed[1, 1].re
    computed_beta = -rho_computed[1, 3].re
    if rho_computed != flip_family_state(computed_alpha, computed_beta):
        raise PipelineStageError("twirl output left the identity-flip span")

    ref_alpha, ref_beta = reference_coefficients(EPS)
    rho_ref = flip_family_state(ref_alpha, ref_beta)
    matches = rho_computed == rho_ref

    dims = BipartiteDims(3, 3)

    def checks(state: EpsMatrix) -> tuple[bool, PsdVerdict, PsdVerdict, PsdVerdict]:
        tr_one = state.trace() == EpsComplex(1)
        psd = psd_check(state)
        npt = psd_check(partial_transpose(state, dims))
        shadow_state = state.shadow()
        sh_ppt = psd_check(partial_transpose(shadow_state, dims))
        return tr_one, psd, npt, sh_ppt

    ref_trace_one, ref_psd, ref_npt, ref_sh = checks(rho_ref)
    comp_trace_one, comp_psd, comp_npt, comp_sh = checks(rho_computed)

    return RhoPipelineReport(
        filtered=d_mat,
        filter_overlap=overlap,
        twirled=twirled,
        normalization=scale.re,
        rho=rho_ref,
        rho_computed=rho_computed,
        matches_closed_form=matches,
        computed_alpha=computed_alpha,
        computed_beta=computed_beta,
        reference_alpha=ref_alpha,
        reference_beta=ref_beta,
        trace_one=ref_trace_one and comp_trace_one,
        psd=ref_psd,
        npt=ref_npt,
        shadow_ppt=ref_sh,
        psd_computed=comp_psd,
        npt_computed=comp_npt,
        shadow_ppt_computed=comp_sh,
        thresholds_computed=state_thresholds(computed_alpha, computed_beta),
        thresholds_reference=state_thresholds(ref_alpha, ref_beta),
    )


def state_at_real_eta(state: EpsMatrix, t: Fraction) -> EpsMatrix:
    """Entrywise exact evaluation of a Q(e) state at the real value eta = t."""
    out = []
    for i in range(state.rows):
        for j in range(state.cols):
            z = state[i, j]
            out.append(EpsComplex(z.re.eval_at(t), z.im.eval_at(t)))
    return EpsMatrix(state.rows, state.cols, out)


def real_eta_checks(state: EpsMatrix, t: Fraction,
                    dims: BipartiteDims = BipartiteDims(3, 3)) -> dict:
    """psd / partial-transpose verdicts of the evaluated state at eta = t."""
    at_t = state_at_real_eta(state, t)
    return {
        "eta": t,
        "psd": psd_check(at_t),
        "partial_transpose_psd": psd_check(partial_transpose(at_t, dims)),
    }


# ---------------------------------------------------------------------------
# the symmetrization map and convexity-structure checks
# ---------------------------------------------------------------------------


def symmetrization_map(d: int) -> MapDecomposition:
    """X -> (X + X^T)/2; positive but neither CP nor coCP, and not 2-tsp."""
    if d < 2:
        raise ValueError("needs d >= 2")
    half = Fraction(1, 2)
    terms = []
    for k in range(d):
        for l in range(d):
            a = (EpsMatrix.basis(d, k, l) + EpsMatrix.basis(d, l, k)).scale(half)
            terms.append((a, EpsMatrix.basis(d, k, l)))
    return MapDecomposition(d_in=d, d_out=d, terms=tuple(terms))


def counterexample_map(d: int) -> MapDecomposition:
    """Single-term map with A = 1_{d^2}, B = diag(-1, 0, ..., 0, 2).

    Not a positive map (it sends |1><1| to -1), yet every tensor power
    applied to the matrix-multiplication projector stays psd with value
    (-1)^n + 2^n; it separates map positivity from the projector-restricted
    question.
    """
    if d < 2:
        raise ValueError("needs d >= 2")
    n = d * d
    diag = [Fraction(-1)] + [Fraction(0)] * (n - 2) + [Fraction(2)]
    return MapDecomposition(d_in=n, d_out=n,
                            terms=((EpsMatrix.identity(n), EpsMatrix.diagonal(diag)),))


def boundary_form(b_map: MapDecomposition, q_map: MapDecomposition,
                  eps: EpsRational) -> MapDecomposition:
    """B - eps*Q as a term-list concatenation."""
    if eps.is_zero:
        return b_map
    return map_sum(b_map, map_scale(q_map, -eps))


def apply_tensor_power(p: MapDecomposition, n: int, x: EpsMatrix) -> EpsMatrix:
    """Exact P^{(x)n}(X) for arbitrary X on the n-fold input space."""
    din, dout = p.d_in ** n, p.d_out ** n
    if x.rows != din or x.cols != din:
        raise DimensionMismatch("input dim must be d_in^n")
    terms = p.terms
    out = EpsMatrix.zeros(dout)
    kron_cache: dict[tuple[int, ...], EpsMatrix] = {}

    def a_kron(tup: tuple[int, ...]) -> EpsMatrix:
        hit = kron_cache.get(tup)
        if hit is None:
            hit = terms[tup[0]][0]
            for i in tup[1:]:
                hit = kron(hit, terms[i][0])
            kron_cache[tup] = hit
        return hit

    for tup in _tuples(len(terms), n):
        coef = _kron_trace_against(tuple(terms[i][1] for i in tup), x)
        if coef.is_zero:
            continue
        out = out + a_kron(tup).scale(coef)
    return out


def _tuples(r: int, n: int):
    if n == 0:
        yield ()
        return
    for rest in _tuples(r, n - 1):
        for i in range(r):
            yield rest + (i,)


def _kron_trace_against(bs: tuple[EpsMatrix, ...], x: EpsMatrix) -> EpsComplex:
    """tr((B_1 (x) ... (x) B_n)^T X), iterating only nonzero kron entries."""
    dims = [b.rows for b in bs]
    nz_lists = []
    for b in bs:
        nz = [(i, j, b[i, j]) for i in range(b.rows) for j in range(b.cols)
              if not b[i, j].is_zero]
        if not nz:
            return EpsComplex(0)
        nz_lists.append(nz)
    total = EpsComplex(0)

    def rec(level: int, row: int, col: int, val: EpsComplex):
        nonlocal total
        if level == len(nz_lists):
            xe = x[row, col]
            if not xe.is_zero:
                total = total + val * xe
            return
        d = dims[level]
        for i, j, v in nz_lists[level]:
            rec(level + 1, row * d + i, col * d + j, val * v)

    rec(0, 0, 0, EpsComplex(1))
    return total


@dataclass
class StarConvexityReport:
    samples: int
    violations: list[int] = field(default_factory=list)

    @property
    def all_psd(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"samples": self.samples, "violations": self.violations,
                "all_psd": self.all_psd}


def random_psd_input(d: int, rng: random.Random, span: int = 2) -> EpsMatrix:
    """G G^dag for G with small random Gaussian-free rational complex entries."""
    g = EpsMatrix.from_rows([
        [EpsComplex(Fraction(rng.randint(-span, span)),
                    Fraction(rng.randint(-span, span))) for _ in range(d)]
        for _ in range(d)])
    return g @ g.dagger()


def star_convexity_test(q_map: MapDecomposition, t_map: MapDecomposition,
                        n: int, samples: int, seed: int = 7) -> StarConvexityReport:
    """Exact psd preservation of (Q + T)^{(x)n} on seeded psd inputs.

    Requires Q to come with an all-psd decomposition witness; the tensor
    powers of Q + T applied to psd matrices must stay psd whenever T is
    tensor stable positive, so any violation flags an implementation bug
    for tsp T (and is merely informational otherwise).
    """
    if not eb_witness_check(q_map):
        raise NotEBWitnessed("Q must have an all-psd decomposition")
    total = map_sum(q_map, t_map)
    rng = random.Random(seed)
    report = StarConvexityReport(samples=samples)
    din = total.d_in ** n
    for k in range(samples):
        x = random_psd_input(din, rng)
        out = apply_tensor_power(total, n, x)
        if not psd_check(out).is_psd:
            report.violations.append(k)
    return report
