"""Sequence-indexed objects under the cofinite filter, at desk scale.

A sequence is stored as a finite explicit prefix plus a tail rule.  Tails
that are rational functions of u = 1/n reuse the Q(e) machinery wholesale:
the field sign of the tail (with u infinitesimal) is its eventual sign, the
shadow is its limit, and the sign-stability threshold turns either into an
explicit index n0 past which the sign is certified.  Periodic and custom
tails are supported for classification only.

Verdicts are three-valued.  HoldsOnCofinite and FailsOnCofinite are only
emitted with a tail certificate; Undetermined marks exactly the predicates
a nonprincipal ultrafilter would decide and the cofinite filter cannot
(e.g. the sign of (1, 0, 1, 0, ...)).  Sequences are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .epsfield import EpsRational, EpsComplex
from .hypermat import (
    DimensionMismatch,
    EpsMatrix,
    NotHermitian,
    partial_transpose,
    psd_check,
)
from .choi import ChoiMatrix, MapDecomposition, decomposition_from_choi, is_cp, is_cocp
from . import positivity as _positivity
from .positivity import SearchBudget, DEFAULT_BUDGET, eps_bound, operator_norm
from .constructions import seed_choi


class UnboundedWindow(ValueError):
    """A declared operator-norm bound failed on the evaluation window."""


HOLDS = "HoldsOnCofinite"
FAILS = "FailsOnCofinite"
UNDET = "Undetermined"


@dataclass
class FilterVerdict:
    status: str
    evidence: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_json(self) -> dict:
        return {"status": self.status, "evidence": {
            k: v for k, v in self.evidence.items() if not callable(v)}}


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalTail:
    """n -> f(1/n) for a rational function f; covers constant, reciprocal,
    linear, and polynomial rules (negative u-powers are growing tails)."""

    fn: EpsRational

    def value(self, n: int) -> Fraction:
        return self.fn.eval_at(Fraction(1, n))

    def eventual_sign(self) -> Optional[tuple[int, int]]:
        s = self.fn.sign()
        if s == 0:
            return 0, 1
        t0 = self.fn.sign_stability_threshold()
        return s, max(1, math.ceil(1 / t0))

    def limit(self) -> Optional[Fraction]:
        """Limit as n -> infinity, None when the tail diverges."""
        if not self.fn.is_finite:
            return None
        return self.fn.shadow()

    def is_unbounded(self) -> bool:
        return not self.fn.is_finite


@dataclass(frozen=True)
class PeriodicTail:
    values: tuple[Fraction, ...]

    def value(self, n: int) -> Fraction:
        return self.values[(n - 1) % len(self.values)]

    def eventual_sign(self) -> Optional[tuple[int, int]]:
        signs = {(v > 0) - (v < 0) for v in self.values}
        if len(signs) == 1:
            return signs.pop(), 1
        return None

    def limit(self) -> Optional[Fraction]:
        return self.values[0] if len(set(self.values)) == 1 else None

    def is_unbounded(self) -> bool:
        return False


@dataclass(frozen=True)
class CustomTail:
    """User rule with an optional (sign, n0) certificate, trusted but
    spot-checked on windows."""

    rule: Callable[[int], Fraction]
    sign_certificate: Optional[tuple[int, int]] = None

    def value(self, n: int) -> Fraction:
        return Fraction(self.rule(n))

    def eventual_sign(self) -> Optional[tuple[int, int]]:
        return self.sign_certificate

    def limit(self) -> Optional[Fraction]:
        return None

    def is_unbounded(self) -> bool:
        return False


Tail = Union[RationalTail, PeriodicTail, CustomTail]


def constant_tail(c) -> RationalTail:
    return RationalTail(EpsRational.from_rational(Fraction(c)))


def reciprocal_tail(a=1) -> RationalTail:
    """n -> a/n."""
    return RationalTail(EpsRational.from_rational(Fraction(a)) * EpsRational((0, 1)))


def linear_tail(a=1, b=0) -> RationalTail:
    """n -> a*n + b."""
    u = EpsRational((0, 1))
    return RationalTail(EpsRational.from_rational(Fraction(a)) / u
                        + EpsRational.from_rational(Fraction(b)))


def polynomial_tail(coeffs: dict[int, Fraction]) -> RationalTail:
    """n -> sum c_k n^k for integer k (negative k allowed)."""
    u = EpsRational((0, 1))
    acc = EpsRational(0)
    for k, c in coeffs.items():
        acc = acc + EpsRational.from_rational(Fraction(c)) * (u ** (-k))
    return RationalTail(acc)


# ---------------------------------------------------------------------------
# layered scalars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayeredScalar:
    """value(n) = prefix[n-1] for n <= len(prefix), else tail(n)."""

    prefix: tuple[Fraction, ...] = ()
    tail: Tail = field(default_factory=lambda: constant_tail(0))

    def value(self, n: int) -> Fraction:
        if n < 1:
            raise ValueError("sequences are 1-based")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.tail.value(n)

    def window(self, lo: int, hi: int) -> list[Fraction]:
        return [self.value(n) for n in range(lo, hi + 1)]

    def _combine(self, other: "LayeredScalar", op) -> "LayeredScalar":
        cut = max(len(self.prefix), len(other.prefix))
        prefix = tuple(op(self.value(n), other.value(n)) for n in range(1, cut + 1))
        ta, tb = self.tail, other.tail
        if isinstance(ta, RationalTail) and isinstance(tb, RationalTail):
            tail = RationalTail(op(ta.fn, tb.fn))
        elif isinstance(ta, PeriodicTail) and isinstance(tb, PeriodicTail):
            # tails are absolute rules in n, so the combination is periodic
            # with the lcm period, anchored at n = 1
            period = math.lcm(len(ta.values), len(tb.values))
            tail = PeriodicTail(tuple(op(ta.value(k), tb.value(k))
                                      for k in range(1, period + 1)))
        else:
            tail = CustomTail(lambda n, A=ta, B=tb: op(A.value(n), B.value(n)))
        return LayeredScalar(prefix=prefix, tail=tail)

    def __add__(self, other: "LayeredScalar") -> "LayeredScalar":
        return self._combine(other, lambda x, y: x + y)

    def __mul__(self, other: "LayeredScalar") -> "LayeredScalar":
        return self._combine(other, lambda x, y: x * y)

    def __neg__(self) -> "LayeredScalar":
        return LayeredScalar(
            prefix=tuple(-v for v in self.prefix),
            tail=_negate_tail(self.tail))

    def __sub__(self, other: "LayeredScalar") -> "LayeredScalar":
        return self + (-other)

    def scale(self, c) -> "LayeredScalar":
        c = Fraction(c)
        return self * LayeredScalar(tail=constant_tail(c))


def _negate_tail(t: Tail) -> Tail:
    if isinstance(t, RationalTail):
        return RationalTail(-t.fn)
    if isinstance(t, PeriodicTail):
        return PeriodicTail(tuple(-v for v in t.values))
    cert = None
    if t.sign_certificate is not None:
        s, n0 = t.sign_certificate
        cert = (-s, n0)
    return CustomTail(lambda n, T=t: -T.value(n), cert)


def from_json_scalar(obj: dict) -> LayeredScalar:
    """{"prefix": [...], "tail": {"kind": ..., "params": ...}, ...}"""
    prefix = tuple(Fraction(str(v)) for v in obj.get("prefix", []))
    spec_tail = obj.get("tail", {"kind": "constant", "params": {"value": "0"}})
    kind = spec_tail["kind"]
    params = spec_tail.get("params", {})
    if kind == "constant":
        tail = constant_tail(Fraction(str(params.get("value", 0))))
    elif kind == "reciprocal":
        tail = reciprocal_tail(Fraction(str(params.get("scale", 1))))
    elif kind == "linear":
        tail = linear_tail(Fraction(str(params.get("scale", 1))),
                           Fraction(str(params.get("offset", 0))))
    elif kind == "polynomial":
        tail = polynomial_tail({int(k): Fraction(str(v))
                                for k, v in params.get("coefficients", {}).items()})
    elif kind == "periodic":
        tail = PeriodicTail(tuple(Fraction(str(v)) for v in params["values"]))
    else:
        raise ValueError(f"unknown tail kind {kind!r}")
    return LayeredScalar(prefix=prefix, tail=tail)


# ---------------------------------------------------------------------------
# sign, order, and classification under the cofinite filter
# ---------------------------------------------------------------------------


@dataclass
class SeqSignReport:
    sign: str                 # positive | negative | zero | undetermined
    nonneg: FilterVerdict
    n0: Optional[int] = None

    def to_json(self) -> dict:
        return {"sign": self.sign, "nonneg": self.nonneg.to_json(), "n0": self.n0}


def seq_sign(x: LayeredScalar, window: tuple[int, int] = (1, 12)) -> SeqSignReport:
    """Eventual sign from the tail certificate; Undetermined when the
    cofinite filter cannot decide (sign-mixed periodic or uncertified
    custom tails; an ultrafilter would choose, this module will not)."""
    cert = x.tail.eventual_sign()
    lo, hi = window
    evidence = {
        "window": [(n, str(x.value(n))) for n in range(lo, hi + 1)],
        "tail_kind": type(x.tail).__name__,
    }
    if cert is None:
        return SeqSignReport("undetermined", FilterVerdict(UNDET, evidence))
    s, n0 = cert
    n0 = max(n0, len(x.prefix) + 1)
    evidence["n0"] = n0
    name = {1: "positive", 0: "zero", -1: "negative"}[s]
    nonneg = FilterVerdict(HOLDS if s >= 0 else FAILS, evidence)
    return SeqSignReport(name, nonneg, n0=n0)


def classify(x: LayeredScalar,
             probe_rationals: Sequence[Fraction] = (Fraction(1), Fraction(1, 10 ** 3),
                                                    Fraction(1, 10 ** 9))) -> str:
    """positive-infinitesimal, positive-infinite, appreciable, zero, ... .

    Infinitesimality needs two certificates: eventual positivity and limit
    zero; the probe rationals additionally document 0 < x < q cofinitely
    for each sampled positive rational q.
    """
    rep = seq_sign(x)
    if rep.sign == "undetermined":
        return "undetermined"
    tail = x.tail
    limit = tail.limit()
    if tail.is_unbounded():
        return f"{rep.sign}-infinite"
    if rep.sign == "zero":
        return "zero-cofinite"
    if limit == 0:
        for q in probe_rationals:
            below = seq_sign(x - LayeredScalar(tail=constant_tail(q if rep.sign == "positive" else -q)))
            expected = "negative" if rep.sign == "positive" else "positive"
            if below.sign != expected:
                return "undetermined"
        return f"{rep.sign}-infinitesimal"
    return "appreciable"


# ---------------------------------------------------------------------------
# vectors and the quasi-inner product
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayeredVector:
    components: tuple[LayeredScalar, ...]

    @property
    def dim(self) -> int:
        return len(self.components)


def quasi_inner(a: LayeredVector, b: LayeredVector) -> LayeredScalar:
    """Entrywise inner product per layer; real components, so conjugation
    is trivial and symmetry is exact."""
    if a.dim != b.dim:
        raise DimensionMismatch("vector dims differ")
    acc = LayeredScalar(tail=constant_tail(0))
    for x, y in zip(a.components, b.components):
        acc = acc + x * y
    return acc


# ---------------------------------------------------------------------------
# layered matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayeredMatrix:
    """Layers M(n); the tail is one EpsMatrix in the variable u = 1/n.

    prefix_layers override single indices; everywhere else
    layer(n) = tail evaluated at u = 1/n, entrywise exact.
    """

    dim: int
    tail: EpsMatrix
    prefix_layers: dict[int, EpsMatrix] = field(default_factory=dict)

    def layer(self, n: int) -> EpsMatrix:
        if n in self.prefix_layers:
            return self.prefix_layers[n]
        out = []
        t = Fraction(1, n)
        for i in range(self.dim):
            for j in range(self.dim):
                z = self.tail[i, j]
                out.append(EpsComplex(z.re.eval_at(t), z.im.eval_at(t)))
        return EpsMatrix(self.dim, self.dim, out)


def layered_matrix_from_powers(coeffs: Sequence[Sequence[Sequence]],
                               prefix_layers: Optional[dict[int, EpsMatrix]] = None,
                               ) -> LayeredMatrix:
    """Layers M(n) = sum_k coeffs[k] * (1/n)^k from rational matrices."""
    dim = len(coeffs[0])
    entries = []
    for i in range(dim):
        for j in range(dim):
            entries.append(EpsRational([Fraction(c[i][j]) for c in coeffs]))
    return LayeredMatrix(dim=dim, tail=EpsMatrix(dim, dim, entries),
                         prefix_layers=prefix_layers or {})


def layered_psd(a: LayeredMatrix, window: tuple[int, int]) -> FilterVerdict:
    """Exact per-layer psd over the window plus a certified tail verdict.

    PSD tail: the pivot list of the exact pivoting stays positive for all
    0 < u <= t0, giving an explicit n0.  NotPSD tail: the witness vector,
    evaluated at u = 1/n, certifies every layer beyond its own threshold.
    """
    lo, hi = window
    window_results = {}
    for n in range(lo, hi + 1):
        layer = a.layer(n)
        if not layer.is_hermitian():
            raise NotHermitian(f"layer {n} is not Hermitian")
        window_results[n] = psd_check(layer).is_psd
    if not a.tail.is_hermitian():
        raise NotHermitian("tail matrix is not Hermitian")
    verdict = psd_check(a.tail)
    evidence: dict = {"window": window_results}
    if verdict.is_psd:
        thresholds = [p.sign_stability_threshold() for p in verdict.pivots]
        t0 = min(thresholds, default=Fraction(1))
        n0 = max(1, math.ceil(1 / t0), max(a.prefix_layers, default=0) + 1)
        evidence["n0"] = n0
        return FilterVerdict(HOLDS, evidence)
    thresholds = [verdict.value.sign_stability_threshold()]
    for w in verdict.witness:
        for part in (w.re, w.im):
            if not part.is_zero:
                thresholds.append(part.sign_stability_threshold())
    t0 = min(thresholds)
    n0 = max(1, math.ceil(1 / t0), max(a.prefix_layers, default=0) + 1)
    evidence["n0"] = n0
    evidence["witness_value"] = verdict.value.to_text()
    return FilterVerdict(FAILS, evidence)


# ---------------------------------------------------------------------------
# layered maps
# ---------------------------------------------------------------------------


@dataclass
class LayeredMap:
    """Layer maps P_n with a declared norm bound on the window.

    ``tail`` is the eventually-constant layer map when one exists; without
    it, verdicts beyond the window stay Undetermined.
    """

    layer: Callable[[int], MapDecomposition]
    window: tuple[int, int]
    norm_bound: float
    tail: Optional[MapDecomposition] = None

    @classmethod
    def constant(cls, p: MapDecomposition, window: tuple[int, int],
                 norm_bound: float) -> "LayeredMap":
        return cls(layer=lambda n: p, window=window, norm_bound=norm_bound, tail=p)


def map_operator_norm(p: MapDecomposition) -> float:
    """Norm of the superoperator matrix sum_i vec(A_i) vec(B_i)^T."""
    import numpy as np
    acc = np.zeros((p.d_out * p.d_out, p.d_in * p.d_in), dtype=complex)
    for a, b in p.terms:
        va = a.to_float_array().reshape(-1, 1)
        vb = b.to_float_array().reshape(-1, 1)
        acc += va @ vb.conj().T
    return operator_norm(acc)


def _check_window_norms(p: LayeredMap) -> None:
    lo, hi = p.window
    for n in range(lo, hi + 1):
        norm = map_operator_norm(p.layer(n))
        if norm > p.norm_bound * (1 + 1e-9):
            raise UnboundedWindow(f"layer {n} norm {norm} exceeds bound {p.norm_bound}")


def _layered_predicate(p: LayeredMap, check: Callable[[MapDecomposition], bool],
                       name: str) -> FilterVerdict:
    _check_window_norms(p)
    lo, hi = p.window
    window_results = {n: check(p.layer(n)) for n in range(lo, hi + 1)}
    evidence = {"window": window_results, "predicate": name}
    if p.tail is None:
        return FilterVerdict(UNDET, evidence)
    tail_ok = check(p.tail)
    evidence["tail"] = tail_ok
    evidence["n0"] = hi + 1
    return FilterVerdict(HOLDS if tail_ok else FAILS, evidence)


def layered_cp(p: LayeredMap) -> FilterVerdict:
    return _layered_predicate(p, lambda m: is_cp(m).is_psd, "completely-positive")


def layered_cocp(p: LayeredMap) -> FilterVerdict:
    return _layered_predicate(p, lambda m: is_cocp(m).is_psd, "completely-co-positive")


def layered_map_positive(p: LayeredMap,
                         budget: SearchBudget = DEFAULT_BUDGET) -> FilterVerdict:
    """Layerwise one-sided positivity search; FailsOnCofinite only with an
    exact violation on a constant tail, never HoldsOnCofinite from search."""
    _check_window_norms(p)
    lo, hi = p.window
    window_results = {}
    for n in range(lo, hi + 1):
        verdict = _positivity.positive_map_search(p.layer(n), budget)
        window_results[n] = not verdict.violation
    evidence = {"window": window_results, "one_sided": True}
    if p.tail is not None:
        tail_verdict = _positivity.positive_map_search(p.tail, budget)
        if tail_verdict.violation:
            evidence["tail_violation"] = tail_verdict.to_json()
            return FilterVerdict(FAILS, evidence)
    return FilterVerdict(UNDET, evidence)


# ---------------------------------------------------------------------------
# the essential witness family
# ---------------------------------------------------------------------------


@dataclass
class WitnessFamilyReport:
    """Per-layer essentialness (exact) and level-m search evidence (one-sided)."""

    window: tuple[int, int]
    m_max: int
    essential: dict[int, bool]
    level_checks: dict[tuple[int, int], bool]   # (m, n) -> no violation found
    bounds: dict[int, float]

    @property
    def all_pass(self) -> bool:
        return all(self.essential.values()) and all(self.level_checks.values())

    def to_json(self) -> dict:
        return {
            "window": list(self.window),
            "m_max": self.m_max,
            "essential": {str(k): v for k, v in self.essential.items()},
            "level_checks": {f"m={m},n={n}": v for (m, n), v in self.level_checks.items()},
            "bounds": {str(k): v for k, v in self.bounds.items()},
            "all_pass": self.all_pass,
        }


def l2_tsp_witness(m_max: int, window: tuple[int, int],
                   budget: SearchBudget = DEFAULT_BUDGET) -> WitnessFamilyReport:
    """The layer family: layer n carries the base Choi matrix minus its
    level-n perturbation bound, rescaled to unit operator norm.

    Exact checks per window layer: neither the layer's Choi matrix nor its
    input transpose is psd (the family is essential at every layer).
    Search evidence: for each m <= m_max, layers n >= m show no level-m
    violation, matching the rule that the m-th tensor power only has to be
    positive from layer m onward.
    """
    base = seed_choi(3, 3)
    dims = base.dims
    lo, hi = window
    essential: dict[int, bool] = {}
    level_checks: dict[tuple[int, int], bool] = {}
    bounds: dict[int, float] = {}
    eye = EpsMatrix.identity(9)
    layer_choi: dict[int, ChoiMatrix] = {}
    for n in range(lo, hi + 1):
        bound = eps_bound(base.matrix, n, dims, budget)
        bounds[n] = bound
        shifted = base.matrix - eye.scale(Fraction(bound))
        norm = operator_norm(shifted)
        scaled = shifted.scale(Fraction(1, 1) / Fraction(norm))
        c = ChoiMatrix(scaled, dims)
        layer_choi[n] = c
        direct = psd_check(c.matrix)
        swapped = psd_check(partial_transpose(c.matrix, dims))
        essential[n] = (not direct.is_psd) and (not swapped.is_psd)
    for m in range(1, m_max + 1):
        for n in range(max(lo, m), hi + 1):
            p = decomposition_from_choi(layer_choi[n])
            verdict = _positivity.n_tsp_search(p, m, budget)
            level_checks[(m, n)] = not verdict.violation
    return WitnessFamilyReport(window=window, m_max=m_max, essential=essential,
                               level_checks=level_checks, bounds=bounds)


# ---------------------------------------------------------------------------
# the inner-product obstruction
# ---------------------------------------------------------------------------


@dataclass
class InnerProductReport:
    eps: Fraction
    cutoff: int
    standard_value: Fraction
    seq_nonneg: FilterVerdict
    disagreement: bool

    def to_json(self) -> dict:
        return {"eps": str(self.eps), "cutoff": self.cutoff,
                "standard_value": str(self.standard_value),
                "standard_value_float": float(self.standard_value),
                "seq_nonneg": self.seq_nonneg.to_json(),
                "disagreement": self.disagreement}


def inner_product_counterexample(eps: Fraction, cutoff: int) -> InnerProductReport:
    """x = (1,0,0,...), y = (0,1,1/2,1/3,...): the layerwise product of
    x+eps*y and x-eps*y is (1, -eps^2, -eps^2/4, ...), eventually negative,
    while the summed standard inner product 1 - eps^2 sum y_n^2 stays
    positive for small eps.  The sign disagreement is the reason no inner
    product can induce the layerwise order."""
    eps = Fraction(eps)
    x = LayeredScalar(prefix=(Fraction(1),), tail=constant_tail(0))
    u = EpsRational((0, 1))
    y = LayeredScalar(prefix=(Fraction(0),),
                      tail=RationalTail(u / (EpsRational.from_rational(1) - u)))
    eps_scalar = LayeredScalar(tail=constant_tail(eps))
    plus = x + (eps_scalar * y)
    minus = x - (eps_scalar * y)
    product = quasi_inner(LayeredVector((plus,)), LayeredVector((minus,)))
    standard = Fraction(0)
    for n in range(1, cutoff + 1):
        standard += plus.value(n) * minus.value(n)
    rep = seq_sign(product)
    disagreement = (standard > 0) and rep.nonneg.status == FAILS
    return InnerProductReport(eps=eps, cutoff=cutoff, standard_value=standard,
                              seq_nonneg=rep.nonneg, disagreement=disagreement)


# ---------------------------------------------------------------------------
# ring-order axioms on the decidable fragment
# ---------------------------------------------------------------------------


@dataclass
class RingOrderReport:
    samples: int
    checks: dict[str, int]
    failures: dict[str, int]

    @property
    def all_pass(self) -> bool:
        return not any(self.failures.values())

    def to_json(self) -> dict:
        return {"samples": self.samples, "checks": self.checks,
                "failures": self.failures, "all_pass": self.all_pass}


def _random_scalar(rng, square_summable: bool = True) -> LayeredScalar:
    """Random eventually-sign-definite scalar with a rational tail."""
    u = EpsRational((0, 1))
    deg = rng.randint(1, 3)
    acc = EpsRational(0)
    for k in range(1 if square_summable else 0, deg + 1):
        acc = acc + EpsRational.from_rational(
            Fraction(rng.randint(-3, 3), rng.choice((1, 2, 3)))) * (u ** k)
    prefix = tuple(Fraction(rng.randint(-3, 3)) for _ in range(rng.randint(0, 3)))
    return LayeredScalar(prefix=prefix, tail=RationalTail(acc))


def _in_nonneg_cone(x: LayeredScalar) -> Optional[bool]:
    rep = seq_sign(x)
    if rep.sign == "undetermined":
        return None
    return rep.sign in ("positive", "zero")


def ring_order_axioms(samples: int, seed: int = 7) -> RingOrderReport:
    """T+T in T, T*T in T, squares in T, T u -T covers, and the support
    T n -T (eventually-zero elements) absorbs products; all on sequences
    whose tails make the predicates cofinitely decidable."""
    import random as _random
    rng = _random.Random(seed)
    checks = {"sum": 0, "product": 0, "square": 0, "coverage": 0, "support": 0}
    failures = {k: 0 for k in checks}
    for _ in range(samples):
        x = _random_scalar(rng)
        y = _random_scalar(rng)
        nx, ny = _in_nonneg_cone(x), _in_nonneg_cone(y)
        # coverage: x in T or -x in T
        checks["coverage"] += 1
        if not (nx or _in_nonneg_cone(-x)):
            failures["coverage"] += 1
        if nx and ny:
            checks["sum"] += 1
            if _in_nonneg_cone(x + y) is not True:
                failures["sum"] += 1
            checks["product"] += 1
            if _in_nonneg_cone(x * y) is not True:
                failures["product"] += 1
        checks["square"] += 1
        if _in_nonneg_cone(x * x) is not True:
            failures["square"] += 1
        # support ideal: zero-tail element times anything keeps a zero tail
        z = LayeredScalar(prefix=tuple(Fraction(rng.randint(-2, 2))
                                       for _ in range(rng.randint(1, 3))),
                          tail=constant_tail(0))
        checks["support"] += 1
        prod = z * x
        rep = seq_sign(prod)
        if not (rep.sign == "zero"):
            failures["support"] += 1
    return RingOrderReport(samples=samples, checks=checks, failures=failures)
