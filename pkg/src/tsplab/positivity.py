"""Block-positivity as a budgeted, one-sided violation search.

Block positivity of a Hermitian C on (C^dA) (x) (C^dB) asks that
<a (x) b| C |a (x) b> >= 0 for all product vectors.  Deciding it exactly is
co-NP-hard, so this module only ever *refutes*: a ViolationFound verdict is
sound (the witness is re-verified, exactly over the field whenever C has
exact entries), while NoViolationFound is inconclusive evidence.

The search is alternating minimization.  For a fixed unit a the form is a
Hermitian quadratic in b, minimized by the bottom eigenvector of the
conditioned dB x dB matrix; alternate until the value stalls, restart from
seeded random sphere points, and merge deterministically (first-found wins
ties).  All float work runs on the shadow of the input; exact re-checks go
back through Q(e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .epsfield import EpsComplex, EpsRational
from .hypermat import BipartiteDims, DimensionMismatch, EpsMatrix, quadratic_form, vec_kron
from .choi import MapDecomposition, choi_from_decomposition, choi_tensor_power, DEFAULT_MAX_DIM

MatrixLike = Union[EpsMatrix, np.ndarray]


class NonPositiveMu(ValueError):
    """The product minimum is not positive; the perturbation bound collapses."""


@dataclass(frozen=True)
class SearchBudget:
    """Reproducibility contract: same budget and seed, same trajectory."""

    restarts: int = 200
    iterations: int = 200
    seed: int = 7
    tol: float = 1e-10

    def with_restarts(self, restarts: int) -> "SearchBudget":
        return replace(self, restarts=restarts)

    def to_json(self) -> dict:
        return {"restarts": self.restarts, "iterations": self.iterations,
                "seed": self.seed, "tol": self.tol}


DEFAULT_BUDGET = SearchBudget()


@dataclass
class ProductMinResult:
    value: float
    vector_a: np.ndarray
    vector_b: np.ndarray


@dataclass
class BlockPositivityVerdict:
    status: str  # "ViolationFound" | "NoViolationFound"
    value: Optional[float] = None
    witness_a: Optional[np.ndarray] = None
    witness_b: Optional[np.ndarray] = None
    exact_value: Optional[EpsRational] = None
    budget: SearchBudget = DEFAULT_BUDGET

    @property
    def violation(self) -> bool:
        return self.status == "ViolationFound"

    def to_json(self) -> dict:
        out = {"status": self.status, "value": self.value, "budget": self.budget.to_json()}
        if self.witness_a is not None:
            out["witness_a"] = [[z.real, z.imag] for z in self.witness_a]
            out["witness_b"] = [[z.real, z.imag] for z in self.witness_b]
        if self.exact_value is not None:
            out["exact_value"] = self.exact_value.to_text()
        return out


def _to_float(c: MatrixLike) -> np.ndarray:
    if isinstance(c, EpsMatrix):
        return c.to_float_array()
    return np.asarray(c, dtype=complex)


def _random_unit(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def _alternate(tensor: np.ndarray, a: np.ndarray, iterations: int,
               tol: float) -> tuple[float, np.ndarray, np.ndarray]:
    prev = math.inf
    b = None
    for _ in range(iterations):
        kb = np.einsum("i,k,ijkl->jl", a.conj(), a, tensor)
        kb = (kb + kb.conj().T) / 2
        w, v = np.linalg.eigh(kb)
        b = v[:, 0]
        ka = np.einsum("j,l,ijkl->ik", b.conj(), b, tensor)
        ka = (ka + ka.conj().T) / 2
        w2, v2 = np.linalg.eigh(ka)
        a = v2[:, 0]
        val = w2[0]
        if abs(val - prev) <= tol * max(1.0, abs(val)):
            prev = val
            break
        prev = val
    val = float(np.real(np.einsum("i,j,ijkl,k,l->", a.conj(), b.conj(), tensor, a, b)))
    return val, a, b


def product_min(c: MatrixLike, dims: BipartiteDims,
                budget: SearchBudget = DEFAULT_BUDGET) -> ProductMinResult:
    """Best found value of <a(x)b|C|a(x)b> over unit product vectors.

    Upper bound on the true minimum; deterministic for a fixed budget.
    """
    arr = _to_float(c)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch("product_min needs a square matrix")
    dims.check(arr.shape[0])
    if np.max(np.abs(arr - arr.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(arr))):
        raise ValueError("product_min requires a Hermitian matrix")
    tensor = arr.reshape(dims.dA, dims.dB, dims.dA, dims.dB)
    best: Optional[ProductMinResult] = None
    for k in range(budget.restarts):
        rng = np.random.default_rng([budget.seed, k])
        a0 = _random_unit(rng, dims.dA)
        val, a, b = _alternate(tensor, a0, budget.iterations, budget.tol)
        if best is None or val < best.value:
            best = ProductMinResult(val, a, b)
    return best


_NORM_SEED = 0x5EED


def operator_norm(c: MatrixLike, tol: float = 1e-10, max_iterations: int = 100000) -> float:
    """Largest singular value by power iteration on C^dag C, seeded start."""
    arr = _to_float(c)
    if arr.size == 0:
        return 0.0
    rng = np.random.default_rng(_NORM_SEED)
    x = _random_unit(rng, arr.shape[1])
    prev = 0.0
    for _ in range(max_iterations):
        y = arr.conj().T @ (arr @ x)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        est = math.sqrt(norm)
        if abs(est - prev) <= tol * max(1.0, est):
            return est
        prev = est
    return prev


def eps_bound(c: MatrixLike, n: int, dims: BipartiteDims,
              budget: SearchBudget = DEFAULT_BUDGET) -> float:
    """Upper end of the safe perturbation interval at tensor level n.

    The interval endpoint is (||C||^n + mu^n)^(1/n) - ||C||, with mu the
    product minimum; subtracting eps below this keeps the n-fold tensor
    power block positive.  The returned value is stepped down by one float
    ulp so rounding can only make it more conservative.
    """
    mu = product_min(c, dims, budget).value
    if mu <= 0.0:
        raise NonPositiveMu(f"product minimum {mu} is not positive")
    norm = operator_norm(c)
    endpoint = (norm ** n + mu ** n) ** (1.0 / n) - norm
    return math.nextafter(max(endpoint, 0.0), 0.0)


def _rationalize_vector(v: np.ndarray) -> list[EpsComplex]:
    return [EpsComplex(Fraction(float(z.real)), Fraction(float(z.imag))) for z in v]


def exact_product_value(c: EpsMatrix, a: np.ndarray, b: np.ndarray) -> EpsRational:
    """<a(x)b| C |a(x)b> with the float witness promoted to exact rationals."""
    va = _rationalize_vector(a)
    vb = _rationalize_vector(b)
    val = quadratic_form(c, vec_kron(va, vb))
    if not val.is_real:
        raise AssertionError("product expectation of a Hermitian matrix must be real")
    return val.re


def block_positive_search(c: MatrixLike, dims: BipartiteDims,
                          budget: SearchBudget = DEFAULT_BUDGET) -> BlockPositivityVerdict:
    """One-sided refutation search for block positivity.

    A candidate with float value below -tol is only reported after
    re-verification: exact over Q(e) when the input is an EpsMatrix, within
    10*tol in floats otherwise.  Restart order is fixed, so the first
    verified violation is deterministic.
    """
    arr = _to_float(c)
    dims.check(arr.shape[0])
    tensor = arr.reshape(dims.dA, dims.dB, dims.dA, dims.dB)
    best_val = math.inf
    best = None
    for k in range(budget.restarts):
        rng = np.random.default_rng([budget.seed, k])
        a0 = _random_unit(rng, dims.dA)
        val, a, b = _alternate(tensor, a0, budget.iterations, budget.tol)
        if val < best_val:
            best_val, best = val, (a, b)
        if val < -budget.tol:
            if isinstance(c, EpsMatrix):
                exact = exact_product_value(c, a, b)
                if exact.sign() < 0:
                    return BlockPositivityVerdict("ViolationFound", value=val,
                                                  witness_a=a, witness_b=b,
                                                  exact_value=exact, budget=budget)
                continue  # float artifact; keep searching
            recheck = float(np.real(np.einsum("i,j,ijkl,k,l->", a.conj(), b.conj(),
                                              tensor, a, b)))
            if recheck < -10 * budget.tol or (recheck < 0 and val < -10 * budget.tol):
                return BlockPositivityVerdict("ViolationFound", value=recheck,
                                              witness_a=a, witness_b=b, budget=budget)
    a, b = best if best is not None else (None, None)
    return BlockPositivityVerdict("NoViolationFound", value=best_val,
                                  witness_a=a, witness_b=b, budget=budget)


def positive_map_search(p: MapDecomposition,
                        budget: SearchBudget = DEFAULT_BUDGET) -> BlockPositivityVerdict:
    """Positivity of the map == block positivity of its Choi matrix."""
    c = choi_from_decomposition(p)
    return block_positive_search(c.matrix, c.dims, budget)


def n_tsp_search(p: MapDecomposition, n: int,
                 budget: SearchBudget = DEFAULT_BUDGET,
                 max_dim: int = DEFAULT_MAX_DIM) -> BlockPositivityVerdict:
    """Violation search for the n-fold tensor power, outputs vs inputs split."""
    c = choi_tensor_power(p, n, max_dim=max_dim)
    return block_positive_search(c.matrix, c.dims, budget)
