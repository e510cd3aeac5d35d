"""Cofinite-filter semantics: scalars, matrices, maps, and the witness family."""

from fractions import Fraction

import pytest

from tsplab.choi import depolarizing_map, transpose_map
from tsplab.constructions import symmetrization_map
from tsplab.positivity import SearchBudget
from tsplab.layers import (
    FAILS,
    HOLDS,
    UNDET,
    LayeredMap,
    LayeredScalar,
    LayeredVector,
    PeriodicTail,
    UnboundedWindow,
    classify,
    constant_tail,
    from_json_scalar,
    inner_product_counterexample,
    l2_tsp_witness,
    layered_cocp,
    layered_cp,
    layered_map_positive,
    layered_matrix_from_powers,
    layered_psd,
    linear_tail,
    polynomial_tail,
    quasi_inner,
    reciprocal_tail,
    ring_order_axioms,
    seq_sign,
)


# -- scalars -----------------------------------------------------------------


def test_one_over_n_is_a_positive_infinitesimal():
    x = LayeredScalar(tail=reciprocal_tail(1))
    assert [x.value(n) for n in (1, 2, 4)] == [1, Fraction(1, 2), Fraction(1, 4)]
    rep = seq_sign(x)
    assert rep.sign == "positive" and rep.nonneg.holds
    assert classify(x) == "positive-infinitesimal"


def test_growing_sequence_is_a_positive_infinite_element():
    x = LayeredScalar(tail=linear_tail(1))
    assert classify(x) == "positive-infinite"
    # eventually above any constant
    big = LayeredScalar(tail=constant_tail(10 ** 6))
    assert seq_sign(x - big).sign == "positive"


def test_alternating_sequence_is_undetermined():
    x = LayeredScalar(tail=PeriodicTail((Fraction(1), Fraction(0))))
    rep = seq_sign(x)
    assert rep.sign == "undetermined"
    assert rep.nonneg.status == UNDET
    assert classify(x) == "undetermined"


def test_zero_divisor_product_is_cofinitely_zero():
    a = LayeredScalar(tail=PeriodicTail((Fraction(1), Fraction(0))))
    b = LayeredScalar(tail=PeriodicTail((Fraction(0), Fraction(1))))
    assert seq_sign(a * b).sign == "zero"


def test_prefix_overrides_and_sign_certificate_index():
    x = LayeredScalar(prefix=(Fraction(-5), Fraction(-5)), tail=reciprocal_tail(1))
    assert x.value(1) == -5 and x.value(3) == Fraction(1, 3)
    rep = seq_sign(x)
    assert rep.sign == "positive"
    assert rep.n0 >= 3  # the certificate index clears the prefix


def test_polynomial_tail_eventual_sign():
    # n^2 - 40n: negative early, eventually positive
    x = LayeredScalar(tail=polynomial_tail({2: Fraction(1), 1: Fraction(-40)}))
    rep = seq_sign(x)
    assert rep.sign == "positive"
    assert all(x.value(n) > 0 for n in range(rep.n0, rep.n0 + 5))


def test_scalar_json_loader():
    obj = {"prefix": ["1", "1/2"], "tail": {"kind": "reciprocal", "params": {"scale": "2"}}}
    x = from_json_scalar(obj)
    assert x.value(2) == Fraction(1, 2)
    assert x.value(4) == Fraction(1, 2)
    assert classify(x) == "positive-infinitesimal"


# -- quasi-inner product --------------------------------------------------------


def test_quasi_inner_constant_basis_vector():
    e1 = LayeredVector((LayeredScalar(tail=constant_tail(1)),
                        LayeredScalar(tail=constant_tail(0))))
    assert seq_sign(quasi_inner(e1, e1)).sign == "positive"


def test_quasi_inner_positive_definite_on_nonzero_input():
    v = LayeredVector((LayeredScalar(tail=reciprocal_tail(1)),
                       LayeredScalar(tail=constant_tail(0))))
    assert seq_sign(quasi_inner(v, v)).sign == "positive"


def test_quasi_inner_mixed_sign_example():
    # <x + t y, x - t y> = (1, -t^2 y_2^2, ...) fails cofinitely for >= 0
    x = LayeredScalar(prefix=(Fraction(1),), tail=constant_tail(0))
    y = LayeredScalar(prefix=(Fraction(0),), tail=reciprocal_tail(1))
    t = LayeredScalar(tail=constant_tail(Fraction(1, 2)))
    p = quasi_inner(LayeredVector((x + t * y,)), LayeredVector((x - t * y,)))
    assert p.value(1) == 1
    rep = seq_sign(p)
    assert rep.nonneg.status == FAILS


# -- layered matrices -------------------------------------------------------------


def test_constant_identity_layers_hold():
    m = layered_matrix_from_powers([[[1, 0], [0, 1]]])
    assert layered_psd(m, (1, 6)).holds


def test_decaying_negative_eigenvalue_fails_cofinitely():
    m = layered_matrix_from_powers([[[1, 0], [0, 0]], [[0, 0], [0, -1]]])
    verdict = layered_psd(m, (1, 6))
    assert verdict.status == FAILS
    assert all(ok is False for ok in verdict.evidence["window"].values())


def test_eventually_psd_layers_hold_with_certificate():
    m = layered_matrix_from_powers([[[1, 0], [0, 1]], [[0, 0], [0, -2]]])
    verdict = layered_psd(m, (1, 6))
    assert verdict.holds
    window = verdict.evidence["window"]
    assert window[1] is False and window[2] is True
    assert verdict.evidence["n0"] <= 3


# -- layered maps ------------------------------------------------------------------


def test_constant_depolarizing_layers_are_cp():
    p = LayeredMap.constant(depolarizing_map(3), (1, 4), norm_bound=10.0)
    assert layered_cp(p).holds
    assert layered_cocp(p).holds


def test_constant_symmetrization_layers_fail_cp():
    p = LayeredMap.constant(symmetrization_map(2), (1, 4), norm_bound=10.0)
    assert layered_cp(p).status == FAILS
    assert layered_cocp(p).status == FAILS


def test_constant_transposition_layers():
    p = LayeredMap.constant(transpose_map(2), (1, 4), norm_bound=10.0)
    assert layered_cocp(p).holds
    assert layered_cp(p).status == FAILS


def test_window_norm_bound_is_enforced():
    p = LayeredMap.constant(depolarizing_map(3), (1, 4), norm_bound=0.1)
    with pytest.raises(UnboundedWindow):
        layered_cp(p)


def test_layered_positivity_search_is_one_sided():
    p = LayeredMap.constant(depolarizing_map(2), (1, 3), norm_bound=10.0)
    verdict = layered_map_positive(p, SearchBudget(restarts=20))
    assert verdict.status == UNDET  # search evidence never certifies Holds
    assert verdict.evidence["one_sided"] is True
    assert all(verdict.evidence["window"].values())


def test_layered_positivity_search_flags_constant_violation():
    from tsplab.constructions import counterexample_map
    p = LayeredMap.constant(counterexample_map(2), (1, 2), norm_bound=20.0)
    verdict = layered_map_positive(p, SearchBudget(restarts=40))
    assert verdict.status == FAILS


# -- the witness family --------------------------------------------------------------


def test_witness_family_small_window():
    rep = l2_tsp_witness(2, (2, 4), SearchBudget(restarts=60))
    assert rep.all_pass
    assert set(rep.essential) == {2, 3, 4}
    assert all(rep.essential.values())
    assert (2, 2) in rep.level_checks
    # bounds decrease with the level
    assert rep.bounds[2] > rep.bounds[3] > rep.bounds[4]


def test_witness_family_layer_rule_skips_low_layers():
    rep = l2_tsp_witness(2, (1, 3), SearchBudget(restarts=40))
    assert (2, 1) not in rep.level_checks   # level 2 only from layer 2 onward
    assert (1, 1) in rep.level_checks
    assert (2, 2) in rep.level_checks


# -- inner product obstruction ---------------------------------------------------------


def test_inner_product_counterexample_small_eps():
    rep = inner_product_counterexample(Fraction(1, 10), 10 ** 3)
    assert rep.disagreement
    assert rep.standard_value > Fraction(98, 100)
    assert rep.seq_nonneg.status == FAILS


def test_inner_product_counterexample_degenerate_eps():
    rep = inner_product_counterexample(Fraction(0), 100)
    assert not rep.disagreement
    assert rep.standard_value == 1


def test_inner_product_counterexample_large_eps():
    rep = inner_product_counterexample(Fraction(2), 100)
    assert not rep.disagreement
    assert rep.standard_value < 0


# -- ring order axioms ---------------------------------------------------------------


def test_ring_order_axioms_pass():
    rep = ring_order_axioms(100, seed=17)
    assert rep.all_pass
    assert rep.samples == 100


def test_mixed_sign_product_lands_in_minus_cone():
    x = LayeredScalar(tail=reciprocal_tail(1))                        # 1/n > 0
    y = LayeredScalar(tail=polynomial_tail({0: Fraction(-1), -1: Fraction(1)}))
    prod = x * y                                                       # (1/n)(-1+1/n)
    rep = seq_sign(prod)
    assert rep.sign == "negative"


def test_squares_are_nonnegative():
    x = LayeredScalar(prefix=(Fraction(-7),), tail=polynomial_tail({-1: Fraction(-3)}))
    assert seq_sign(x * x).sign in ("positive", "zero")
