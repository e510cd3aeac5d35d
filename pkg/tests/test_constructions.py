"""The base Choi matrix, the perturbation, the state pipeline, and the maps
built around them."""

import random
from fractions import Fraction

import pytest

from tsplab.epsfield import EPS, EpsComplex, EpsRational
from tsplab.hypermat import (
    BipartiteDims,
    EpsMatrix,
    as_vector,
    flip_operator,
    max_ent_projector,
    partial_transpose,
    psd_check,
    quadratic_form,
)
from tsplab.choi import (
    ChoiMatrix,
    apply_map,
    choi_from_decomposition,
    compose_with_transpose,
    decomposition_from_choi,
    depolarizing_map,
    identity_map,
    is_cocp,
    is_cp,
    transpose_map,
)
from tsplab.constructions import (
    DimensionTooSmall,
    NotEBWitnessed,
    boundary_form,
    counterexample_map,
    essentialness_check,
    filter_matrix,
    flip_family_state,
    local_filter,
    max_ent_overlap_of_input_transpose,
    perturbed_choi,
    real_eta_checks,
    reference_coefficients,
    rho_eta_pipeline,
    seed_choi,
    star_convexity_test,
    state_at_real_eta,
    state_thresholds,
    symmetrization_map,
    u_twirl,
    verify_choi_properties,
)


# -- the base Choi matrix ---------------------------------------------------------


def test_seed_choi_entries_trace_hermitian():
    c = seed_choi(3, 3)
    assert c.matrix[0, 4] == EpsComplex(1)  # the |11><22| cross term
    assert c.matrix.trace() == EpsComplex(9)
    assert c.matrix.is_hermitian()
    with pytest.raises(DimensionTooSmall):
        seed_choi(2, 3)


def test_seed_choi_works_for_larger_dims():
    c = seed_choi(3, 4)
    assert c.matrix.rows == 12
    rep = verify_choi_properties(c)
    assert rep.rank == 11 and rep.rank_deficient and rep.kernel_product_free


def test_properties_report_of_base_choi():
    rep = verify_choi_properties(seed_choi(3, 3))
    assert rep.rank == 8
    assert rep.rank_deficient
    assert rep.kernel_dim == 1
    assert rep.kernel_product_free is True
    assert rep.exact
    assert rep.ppt.is_psd
    assert rep.separability == "asserted-PPT-consistent"


def test_properties_report_full_rank():
    rep = verify_choi_properties(ChoiMatrix(EpsMatrix.identity(9), BipartiteDims(3, 3)))
    assert not rep.rank_deficient and rep.kernel_product_free is True


def test_properties_report_finds_product_vector_in_big_kernel():
    rep = verify_choi_properties(ChoiMatrix(max_ent_projector(3), BipartiteDims(3, 3)))
    assert rep.rank == 1 and rep.kernel_dim == 8
    assert rep.kernel_product_free is False
    assert rep.exact
    assert rep.offending_vector is not None
    # the offender really is a product vector in the kernel
    from tsplab.hypermat import is_product_vector, mat_vec
    v = rep.offending_vector
    assert is_product_vector(v, BipartiteDims(3, 3))
    assert all(x.is_zero for x in mat_vec(max_ent_projector(3), v))


def test_properties_report_with_separability_witness():
    q = depolarizing_map(3)
    rep = verify_choi_properties(choi_from_decomposition(q), separability_witness=q)
    assert rep.separability == "witnessed"


# -- perturbation -------------------------------------------------------------------


def test_perturbed_diagonal_and_shadow():
    c = seed_choi(3, 3)
    p = perturbed_choi(c)
    assert p.matrix[1, 1] == EpsComplex(1 - EPS)   # the |12> diagonal entry
    assert p.matrix.shadow() == c.matrix
    assert p.matrix.trace().re == EpsRational(9) - 9 * EPS


def test_essentialness_of_perturbed_base_choi():
    direct, swapped = essentialness_check(seed_choi(3, 3))
    assert not direct.is_psd and direct.value.sign() < 0
    assert not swapped.is_psd and swapped.value.sign() < 0


def test_kernel_vector_gives_minus_two_eps():
    p = perturbed_choi(seed_choi(3, 3))
    v = as_vector([1, 0, 0, 0, -1, 0, 0, 0, 0])
    assert quadratic_form(p.matrix, v).re == -2 * EPS


def test_full_rank_contrast_stays_psd():
    ident = ChoiMatrix(EpsMatrix.identity(9), BipartiteDims(3, 3))
    assert psd_check(perturbed_choi(ident).matrix).is_psd


# -- filter and twirl ------------------------------------------------------------------


def test_filter_gram():
    f = filter_matrix()
    assert f.gram() == EpsMatrix.diagonal([Fraction(1, 2), Fraction(1, 2), 0])


def test_filtered_matrix_is_hermitian_with_negative_overlap():
    d = local_filter(perturbed_choi(seed_choi(3, 3)), filter_matrix())
    assert d.is_hermitian()
    overlap = max_ent_overlap_of_input_transpose(d)
    assert overlap == -EPS / 3
    assert overlap.sign() < 0


def test_filtered_matrix_structure():
    # hand expansion: D = (1-eta)/2 diag(1,1,0) (x) 1  - (|21><12| + |12><21|)/2
    d = local_filter(perturbed_choi(seed_choi(3, 3)), filter_matrix())
    expected = EpsMatrix.zeros(9)
    half = (1 - EPS) * Fraction(1, 2)
    for j in range(2):
        for k in range(3):
            expected = expected + EpsMatrix.basis(9, j * 3 + k, j * 3 + k).scale(half)
    expected = expected - EpsMatrix.basis(9, 3, 1).scale(Fraction(1, 2))
    expected = expected - EpsMatrix.basis(9, 1, 3).scale(Fraction(1, 2))
    assert d == expected


def test_twirl_fixed_points():
    assert u_twirl(EpsMatrix.identity(9)) == EpsMatrix.identity(9)
    assert u_twirl(flip_operator(3)) == flip_operator(3)


def test_twirl_is_the_trace_preserving_projection():
    rng = random.Random(51)
    m = EpsMatrix.from_rows([[Fraction(rng.randint(-3, 3)) for _ in range(9)]
                             for _ in range(9)])
    h = (m + m.transpose()).scale(Fraction(1, 2))
    t = u_twirl(h)
    f = flip_operator(3)
    assert t.trace() == h.trace()
    assert (t @ f).trace() == (h @ f).trace()
    # output lies in span{1, F}
    x = t[1, 1]
    y = t[1, 3]
    assert t == EpsMatrix.identity(9).scale(x) + f.scale(y)


# -- the pipeline ------------------------------------------------------------------------


@pytest.fixture(scope="module")
def pipeline():
    return rho_eta_pipeline()


def test_pipeline_computed_coefficients(pipeline):
    # frozen from the independent symbolic derivation:
    # alpha = (9-8n)/(72(1-n)), beta = 1/(24(1-n)), normalization 3(1-n)
    assert pipeline.computed_alpha == EpsRational((9, -8), (72, -72))
    assert pipeline.computed_beta == EpsRational((1,), (24, -24))
    assert pipeline.normalization == EpsRational((3, -3))


def test_pipeline_reference_coefficients(pipeline):
    alpha, beta = reference_coefficients(EPS)
    assert alpha == EpsRational((6, -5), (48, -48))
    assert beta == EpsRational((2, 1), (48, -48))
    assert pipeline.reference_alpha == alpha
    assert pipeline.reference_beta == beta


def test_pipeline_closed_form_discrepancy_is_reported(pipeline):
    # the recomputed twirl does not reproduce the printed coefficient pair;
    # the report carries both rather than absorbing the difference
    assert pipeline.matches_closed_form is False
    assert pipeline.rho_computed != pipeline.rho
    assert pipeline.computed_alpha.shadow() == pipeline.reference_alpha.shadow()
    assert pipeline.computed_beta.shadow() == pipeline.reference_beta.shadow()


def test_pipeline_state_checks_hold_for_both_forms(pipeline):
    assert pipeline.trace_one
    for psd, npt, sh in ((pipeline.psd, pipeline.npt, pipeline.shadow_ppt),
                         (pipeline.psd_computed, pipeline.npt_computed,
                          pipeline.shadow_ppt_computed)):
        assert psd.is_psd
        assert not npt.is_psd and npt.value.sign() < 0
        assert sh.is_psd


def test_pipeline_states_match_their_flip_family_form(pipeline):
    assert pipeline.rho_computed == flip_family_state(pipeline.computed_alpha,
                                                      pipeline.computed_beta)
    assert pipeline.rho == flip_family_state(pipeline.reference_alpha,
                                             pipeline.reference_beta)


def test_diagonal_positivity_prerequisites(pipeline):
    for a, b in ((pipeline.computed_alpha, pipeline.computed_beta),
                 (pipeline.reference_alpha, pipeline.reference_beta)):
        assert (a - b).sign() > 0
        assert a.sign() > 0


def test_thresholds(pipeline):
    assert pipeline.thresholds_computed.psd_up_to == Fraction(3, 4)
    assert pipeline.thresholds_reference.psd_up_to == Fraction(2, 3)
    assert pipeline.thresholds_computed.npt_on == (Fraction(0), Fraction(1))
    assert pipeline.thresholds_reference.npt_on == (Fraction(0), Fraction(1))
    # both exact thresholds are consistent with the looser stated value
    assert pipeline.thresholds_computed.psd_up_to >= Fraction(1, 2)
    assert pipeline.thresholds_reference.psd_up_to >= Fraction(1, 2)


def test_threshold_sign_analysis_against_direct_evaluation(pipeline):
    # exact thresholds agree with brute-force evaluation on a rational grid
    thr = pipeline.thresholds_reference.psd_up_to
    state = pipeline.rho
    dims = BipartiteDims(3, 3)
    for t, expect in ((thr - Fraction(1, 50), True), (thr + Fraction(1, 50), False)):
        at_t = state_at_real_eta(state, t)
        assert psd_check(at_t).is_psd is expect


def test_real_eta_cross_checks(pipeline):
    for state in (pipeline.rho_computed, pipeline.rho):
        r = real_eta_checks(state, Fraction(1, 10))
        assert r["psd"].is_psd
        assert not r["partial_transpose_psd"].is_psd
        r0 = real_eta_checks(state, Fraction(0))
        assert r0["psd"].is_psd
        assert r0["partial_transpose_psd"].is_psd


def test_state_thresholds_helper_standalone():
    alpha, beta = reference_coefficients(EPS)
    rep = state_thresholds(alpha, beta)
    assert rep.psd_up_to == Fraction(2, 3)
    assert rep.stated_psd_up_to == Fraction(1, 2)


# -- symmetrization map ---------------------------------------------------------------------


def test_symmetrization_is_neither_cp_nor_cocp():
    g = symmetrization_map(2)
    assert not is_cp(g).is_psd
    assert not is_cocp(g).is_psd


def test_symmetrization_fixed_by_transpose_composition():
    g = symmetrization_map(2)
    tg = compose_with_transpose(g)
    for k in range(2):
        for l in range(2):
            e = EpsMatrix.basis(2, k, l)
            assert apply_map(tg, e) == apply_map(g, e)
            assert apply_map(g, e) == apply_map(g, e.transpose())


def test_symmetrization_choi_witness():
    g = symmetrization_map(2)
    verdict = psd_check(choi_from_decomposition(g).matrix)
    assert not verdict.is_psd
    assert verdict.value.sign() < 0


# -- star convexity -----------------------------------------------------------------------


def test_star_convexity_with_transposition():
    rep = star_convexity_test(depolarizing_map(3), transpose_map(3),
                              n=2, samples=20, seed=9)
    assert rep.all_psd


def test_star_convexity_with_identity():
    rep = star_convexity_test(depolarizing_map(2), identity_map(2),
                              n=2, samples=20, seed=9)
    assert rep.all_psd


def test_star_convexity_requires_witnessed_base():
    with pytest.raises(NotEBWitnessed):
        star_convexity_test(identity_map(2), transpose_map(2), 2, 5)


def test_star_convexity_with_symmetrization_is_informational():
    # the hypothesis fails for the symmetrization map (not 2-stable), so
    # violations are permitted; the report must simply come back
    rep = star_convexity_test(depolarizing_map(2), symmetrization_map(2),
                              n=2, samples=10, seed=9)
    assert rep.samples == 10


# -- boundary form and counterexample map ----------------------------------------------------


def test_boundary_form_choi():
    base = seed_choi(3, 3)
    b_map = decomposition_from_choi(base)
    q = depolarizing_map(3)
    shifted = boundary_form(b_map, q, EPS)
    c = choi_from_decomposition(shifted)
    # the depolarizing Choi is identity/3, so B - eps Q shifts by eps/3
    assert c.matrix == base.matrix - EpsMatrix.identity(9).scale(EPS * Fraction(1, 3))
    assert boundary_form(b_map, q, EpsRational(0)) is b_map
    assert c.matrix.shadow() == base.matrix


def test_counterexample_map_values():
    p = counterexample_map(2)
    assert apply_map(p, EpsMatrix.basis(4, 0, 0)) == EpsMatrix.identity(4).scale(-1)
    b = p.terms[0][1]
    assert b.trace() == EpsComplex(1)  # level-1 projector value: tr(B) = 1
