"""Exact matrices: tensor structure, partial transpose, psd pivoting, kernels."""

import random
from fractions import Fraction
from itertools import combinations, permutations

import pytest

from tsplab.epsfield import EPS, EpsComplex, EpsRational
from tsplab.hypermat import (
    BipartiteDims,
    DimensionMismatch,
    EpsMatrix,
    NotHermitian,
    as_vector,
    flip_operator,
    is_product_vector,
    kernel_basis,
    kron,
    max_ent_projector,
    partial_trace,
    partial_transpose,
    psd_check,
    quadratic_form,
    rank,
)


def _random_rational_matrix(rng, rows, cols, span=3):
    return EpsMatrix.from_rows([[Fraction(rng.randint(-span, span))
                                 for _ in range(cols)] for _ in range(rows)])


def _random_hermitian(rng, d, psd=False):
    entries = [EpsComplex(EpsRational([rng.randint(-2, 2), rng.randint(-1, 1)]),
                          EpsRational([rng.randint(-2, 2), rng.randint(-1, 1)]))
               for _ in range(d * d)]
    g = EpsMatrix(d, d, entries)
    if psd:
        return g @ g.dagger()
    return (g + g.dagger()).scale(Fraction(1, 2))


# -- kron ---------------------------------------------------------------------


def test_kron_identities():
    assert kron(EpsMatrix.identity(2), EpsMatrix.identity(3)) == EpsMatrix.identity(6)
    d = EpsMatrix.diagonal([-1, 2])
    assert kron(d, d) == EpsMatrix.diagonal([1, -2, -2, 4])


def test_kron_basis_case():
    k = kron(EpsMatrix.basis(2, 0, 0), EpsMatrix.basis(2, 1, 1))
    nonzero = [(i, j) for i in range(4) for j in range(4) if not k[i, j].is_zero]
    assert nonzero == [(1, 1)]


def test_kron_of_psd_is_psd():
    rng = random.Random(21)
    for _ in range(5):
        a = _random_hermitian(rng, 2, psd=True)
        b = _random_hermitian(rng, 2, psd=True)
        assert psd_check(kron(a, b)).is_psd


def test_shadow_commutes_with_kron():
    rng = random.Random(22)
    a = _random_hermitian(rng, 2)
    b = _random_hermitian(rng, 3)
    assert kron(a, b).shadow() == kron(a.shadow(), b.shadow())


# -- partial transpose ----------------------------------------------------------


def test_partial_transpose_on_kron_factors():
    rng = random.Random(23)
    x = _random_rational_matrix(rng, 2, 2)
    y = _random_rational_matrix(rng, 3, 3)
    dims = BipartiteDims(2, 3)
    assert partial_transpose(kron(x, y), dims) == kron(x, y.transpose())


@pytest.mark.parametrize("d", [2, 3])
def test_flip_partial_transpose_is_scaled_projector(d):
    # expand both sides in the computational basis: F^TB and d|Om><Om| agree
    lhs = partial_transpose(flip_operator(d), BipartiteDims(d, d))
    rhs = max_ent_projector(d).scale(d)
    assert lhs == rhs


def test_partial_transpose_involution_and_trace():
    rng = random.Random(24)
    dims = BipartiteDims(2, 3)
    m = _random_rational_matrix(rng, 6, 6)
    pt = partial_transpose(m, dims)
    assert partial_transpose(pt, dims) == m
    assert pt.trace() == m.trace()
    h = _random_hermitian(rng, 6)
    assert partial_transpose(h, dims).is_hermitian()


def test_partial_trace_of_kron():
    rng = random.Random(25)
    x = _random_rational_matrix(rng, 2, 2)
    y = _random_rational_matrix(rng, 3, 3)
    dims = BipartiteDims(2, 3)
    assert partial_trace(kron(x, y), dims, keep="first") == x.scale(y.trace())
    assert partial_trace(kron(x, y), dims, keep="second") == y.scale(x.trace())


# -- psd decision ----------------------------------------------------------------


def test_identity_is_psd():
    verdict = psd_check(EpsMatrix.identity(5))
    assert verdict.is_psd
    assert len(verdict.pivots) == 5


def test_two_by_two_with_infinitesimal_defect():
    m = EpsMatrix.from_rows([[1, 1], [1, 1 - EPS]])
    verdict = psd_check(m)
    assert not verdict.is_psd
    assert verdict.value.sign() < 0
    # re-check the witness by hand
    assert quadratic_form(m, verdict.witness).re == verdict.value


def test_zero_diagonal_with_off_diagonal_entry():
    verdict = psd_check(EpsMatrix.from_rows([[0, 1], [1, 5]]))
    assert not verdict.is_psd


def test_zero_diagonal_with_zero_row_recurses():
    m = EpsMatrix.from_rows([[0, 0], [0, 3]])
    assert psd_check(m).is_psd
    m2 = EpsMatrix.from_rows([[0, 0], [0, -3]])
    assert not psd_check(m2).is_psd


def test_psd_check_requires_hermitian():
    with pytest.raises(NotHermitian):
        psd_check(EpsMatrix.from_rows([[0, 1], [0, 0]]))


def test_psd_witnesses_verify_and_psd_verdicts_hold_on_random_vectors():
    rng = random.Random(26)
    for _ in range(40):
        d = rng.randint(1, 4)
        m = _random_hermitian(rng, d, psd=(rng.random() < 0.5))
        verdict = psd_check(m)
        if verdict.is_psd:
            for _ in range(25):
                v = [EpsComplex(Fraction(rng.randint(-3, 3)),
                                Fraction(rng.randint(-3, 3))) for _ in range(d)]
                val = quadratic_form(m, v)
                assert val.is_real and val.re.sign() >= 0
        else:
            val = quadratic_form(m, verdict.witness)
            assert val.re.sign() < 0


def _det_leibniz(rows):
    d = len(rows)
    total = EpsComplex(0)
    for perm in permutations(range(d)):
        inv = sum(1 for i in range(d) for j in range(i + 1, d)
                  if perm[i] > perm[j])
        prod = EpsComplex(1)
        for i in range(d):
            prod = prod * rows[i][perm[i]]
        total = total + (prod if inv % 2 == 0 else -prod)
    return total


def _psd_by_minors(m):
    for size in range(1, m.rows + 1):
        for subset in combinations(range(m.rows), size):
            det = _det_leibniz([[m[i, j] for j in subset] for i in subset])
            if not det.is_real or det.re.sign() < 0:
                return False
    return True


def test_pivoting_agrees_with_principal_minors():
    rng = random.Random(27)
    for k in range(60):
        d = rng.randint(1, 4)
        m = _random_hermitian(rng, d, psd=(k % 2 == 0))
        assert psd_check(m).is_psd == _psd_by_minors(m)


# -- rank and kernels -------------------------------------------------------------


def test_rank_and_kernel_of_base_choi_matrix():
    c = EpsMatrix.identity(9) + EpsMatrix.basis(9, 0, 4) + EpsMatrix.basis(9, 4, 0)
    assert rank(c) == 8
    basis = kernel_basis(c)
    assert len(basis) == 1
    v = basis[0]
    assert {i for i, x in enumerate(v) if not x.is_zero} == {0, 4}
    assert (v[0] + v[4]).is_zero
    assert not is_product_vector(v, BipartiteDims(3, 3))


def test_rank_of_identity():
    assert rank(EpsMatrix.identity(4)) == 4


def test_product_vector_checks():
    assert is_product_vector(as_vector([0, 1, 0, 0, 0, 0]), BipartiteDims(2, 3))
    assert is_product_vector([EpsComplex(0)] * 6, BipartiteDims(2, 3))
    with pytest.raises(DimensionMismatch):
        is_product_vector(as_vector([1, 0]), BipartiteDims(2, 3))


# -- fixed operators -----------------------------------------------------------------


def test_flip_matrix_d2():
    assert flip_operator(2) == EpsMatrix.from_rows(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_flip_is_an_involution_and_projector_has_unit_trace(d):
    f = flip_operator(d)
    assert f @ f == EpsMatrix.identity(d * d)
    assert max_ent_projector(d).trace() == EpsComplex(1)


def test_max_ent_projector_is_a_projector():
    p = max_ent_projector(3)
    assert p @ p == p
    assert psd_check(p).is_psd


def test_matrix_json_round_trip():
    rng = random.Random(28)
    m = _random_hermitian(rng, 3)
    assert EpsMatrix.from_json(m.to_json()) == m
