"""Projector construction, MPO diagonals, the reduction, and decision loops."""

import random
from fractions import Fraction
from itertools import product

import pytest

from tsplab.epsfield import EpsComplex
from tsplab.hypermat import EpsMatrix, max_ent_projector
from tsplab.choi import MapDecomposition, ResourceLimit, identity_map
from tsplab.constructions import counterexample_map
from tsplab.mamu import (
    MamuDiagonal,
    MpoTensor,
    NotPerfectSquare,
    apply_power_to_mamu,
    bounded_positive_mpo,
    bounded_tsp_mamu,
    mamu_projector,
    mamu_vector_positions,
    random_mpo,
    reduce_mpo_to_map,
    tau_n,
    transfer_matrix,
    unreduce_map_to_mpo,
    verify_reduction,
)


# -- the projector --------------------------------------------------------------


def test_chi_1_is_the_unnormalized_max_ent_projector():
    assert mamu_projector(2, 1) == max_ent_projector(2).scale(2)


def test_chi_trace_is_d_to_the_n():
    for d, n in ((2, 1), (2, 2), (3, 2)):
        assert mamu_projector(d, n).trace() == EpsComplex(d ** n)


def test_chi_positions_regression():
    # fixed-vector regression pinning the lexicographic, i1-slowest layout:
    # d=2, n=2 tuples (0,0),(0,1),(1,0),(1,1) sit at site pairs
    # (00,00),(01,10),(10,01),(11,11) -> flat 0, 6, 9, 15
    assert mamu_vector_positions(2, 2) == [0, 6, 9, 15]


def test_chi_projector_is_rank_one_psd():
    from tsplab.hypermat import psd_check, rank
    chi = mamu_projector(2, 2)
    assert psd_check(chi).is_psd
    assert rank(chi) == 1


def test_projector_cap():
    with pytest.raises(ResourceLimit):
        mamu_projector(3, 5, max_dim=1000)


# -- tau ------------------------------------------------------------------------


def test_tau_scalar_power():
    c = MpoTensor.from_rows([[[2]]])
    assert tau_n(c, 5).values == [Fraction(32)]


def test_tau_sign_example():
    c = MpoTensor.from_rows([[[1]], [[-1]]])
    assert tau_n(c, 1).values == [Fraction(1), Fraction(-1)]


def test_tau_against_bruteforce_oracle():
    # independent oracle: re-multiply every tuple from scratch
    rng = random.Random(61)
    c = random_mpo(3, 3, seed=61)
    got = tau_n(c, 3)

    def brute(tup):
        acc = None
        for i in tup:
            m = c.matrices[i]
            acc = m if acc is None else tuple(
                tuple(sum(ra[k] * m[k][j] for k in range(3)) for j in range(3))
                for ra in acc)
        return sum(acc[i][i] for i in range(3))

    tuples = list(product(range(3), repeat=3))
    assert len(tuples) == len(got.values)
    for flat, tup in enumerate(tuples):
        assert got.values[flat] == brute(tup)
        assert got.index_tuple(flat) == tup


def test_tau_cap():
    c = random_mpo(2, 10, seed=1)
    with pytest.raises(ResourceLimit):
        tau_n(c, 9, max_values=10 ** 6)


# -- reduction -------------------------------------------------------------------


def test_reduction_requires_square_bond_dimension():
    with pytest.raises(NotPerfectSquare):
        reduce_mpo_to_map(random_mpo(5, 2, seed=2))


def test_reshuffle_round_trip():
    c = random_mpo(9, 4, seed=3)
    p = reduce_mpo_to_map(c)
    assert unreduce_map_to_mpo(p).matrices == c.matrices


def test_reduction_of_identity_tensor():
    # identity C[(mu,nu),(lam,rho)] = delta_{mu lam} delta_{nu rho}, so the
    # reshuffled B carries the delta pattern delta_{mu lam} delta_{nu rho}
    # reindexed to rows (mu,lam) and columns (nu,rho)
    ident = [[Fraction(1) if i == j else Fraction(0) for j in range(4)] for i in range(4)]
    c = MpoTensor.from_rows([ident])
    p = reduce_mpo_to_map(c)
    b = p.terms[0][1]
    for mu in range(2):
        for lam in range(2):
            for nu in range(2):
                for rho in range(2):
                    expected = 1 if (mu == lam and nu == rho) else 0
                    assert b[mu * 2 + lam, nu * 2 + rho] == EpsComplex(expected)


def test_transfer_matrix_of_reduced_tensor_recovers_it():
    c = random_mpo(4, 3, seed=4)
    p = reduce_mpo_to_map(c)
    for i, (_, b_eps) in enumerate(p.terms):
        b = tuple(tuple(b_eps[r, cc].re.as_rational() for cc in range(4))
                  for r in range(4))
        u = transfer_matrix(b, 2)
        # U[(k,j),(k',j')] = B[(k,k'),(j,j')] = C[(k,j),(k',j')]
        assert u == c.matrices[i]


def test_verify_reduction_on_seeded_tensors():
    for seed in (1, 2):
        assert verify_reduction(random_mpo(9, 9, seed=seed), n_max=2)


def test_verify_reduction_identity_tensor_values():
    ident9 = [[Fraction(1) if i == j else Fraction(0) for j in range(9)]
              for i in range(9)]
    c = MpoTensor.from_rows([ident9, ident9])
    assert all(v == 9 for v in tau_n(c, 2).values)
    assert verify_reduction(c, n_max=2)


def test_verify_reduction_detects_perturbation():
    c = random_mpo(9, 9, seed=5)
    p = reduce_mpo_to_map(c)
    a0, b0 = p.terms[0]
    rows = [[b0[i, j] for j in range(9)] for i in range(9)]
    rows[0][0] = rows[0][0] + EpsComplex(1)
    bad = MapDecomposition(d_in=9, d_out=9,
                           terms=((a0, EpsMatrix.from_rows(rows)),) + p.terms[1:])
    tau1 = tau_n(c, 1).values
    got = apply_power_to_mamu(bad, 1).diagonal_values()
    assert got != tau1


# -- applying powers ------------------------------------------------------------------


def test_counterexample_values_are_uniform():
    p = counterexample_map(3)
    for n in range(1, 5):
        img = apply_power_to_mamu(p, n)
        assert img.kind == "uniform"
        assert img.value == (-1) ** n + 2 ** n


def test_identity_map_returns_chi():
    idm = identity_map(4)
    for method in ("transfer", "dense"):
        img = apply_power_to_mamu(idm, 2, method=method)
        assert img.kind == "dense"
        assert img.matrix == mamu_projector(2, 2)


def test_transfer_and_dense_routes_agree_on_reduced_maps():
    c = random_mpo(4, 3, seed=6)
    p = reduce_mpo_to_map(c)
    for n in (1, 2, 3):
        a = apply_power_to_mamu(p, n, method="transfer")
        b = apply_power_to_mamu(p, n, method="dense")
        assert a.diagonal_values() == b.diagonal_values()
        assert a.diagonal_values() == tau_n(c, n).values


# -- bounded loops ------------------------------------------------------------------


def test_bounded_tsp_mamu_counterexample():
    verdict = bounded_tsp_mamu(counterexample_map(3), 6)
    assert not verdict.violated and verdict.n == 6


def test_bounded_tsp_mamu_negative_identity():
    neg = MpoTensor.from_rows([[[Fraction(-1) if i == j else Fraction(0)
                                 for j in range(4)] for i in range(4)]])
    verdict = bounded_tsp_mamu(reduce_mpo_to_map(neg), 3)
    assert verdict.violated and verdict.n == 1 and verdict.value == Fraction(-4)


def test_bounded_tsp_mamu_identity_never_violates():
    verdict = bounded_tsp_mamu(identity_map(4), 2)
    assert not verdict.violated


def test_bounded_positive_mpo_examples():
    pos = MpoTensor.from_rows([[[2]]])
    assert not bounded_positive_mpo(pos, 5).violated
    mixed = MpoTensor.from_rows([[[1]], [[-1]]])
    verdict = bounded_positive_mpo(mixed, 3)
    assert verdict.violated and verdict.n == 1 and verdict.index_tuple == (1,)


def test_positive_traces_but_negative_pair():
    # brute-force search over small integer 2x2 matrices finds an instance
    # with nonnegative level-1 traces but a negative level-2 trace
    found = None
    vals = (-1, 0, 1)
    for a in product(vals, repeat=4):
        m = ((Fraction(a[0]), Fraction(a[1])), (Fraction(a[2]), Fraction(a[3])))
        tr = m[0][0] + m[1][1]
        tr_sq = sum(m[i][k] * m[k][i] for i in range(2) for k in range(2))
        if tr >= 0 and tr_sq < 0:
            found = m
            break
    assert found is not None
    c = MpoTensor.from_rows([found])
    verdict = bounded_positive_mpo(c, 3)
    assert verdict.violated and verdict.n == 2


def test_first_failure_semantics():
    # a violation at n means no violation is reported below n
    c = MpoTensor.from_rows([((Fraction(0), Fraction(1)),
                              (Fraction(-1), Fraction(0)))])
    verdict = bounded_positive_mpo(c, 4)
    assert verdict.violated and verdict.n == 2
    assert not bounded_positive_mpo(c, 1).violated


def test_positivity_transfer_between_both_loops():
    # the two bounded deciders agree through the reduction, including the n hit
    for seed in (7, 8):
        c = random_mpo(4, 2, seed=seed)
        p = reduce_mpo_to_map(c)
        for n_max in (1, 2, 3):
            a = bounded_positive_mpo(c, n_max)
            b = bounded_tsp_mamu(p, n_max)
            assert a.status == b.status
            assert a.n == b.n
            if a.violated:
                assert a.index_tuple == b.index_tuple


def test_mpo_json_round_trip(tmp_path):
    from tsplab.mamu import load_mpo, save_mpo
    c = random_mpo(4, 3, seed=9)
    path = tmp_path / "mpo.json"
    save_mpo(c, str(path))
    assert load_mpo(str(path)).matrices == c.matrices
