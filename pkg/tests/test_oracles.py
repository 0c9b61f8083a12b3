import math

import numpy as np
import pytest

from cohnorm.channels import necessity_family, random_incoherent_kraus, validate_incoherent
from cohnorm.matrices import ArgumentError, StructureError, direct_sum, make_all_ones
from cohnorm.measures import SolverConfig
from cohnorm.norms import NormSpec
from cohnorm.oracles import (
    CoverInstance,
    brute_force_min_diag,
    check_contraction,
    check_lagrange_inequality,
    check_perm_inequality,
    cover_from_kraus,
    extreme_point_witness,
    grid_error_bound,
    random_lagrange_instance,
    random_perm_instance,
    run_contraction_suite,
    run_cover_kraus_suite,
    run_extreme_suite,
    run_lagrange_suite,
    run_perm_suite,
    solver_oracle_agreement,
    symmetric_solver_agreement,
)
from conftest import random_density_matrix


def test_cover_instance_validation():
    CoverInstance(3, [{0, 1}, {2}], [1.0, 0.5, 0.2])
    with pytest.raises(ArgumentError, match="cover"):
        CoverInstance(3, [{0, 1}], [1.0, 0.5, 0.2])
    with pytest.raises(ArgumentError):
        CoverInstance(2, [{0}, {1}, set()], [1.0, 0.5])
    v = np.array([1.0, 1.0])
    with pytest.raises(StructureError, match="sum b"):
        CoverInstance(2, [{0}, {1}], v, [1.0, 0.5])
    # partial sums must stay below partial masses: b puts too much on {0}
    with pytest.raises(StructureError, match="partial"):
        CoverInstance(2, [{0}, {1}], v, [1.5, 0.5])
    CoverInstance(2, [{0}, {1}], v, [1.0, 1.0])


def test_perm_inequality_examples():
    inst = CoverInstance(2, [{0}, {1}], [1.0, 1.0])
    assert check_perm_inequality(inst, 1.0) == 0.0
    # p = 2 collapses the exponent: LHS equals l2(v)^2 = RHS for any cover
    rng = np.random.default_rng(0)
    for _ in range(20):
        inst = random_perm_instance(rng)
        assert abs(check_perm_inequality(inst, 2.0)) < 1e-12


def test_perm_inequality_preconditions():
    inst = CoverInstance(2, [{0}, {1}], [1.0, 0.0])
    with pytest.raises(ArgumentError, match="zero"):
        check_perm_inequality(inst, 1.5)
    weighted = CoverInstance(1, [{0}], [1.0], [1.0])
    with pytest.raises(ArgumentError):
        check_perm_inequality(weighted, 1.5)
    with pytest.raises(ArgumentError):
        check_perm_inequality(CoverInstance(2, [{0}, {1}], [1.0, 1.0]), 2.5)


def test_perm_inequality_randomized():
    worst = -math.inf
    for t in range(500):
        rng = np.random.default_rng((0, t))
        inst = random_perm_instance(rng)
        for p in (1.0, 1.3, 1.7, 2.0):
            worst = max(worst, check_perm_inequality(inst, p))
    assert worst <= 1e-12


def test_lagrange_base_case():
    a = 1.3
    inst = CoverInstance(1, [{0}], [a], [a * a])
    for p in (1.0, 1.5, 2.0):
        assert abs(check_lagrange_inequality(inst, p)) < 1e-14


def test_lagrange_concentrated_weight():
    v = np.array([0.8, 0.6])
    inst = CoverInstance(2, [{0, 1}, {0}], v, [float((v ** 2).sum()), 0.0])
    for p in (1.0, 1.4, 2.0):
        assert check_lagrange_inequality(inst, p) <= 1e-12


def test_lagrange_randomized():
    worst = -math.inf
    for t in range(300):
        rng = np.random.default_rng((1, t))
        inst = random_lagrange_instance(rng)
        for p in (1.0, 1.3, 1.7, 2.0):
            worst = max(worst, check_lagrange_inequality(inst, p))
    assert worst <= 1e-10


def test_cover_from_kraus_identity():
    ident = validate_incoherent([np.eye(3, dtype=complex)])
    v = np.array([0.6, 0.48, 0.64]) / np.linalg.norm([0.6, 0.48, 0.64])
    inst = cover_from_kraus(ident, v)
    assert sorted(tuple(sorted(s)) for s in inst.subsets) == [(0,), (1,), (2,)]
    by_subset = dict(zip([tuple(sorted(s)) for s in inst.subsets], inst.b))
    for j in range(3):
        assert abs(by_subset[(j,)] - abs(v[j]) ** 2) < 1e-14


def test_cover_from_kraus_examples():
    inst = cover_from_kraus(necessity_family(2, math.pi / 4), np.array([1.0, 1.0, 1.0]) / math.sqrt(3))
    assert abs(inst.b.sum() - 1.0) < 1e-12

    # row with two nonzeros: both stacked operators share the full support
    k1 = np.array([[1.0, 1.0]]) / math.sqrt(2)
    k2 = np.array([[1.0, -1.0]]) / math.sqrt(2)
    pair = validate_incoherent([k1, k2])
    v = np.array([0.8, 0.6j])
    inst = cover_from_kraus(pair, v)
    assert [tuple(sorted(s)) for s in inst.subsets] == [(0, 1)]
    assert abs(inst.b[0] - 1.0) < 1e-14

    with pytest.raises(ArgumentError, match="unit"):
        cover_from_kraus(pair, np.array([1.0, 1.0]))


def test_cover_from_kraus_random_pass_lemmas():
    for t in range(60):
        rng = np.random.default_rng((2, t))
        n = int(rng.integers(2, 7))
        while True:
            m = int(rng.integers(1, 4))
            rows = int(rng.integers(1, 7))
            if m * rows >= n:
                break
        kraus = random_incoherent_kraus(n, rows, m, seed=int(rng.integers(2 ** 62)))
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        inst = cover_from_kraus(kraus, v)
        for p in (1.0, 1.5, 2.0):
            assert check_lagrange_inequality(inst, p) <= 1e-10
            if inst.v.min() > 0:
                assert check_perm_inequality(inst.restrict(), p) <= 1e-10


def test_contraction_examples(rng):
    ident = validate_incoherent([np.eye(3, dtype=complex)])
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert check_contraction(a, ident, 1.5) == 0.0

    perm_op = np.zeros((3, 3), dtype=complex)
    perm_op[[1, 2, 0], [0, 1, 2]] = 1.0
    perm = validate_incoherent([perm_op])
    assert abs(check_contraction(a, perm, 1.3)) < 1e-13

    with pytest.raises(ArgumentError):
        check_contraction(a, ident, 2.5)


def test_contraction_randomized():
    worst = -math.inf
    for t in range(300):
        rng = np.random.default_rng((3, t))
        n = int(rng.integers(1, 7))
        while True:
            m = int(rng.integers(1, 4))
            rows = int(rng.integers(1, 7))
            if m * rows >= n:
                break
        kraus = random_incoherent_kraus(n, rows, m, seed=int(rng.integers(2 ** 62)))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        for p in (1.0, 1.5, 2.0):
            worst = max(worst, check_contraction(a, kraus, p))
    assert worst <= 1e-10


def test_extreme_point_examples():
    e11 = np.zeros((3, 3), dtype=complex)
    e11[0, 0] = 1.0
    assert extreme_point_witness(e11, 2.0) == "extreme"

    b = np.diag([0.5, 0.5, 0.0]).astype(complex)
    first, second = extreme_point_witness(b, 1.5)
    from cohnorm.norms import lqp_norm

    assert abs(lqp_norm(first, 1, 1.5) - 1.0) < 1e-12
    assert abs(lqp_norm(second, 1, 1.5) - 1.0) < 1e-12
    assert np.abs((first + second) / 2 - b).max() < 1e-14

    v = np.array([0.6, 0.8, 0.0])
    single_column = np.outer(v, [1.0, 0.0, 0.0])
    assert extreme_point_witness(single_column, 2.0) == "extreme"

    with pytest.raises(ArgumentError, match="unit"):
        extreme_point_witness(np.zeros((2, 2)), 2.0)


def test_extreme_witness_entry_separation_small_dims(rng):
    # with n^(1/p) <= 4 the construction moves some entry by at least eps/2
    for p, n in ((1.0, 4), (2.0, 4), (2.0, 3)):
        for _ in range(25):
            mat = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            from cohnorm.norms import lqp_norm, vector_lp

            mat /= lqp_norm(mat, 1, p)
            got = extreme_point_witness(mat, p)
            assert got != "extreme"
            first, second = got
            norms = [vector_lp(mat[:, j], p) for j in range(n)]
            nz = [x for x in norms if x > 1e-12]
            eps = 0.5 * min(nz[0], nz[1])
            assert np.abs(first - second).max() >= eps / 2


def test_brute_force_examples():
    tr = NormSpec.trace_norm()
    j2 = make_all_ones(2).mat
    got = brute_force_min_diag(j2 / 2, tr, 1000)
    assert abs(got - 1.0) <= 2e-3

    rho = direct_sum([make_all_ones(3).mat / 3, [[0.0]]]).mat
    got = brute_force_min_diag(rho, tr, 200)
    assert abs(got - 4.0 / 3.0) <= 1e-2

    with pytest.raises(ArgumentError, match="refuses"):
        brute_force_min_diag(np.eye(5) / 5, tr, 10)


def test_brute_force_matches_closed_form(rng):
    from cohnorm.measures import c_qp

    rho = random_density_matrix(rng, 3)
    spec = NormSpec.lqp(1, 2)
    got = brute_force_min_diag(rho, spec, 60)
    bound = grid_error_bound(spec, 3, 60)
    closed = c_qp(rho, 1, 2)
    assert closed <= got <= closed + bound


def test_suites_small():
    assert run_perm_suite(200, seed=0)["worst_margin"] <= 1e-12
    assert run_lagrange_suite(150, seed=0)["worst_margin"] <= 1e-10
    assert run_contraction_suite(150, seed=0)["worst_margin"] <= 1e-10
    assert run_cover_kraus_suite(80, seed=0)["worst_margin"] <= 1e-10
    ext = run_extreme_suite(40, seed=0)
    assert ext["worst_unit_norm_deviation"] <= 1e-10
    assert ext["worst_average_deviation"] <= 1e-12
    assert ext["worst_separation_over_eps"] >= 0.5


def test_solver_oracle_agreement_small():
    j2 = make_all_ones(2).mat
    states = [("j2-half", j2 / 2)]
    rows = solver_oracle_agreement(states, [NormSpec.trace_norm(), NormSpec.lqp(1, 2)], SolverConfig())
    assert all(r["pass"] for r in rows)


def test_symmetric_solver_agreement_small():
    j2 = make_all_ones(2).mat
    rows = symmetric_solver_agreement(
        [("pair", (j2 / 4, j2 / 4))], [NormSpec.trace_norm(), NormSpec.schatten(2)], SolverConfig()
    )
    assert all(r["pass"] for r in rows)
