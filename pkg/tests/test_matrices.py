import numpy as np
import pytest

from cohnorm import jsonio
from cohnorm.matrices import (
    ArgumentError,
    DensityState,
    DiagonalState,
    StructureError,
    diag_part,
    direct_sum,
    eigenvalues_hermitian,
    hermiticity_residual,
    load_matrix,
    make_all_ones,
    matrix_from_dict,
    matrix_to_dict,
    save_matrix,
    validate_density,
)
from conftest import random_hermitian


def test_make_all_ones_basics():
    j2 = make_all_ones(2)
    assert np.array_equal(j2.mat, np.ones((2, 2)))
    j3 = make_all_ones(3)
    assert np.allclose(eigenvalues_hermitian(j3).eigenvalues, [3.0, 0.0, 0.0], atol=1e-12)
    validate_density(j3.mat / 3)


def test_make_all_ones_rejects_bad_n():
    with pytest.raises(ArgumentError):
        make_all_ones(0)
    with pytest.raises(ArgumentError):
        make_all_ones(257)


def test_direct_sum_examples():
    j2 = make_all_ones(2).mat
    a = direct_sum([j2 / 2, [[0.0]]])
    assert a.dim == 3
    assert np.allclose(a.mat[:2, :2], j2 / 2)
    assert np.abs(a.mat[2]).max() == 0.0

    pair = direct_sum([j2 / 4, j2 / 4])
    expected = np.zeros((4, 4), dtype=complex)
    expected[:2, :2] = j2 / 4
    expected[2:, 2:] = j2 / 4
    assert np.array_equal(pair.mat, expected)

    final = direct_sum([j2 / 4, make_all_ones(3).mat / 6, [[0.0]]])
    assert final.dim == 6
    assert abs(np.trace(final.mat) - 1.0) < 1e-14
    validate_density(final.mat)


def test_direct_sum_rejects_empty():
    with pytest.raises(ArgumentError):
        direct_sum([])


def test_eigenvalues_examples():
    j2 = make_all_ones(2).mat
    res = eigenvalues_hermitian((j2 - np.eye(2)) / 2)
    assert np.allclose(res.eigenvalues, [0.5, -0.5], atol=1e-14)

    # the one-parameter family used in the additivity contradiction, at s = 1/4;
    # spectrum is (1-s, 3s-1, -s, -s): it must sum to zero, and the trace-norm
    # value (1-s) + (1-3s) + s + s = 2 - 2s only uses the moduli
    j3 = make_all_ones(3).mat
    rho = direct_sum([j3 / 3, [[0.0]]]).mat
    s = 0.25
    res = eigenvalues_hermitian(rho - np.diag([s, s, s, 1 - 3 * s]))
    assert np.allclose(res.eigenvalues, [0.75, -0.25, -0.25, -0.25], atol=1e-12)
    assert abs(res.eigenvalues.sum()) < 1e-12
    assert abs(np.abs(res.eigenvalues).sum() - (2 - 2 * s)) < 1e-12

    res = eigenvalues_hermitian(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(res.eigenvalues, [3.0, 2.0, 1.0], atol=1e-14)


def test_eigenvalues_residual_and_trace(rng):
    for n in (2, 5, 9):
        a = random_hermitian(rng, n, scale=3.0)
        res = eigenvalues_hermitian(a)
        assert res.residual <= 1e-10 * np.linalg.norm(a)
        assert abs(res.eigenvalues.sum() - np.trace(a).real) < 1e-9


def test_eigenvalues_rejects_non_hermitian():
    with pytest.raises(StructureError):
        eigenvalues_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_diag_part():
    j2 = make_all_ones(2).mat
    assert np.array_equal(diag_part(j2), np.eye(2))
    d = np.diag([1.0, 2.0, 3.0])
    assert np.array_equal(diag_part(d), d)
    j3 = make_all_ones(3).mat
    assert np.allclose(diag_part(j3 / 3), np.eye(3) / 3)
    with pytest.raises(ArgumentError):
        diag_part(np.ones((2, 3)))


def test_diag_part_preserves_trace_exactly(rng):
    for _ in range(20):
        a = random_hermitian(rng, 5)
        assert np.trace(diag_part(a)) == np.trace(a)


def test_validate_density():
    j2 = make_all_ones(2).mat
    validate_density(j2 / 2)
    with pytest.raises(StructureError, match="trace"):
        validate_density(j2)
    with pytest.raises(StructureError, match="eigenvalue"):
        validate_density(np.diag([1.5, -0.5]))


def test_hermitization_tolerance():
    dm = DensityState(np.array([[0.5, 0.5 + 1e-13j], [0.5, 0.5]]))
    assert hermiticity_residual(dm.mat) == 0.0
    with pytest.raises(StructureError):
        DensityState(np.array([[0.5, 0.5 + 1e-9j], [0.5, 0.5]]))


def test_direct_sum_eigenvalue_union(rng):
    blocks = [random_hermitian(rng, n) for n in (2, 3, 4)]
    combined = eigenvalues_hermitian(direct_sum(blocks)).eigenvalues
    separate = np.sort(np.concatenate([eigenvalues_hermitian(b).eigenvalues for b in blocks]))[::-1]
    assert np.abs(combined - separate).max() < 1e-9


def test_permutation_similarity_invariance(rng):
    for _ in range(10):
        a = random_hermitian(rng, 6)
        perm = rng.permutation(6)
        p = np.eye(6)[:, perm]
        w1 = eigenvalues_hermitian(a).eigenvalues
        w2 = eigenvalues_hermitian(p.T @ a @ p).eigenvalues
        assert np.abs(w1 - w2).max() < 1e-10


def test_diagonal_state():
    d = DiagonalState([0.25, 0.75])
    assert d.dim == 2
    assert np.trace(d.matrix()).real == 1.0
    d.as_density()
    with pytest.raises(StructureError):
        DiagonalState([0.5, 0.6])
    with pytest.raises(StructureError):
        DiagonalState([1.2, -0.2])


def test_matrix_json_roundtrip(tmp_path, rng):
    a = random_hermitian(rng, 3)
    path = tmp_path / "m.json"
    save_matrix(a, str(path))
    b = load_matrix(str(path))
    assert np.abs(a - b).max() < 1e-15
    text = path.read_text()
    assert '"n": 3' in text

    # rectangular operators reuse the format with n = row count
    rect = np.arange(6, dtype=float).reshape(2, 3) + 0j
    back = matrix_from_dict(matrix_to_dict(rect))
    assert np.array_equal(back, rect)
    with pytest.raises(ArgumentError):
        matrix_from_dict({"n": 5, "re": [[1.0]], "im": [[0.0]]})


def test_json_floats_are_17_digits(tmp_path):
    path = tmp_path / "third.json"
    jsonio.dump({"x": 1.0 / 3.0}, str(path))
    assert "0.33333333333333331" in path.read_text()
