import math

import numpy as np
import pytest

from cohnorm.channels import (
    KrausSet,
    KrausValidationError,
    apply_channel,
    dephasing_channel,
    necessity_family,
    permutation_channel,
    random_incoherent_kraus,
    selective_outcomes,
    stacked_isometry,
    validate_incoherent,
)
from cohnorm.jsonio import dumps
from cohnorm.matrices import ArgumentError, DiagonalState, make_all_ones
from conftest import random_density_matrix


def projector(i, n):
    e = np.zeros((n, n), dtype=complex)
    e[i, i] = 1.0
    return e


def hadamard_pair():
    # two 1x2 operators; columns each have one nonzero, rows overlap both columns
    k1 = np.array([[1.0, 1.0]]) / math.sqrt(2)
    k2 = np.array([[1.0, -1.0]]) / math.sqrt(2)
    return validate_incoherent([k1, k2])


def test_validate_examples():
    validate_incoherent([projector(0, 2), projector(1, 2)])
    validate_incoherent([np.eye(2, dtype=complex)])
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)
    with pytest.raises(KrausValidationError, match="column"):
        validate_incoherent([h])
    with pytest.raises(KrausValidationError, match="completeness"):
        validate_incoherent([projector(0, 2)])


def test_validation_zeroes_tiny_entries():
    op = np.eye(2, dtype=complex)
    op[1, 0] = 1e-13
    ks = validate_incoherent([op])
    assert ks.operators[0][1, 0] == 0.0


def test_apply_channel_examples():
    j2 = make_all_ones(2).mat
    rho = j2 / 2
    ident = validate_incoherent([np.eye(2, dtype=complex)])
    assert np.abs(apply_channel(ident, rho).mat - rho).max() < 1e-15

    deph = dephasing_channel(2)
    assert np.abs(apply_channel(deph, rho).mat - np.eye(2) / 2).max() < 1e-15

    # direct-arithmetic oracle: K1 = I_2 ⊕ [0], K2 = 0 ⊕ [1] at theta = pi/2
    fam = necessity_family(2, math.pi / 2)
    rho3 = make_all_ones(3).mat / 3
    expected = np.zeros((3, 3), dtype=complex)
    expected[:2, :2] = j2 / 3
    expected[2, 2] = 1.0 / 3.0
    assert np.abs(apply_channel(fam, rho3).mat - expected).max() < 1e-14


def test_selective_outcomes_examples():
    rho = make_all_ones(2).mat / 2
    outs = selective_outcomes(dephasing_channel(2), rho)
    assert [round(o.probability, 12) for o in outs] == [0.5, 0.5]
    assert np.abs(outs[0].state.mat - np.diag([1.0, 0.0])).max() < 1e-14
    assert np.abs(outs[1].state.mat - np.diag([0.0, 1.0])).max() < 1e-14

    fam = necessity_family(2, math.pi / 2)
    rho3 = make_all_ones(3).mat / 3
    outs = selective_outcomes(fam, rho3)
    assert abs(outs[0].probability - 2.0 / 3.0) < 1e-14
    assert abs(outs[1].probability - 1.0 / 3.0) < 1e-14
    first = np.zeros((3, 3), dtype=complex)
    first[:2, :2] = make_all_ones(2).mat / 2
    assert np.abs(outs[0].state.mat - first).max() < 1e-14
    second = np.zeros((3, 3), dtype=complex)
    second[2, 2] = 1.0
    assert np.abs(outs[1].state.mat - second).max() < 1e-14

    ident = validate_incoherent([np.eye(3, dtype=complex)])
    outs = selective_outcomes(ident, rho3)
    assert len(outs) == 1 and abs(outs[0].probability - 1.0) < 1e-14


def test_zero_probability_outcomes_carry_no_state():
    fam = necessity_family(2, 0.0)  # K1 = 0 ⊕ [0]
    outs = selective_outcomes(fam, make_all_ones(3).mat / 3)
    assert outs[0].probability <= 1e-12 and outs[0].state is None
    assert outs[1].state is not None


def test_necessity_family():
    fam = necessity_family(1, 0.0)
    assert np.abs(fam.operators[0]).max() == 0.0
    assert np.abs(fam.operators[1] - np.eye(2)).max() == 0.0

    fam = necessity_family(2, math.pi / 4)
    gram = sum(k.conj().T @ k for k in fam.operators)
    assert np.abs(gram - np.eye(3)).max() < 1e-15

    necessity_family(3, math.pi / 4)  # used by the monotonicity gap test
    with pytest.raises(ArgumentError):
        necessity_family(0, 0.1)
    with pytest.raises(ArgumentError):
        necessity_family(2, 2.0)


def test_random_kraus_basics():
    ks = random_incoherent_kraus(2, 2, 2, seed=0)
    f = stacked_isometry(ks)
    assert np.abs(f.conj().T @ f - np.eye(2)).max() < 1e-12

    single = random_incoherent_kraus(1, 1, 1, seed=11)
    assert abs(abs(single.operators[0][0, 0]) - 1.0) < 1e-12

    with pytest.raises(ArgumentError):
        random_incoherent_kraus(4, 1, 2, seed=0)


def test_random_kraus_deterministic_serialization():
    a = random_incoherent_kraus(4, 4, 3, seed=7)
    b = random_incoherent_kraus(4, 4, 3, seed=7)
    assert dumps(a.to_dict()) == dumps(b.to_dict())
    c = random_incoherent_kraus(4, 4, 3, seed=8)
    assert dumps(a.to_dict()) != dumps(c.to_dict())


def test_stacked_isometry_examples():
    ks = validate_incoherent([projector(0, 2), projector(1, 2)])
    f = stacked_isometry(ks)
    assert f.shape == (4, 2)
    assert np.abs(f.conj().T @ f - np.eye(2)).max() < 1e-15

    assert np.abs(
        stacked_isometry(necessity_family(2, math.pi / 3)).conj().T @ stacked_isometry(necessity_family(2, math.pi / 3))
        - np.eye(3)
    ).max() < 1e-15

    f42 = stacked_isometry(random_incoherent_kraus(3, 4, 2, seed=42))
    assert np.abs(f42.conj().T @ f42 - np.eye(3)).max() < 1e-12


def test_channel_consistency_invariants(rng):
    channels = [hadamard_pair(), necessity_family(3, 0.7), random_incoherent_kraus(4, 3, 2, seed=5)]
    for ks in channels:
        n = ks.dim_in
        rho = random_density_matrix(rng, n)
        total = apply_channel(ks, rho).mat
        mix = np.zeros_like(total)
        for out in selective_outcomes(ks, rho):
            if out.state is not None:
                mix += out.probability * out.state.mat
        assert np.abs(total - mix).max() < 1e-10

        diag = DiagonalState(rng.dirichlet(np.ones(n)))
        out = apply_channel(ks, diag.matrix())
        off = out.mat - np.diag(np.diagonal(out.mat))
        assert np.abs(off).max() < 1e-10


def test_column_map_roundtrip():
    for ks in (necessity_family(2, 0.3), random_incoherent_kraus(3, 2, 2, seed=9), hadamard_pair()):
        rebuilt = ks.column_map.reconstruct(ks.rows)
        for orig, back in zip(ks.operators, rebuilt):
            assert np.array_equal(orig, back)


def test_kraus_json_roundtrip(tmp_path):
    ks = random_incoherent_kraus(3, 3, 2, seed=4)
    path = tmp_path / "kraus.json"
    ks.save(str(path))
    back = KrausSet.load(str(path))
    for a, b in zip(ks.operators, back.operators):
        assert np.abs(a - b).max() < 1e-16


def test_permutation_channel():
    ks = permutation_channel([1, 2, 0])
    rho = random_density_matrix(np.random.default_rng(0), 3)
    out = apply_channel(ks, rho)
    assert abs(np.trace(out.mat).real - 1.0) < 1e-12
