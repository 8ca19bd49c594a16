import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdm.errors import IndexOutOfRange, InvalidParams, NotUnitVector, TraceMismatch
from qdm.jarlskog import (
    JarlskogParams,
    Level,
    a_matrix,
    canonicalize,
    commutant_structure,
    density_by_recursion,
    density_from_params,
    extract_params,
    k_matrix,
    recursion_residual,
    recursive_embed,
    sample,
    su_from_params,
    truncate,
    unphased_product,
    v_matrix,
)
from qdm.linalg import expm_skew


def _eye(n):
    return np.eye(n, dtype=complex)


def test_v_matrix_is_expm_of_k(rng):
    for j in (2, 3, 5):
        z = rng.normal(size=j - 1) + 1j * rng.normal(size=j - 1)
        z /= np.linalg.norm(z)
        theta = rng.uniform(0, np.pi / 2)
        v = v_matrix(j, theta, z)
        assert np.max(np.abs(v @ v.conj().T - _eye(j))) < 1e-15
        assert np.max(np.abs(expm_skew(k_matrix(j, theta, z)) - v)) < 1e-14


def test_qubit_case_is_rotation():
    v = v_matrix(2, 0.3, [1.0])
    assert np.allclose(v, [[np.cos(0.3), np.sin(0.3)], [-np.sin(0.3), np.cos(0.3)]], atol=1e-16)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_unitary_and_spectrum(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        p = sample(n, rng, with_phases=True)
        u = su_from_params(p)
        assert np.max(np.abs(u @ u.conj().T - _eye(n))) < 1e-13
        assert abs(np.linalg.det(u) - 1.0) < 1e-13
        rho = density_from_params(p)
        assert np.max(np.abs(np.linalg.eigvalsh(rho)[::-1] - p.eigenvalues)) < 1e-13
        assert recursion_residual(p) < 1e-14
        assert np.max(np.abs(density_by_recursion(p) - rho)) < 1e-14
        ud = su_from_params(p, order="descending")
        assert np.max(np.abs(ud @ ud.conj().T - _eye(n))) < 1e-13


def test_phases_do_not_change_density(rng):
    p = sample(4, rng)
    q = p.with_phases([0.3, -0.1, 0.5, -0.7])
    assert np.max(np.abs(density_from_params(p) - density_from_params(q))) < 1e-15


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_extraction_roundtrip(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(50):
        p = sample(n, rng, with_phases=True)
        ex = extract_params(su_from_params(p))
        assert ex.canonical
        for a, b in zip(ex.levels, p.levels):
            assert abs(a.theta - b.theta) < 1e-10
            assert np.max(np.abs(a.z - b.z)) < 1e-10
        assert np.max(np.abs(np.exp(1j * ex.phases) - np.exp(1j * p.phases))) < 1e-10


def test_extraction_boundary_is_flagged():
    p = JarlskogParams(3, [0.5, 0.3, 0.2], (Level(0.0, [1.0]), Level(0.4, [0.6, 0.8])))
    ex = extract_params(su_from_params(p))
    assert not ex.canonical
    rebuilt = JarlskogParams(3, p.eigenvalues, ex.levels, ex.phases - ex.phases.mean())
    assert np.max(np.abs(su_from_params(rebuilt) - su_from_params(p))) < 1e-12


def test_ordering_matters():
    rng = np.random.default_rng(9)
    p = sample(3, rng)
    assert np.max(np.abs(su_from_params(p) - su_from_params(p, "descending"))) > 1e-3
    with pytest.raises(InvalidParams):
        su_from_params(p, "sideways")


def test_recursive_embed(rng):
    p = sample(3, rng)
    low = truncate(p)
    rho_low = density_from_params(low) * (1 - p.eigenvalues[-1])
    rho = recursive_embed(rho_low, p.eigenvalues[-1], p.levels[-1].theta, p.levels[-1].z)
    assert np.max(np.abs(rho - density_from_params(p))) < 1e-14
    with pytest.raises(TraceMismatch):
        recursive_embed(np.eye(2) / 2, 0.5, 0.1, [1.0, 0.0])


def test_unphased_product_recursion(rng):
    p = sample(4, rng)
    lower = _eye(4)
    lower[:3, :3] = unphased_product(truncate(p))
    assert np.max(np.abs(unphased_product(p) - lower @ a_matrix(4, 4, p.levels[-1].theta, p.levels[-1].z))) < 1e-15


def test_validation_errors():
    with pytest.raises(InvalidParams):
        JarlskogParams(2, [0.3, 0.7], (Level(0.1, [1.0]),))
    with pytest.raises(InvalidParams):
        JarlskogParams(2, [0.7, 0.4], (Level(0.1, [1.0]),))
    with pytest.raises(InvalidParams):
        JarlskogParams(2, [0.7, 0.3], (Level(2.0, [1.0]),))
    with pytest.raises(NotUnitVector):
        JarlskogParams(2, [0.7, 0.3], (Level(0.1, [0.9]),))
    with pytest.raises(InvalidParams):
        JarlskogParams(2, [0.7, 0.3], (Level(0.1, [1.0]),), phases=[0.1, 0.2])
    with pytest.raises(IndexOutOfRange):
        a_matrix(3, 4, 0.1, [1, 0, 0])
    with pytest.raises(NotUnitVector):
        v_matrix(2, 0.1, [2.0])


def test_canonicalize():
    p = JarlskogParams(3, [0.5, 0.3, 0.2], (Level(0.0, [1j]), Level(0.4, [0.6, 0.8j])))
    c = canonicalize(p)
    assert np.array_equal(c.levels[0].z, [1.0])
    assert np.max(np.abs(density_from_params(c) - density_from_params(p))) < 1e-15


def test_sampler_deterministic_and_json():
    a, b = sample(5, 42, with_phases=True), sample(5, 42, with_phases=True)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())
    c = JarlskogParams.from_json(json.loads(json.dumps(a.to_json())))
    assert np.max(np.abs(su_from_params(c) - su_from_params(a))) == 0


def test_commutant_structure():
    cs = commutant_structure([0.5, 0.5, 0.0])
    assert cs.block_sizes == (2, 1) and cs.real_dimension == 4
    assert commutant_structure([0.25] * 4).real_dimension == 15
    assert commutant_structure([0.4, 0.3, 0.2, 0.1]).real_dimension == 3


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_sampled_density_is_state(n, seed):
    rho = density_from_params(sample(n, seed))
    assert abs(np.trace(rho) - 1) < 1e-14
    assert np.linalg.eigvalsh(rho)[0] > -1e-14
