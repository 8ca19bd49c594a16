import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdm.basis import ggm_basis, paper_gellmann3, standard_gellmann3
from qdm.bloch import (
    BlochVector,
    CharCoeffs,
    char_coeffs_batch,
    char_coeffs_closed,
    char_coeffs_newton,
    cubic_coeff_gellmann3,
    from_density,
    is_physical,
    newton_coeffs,
    power_traces,
    pure_qubit,
    trace_invariant,
    trace_invariant_bloch,
    to_density,
)
from qdm.errors import BasisMismatch, NotDensityShape, NotHermitian

from conftest import random_density, random_hermitian


def _unit_trace_hermitian(rng, n):
    h = random_hermitian(rng, n, scale=0.3)
    return h - (np.trace(h).real - 1.0) / n * np.eye(n)


def _poly_oracle(rho):
    # det(xI - rho) = sum_j (-1)^j a_j x^(n-j); np.poly works from the LAPACK spectrum
    c = np.poly(np.linalg.eigvalsh(rho))
    return np.array([(-1) ** j * c[j] for j in range(len(c))])


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_roundtrip(rng, n):
    b = ggm_basis(n)
    for _ in range(20):
        rho = random_density(rng, n)
        v = from_density(rho, b)
        assert np.max(np.abs(to_density(v) - rho)) < 1e-12
        assert np.max(np.abs(from_density(to_density(v), b).components - v.components)) < 1e-12


def test_qubit_bloch_sphere():
    b = ggm_basis(2)
    for theta, phi in [(0.0, 0.0), (0.3, 1.1), (np.pi / 4, -2.0), (np.pi / 2, 0.5)]:
        v = from_density(pure_qubit(theta, phi), b)
        expected = [np.sin(2 * theta) * np.cos(phi), np.sin(2 * theta) * np.sin(phi), np.cos(2 * theta)]
        assert np.max(np.abs(v.components - expected)) < 1e-15
        assert v.norm == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_newton_matches_poly_oracle(rng, n):
    for _ in range(30):
        rho = _unit_trace_hermitian(rng, n)
        assert np.max(np.abs(char_coeffs_newton(rho).a - _poly_oracle(rho))) < 1e-12


def test_batch_matches_single(rng):
    rhos = np.stack([_unit_trace_hermitian(rng, 4) for _ in range(25)])
    batch = char_coeffs_batch(rhos)
    for r, row in zip(rhos, batch):
        assert np.max(np.abs(char_coeffs_newton(r).a - row)) < 1e-15


def test_newton_coeffs_known_values():
    # eigenvalues 1/2, 1/3, 1/6
    ev = np.array([1 / 2, 1 / 3, 1 / 6])
    p = [np.sum(ev**k) for k in (1, 2, 3)]
    a = newton_coeffs(np.array(p))
    assert np.allclose(a, [1, 1, 1 / 6 + 1 / 12 + 1 / 18, 1 / 36], atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_closed_coeffs_match_newton(rng, n):
    b = ggm_basis(n)
    for _ in range(30):
        v = from_density(_unit_trace_hermitian(rng, n), b)
        closed = char_coeffs_closed(v, b)
        newton = char_coeffs_newton(to_density(v))
        k = len(closed)
        assert np.max(np.abs(closed.a - newton.a[:k])) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_trace_invariants_closed_form(rng, n):
    b = ggm_basis(n)
    v = from_density(random_density(rng, n), b)
    rho = to_density(v)
    direct = power_traces(rho, 4)
    for k in range(1, 5):
        assert trace_invariant_bloch(v, b, k) == pytest.approx(direct[k - 1], abs=1e-13)
        assert trace_invariant(v, k) == pytest.approx(direct[k - 1], abs=1e-13)
    assert trace_invariant(rho, 6) == pytest.approx(np.trace(np.linalg.matrix_power(rho, 6)).real, abs=1e-15)


def test_cubic_explicit_vs_newton(rng):
    std = standard_gellmann3()
    for _ in range(100):
        lam = std.expand(_unit_trace_hermitian(rng, 3))
        v = BlochVector(3, std.ordering, lam)
        assert cubic_coeff_gellmann3(lam) == pytest.approx(char_coeffs_newton(to_density(v)).a[3], abs=1e-13)


def test_cubic_checked_in_other_ordering(rng):
    b = paper_gellmann3()
    v = from_density(random_density(rng, 3), b)
    assert len(char_coeffs_closed(v, b)) == 4


@pytest.mark.parametrize("n", [2, 3, 4])
def test_physicality_agrees_with_spectrum(rng, n):
    for _ in range(200):
        rho = _unit_trace_hermitian(rng, n)
        ok, coeffs = is_physical(rho)
        assert ok == bool(np.linalg.eigvalsh(rho)[0] >= -1e-9)
        assert coeffs.a[0] == 1.0


def test_boundary_states_are_physical():
    assert is_physical(pure_qubit(0.2, 0.4))[0]
    assert is_physical(np.diag([0.5, 0.5, 0.0]))[0]
    assert not is_physical(np.diag([0.6, 0.5, -0.1]))[0]


def test_purity_bound():
    b = ggm_basis(3)
    v = from_density(np.diag([1.0, 0.0, 0.0]), b)
    assert v.norm == pytest.approx(np.sqrt(4 / 3), abs=1e-15)
    assert v.within_purity_bound()
    too_long = BlochVector(3, b.ordering, 1.01 * v.components)
    assert not too_long.within_purity_bound()
    assert not is_physical(too_long)[0]


def test_bloch_json_roundtrip(rng):
    v = from_density(random_density(rng, 3), ggm_basis(3))
    w = BlochVector.from_json(v.to_json())
    assert np.array_equal(v.components, w.components) and w.basis == "ggm"


def test_errors():
    b = ggm_basis(2)
    with pytest.raises(BasisMismatch):
        BlochVector(2, "ggm", np.zeros(4))
    with pytest.raises(NotDensityShape):
        from_density(np.eye(2), b)
    with pytest.raises(NotDensityShape):
        from_density(np.eye(3) / 3, b)
    with pytest.raises(NotHermitian):
        char_coeffs_newton(np.array([[1, 1], [0, 0]], dtype=complex))
    with pytest.raises(BasisMismatch):
        to_density(BlochVector(3, "ggm", np.zeros(8)), b)


def test_char_coeffs_helpers():
    c = CharCoeffs([1.0, 1.0, 0.25, -1e-12])
    assert c.nonnegative() and not c.nonnegative(eps=0.0)
    assert np.allclose(c.factorial_scaled(), [1.0, 1.0, 0.5, -6e-12])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_sampled_states_are_physical(n, seed, rank):
    rho = random_density(np.random.default_rng(seed), n, rank=min(rank, n))
    ok, coeffs = is_physical(rho)
    assert ok
    assert np.all(coeffs.a >= -1e-12)
