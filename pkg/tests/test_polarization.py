import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdm.errors import HermiticityViolation, InvalidAngularMomenta, NotDensityShape
from qdm.polarization import (
    PolarizationBloch,
    clebsch_gordan,
    po_from_density,
    po_physicality,
    po_to_density,
    polarization_ops,
    qubit_abg,
    qubit_from_abg,
    radius_bound,
)

from conftest import random_density


def _spin_ops(n):
    s = (n - 1) / 2
    m = s - np.arange(n)
    sz = np.diag(m).astype(complex)
    sp = np.zeros((n, n), dtype=complex)
    for k in range(1, n):
        sp[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    return sz, sp


def test_cg_table_values():
    assert clebsch_gordan(0.5, 0.5, 0.5, -0.5, 1, 0) == pytest.approx(1 / np.sqrt(2), abs=1e-15)
    assert clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0, 0) == pytest.approx(-1 / np.sqrt(2), abs=1e-15)
    assert clebsch_gordan(1, 1, 1, -1, 2, 0) == pytest.approx(1 / np.sqrt(6), abs=1e-15)
    assert clebsch_gordan(1, 0, 1, 0, 1, 0) == 0.0
    assert clebsch_gordan(1, 1, 0.5, -0.5, 1.5, 0.5) == pytest.approx(np.sqrt(1 / 3), abs=1e-15)
    assert clebsch_gordan(Fraction(3, 2), Fraction(3, 2), 1, 0, Fraction(3, 2), Fraction(3, 2)) == pytest.approx(
        np.sqrt(3 / 5), abs=1e-15
    )
    # m1 + m2 != m gives zero
    assert clebsch_gordan(1, 1, 1, 1, 2, 0) == 0.0


@pytest.mark.parametrize("j1,j2", [(0.5, 0.5), (1, 0.5), (1, 1), (1.5, 2)])
def test_cg_orthogonality(j1, j2):
    # sum_{m1 m2} <j1 m1 j2 m2|J M><j1 m1 j2 m2|J' M'> = delta
    js = np.arange(abs(j1 - j2), j1 + j2 + 1)
    states = [(J, M) for J in js for M in np.arange(-J, J + 1)]
    m1s, m2s = np.arange(-j1, j1 + 1), np.arange(-j2, j2 + 1)
    mat = np.array([[clebsch_gordan(j1, a, j2, b, J, M) for a, b in itertools.product(m1s, m2s)] for J, M in states])
    assert np.max(np.abs(mat @ mat.T - np.eye(len(states)))) < 1e-14


def test_cg_trivial_and_invalid():
    assert clebsch_gordan(1.5, 0.5, 0, 0, 1.5, 0.5) == 1.0
    assert clebsch_gordan(0.5, 0.5, 0.5, 0.5, 1, 1) == 1.0
    # triangle violation is a zero coefficient, not an error
    assert clebsch_gordan(0.5, 0.5, 0.5, 0.5, 2, 1) == 0.0
    with pytest.raises(InvalidAngularMomenta):
        clebsch_gordan(0.3, 0.3, 0.5, 0.5, 1, 1)
    with pytest.raises(InvalidAngularMomenta):
        clebsch_gordan(1, 2, 1, 0, 1, 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_rank_one_operators_are_spin_components(n):
    ops = polarization_ops(n)
    sz, sp = _spin_ops(n)
    t10, t11 = ops[(1, 0)], ops[(1, 1)]
    c = t10[0, 0] / sz[0, 0]
    assert np.max(np.abs(t10 - c * sz)) < 1e-14
    # T_11 = -c S_+ / sqrt 2 in the Condon-Shortley convention
    assert np.max(np.abs(t11 + c * sp / np.sqrt(2))) < 1e-14


@pytest.mark.parametrize("n", [2, 3, 4])
def test_roundtrip_and_hermiticity(rng, n):
    for _ in range(10):
        rho = random_density(rng, n)
        v = po_from_density(rho)
        assert v.hermiticity_defect() < 1e-14
        assert np.max(np.abs(po_to_density(v) - rho)) < 1e-13
        assert v.norm**2 == pytest.approx(np.trace(rho @ rho).real - 1 / n, abs=1e-13)


def test_qubit_parametrization_and_bound(rng):
    for theta in np.linspace(0, np.pi, 7):
        for phi in (0.0, 1.0, -2.5):
            psi = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
            v = po_from_density(np.outer(psi, psi.conj()))
            a, b, g = qubit_abg(v)
            assert 2 * (a * a + b * b) + g * g == pytest.approx(0.5, abs=1e-14)
            w = qubit_from_abg(a, b, g)
            assert np.max(np.abs(po_to_density(w) - np.outer(psi, psi.conj()))) < 1e-14


def test_radius_bound_is_necessary(rng):
    for n in (2, 3, 4):
        for _ in range(20):
            assert po_from_density(random_density(rng, n)).norm <= radius_bound(n) + 1e-12
        pure = np.zeros((n, n)); pure[0, 0] = 1
        v = po_from_density(pure)
        assert v.norm == pytest.approx(radius_bound(n), abs=1e-14)
        longer = PolarizationBloch(n, {k: 1.05 * z for k, z in v.components.items()})
        assert not po_physicality(longer)[0]


def test_errors():
    with pytest.raises(NotDensityShape):
        po_from_density(np.eye(2))
    with pytest.raises(HermiticityViolation):
        po_from_density(np.array([[0.5, 0.3], [0.0, 0.5]]))
    with pytest.raises(NotDensityShape):
        PolarizationBloch(2, {(2, 0): 1.0})
    with pytest.raises(HermiticityViolation):
        po_to_density(PolarizationBloch(2, {(1, 1): 0.1}))


def test_json_roundtrip(rng):
    v = po_from_density(random_density(rng, 3))
    w = PolarizationBloch.from_json(v.to_json())
    assert np.max(np.abs(v.vector() - w.vector())) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_physicality_matches_spectrum(n, seed):
    r = np.random.default_rng(seed)
    rho = random_density(r, n)
    shift = r.uniform(-0.5, 0.5)
    rho = (1 - shift) * rho + shift * np.diag(np.eye(n)[0])
    v = po_from_density(rho)
    assert po_physicality(v)[0] == bool(np.linalg.eigvalsh(rho)[0] >= -1e-9)
