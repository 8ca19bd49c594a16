from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdm.bloch import char_coeffs_newton
from qdm.errors import BasisMismatch, NonPhysical, UnsupportedDims
from qdm.linalg import partial_transpose
from qdm.twoqubit import (
    ENTANGLED,
    SEPARABLE,
    TwoQubitBloch,
    bisect,
    min_pt_eigenvalue,
    partial_transpose_bloch,
    ppt_separable,
    qubit_matrix,
    reduce_matrix,
    reduced_states,
    werner,
    werner_bloch,
    werner_coeff_polys,
    werner_physical_range,
    werner_pt,
    werner_separability_threshold,
)

from conftest import random_density


def test_werner_spectrum():
    for x in np.linspace(-1, 1, 9):
        w = np.linalg.eigvalsh(werner(x))
        assert np.allclose(sorted(w), sorted([(1 - x) / 4] * 3 + [(1 + 3 * x) / 4]), atol=1e-15)
        wpt = np.linalg.eigvalsh(werner_pt(x))
        assert np.allclose(sorted(wpt), sorted([(1 + x) / 4] * 3 + [(1 - 3 * x) / 4]), atol=1e-15)


def test_werner_bloch_vector():
    for x in (-0.2, 0.5, 1.0):
        assert np.max(np.abs(werner_bloch(x).to_density() - werner(x))) < 1e-15
        assert np.max(np.abs(TwoQubitBloch.from_density(werner(x)).components - werner_bloch(x).components)) < 1e-15


def test_coefficient_polynomials_match_newton():
    for x in np.linspace(-1, 1, 21):
        for transposed, rho in ((False, werner(x)), (True, werner_pt(x))):
            a = char_coeffs_newton(rho).a
            scaled = np.array([factorial(j) * a[j] for j in range(5)])
            assert np.max(np.abs(werner_coeff_polys(x, transposed) - scaled)) < 1e-14


def test_bisection_endpoints():
    lo, hi = werner_physical_range()
    assert abs(lo + 1 / 3) < 1e-9 and abs(hi - 1) < 1e-9
    assert abs(werner_separability_threshold() - 1 / 3) < 1e-9


def test_bisect_helper():
    assert bisect(lambda x: x < 0.25, 0.0, 1.0) == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(ValueError):
        bisect(lambda x: True, 0.0, 1.0)


def test_bloch_partial_transpose_matches_matrix(rng):
    for _ in range(20):
        rho = random_density(rng, 4)
        v = TwoQubitBloch.from_density(rho)
        pt = partial_transpose_bloch(v).to_density()
        assert np.max(np.abs(pt - partial_transpose(rho, 2, 2))) < 1e-15


def test_reduced_states(rng):
    a, b = random_density(rng, 2), random_density(rng, 2)
    v = TwoQubitBloch.from_density(np.kron(a, b))
    ra, rb = reduced_states(v)
    assert np.max(np.abs(qubit_matrix(ra) - a)) < 1e-15
    assert np.max(np.abs(qubit_matrix(rb) - b)) < 1e-15
    assert np.max(np.abs(reduce_matrix(np.kron(a, b), "B") - b)) < 1e-15
    assert max(v.local_norms()) <= 1 / np.sqrt(2) + 1e-15
    bad = TwoQubitBloch(np.full(15, 0.5))
    with pytest.raises(NonPhysical):
        reduced_states(bad)
    with pytest.raises(BasisMismatch):
        TwoQubitBloch(np.zeros(8))


def test_correlation_block_of_singlet():
    t = werner_bloch(1.0).correlations()
    assert np.allclose(t, -np.eye(3) / np.sqrt(2), atol=1e-15)


def test_ppt_verdicts_2x2_and_2x3(rng):
    assert ppt_separable(np.kron(random_density(rng, 2), random_density(rng, 2))) == SEPARABLE
    assert ppt_separable(werner(0.9)) == ENTANGLED
    psi = np.zeros(6)
    psi[0] = psi[4] = 1 / np.sqrt(2)  # |0,0> + |1,1> in C^2 x C^3
    bell23 = np.outer(psi, psi)
    assert ppt_separable(bell23, 2, 3) == ENTANGLED
    assert min_pt_eigenvalue(bell23, 2, 3) == pytest.approx(-0.5, abs=1e-14)
    assert ppt_separable(np.kron(random_density(rng, 3), random_density(rng, 2)), 3, 2) == SEPARABLE
    with pytest.raises(UnsupportedDims):
        ppt_separable(np.eye(9) / 9, 3, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_product_states_always_ppt(seed):
    r = np.random.default_rng(seed)
    rho = np.kron(random_density(r, 2), random_density(r, 2))
    assert min_pt_eigenvalue(rho, 2, 2) >= -1e-14
