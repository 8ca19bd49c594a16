"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The Hermitian
eigensolver is a self-contained cyclic Jacobi method; it is the reference
against which the trace-invariant positivity tests are checked, so it does not
call into LAPACK.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEigenvalue,
    NoConvergence,
    NotAntiHermitian,
    NotHermitian,
)

HERMITIAN_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-14


class EigenDecomposition(NamedTuple):
    """Eigenvalues sorted descending and the matching eigenvector columns.

    ``eigenvectors @ diag(eigenvalues) @ eigenvectors.conj().T`` reproduces the
    input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues[..., None, :]) @ dagger(v)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.conj(a), -1, -2)


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - dagger(a)), initial=0.0))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_error(np.asarray(a, dtype=complex)) <= tol


def allclose(a, b, atol: float = 1e-12) -> bool:
    """Entrywise comparison with an absolute tolerance only."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


def _jacobi(h: np.ndarray, max_sweeps: int, rel_tol: float):
    """Cyclic complex Jacobi on a stack of Hermitian matrices ``(..., n, n)``.

    Each rotation acts on the whole stack at once; stack members that have
    already converged see rotations with ``c = 1, s = 0``.
    """
    a = np.array(h, dtype=complex, copy=True)
    n = a.shape[-1]
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    # work at unit max-entry so squared norms cannot overflow
    amax = np.max(np.abs(a), axis=(-2, -1), initial=0.0)
    amax = np.where(amax > 0.0, amax, 1.0)
    a /= amax[..., None, None]
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))
    threshold = rel_tol * scale
    iu = np.triu_indices(n, 1)

    def off_norm():
        return np.sqrt(2.0 * np.sum(np.abs(a[..., iu[0], iu[1]]) ** 2, axis=-1))

    for _ in range(max_sweeps):
        if np.all(off_norm() <= threshold):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[..., p, q]
                mag = np.abs(apq)
                # entries this small are far below convergence and dividing by them can overflow
                active = mag > 1e-30 * scale
                if not np.any(active):
                    continue
                safe = np.where(active, mag, 1.0)
                phase = np.where(active, apq / safe, 1.0)
                app = a[..., p, p].real
                aqq = a[..., q, q].real
                tau = (aqq - app) / (2.0 * safe)
                t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                jpp = c
                jpq = s
                jqp = -s * np.conj(phase)
                jqq = c * np.conj(phase)
                jpp, jpq, jqp, jqq = (x[..., None] for x in (jpp, jpq, jqp, jqq))

                colp = a[..., :, p].copy()
                colq = a[..., :, q].copy()
                a[..., :, p] = colp * jpp + colq * jqp
                a[..., :, q] = colp * jpq + colq * jqq
                rowp = a[..., p, :].copy()
                rowq = a[..., q, :].copy()
                a[..., p, :] = np.conj(jpp) * rowp + np.conj(jqp) * rowq
                a[..., q, :] = np.conj(jpq) * rowp + np.conj(jqq) * rowq
                a[..., p, q] = 0.0
                a[..., q, p] = 0.0
                a[..., p, p] = a[..., p, p].real
                a[..., q, q] = a[..., q, q].real

                vp = v[..., :, p].copy()
                vq = v[..., :, q].copy()
                v[..., :, p] = vp * jpp + vq * jqp
                v[..., :, q] = vp * jpq + vq * jqq
    else:
        if not np.all(off_norm() <= threshold):
            raise NoConvergence(f"Jacobi sweep cap {max_sweeps} reached")

    w = np.real(np.diagonal(a, axis1=-2, axis2=-1)) * amax[..., None]
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :].repeat(n, axis=-2), axis=-1)
    return w, v


def hermitian_eigen(
    h,
    tol: float = HERMITIAN_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    rel_tol: float = JACOBI_REL_TOL,
) -> EigenDecomposition:
    """Eigen-decompose a Hermitian matrix, or a stack of them.

    Parameters
    ----------
    h : array_like, shape (..., n, n)
        Hermitian input; checked to ``tol`` in the max-norm.
    max_sweeps : int
        Sweep cap, :class:`NoConvergence` is raised beyond it.
    rel_tol : float
        Convergence once the off-diagonal Frobenius norm drops below
        ``rel_tol * ||h||_F``.

    Returns
    -------
    EigenDecomposition
        Eigenvalues in descending order, eigenvectors as columns.
    """
    a = np.asarray(h, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {a.shape}")
    err = hermiticity_error(a)
    if err > tol:
        raise NotHermitian(f"||H - H*||_max = {err:.3g} exceeds {tol:g}")
    a = 0.5 * (a + dagger(a))
    w, v = _jacobi(a, max_sweeps, rel_tol)
    return EigenDecomposition(w, v)


def eigvalsh(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    return hermitian_eigen(h, tol=tol).eigenvalues


def kron(a, b) -> np.ndarray:
    """Tensor product, ``out[i*db + k, j*db + l] = a[i, j] * b[k, l]``."""
    a = as_matrix(a)
    b = as_matrix(b)
    da, db = a.shape[0], b.shape[0]
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(da * db, da * db)


def partial_trace(rho, dim_a: int, dim_b: int, keep: str = "A") -> np.ndarray:
    """Trace out one factor of a ``dim_a * dim_b`` bipartite operator.

    ``keep="A"`` returns the ``dim_a x dim_a`` reduced operator, ``keep="B"``
    the ``dim_b x dim_b`` one.
    """
    rho = as_matrix(rho)
    if rho.shape[0] != dim_a * dim_b:
        raise DimensionMismatch(f"matrix of dim {rho.shape[0]} is not {dim_a}x{dim_b}")
    t = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    keep = keep.upper()
    if keep == "A":
        return np.einsum("ikjk->ij", t)
    if keep == "B":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def partial_transpose(rho, dim_a: int, dim_b: int, system: str = "B") -> np.ndarray:
    """Transpose one tensor factor. The default transposes the second factor."""
    rho = as_matrix(rho)
    if rho.shape[0] != dim_a * dim_b:
        raise DimensionMismatch(f"matrix of dim {rho.shape[0]} is not {dim_a}x{dim_b}")
    t = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    system = system.upper()
    if system == "B":
        t = t.transpose(0, 3, 2, 1)
    elif system == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"system must be 'A' or 'B', not {system!r}")
    return t.reshape(dim_a * dim_b, dim_a * dim_b)


_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sqrt": np.sqrt,
    "cos": np.cos,
    "sin": np.sin,
    "exp": np.exp,
}


def herm_fn(h, f: str, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Apply ``f`` in {sqrt, cos, sin, exp} to a Hermitian matrix spectrally."""
    try:
        fn = _FUNCTIONS[f]
    except KeyError:
        raise ValueError(f"unknown matrix function {f!r}") from None
    h = as_matrix(h)
    w, v = hermitian_eigen(h, tol=tol)
    if f == "sqrt":
        if w.size and w[-1] < -tol:
            raise NegativeEigenvalue(f"smallest eigenvalue {w[-1]:.3g} < 0")
        w = np.clip(w, 0.0, None)
    out = (v * fn(w)) @ dagger(v)
    return 0.5 * (out + dagger(out))


def expm_skew(x, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Exponential of an anti-Hermitian matrix, computed from the spectrum of ``iX``."""
    x = as_matrix(x)
    err = float(np.max(np.abs(x + dagger(x)), initial=0.0))
    if err > tol:
        raise NotAntiHermitian(f"||X + X*||_max = {err:.3g} exceeds {tol:g}")
    w, v = hermitian_eigen(1j * x, tol=tol)
    # X = -i (iX)
    return (v * np.exp(-1j * w)) @ dagger(v)
