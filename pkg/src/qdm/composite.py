"""Block Jarlskog parametrization of ``n x m`` bipartite states and example families.

A state on ``C^n x C^m`` is viewed as an ``n x n`` array of ``m x m`` blocks.
Level ``j`` carries a block column ``Z_j = (Z_1j, ..., Z_{j-1,j})`` and the
generator ``X_j`` holding ``Z_j`` in block column ``j`` and ``-Z_j^*`` in block
row ``j``; ``A^j = expm(X_j)``. With ``Lambda_k = U_k^* diag(lambda segment) U_k``,

    rho = A^n* ... A^2* blockdiag(Lambda_1, ..., Lambda_n) A^2 ... A^n.

For ``n = 2`` the closed form used by :func:`two_m_density` is

    rho = B^* M B,  B = blockdiag(U, I),
    M = [[C U^* L1 U C + S L2 S,  S L2 C - C U^* L1 U S],
         [C L2 S - S U^* L1 U C,  C L2 C + S U^* L1 U S]]

with ``C = cos(Xi)`` and ``S = sin(Xi)``. It is ``(Y B)^* blockdiag(L1, L2) (Y B)``
for the unitary ``Y = blockdiag(U, I) [[C, -S], [S, C]]`` and so always a state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import PAULI
from .errors import (
    BlockShapeMismatch,
    InvalidParams,
    InvalidSimplex,
    NonPhysicalParameters,
    OutOfRange,
    TraceMismatch,
)
from .linalg import expm_skew, herm_fn, kron

UNITARY_TOL = 1e-12
PSD_TOL = 1e-10
SIGMA_X, SIGMA_Y, SIGMA_Z = PAULI
I2 = np.eye(2, dtype=complex)


def _is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= tol)


@dataclass(frozen=True, eq=False)
class BlockDiagonalSpectrum:
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(np.array(b, dtype=complex) for b in self.blocks)
        m = blocks[0].shape[0]
        for b in blocks:
            if b.shape != (m, m):
                raise BlockShapeMismatch("all blocks must be m x m")
            if np.max(np.abs(b - b.conj().T)) > PSD_TOL or np.linalg.eigvalsh(b)[0] < -PSD_TOL:
                raise InvalidParams("blocks must be positive semidefinite")
        total = sum(np.trace(b).real for b in blocks)
        if abs(total - 1.0) > 1e-12:
            raise TraceMismatch(f"block traces sum to {total:.15g}, not 1")
        object.__setattr__(self, "blocks", blocks)

    def matrix(self) -> np.ndarray:
        n, m = len(self.blocks), self.blocks[0].shape[0]
        out = np.zeros((n * m, n * m), dtype=complex)
        for k, b in enumerate(self.blocks):
            out[k * m:(k + 1) * m, k * m:(k + 1) * m] = b
        return out


@dataclass(frozen=True, eq=False)
class CompositeParams:
    """Spectrum on ``C^(nm)``, local unitaries ``U_1..U_n`` and block levels ``Z_2..Z_n``.

    ``levels[j - 2]`` has shape ``(j - 1, m, m)``.
    """

    n: int
    m: int
    eigenvalues: np.ndarray
    local_unitaries: tuple[np.ndarray, ...]
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        n, m = self.n, self.m
        lam = np.array(self.eigenvalues, dtype=float)
        if lam.shape != (n * m,):
            raise InvalidParams(f"need {n * m} eigenvalues")
        if np.any(np.diff(lam) > 1e-12) or lam[-1] < -1e-12 or abs(lam.sum() - 1.0) > 1e-12:
            raise InvalidParams("eigenvalues must be sorted descending, nonnegative and sum to 1")
        us = tuple(np.array(u, dtype=complex) for u in self.local_unitaries)
        if len(us) != n or any(u.shape != (m, m) for u in us):
            raise BlockShapeMismatch(f"need {n} local unitaries of size {m}")
        if not all(_is_unitary(u) for u in us):
            raise InvalidParams("local unitaries must be unitary")
        levels = tuple(np.array(z, dtype=complex) for z in self.levels)
        if len(levels) != n - 1:
            raise BlockShapeMismatch(f"need {n - 1} block levels")
        for j, z in zip(range(2, n + 1), levels):
            if z.shape != (j - 1, m, m):
                raise BlockShapeMismatch(f"Z_{j} must have shape {(j - 1, m, m)}, got {z.shape}")
        for arr in (lam, *us, *levels):
            arr.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "local_unitaries", us)
        object.__setattr__(self, "levels", levels)

    def spectrum_blocks(self) -> BlockDiagonalSpectrum:
        m = self.m
        return BlockDiagonalSpectrum(tuple(
            u.conj().T @ np.diag(self.eigenvalues[k * m:(k + 1) * m]).astype(complex) @ u
            for k, u in enumerate(self.local_unitaries)
        ))


def block_norm(z) -> np.ndarray:
    """``Xi = sqrt(sum_i Z_i^* Z_i)``."""
    z = np.asarray(z, dtype=complex)
    g = np.einsum("iba,ibc->ac", z.conj(), z)
    return herm_fn(0.5 * (g + g.conj().T), "sqrt")


def x_matrix(n: int, m: int, j: int, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if not 2 <= j <= n:
        raise BlockShapeMismatch(f"need 2 <= j <= n, got j = {j}")
    if z.shape != (j - 1, m, m):
        raise BlockShapeMismatch(f"Z_{j} must have shape {(j - 1, m, m)}, got {z.shape}")
    x = np.zeros((n * m, n * m), dtype=complex)
    col = slice((j - 1) * m, j * m)
    for i in range(j - 1):
        rows = slice(i * m, (i + 1) * m)
        x[rows, col] = z[i]
        x[col, rows] = -z[i].conj().T
    return x


def block_a(n: int, m: int, j: int, z) -> np.ndarray:
    """``A^j = expm(X_j)``."""
    return expm_skew(x_matrix(n, m, j, z))


def composite_density(p: CompositeParams) -> np.ndarray:
    rho = p.spectrum_blocks().matrix()
    for j, z in zip(range(2, p.n + 1), p.levels):
        a = block_a(p.n, p.m, j, z)
        rho = a.conj().T @ rho @ a
    return 0.5 * (rho + rho.conj().T)


def sample_composite(n: int, m: int, seed=None, scale: float = 1.0) -> CompositeParams:
    """Random parameters: flat Dirichlet spectrum, QR-Haar local unitaries, Gaussian blocks."""
    rng = np.random.default_rng(seed)
    lam = np.sort(rng.dirichlet(np.ones(n * m)))[::-1]
    lam = lam / lam.sum()
    us = []
    for _ in range(n):
        q, r = np.linalg.qr(rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m)))
        us.append(q * (np.diag(r) / np.abs(np.diag(r))))
    levels = tuple(
        scale * (rng.normal(size=(j - 1, m, m)) + 1j * rng.normal(size=(j - 1, m, m)))
        for j in range(2, n + 1)
    )
    return CompositeParams(n, m, lam, tuple(us), levels)


def two_m_density(u, lam1, lam2, xi) -> np.ndarray:
    """The ``2 x m`` closed form with ``C = cos(Xi)`` and ``S = sin(Xi)``."""
    u = np.asarray(u, dtype=complex)
    l1 = np.asarray(lam1, dtype=complex)
    l2 = np.asarray(lam2, dtype=complex)
    m = u.shape[0]
    if any(x.shape != (m, m) for x in (l1, l2, np.asarray(xi))):
        raise BlockShapeMismatch("U, Lambda_1, Lambda_2 and Xi must all be m x m")
    tr = np.trace(l1).real + np.trace(l2).real
    if abs(tr - 1.0) > 1e-12:
        raise TraceMismatch(f"Tr Lambda_1 + Tr Lambda_2 = {tr:.15g}, not 1")
    c = herm_fn(xi, "cos")
    s = herm_fn(xi, "sin")
    l1u = u.conj().T @ l1 @ u
    mm = np.block([
        [c @ l1u @ c + s @ l2 @ s, s @ l2 @ c - c @ l1u @ s],
        [c @ l2 @ s - s @ l1u @ c, c @ l2 @ c + s @ l1u @ s],
    ])
    b = np.eye(2 * m, dtype=complex)
    b[:m, :m] = u
    rho = b.conj().T @ mm @ b
    return 0.5 * (rho + rho.conj().T)


def _commutator_norm(a, b) -> float:
    return float(np.max(np.abs(a @ b - b @ a)))


def block_toeplitz(u, lam, xi, tol: float = 1e-10) -> np.ndarray:
    """``[[A, U^* B], [(U^* B)^*, A]]`` with ``A = C L C + S L S`` and ``B = S L C - C L S``.

    Requires ``[L, U] = 0`` and ``U^* A U = A``; built through :func:`two_m_density`.
    """
    u = np.asarray(u, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    c, s = herm_fn(xi, "cos"), herm_fn(xi, "sin")
    a = c @ lam @ c + s @ lam @ s
    if _commutator_norm(lam, u) > tol or np.max(np.abs(u.conj().T @ a @ u - a)) > tol:
        raise InvalidParams("block Toeplitz form needs [Lambda, U] = 0 and U^* A U = A")
    return two_m_density(u, lam, lam, xi)


def block_hankel(u, lam1, lam2, xi, tol: float = 1e-10) -> np.ndarray:
    """``[[U^* A_1 U, X], [X, A_2]]`` with ``X = U B'`` and ``B' = S C (L2 - U^* L1 U)``.

    Requires ``[U^* L1 U, Xi] = 0``, ``[L2, Xi] = 0``, a Hermitian ``U`` and ``U B' = B' U``.
    """
    u = np.asarray(u, dtype=complex)
    l1u = u.conj().T @ np.asarray(lam1, dtype=complex) @ u
    l2 = np.asarray(lam2, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    c, s = herm_fn(xi, "cos"), herm_fn(xi, "sin")
    bp = s @ c @ (l2 - l1u)
    if (
        _commutator_norm(l1u, xi) > tol
        or _commutator_norm(l2, xi) > tol
        or np.max(np.abs(u - u.conj().T)) > tol
        or _commutator_norm(u, bp) > tol
    ):
        raise InvalidParams("block Hankel form needs commuting Lambda/Xi, Hermitian U and U B' = B' U")
    return two_m_density(u, lam1, lam2, xi)


def blocks(rho, m: int) -> np.ndarray:
    """View a ``2m x 2m`` matrix as ``(2, 2, m, m)`` blocks."""
    rho = np.asarray(rho)
    k = rho.shape[0] // m
    return rho.reshape(k, m, k, m).transpose(0, 2, 1, 3)


def psi_alpha(alpha: float) -> np.ndarray:
    return np.array([np.sin(alpha), 0.0, 0.0, np.cos(alpha)], dtype=complex)


def family_projector(alpha: float) -> np.ndarray:
    """``|psi><psi|`` with ``psi = sin(alpha)|00> + cos(alpha)|11>``."""
    v = psi_alpha(alpha)
    return np.outer(v, v.conj())


def projector_inputs(alpha: float) -> dict:
    """Closed-form inputs that produce :func:`family_projector`. ``U`` is ``sigma_x``."""
    return {
        "u": SIGMA_X,
        "lam1": np.zeros((2, 2), dtype=complex),
        "lam2": 0.5 * (I2 - SIGMA_Z),
        "xi": alpha * I2,
    }


def werner_pt_inputs(p: float, alpha: float = np.pi / 4) -> dict:
    return {
        "u": SIGMA_X,
        "lam1": 0.25 * np.diag([1 - p, 1 - p]).astype(complex),
        "lam2": 0.25 * np.diag([1 - p, 1 + 3 * p]).astype(complex),
        "xi": alpha * I2,
    }


def family_werner_pt(p: float) -> np.ndarray:
    """``W_pt(-p)``: diagonal ``(1+p, 1-p, 1-p, 1+p)/4`` and corner entries ``p/2``."""
    if not -1.0 / 3.0 <= p <= 1.0:
        raise OutOfRange(f"p = {p} outside [-1/3, 1]")
    return 0.25 * np.array(
        [[1 + p, 0, 0, 2 * p], [0, 1 - p, 0, 0], [0, 0, 1 - p, 0], [2 * p, 0, 0, 1 + p]],
        dtype=complex,
    )


def family_two_param(p: float, alpha: float) -> np.ndarray:
    """``(1 - p)/4 I + p P(alpha)``: unit trace, Werner-like at ``alpha = pi/4``.

    A state exactly for ``-1/3 <= p <= 1``; separable iff ``p <= 1/(1 + 2 sin 2 alpha)``.
    """
    if not -1.0 / 3.0 - 1e-12 <= p <= 1.0 + 1e-12:
        raise NonPhysicalParameters(f"p = {p} gives a negative eigenvalue")
    return (1.0 - p) / 4.0 * np.eye(4, dtype=complex) + p * family_projector(alpha)


def two_param_threshold(alpha: float) -> float:
    return 1.0 / (1.0 + 2.0 * np.sin(2.0 * alpha))


def _check_simplex(ps) -> np.ndarray:
    ps = np.asarray(ps, dtype=float)
    if ps.shape != (4,) or np.any(ps < -1e-12) or abs(ps.sum() - 1.0) > 1e-12:
        raise InvalidSimplex("need p_1..p_4 >= 0 with sum 1")
    return ps


def five_param_inputs(ps, alpha: float, beta: float) -> dict:
    p1, p2, p3, p4 = _check_simplex(ps)
    return {
        "u": SIGMA_X,
        "lam1": np.diag([p2, p4]).astype(complex),
        "lam2": np.diag([p3, p1]).astype(complex),
        "xi": np.diag([alpha, beta]).astype(complex),
    }


def family_five_param(ps, alpha: float, beta: float) -> np.ndarray:
    """Closed form of :func:`two_m_density` on :func:`five_param_inputs`.

    The outer pair (levels 00 and 11) is a rotation of ``diag(p2, p1)`` by ``beta``
    and the inner pair (01, 10) a rotation of ``diag(p4, p3)`` by ``alpha``, so the
    matrix is positive for every admissible parameter.
    """
    p1, p2, p3, p4 = _check_simplex(ps)
    if not (0.0 <= alpha <= np.pi / 2 and 0.0 <= beta <= np.pi / 2):
        raise OutOfRange("alpha and beta must lie in [0, pi/2]")
    sa, ca, sb, cb = np.sin(alpha), np.cos(alpha), np.sin(beta), np.cos(beta)
    return np.array([
        [p2 * cb**2 + p1 * sb**2, 0, 0, (p1 - p2) * sb * cb],
        [0, p4 * ca**2 + p3 * sa**2, (p3 - p4) * sa * ca, 0],
        [0, (p3 - p4) * sa * ca, p4 * sa**2 + p3 * ca**2, 0],
        [(p1 - p2) * sb * cb, 0, 0, p2 * sb**2 + p1 * cb**2],
    ], dtype=complex)


def bell_diagonal(ps) -> np.ndarray:
    p1, p2, p3, p4 = _check_simplex(ps)
    return 0.5 * np.array([
        [p1 + p2, 0, 0, p1 - p2],
        [0, p3 + p4, p3 - p4, 0],
        [0, p3 - p4, p3 + p4, 0],
        [p1 - p2, 0, 0, p1 + p2],
    ], dtype=complex)


def product_state(rho_a, rho_b) -> np.ndarray:
    return kron(rho_a, rho_b)


FAMILIES = {
    "projector": (family_projector, ("alpha",)),
    "werner-pt": (family_werner_pt, ("p",)),
    "two-param": (family_two_param, ("p", "alpha")),
    "five-param": (lambda p1, p2, p3, p4, alpha, beta: family_five_param((p1, p2, p3, p4), alpha, beta),
                   ("p1", "p2", "p3", "p4", "alpha", "beta")),
    "bell-diagonal": (lambda p1, p2, p3, p4: bell_diagonal((p1, p2, p3, p4)), ("p1", "p2", "p3", "p4")),
}
