"""Two-qubit states in the ``(1/sqrt 2) sigma_a x sigma_b`` basis and PPT tests.

Components ``0..2`` are ``sigma_i x I``, ``3..5`` are ``I x sigma_i`` and
``6 + 3i + j`` is ``sigma_i x sigma_j`` (all 0-based).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import PAULI, two_qubit_basis
from .bloch import PHYSICAL_EPS, BlochVector, from_density, is_physical, to_density
from .errors import BasisMismatch, NonPhysical, UnsupportedDims
from .linalg import eigvalsh, partial_trace, partial_transpose

PPT_EPS = 1e-9
# above the round-off of a_j near triple roots, far below any linear crossing
BOUNDARY_EPS = 1e-14
# sigma_y is the only Pauli matrix that is odd under transposition
PT_FLIP = (4, 7, 10, 13)
SEPARABLE = "separable"
ENTANGLED = "entangled"


@dataclass(frozen=True)
class TwoQubitBloch:
    components: np.ndarray

    def __post_init__(self):
        c = np.array(self.components, dtype=float)
        if c.shape != (15,):
            raise BasisMismatch(f"two-qubit Bloch vectors have 15 components, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    @classmethod
    def from_density(cls, rho) -> TwoQubitBloch:
        return cls(from_density(rho, two_qubit_basis()).components)

    def to_density(self) -> np.ndarray:
        return to_density(self.bloch_vector(), two_qubit_basis())

    def bloch_vector(self) -> BlochVector:
        return BlochVector(4, "pauli-tensor-2q", self.components)

    def local_norms(self) -> tuple[float, float]:
        """Norms of the local parts; at most ``1/sqrt 2`` for a state."""
        return float(np.linalg.norm(self.components[:3])), float(np.linalg.norm(self.components[3:6]))

    def correlations(self) -> np.ndarray:
        """3x3 block ``T[i, j]`` multiplying ``sigma_i x sigma_j``."""
        return self.components[6:].reshape(3, 3)


def reduced_states(v: TwoQubitBloch, eps: float = PHYSICAL_EPS) -> tuple[np.ndarray, np.ndarray]:
    """Single-qubit Bloch vectors ``r`` with ``rho = (I + r . sigma) / 2``.

    ``rho_A = I/2 + (1/sqrt 2) sum_i lambda_i sigma_i`` so ``r_A = sqrt 2 (lambda_1..3)``.
    """
    ok, _ = is_physical(v.to_density(), eps=eps)
    if not ok:
        raise NonPhysical("reduced states are only defined for physical two-qubit states")
    s2 = np.sqrt(2.0)
    return s2 * v.components[:3].copy(), s2 * v.components[3:6].copy()


def qubit_matrix(r) -> np.ndarray:
    """``(I + r . sigma) / 2``."""
    r = np.asarray(r, dtype=float)
    return 0.5 * (np.eye(2, dtype=complex) + sum(x * s for x, s in zip(r, PAULI)))


def partial_transpose_bloch(v: TwoQubitBloch) -> TwoQubitBloch:
    """Transpose of the second qubit as a sign flip of the ``sigma_y`` components."""
    c = v.components.copy()
    c[list(PT_FLIP)] *= -1.0
    return TwoQubitBloch(c)


SINGLET_PROJECTOR = 0.5 * np.array(
    [[0, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]], dtype=complex
)


def werner(x: float) -> np.ndarray:
    """``(1 - x)/4 I + x S``; a state exactly for ``-1/3 <= x <= 1``."""
    return (1.0 - x) / 4.0 * np.eye(4, dtype=complex) + x * SINGLET_PROJECTOR


def werner_pt(x: float) -> np.ndarray:
    """Partial transpose (second factor) of :func:`werner`."""
    return partial_transpose(werner(x), 2, 2)


def werner_bloch(x: float) -> TwoQubitBloch:
    c = np.zeros(15)
    c[[6, 10, 14]] = -x / np.sqrt(2.0)
    return TwoQubitBloch(c)


def werner_coeff_polys(x: float, transposed: bool = False) -> np.ndarray:
    """``j! a_j`` of the Werner state (or its partial transpose) as polynomials in ``x``."""
    s = -1.0 if transposed else 1.0
    return np.array([
        1.0,
        1.0,
        0.75 * (1 - x**2),
        0.375 * (1 - 3 * x**2 + s * 2 * x**3),
        3.0 / 32.0 * (1 - 6 * x**2 + s * 8 * x**3 - 3 * x**4),
    ])


def min_pt_eigenvalue(rho, dim_a: int, dim_b: int, system: str = "B") -> float:
    pt = partial_transpose(rho, dim_a, dim_b, system)
    return float(eigvalsh(0.5 * (pt + pt.conj().T))[-1])


def ppt_positive(rho, dim_a: int, dim_b: int, eps: float = PPT_EPS) -> bool:
    """Whether the partial transpose is positive; necessary for separability in any dimension."""
    return min_pt_eigenvalue(rho, dim_a, dim_b) >= -eps


def ppt_separable(rho, dim_a: int = 2, dim_b: int = 2, eps: float = PPT_EPS) -> str:
    """Separability verdict, available only where PPT is sufficient (2x2 and 2x3)."""
    if (dim_a, dim_b) not in ((2, 2), (2, 3), (3, 2)):
        raise UnsupportedDims(f"PPT decides separability only for 2x2 and 2x3, not {dim_a}x{dim_b}")
    return SEPARABLE if ppt_positive(rho, dim_a, dim_b, eps) else ENTANGLED


def bisect(pred: Callable[[float], bool], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Boundary of a predicate that differs at ``lo`` and ``hi``."""
    plo = pred(lo)
    if pred(hi) == plo:
        raise ValueError("predicate has the same value at both ends")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == plo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def werner_physical_range(eps: float = BOUNDARY_EPS, tol: float = 1e-12) -> tuple[float, float]:
    """Endpoints of the physical interval by bisection.

    The default ``eps`` sits just above round-off; the ``1e-9`` physicality
    tolerance would move the lower end outward by about ``eps / |d a_4 / dx|``.
    """
    phys = lambda x: is_physical(werner(x), eps=eps)[0]  # noqa: E731
    return bisect(phys, -1.0, 0.0, tol), bisect(phys, 0.5, 2.0, tol)


def werner_separability_threshold(eps: float = BOUNDARY_EPS, tol: float = 1e-12) -> float:
    return bisect(lambda x: ppt_separable(werner(x), eps=eps) == SEPARABLE, 0.0, 1.0, tol)


def reduce_matrix(rho, keep: str = "A") -> np.ndarray:
    return partial_trace(rho, 2, 2, keep)
