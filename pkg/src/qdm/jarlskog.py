"""Recursive Jarlskog factorization of SU(n) and the density matrices built on it.

Level ``j`` (``2 <= j <= n``) carries an angle ``theta_j`` in ``[0, pi/2]`` and a
unit vector ``z_j`` in ``C^(j-1)``; it defines

    V_j = [[I - (1 - c)|z><z|,  s|z>],
           [-s<z|,              c   ]],     c = cos(theta_j), s = sin(theta_j),

embedded top-left in ``A_{n,j} = blockdiag(V_j, I)``. A generic special unitary
is ``U = A_{n,1} A_{n,2} ... A_{n,n}`` with ``A_{n,1}`` a diagonal phase matrix,
and ``W_n = A_{n,2} ... A_{n,n}`` obeys ``W_n = blockdiag(W_{n-1}, 1) A_{n,n}``.
A density matrix with spectrum ``lambda`` is ``W^* diag(lambda) W``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import IndexOutOfRange, InvalidParams, NotUnitVector, TraceMismatch
from .serialize import FormatError, complex_from_json, complex_to_json

UNIT_TOL = 1e-12
SIMPLEX_TOL = 1e-12
CANON_TOL = 1e-6
HALF_PI = 0.5 * np.pi


@dataclass(frozen=True, eq=False)
class Level:
    theta: float
    z: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=complex).reshape(-1)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "theta", float(self.theta))


@dataclass(frozen=True, eq=False)
class JarlskogParams:
    """Eigenvalues in the ordered simplex, one :class:`Level` per ``j = 2..n`` and optional phases."""

    n: int
    eigenvalues: np.ndarray
    levels: tuple[Level, ...]
    phases: np.ndarray | None = None

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float)
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        levels = tuple(lv if isinstance(lv, Level) else Level(*lv) for lv in self.levels)
        object.__setattr__(self, "levels", levels)
        if self.phases is not None:
            ph = np.array(self.phases, dtype=float)
            ph.setflags(write=False)
            object.__setattr__(self, "phases", ph)
        self.validate()

    def validate(self) -> None:
        n = self.n
        lam = self.eigenvalues
        if n < 1 or lam.shape != (n,):
            raise InvalidParams(f"need {n} eigenvalues, got {lam.shape}")
        if np.any(np.diff(lam) > SIMPLEX_TOL) or lam[-1] < -SIMPLEX_TOL or lam[0] <= 0:
            raise InvalidParams("eigenvalues must be sorted descending, nonnegative, with a positive largest value")
        if abs(lam.sum() - 1.0) > SIMPLEX_TOL:
            raise InvalidParams(f"eigenvalues sum to {lam.sum():.15g}, not 1")
        if len(self.levels) != n - 1:
            raise InvalidParams(f"need {n - 1} levels, got {len(self.levels)}")
        for j, lv in zip(range(2, n + 1), self.levels):
            if lv.z.shape != (j - 1,):
                raise InvalidParams(f"z_{j} must have {j - 1} entries")
            if not -UNIT_TOL <= lv.theta <= HALF_PI + UNIT_TOL:
                raise InvalidParams(f"theta_{j} = {lv.theta} outside [0, pi/2]")
            if abs(np.linalg.norm(lv.z) - 1.0) > UNIT_TOL:
                raise NotUnitVector(f"|z_{j}| = {np.linalg.norm(lv.z):.15g}")
        if self.phases is not None:
            if self.phases.shape != (n,):
                raise InvalidParams(f"need {n} phases")
            if abs(self.phases.sum()) > 1e-12:
                raise InvalidParams("phases must sum to 0")

    def with_phases(self, phases) -> JarlskogParams:
        return JarlskogParams(self.n, self.eigenvalues, self.levels, phases)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "levels": [{"theta": lv.theta, "z": [complex_to_json(x) for x in lv.z]} for lv in self.levels],
            "phases": None if self.phases is None else [float(x) for x in self.phases],
        }

    @classmethod
    def from_json(cls, doc) -> JarlskogParams:
        try:
            levels = tuple(
                Level(float(lv["theta"]), [complex_from_json(x) for x in lv["z"]]) for lv in doc["levels"]
            )
            phases = doc.get("phases")
            return cls(int(doc["n"]), doc["eigenvalues"], levels, phases)
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad Jarlskog parameter document: {exc}") from exc


def _unit(z, tol: float = UNIT_TOL) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(z) - 1.0) > tol:
        raise NotUnitVector(f"|z| = {np.linalg.norm(z):.15g} is not 1")
    return z


def v_matrix(j: int, theta: float, z) -> np.ndarray:
    """The ``j x j`` unitary ``V_j(theta, z)``."""
    z = _unit(z)
    if z.shape != (j - 1,):
        raise IndexOutOfRange(f"z must have {j - 1} entries for j = {j}")
    c, s = np.cos(theta), np.sin(theta)
    v = np.empty((j, j), dtype=complex)
    v[:-1, :-1] = np.eye(j - 1) - (1.0 - c) * np.outer(z, z.conj())
    v[:-1, -1] = s * z
    v[-1, :-1] = -s * z.conj()
    v[-1, -1] = c
    return v


def k_matrix(j: int, theta: float, z) -> np.ndarray:
    """Anti-Hermitian ``K_j`` with ``expm(K_j) = V_j``: column ``theta z``, row ``-theta z^*``."""
    z = _unit(z)
    k = np.zeros((j, j), dtype=complex)
    k[:-1, -1] = theta * z
    k[-1, :-1] = -theta * z.conj()
    return k


def a_matrix(n: int, j: int, theta: float, z) -> np.ndarray:
    if not 2 <= j <= n:
        raise IndexOutOfRange(f"need 2 <= j <= n, got j = {j}, n = {n}")
    a = np.eye(n, dtype=complex)
    a[:j, :j] = v_matrix(j, theta, z)
    return a


def phase_matrix(alpha) -> np.ndarray:
    return np.diag(np.exp(1j * np.asarray(alpha, dtype=float)))


def unphased_product(p: JarlskogParams) -> np.ndarray:
    """``W_n = A_{n,2} ... A_{n,n}``."""
    w = np.eye(p.n, dtype=complex)
    for j, lv in zip(range(2, p.n + 1), p.levels):
        w = w @ a_matrix(p.n, j, lv.theta, lv.z)
    return w


def su_from_params(p: JarlskogParams, order: str = "ascending") -> np.ndarray:
    """Special unitary from the parameters.

    ``order="ascending"`` gives ``A_{n,1} A_{n,2} ... A_{n,n}``, the product that
    satisfies the dimension recursion. ``"descending"`` gives the reversed
    product ``A_{n,n} ... A_{n,1}``, another generic factorization.
    """
    phases = np.zeros(p.n) if p.phases is None else p.phases
    factors = [phase_matrix(phases)] + [a_matrix(p.n, j, lv.theta, lv.z) for j, lv in zip(range(2, p.n + 1), p.levels)]
    if order == "descending":
        factors = factors[::-1]
    elif order != "ascending":
        raise InvalidParams(f"unknown order {order!r}")
    u = np.eye(p.n, dtype=complex)
    for f in factors:
        u = u @ f
    return u


def truncate(p: JarlskogParams) -> JarlskogParams:
    """Parameters of ``W_{n-1}``: drop the last level. The spectrum is renormalized to stay valid."""
    if p.n < 2:
        raise InvalidParams("cannot truncate n = 1")
    lam = p.eigenvalues[:-1]
    return JarlskogParams(p.n - 1, lam / lam.sum(), p.levels[:-1])


def recursion_residual(p: JarlskogParams) -> float:
    """``max |W_n - blockdiag(W_{n-1}, 1) A_{n,n}|`` with both sides built independently."""
    if p.n < 2:
        return 0.0
    lower = np.eye(p.n, dtype=complex)
    lower[:-1, :-1] = unphased_product(truncate(p))
    last = p.levels[-1]
    rhs = lower @ a_matrix(p.n, p.n, last.theta, last.z)
    return float(np.max(np.abs(unphased_product(p) - rhs)))


def density_from_params(p: JarlskogParams) -> np.ndarray:
    """``W^* diag(lambda) W``; the phase factor commutes with the diagonal and drops out."""
    w = su_from_params(p)
    rho = w.conj().T @ (p.eigenvalues[:, None] * w)
    return 0.5 * (rho + rho.conj().T)


def recursive_embed(rho_low, lam_new: float, theta: float, z, tol: float = 1e-12) -> np.ndarray:
    """``A^* blockdiag(rho_low, lam_new) A`` with ``A = V_n(theta, z)``."""
    rho_low = np.asarray(rho_low, dtype=complex)
    m = rho_low.shape[0]
    if abs(np.trace(rho_low).real - (1.0 - lam_new)) > tol:
        raise TraceMismatch(f"Tr rho_low = {np.trace(rho_low).real:.15g} but 1 - lambda_new = {1.0 - lam_new:.15g}")
    block = np.zeros((m + 1, m + 1), dtype=complex)
    block[:m, :m] = rho_low
    block[m, m] = lam_new
    a = v_matrix(m + 1, theta, z)
    rho = a.conj().T @ block @ a
    return 0.5 * (rho + rho.conj().T)


def density_by_recursion(p: JarlskogParams) -> np.ndarray:
    """Same state as :func:`density_from_params`, assembled one dimension at a time."""
    rho = np.array([[p.eigenvalues[0]]], dtype=complex)
    for j, lv in zip(range(2, p.n + 1), p.levels):
        lam = p.eigenvalues[j - 1]
        # rho currently has trace lambda_1 + ... + lambda_{j-1}; rescale so the step sees a unit total
        total = p.eigenvalues[:j].sum()
        rho = total * recursive_embed(rho / total, lam / total, lv.theta, lv.z)
    return rho


class Extraction(NamedTuple):
    levels: tuple[Level, ...]
    phases: np.ndarray
    canonical: bool


def extract_params(u, tol: float = 1e-12) -> Extraction:
    """Invert the ascending factorization of a special unitary.

    The last row of ``U`` is ``e^{i alpha_n} (-s <z_n|, c_n)``: ``c_n`` and the phase come
    from the ``(n, n)`` entry, ``z_n`` from the rest of the row; multiplying by
    ``V_n^{-1}`` exposes ``blockdiag(U_{n-1}, e^{i alpha_n})`` and the procedure repeats.
    ``canonical`` is False when some ``c_j`` or ``s_j`` vanishes, where the phase or
    ``z_j`` is not determined (``z_j = e_1`` and a zero phase are then reported).
    """
    u = np.array(u, dtype=complex)
    n = u.shape[0]
    levels: list[Level] = []
    phases = np.zeros(n)
    canonical = True
    for j in range(n, 1, -1):
        row = u[j - 1, :j]
        c = abs(row[-1])
        if c > tol:
            phase = row[-1] / c
        else:
            # c = 0: take the phase from the first nonzero entry of the row instead
            k = int(np.argmax(np.abs(row[:-1])))
            phase = -row[k] / abs(row[k])
            canonical = False
        row = row / phase
        c = float(np.clip(row[-1].real, -1.0, 1.0))
        theta = float(np.arccos(c))
        s = np.sin(theta)
        if s > tol:
            z = -np.conj(row[:-1]) / s
            z = z / np.linalg.norm(z)
        else:
            z = np.zeros(j - 1, dtype=complex)
            z[0] = 1.0
            theta = 0.0
            canonical = False
        levels.append(Level(theta, z))
        phases[j - 1] = float(np.angle(phase))
        inv = np.eye(n, dtype=complex)
        inv[:j, :j] = v_matrix(j, theta, z).conj().T
        u = u @ inv
    phases[0] = float(np.angle(u[0, 0]))
    return Extraction(tuple(reversed(levels)), phases, canonical)


def canonicalize(p: JarlskogParams, tol: float = CANON_TOL) -> JarlskogParams:
    """Clamp ``theta`` into ``[0, pi/2]``, renormalize ``z`` and set ``z = e_1`` where ``theta = 0``.

    Deviations larger than ``tol`` are errors rather than rounding.
    """
    levels = []
    for lv in p.levels:
        if lv.theta < -tol or lv.theta > HALF_PI + tol:
            raise InvalidParams(f"theta = {lv.theta} is outside [0, pi/2]")
        norm = np.linalg.norm(lv.z)
        if abs(norm - 1.0) > tol:
            raise NotUnitVector(f"|z| = {norm} deviates from 1 by more than {tol:g}")
        theta = min(max(lv.theta, 0.0), HALF_PI)
        z = lv.z / norm
        if theta == 0.0:
            z = np.zeros_like(z)
            z[0] = 1.0
        levels.append(Level(theta, z))
    return JarlskogParams(p.n, p.eigenvalues, tuple(levels), p.phases)


def sample(n: int, seed: int | np.random.Generator | None = None, with_phases: bool = False) -> JarlskogParams:
    """Random parameters under a product measure.

    Eigenvalues are uniform on the simplex (flat Dirichlet) and then sorted,
    each ``theta_j`` is uniform on ``[0, pi/2]`` and each ``z_j`` is a normalized
    complex Gaussian. This is not the Haar or Hilbert-Schmidt measure.
    """
    rng = np.random.default_rng(seed)
    lam = np.sort(rng.dirichlet(np.ones(n)))[::-1]
    lam = lam / lam.sum()
    levels = []
    for j in range(2, n + 1):
        theta = rng.uniform(0.0, HALF_PI)
        z = rng.normal(size=j - 1) + 1j * rng.normal(size=j - 1)
        levels.append(Level(theta, z / np.linalg.norm(z)))
    phases = None
    if with_phases:
        phases = rng.uniform(-np.pi, np.pi, size=n)
        phases = phases - phases.mean()
    return JarlskogParams(n, lam, tuple(levels), phases)


@dataclass(frozen=True)
class CommutantStructure:
    multiplicities: tuple[tuple[float, int], ...]

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.multiplicities)

    @property
    def real_dimension(self) -> int:
        """Dimension of the commutant inside SU(n): ``sum m_j^2 - 1``."""
        return sum(m * m for m in self.block_sizes) - 1

    def to_json(self) -> dict:
        return {
            "multiplicities": [[v, m] for v, m in self.multiplicities],
            "block_sizes": list(self.block_sizes),
            "real_dimension": self.real_dimension,
        }


def commutant_structure(eigenvalues, degeneracy_tol: float = 1e-9) -> CommutantStructure:
    """Group equal eigenvalues (within ``degeneracy_tol``) into commutant blocks."""
    lam = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
    groups: list[list[float]] = []
    for x in lam:
        if groups and groups[-1][-1] - x <= degeneracy_tol:
            groups[-1].append(float(x))
        else:
            groups.append([float(x)])
    return CommutantStructure(tuple((float(np.mean(g)), len(g)) for g in groups))
