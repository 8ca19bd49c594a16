"""Liouville dynamics in Bloch coordinates and the two-laser three-level model.

With ``H = (h0/n) I + (1/2) sum_j h_j lambda_j`` and ``hbar = 1`` the von
Neumann equation becomes the real linear system

    d lambda_i / dt = sum_{j,k} f_ijk h_j lambda_k,

whose generator is antisymmetric, so ``|lambda|`` and every ``Tr(rho^k)`` are
conserved.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .basis import BasisSet, get_basis
from .bloch import BlochVector, char_coeffs_batch, is_physical, power_traces
from .errors import (
    BasisMismatch,
    DegenerateAmplitudes,
    ModelMismatch,
    NonPhysicalInitialState,
    NotHermitian,
    StepTooLarge,
)
from .linalg import hermiticity_error

THREE_LEVEL_BASIS = "paper-gellmann3"
DRIFT_LIMIT = 1e-4


@dataclass(frozen=True)
class HamiltonianBloch:
    """Hamiltonian ``(h0/n) I + (1/2) sum_j h_j lambda_j``.

    ``profile``, if given, multiplies the components listed in ``profiled``
    (all of them when ``profiled`` is None) at time ``t``.
    """

    n: int
    h0: float
    h: np.ndarray
    basis: str = "ggm"
    profile: Callable[[float], float] | None = None
    profiled: tuple[int, ...] | None = None

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.shape != (self.n * self.n - 1,):
            raise BasisMismatch(f"need {self.n * self.n - 1} components, got {h.shape}")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @classmethod
    def from_matrix(cls, hmat, basis: BasisSet) -> HamiltonianBloch:
        hmat = np.asarray(hmat, dtype=complex)
        if hermiticity_error(hmat) > 1e-10:
            raise NotHermitian("Hamiltonian must be Hermitian")
        return cls(basis.n, float(np.trace(hmat).real), basis.expand(hmat), basis.ordering)

    def at(self, t: float) -> np.ndarray:
        """Components ``h_j`` at time ``t``."""
        if self.profile is None:
            return self.h
        scale = float(self.profile(t))
        if self.profiled is None:
            return self.h * scale
        out = self.h.copy()
        idx = list(self.profiled)
        out[idx] *= scale
        return out

    def matrix(self, t: float = 0.0) -> np.ndarray:
        basis = get_basis(self.basis, self.n)
        return self.h0 / self.n * np.eye(self.n, dtype=complex) + basis.resum(self.at(t))


@dataclass(frozen=True)
class ThreeLevelModel:
    """Two lasers on a ladder at exact two-photon resonance.

    Rabi frequencies are ``Omega_12 = 2 a Omega0(t)`` and ``Omega_23 = 2 b Omega0(t)``.
    """

    a: float
    b: float
    delta: float
    omega0: Callable[[float], float] = field(default=lambda t: 1.0, compare=False)

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("amplitude ratios a, b must be nonnegative")

    @classmethod
    def constant(cls, a: float, b: float, delta: float, omega0: float) -> ThreeLevelModel:
        return cls(a, b, delta, lambda t, w=float(omega0): w)

    def epsilon(self, t: float) -> float:
        return float(self.omega0(t)) * float(np.hypot(self.a, self.b))

    def hamiltonian(self, t: float) -> np.ndarray:
        return three_level_hamiltonian(self, t)


def three_level_hamiltonian(m: ThreeLevelModel, t: float) -> np.ndarray:
    w = float(m.omega0(t))
    o12, o23 = 2 * m.a * w, 2 * m.b * w
    return -np.array(
        [[0.0, o12 / 2, 0.0], [o12 / 2, m.delta, o23 / 2], [0.0, o23 / 2, 0.0]],
        dtype=complex,
    )


def generator_matrix(h: np.ndarray, basis: BasisSet) -> np.ndarray:
    """``V_ik = sum_j f_ijk h_j`` so that ``d lambda / dt = V lambda``."""
    return np.einsum("ijk,j->ik", basis.f_dense, np.asarray(h, dtype=float))


def _basis_for(v: BlochVector, basis: BasisSet | None) -> BasisSet:
    basis = basis or v.basis_set()
    if v.n != basis.n or v.basis != basis.ordering:
        raise BasisMismatch(f"vector ({v.n}, {v.basis}) vs basis ({basis.n}, {basis.ordering})")
    return basis


def bloch_rhs(h: HamiltonianBloch, v: BlochVector, basis: BasisSet | None = None, t: float = 0.0) -> np.ndarray:
    """Time derivative of the Bloch vector."""
    basis = _basis_for(v, basis)
    if h.n != basis.n or h.basis != basis.ordering:
        raise BasisMismatch("Hamiltonian and state use different bases")
    return generator_matrix(h.at(t), basis) @ v.components


def coupling_matrix(m: ThreeLevelModel, t: float = 0.0) -> np.ndarray:
    """8x8 generator of the three-level model in the ``paper-gellmann3`` ordering."""
    basis = get_basis(THREE_LEVEL_BASIS)
    return generator_matrix(basis.expand(three_level_hamiltonian(m, t)), basis)


def basis_change_B(a: float, b: float) -> np.ndarray:
    """Orthogonal ``B`` with ``B V B^T`` block diagonal (3 + 4 + 1).

    Row 4 is ``-e_5``; all other rows carry the ``1/sqrt(a^2 + b^2)`` scale.
    """
    r2 = a * a + b * b
    if r2 <= 0.0:
        raise DegenerateAmplitudes("a = b = 0 leaves no coupling to diagonalize")
    r = np.sqrt(r2)
    s3 = np.sqrt(3.0)
    B = np.zeros((8, 8))
    B[0, [0, 2]] = a / r, b / r
    B[1, [3, 5]] = a / r, -b / r
    B[2, [1, 6, 7]] = a * b / r2, (2 * a * a + b * b) / (2 * r2), -s3 * b * b / (2 * r2)
    B[3, 4] = -1.0
    B[4, [0, 2]] = b / r, -a / r
    B[5, [3, 5]] = -b / r, -a / r
    B[6, [1, 6, 7]] = (b * b - a * a) / r2, a * b / r2, s3 * a * b / r2
    B[7, [1, 6, 7]] = -s3 * a * b / r2, s3 * b * b / (2 * r2), (b * b - 2 * a * a) / (2 * r2)
    return B


def block_decompose(m: ThreeLevelModel, t: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(V3', V4', V1')`` from ``B V B^T``; raises if the off-block part is not round-off."""
    B = basis_change_B(m.a, m.b)
    V = coupling_matrix(m, t)
    Vp = B @ V @ B.T
    blocks = [(0, 3), (3, 7), (7, 8)]
    mask = np.ones((8, 8), dtype=bool)
    for lo, hi in blocks:
        mask[lo:hi, lo:hi] = False
    scale = max(1.0, float(np.max(np.abs(V))))
    off = float(np.max(np.abs(Vp[mask])))
    if off > 1e-12 * scale:
        raise ArithmeticError(f"B V B^T is not block diagonal (off-block {off:.3g})")
    return tuple(Vp[lo:hi, lo:hi].copy() for lo, hi in blocks)


def lambda1_scalar(lam: np.ndarray, a: float, b: float) -> np.ndarray:
    """``(-2 sqrt3 ab l2 + sqrt3 b^2 l7 - (2a^2 - b^2) l8)^2 / (a^2 + b^2)^2``, equal to ``4 |Lambda_1|^2``.

    ``lam`` may be a single vector or a stack of vectors (last axis 8).
    """
    lam = np.asarray(lam, dtype=float)
    s3 = np.sqrt(3.0)
    x = -2 * s3 * a * b * lam[..., 1] + s3 * b * b * lam[..., 6] - (2 * a * a - b * b) * lam[..., 7]
    return x**2 / (a * a + b * b) ** 2


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution. ``components[i]`` is the Bloch vector at ``times[i]``."""

    n: int
    basis: str
    times: np.ndarray
    components: np.ndarray
    diagnostics: dict
    model: ThreeLevelModel | None = None

    def __post_init__(self):
        for arr in (self.times, self.components, *self.diagnostics.values()):
            arr.setflags(write=False)

    @property
    def states(self) -> tuple[BlochVector, ...]:
        return tuple(BlochVector(self.n, self.basis, c) for c in self.components)

    def __len__(self) -> int:
        return len(self.times)

    def columns(self) -> dict[str, np.ndarray]:
        cols = {"t": self.times}
        for k in range(self.components.shape[1]):
            cols[f"lambda{k + 1}"] = self.components[:, k]
        cols["tr_rho2"] = self.diagnostics["tr_rho2"]
        cols["tr_rho3"] = self.diagnostics["tr_rho3"]
        if self.model is not None:
            for name, col in zip(("Lambda3", "Lambda4", "Lambda1"), conserved_lengths(self).T):
                cols[name] = col
        return cols

    def to_csv(self, fh=None) -> str | None:
        cols = self.columns()
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(cols)
        for row in zip(*cols.values()):
            w.writerow([repr(float(x)) for x in row])
        return None if fh is not None else out.getvalue()

    def to_json(self) -> dict:
        return {k: [float(x) for x in v] for k, v in self.columns().items()}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


HamiltonianSource = HamiltonianBloch | ThreeLevelModel | Callable[[float], HamiltonianBloch]


def _generator_fn(h: HamiltonianSource, basis: BasisSet) -> Callable[[float], np.ndarray]:
    if isinstance(h, ThreeLevelModel):
        if basis.ordering != THREE_LEVEL_BASIS:
            raise ModelMismatch(f"the three-level model is written in the {THREE_LEVEL_BASIS} ordering")
        return lambda t: generator_matrix(basis.expand(three_level_hamiltonian(h, t)), basis)
    if isinstance(h, HamiltonianBloch):
        if h.n != basis.n or h.basis != basis.ordering:
            raise BasisMismatch("Hamiltonian and state use different bases")
        if h.profile is None:
            fixed = generator_matrix(h.h, basis)
            return lambda t: fixed
        return lambda t: generator_matrix(h.at(t), basis)

    def from_callable(t):
        ht = h(t)
        if ht.n != basis.n or ht.basis != basis.ordering:
            raise BasisMismatch("Hamiltonian and state use different bases")
        return generator_matrix(ht.at(t), basis)

    return from_callable


def integrate(
    v0: BlochVector,
    h: HamiltonianSource,
    T: float,
    dt: float,
    method: str = "rk4",
    basis: BasisSet | None = None,
) -> Trajectory:
    """Fixed-step classical RK4 from ``t = 0`` to ``T``.

    ``h`` is a :class:`HamiltonianBloch`, a :class:`ThreeLevelModel` or a
    callable ``t -> HamiltonianBloch``. Every step is recorded.

    Raises
    ------
    NonPhysicalInitialState
        ``v0`` is not a state.
    StepTooLarge
        ``|v|`` drifts by more than ``1e-4``.
    """
    if method != "rk4":
        raise ValueError(f"unsupported method {method!r}")
    if dt <= 0 or T < 0:
        raise ValueError("need dt > 0 and T >= 0")
    basis = _basis_for(v0, basis)
    ok, _ = is_physical(v0, basis)
    if not ok:
        raise NonPhysicalInitialState("initial Bloch vector is not a density matrix")
    gen = _generator_fn(h, basis)
    steps = int(round(T / dt))
    times = np.arange(steps + 1) * dt
    out = np.empty((steps + 1, basis.size))
    y = v0.components.astype(float).copy()
    out[0] = y
    norm0 = np.linalg.norm(y)
    for i in range(steps):
        t = times[i]
        Vh = gen(t + 0.5 * dt)
        k1 = gen(t) @ y
        k2 = Vh @ (y + 0.5 * dt * k1)
        k3 = Vh @ (y + 0.5 * dt * k2)
        k4 = gen(t + dt) @ (y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if abs(np.linalg.norm(y) - norm0) > DRIFT_LIMIT:
            raise StepTooLarge(f"|v| drifted by more than {DRIFT_LIMIT:g} at t = {times[i + 1]:.6g}")
        out[i + 1] = y
    rhos = np.eye(basis.n) / basis.n + 0.5 * np.einsum("tk,kab->tab", out, basis.stack)
    traces = power_traces(rhos, max(basis.n, 3))
    coeffs = char_coeffs_batch(rhos)
    diagnostics = {
        "norm": np.linalg.norm(out, axis=1),
        "tr_rho2": traces[:, 1],
        "tr_rho3": traces[:, 2],
        "min_char_coeff": np.min(coeffs[:, 1:], axis=1),
    }
    for k in range(4, basis.n + 1):
        diagnostics[f"tr_rho{k}"] = traces[:, k - 1]
    model = h if isinstance(h, ThreeLevelModel) else None
    return Trajectory(basis.n, basis.ordering, times, out, diagnostics, model)


def conserved_lengths(traj: Trajectory, m: ThreeLevelModel | None = None) -> np.ndarray:
    """Per-sample ``(|Lambda_3|, |Lambda_4|, |Lambda_1|)`` of ``B lambda``."""
    if traj.n != 3 or traj.basis != THREE_LEVEL_BASIS:
        raise ModelMismatch("trajectory is not in the three-level basis")
    if m is None:
        m = traj.model
    elif traj.model is not None and (traj.model.a, traj.model.b) != (m.a, m.b):
        raise ModelMismatch("trajectory was generated with different amplitudes a, b")
    if m is None:
        raise ModelMismatch("no three-level model attached to the trajectory")
    lp = traj.components @ basis_change_B(m.a, m.b).T
    return np.stack(
        [np.linalg.norm(lp[:, :3], axis=1), np.linalg.norm(lp[:, 3:7], axis=1), np.abs(lp[:, 7])],
        axis=1,
    )

