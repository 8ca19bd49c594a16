"""Bloch-vector parametrization of density matrices.

A state on ``C^n`` is written ``rho = I/n + (1/2) sum_k v_k lambda_k`` for a
basis of traceless Hermitian generators normalized as ``Tr(l_i l_j) = 2 d_ij``.
Any real vector gives a Hermitian unit-trace matrix; whether it is a state is
decided by the signs of the characteristic-polynomial coefficients ``a_j``
(``det(x - rho) = sum_j (-1)^j a_j x^(n-j)``), all of which are nonnegative
exactly when every eigenvalue is.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .basis import BasisSet, get_basis, standard_gellmann3
from .errors import BasisMismatch, NotDensityShape, NotHermitian
from .linalg import HERMITIAN_TOL, dagger, hermiticity_error

PHYSICAL_EPS = 1e-9


@dataclass(frozen=True)
class BlochVector:
    n: int
    basis: str
    components: np.ndarray

    def __post_init__(self):
        c = np.array(self.components, dtype=float)
        if c.shape != (self.n * self.n - 1,):
            raise BasisMismatch(f"need {self.n * self.n - 1} components for n = {self.n}, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def within_purity_bound(self, tol: float = 1e-9) -> bool:
        """``|v| <= sqrt(2(n-1)/n)``, necessary for a physical state."""
        return self.norm <= np.sqrt(2.0 * (self.n - 1) / self.n) + tol

    def to_json(self) -> dict:
        return {"n": self.n, "basis": self.basis, "components": [float(x) for x in self.components]}

    @classmethod
    def from_json(cls, doc) -> BlochVector:
        from .serialize import FormatError

        try:
            return cls(int(doc["n"]), str(doc["basis"]), np.asarray(doc["components"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad Bloch vector document: {exc}") from exc

    def basis_set(self) -> BasisSet:
        return get_basis(self.basis, self.n)


@dataclass(frozen=True)
class CharCoeffs:
    """Characteristic coefficients ``a_0 .. a_n`` with ``a_0 = 1``."""

    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    def __getitem__(self, j):
        return self.a[j]

    def __len__(self):
        return len(self.a)

    def factorial_scaled(self) -> np.ndarray:
        """``j! a_j``, the normalization the closed formulas are written in."""
        return np.array([factorial(j) * x for j, x in enumerate(self.a)])

    def nonnegative(self, eps: float = PHYSICAL_EPS) -> bool:
        return bool(np.all(self.a[1:] >= -eps))


def _check_basis(v: BlochVector, basis: BasisSet) -> None:
    if v.n != basis.n or v.basis != basis.ordering:
        raise BasisMismatch(f"vector ({v.n}, {v.basis}) does not match basis ({basis.n}, {basis.ordering})")


def to_density(v: BlochVector, basis: BasisSet | None = None) -> np.ndarray:
    """``I/n + (1/2) sum_k v_k lambda_k``. Positivity is not checked."""
    basis = basis or v.basis_set()
    _check_basis(v, basis)
    rho = np.eye(basis.n, dtype=complex) / basis.n + basis.resum(v.components)
    return 0.5 * (rho + rho.conj().T)


def from_density(rho, basis: BasisSet, tol: float = HERMITIAN_TOL) -> BlochVector:
    """Components ``Tr(rho lambda_k)``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (basis.n, basis.n):
        raise NotDensityShape(f"expected a {basis.n}x{basis.n} matrix, got {rho.shape}")
    if hermiticity_error(rho) > tol:
        raise NotDensityShape("matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise NotDensityShape(f"trace {np.trace(rho).real:.6g} != 1")
    return BlochVector(basis.n, basis.ordering, basis.expand(rho))


def pure_qubit(theta: float, phi: float) -> np.ndarray:
    """``|psi><psi|`` for ``psi = cos(theta)|0> + e^{i phi} sin(theta)|1>``.

    Here ``theta`` is half the polar angle on the Bloch sphere.
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [[c * c, c * s * np.exp(-1j * phi)], [c * s * np.exp(1j * phi), s * s]],
        dtype=complex,
    )


def star(a, b, basis: BasisSet) -> np.ndarray:
    """The symmetric product ``(a . b)_k = sum_ij g_ijk a_i b_j``."""
    a = _components(a, basis)
    b = _components(b, basis)
    return np.einsum("ijk,i,j->k", basis.g_dense, a, b)


def _components(v, basis: BasisSet) -> np.ndarray:
    if isinstance(v, BlochVector):
        _check_basis(v, basis)
        return v.components
    c = np.asarray(v, dtype=float)
    if c.shape != (basis.size,):
        raise BasisMismatch(f"expected {basis.size} components, got {c.shape}")
    return c


def trace_invariant_bloch(v, basis: BasisSet, k: int) -> float:
    """``Tr(rho^k)`` for ``k <= 4`` from the Bloch vector alone."""
    lam = _components(v, basis)
    n = basis.n
    sq = float(lam @ lam)
    if k == 1:
        return 1.0
    if k == 2:
        return 1.0 / n + 0.5 * sq
    ss = star(lam, lam, basis)
    cube = float(lam @ ss)
    if k == 3:
        return 1.0 / n**2 + 1.5 / n * sq + 0.25 * cube
    if k == 4:
        return 1.0 / n**3 + 3.0 / n**2 * sq + cube / n + sq * sq / (4 * n) + float(ss @ ss) / 8
    raise ValueError("closed forms exist only for k <= 4")


def power_traces(rho, kmax: int) -> np.ndarray:
    """``[Tr(rho^1), ..., Tr(rho^kmax)]`` (real parts); works on stacks ``(..., n, n)``."""
    rho = np.asarray(rho, dtype=complex)
    out = np.empty(rho.shape[:-2] + (kmax,))
    p = rho
    for m in range(kmax):
        if m:
            p = p @ rho
        out[..., m] = np.real(np.trace(p, axis1=-2, axis2=-1))
    return out


def trace_invariant(state, k: int, basis: BasisSet | None = None, check: bool = True) -> float:
    """``Tr(rho^k)`` of a matrix or Bloch vector.

    For a Bloch vector and ``k <= 4`` the closed forms are used and, with
    ``check=True``, compared against the matrix power to ``1e-10``.
    """
    if k < 1:
        raise ValueError("k >= 1")
    if isinstance(state, BlochVector):
        basis = basis or state.basis_set()
        rho = to_density(state, basis)
        direct = float(power_traces(rho, k)[k - 1])
        if k <= 4:
            closed = trace_invariant_bloch(state, basis, k)
            if check and abs(closed - direct) > 1e-10:
                raise ArithmeticError(f"closed form {closed} and matrix power {direct} disagree")
            return closed
        return direct
    return float(power_traces(state, k)[k - 1])


def newton_coeffs(traces: np.ndarray) -> np.ndarray:
    """Coefficients ``a_0..a_n`` from power sums ``p_1..p_n`` (stack-aware).

    ``k a_k = sum_{m=1}^k (-1)^(m-1) a_{k-m} p_m``.
    """
    traces = np.asarray(traces, dtype=float)
    n = traces.shape[-1]
    a = np.zeros(traces.shape[:-1] + (n + 1,))
    a[..., 0] = 1.0
    for k in range(1, n + 1):
        acc = np.zeros(traces.shape[:-1])
        for m in range(1, k + 1):
            acc = acc + (-1) ** (m - 1) * a[..., k - m] * traces[..., m - 1]
        a[..., k] = acc / k
    return a


def char_coeffs_newton(rho, tol: float = HERMITIAN_TOL) -> CharCoeffs:
    """All ``a_j`` of a Hermitian matrix through Newton's identities."""
    rho = np.asarray(rho, dtype=complex)
    if hermiticity_error(rho) > tol:
        raise NotHermitian("char_coeffs_newton needs a Hermitian matrix")
    return CharCoeffs(newton_coeffs(power_traces(rho, rho.shape[-1])))


def char_coeffs_batch(rhos) -> np.ndarray:
    """Stack version of :func:`char_coeffs_newton`; returns an array ``(..., n+1)``."""
    rhos = np.asarray(rhos, dtype=complex)
    rhos = 0.5 * (rhos + dagger(rhos))
    return newton_coeffs(power_traces(rhos, rhos.shape[-1]))


def cubic_coeff_gellmann3(lam) -> float:
    """``a_3`` for ``n = 3`` written out in the textbook Gell-Mann ordering."""
    l = np.concatenate([[0.0], np.asarray(lam, dtype=float)])
    s3 = np.sqrt(3.0)
    sq = float(np.sum(l[1:] ** 2))
    val = (
        8.0
        - 18.0 * sq
        + 27.0 * l[3] * (l[4] ** 2 + l[5] ** 2 - l[6] ** 2 - l[7] ** 2)
        - 6.0 * s3 * l[8] ** 3
        + 9.0 * s3 * l[8] * (2.0 * (l[1] ** 2 + l[2] ** 2 + l[3] ** 2) - (l[4] ** 2 + l[5] ** 2 + l[6] ** 2 + l[7] ** 2))
        + 54.0 * (l[1] * l[4] * l[6] + l[1] * l[5] * l[7] + l[2] * l[5] * l[6] - l[2] * l[4] * l[7])
    ) / 36.0
    return val / 6.0


def char_coeffs_closed(v, basis: BasisSet, jmax: int = 4) -> CharCoeffs:
    """``a_1 .. a_jmax`` (``jmax <= 4``) from the structure-constant formulas.

    For ``n = 3`` the cubic coefficient is also evaluated from the explicit
    Gell-Mann polynomial (after converting to that ordering) and the two must
    agree to ``1e-12``.
    """
    if not 0 <= jmax <= 4:
        raise ValueError("closed formulas exist for j <= 4")
    lam = _components(v, basis)
    n = basis.n
    jmax = min(jmax, n)
    sq = float(lam @ lam)
    ss = star(lam, lam, basis)
    cube = float(lam @ ss)
    scaled = [1.0, 1.0]
    scaled.append((n - 1) / n - 0.5 * sq)
    scaled.append((n - 1) * (n - 2) / n**2 - 3.0 * (n - 2) / (2 * n) * sq + 0.5 * cube)
    scaled.append(
        (n - 1) * (n - 2) * (n - 3) / n**3
        - 3.0 * (n - 2) * (n - 3) / n**2 * sq
        + 3.0 * (n - 2) / (4 * n) * sq * sq
        + 2.0 * (n - 3) / n * cube
        - 0.75 * float(ss @ ss)
    )
    a = np.array([scaled[j] / factorial(j) for j in range(jmax + 1)])
    if n == 3 and jmax >= 3:
        std = standard_gellmann3()
        explicit = cubic_coeff_gellmann3(std.expand(basis.resum(lam)))
        if abs(explicit - a[3]) > 1e-12:
            raise ArithmeticError(f"cubic coefficient mismatch: {a[3]} vs explicit {explicit}")
    return CharCoeffs(a)


def is_physical(state, basis: BasisSet | None = None, eps: float = PHYSICAL_EPS) -> tuple[bool, CharCoeffs]:
    """Positivity through ``a_j >= -eps`` for every ``j``.

    ``state`` is a Hermitian unit-trace matrix or a :class:`BlochVector`.
    Boundary states (some ``a_j`` zero) count as physical.
    """
    if isinstance(state, BlochVector):
        rho = to_density(state, basis)
    else:
        rho = np.asarray(state, dtype=complex)
    coeffs = char_coeffs_newton(rho)
    return coeffs.nonnegative(eps), coeffs
