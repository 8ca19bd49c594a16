"""Polarization (spherical tensor) operator basis.

For an ``n``-level system with spin ``s = (n-1)/2`` the operators are

    T_LM = sqrt((2L+1)/(2s+1)) sum_{k,l} <s m_l; L M | s m_k> |k><l|

with ``m_1 = s, ..., m_n = -s``. Clebsch-Gordan coefficients follow the
Condon-Shortley phase convention. The operators are orthonormal under
``Tr(A^dagger B)`` but generally not Hermitian, so the Bloch components in
this basis are complex and constrained by ``v_LM = (-1)^M conj(v_{L,-M})``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt

import numpy as np

from .bloch import CharCoeffs, PHYSICAL_EPS, char_coeffs_newton
from .errors import HermiticityViolation, InvalidAngularMomenta, NotDensityShape
from .linalg import hermiticity_error

LM_TOL = 1e-10


def _twice(x) -> int:
    """``2x`` as an int, rejecting anything that is not a half-integer."""
    t = Fraction(x).limit_denominator(1000) * 2 if isinstance(x, float) else Fraction(x) * 2
    if t.denominator != 1 or abs(float(t) - 2 * float(x)) > 1e-12:
        raise InvalidAngularMomenta(f"{x!r} is not a half-integer")
    return int(t)


def clebsch_gordan(j1, m1, j2, m2, j, m) -> float:
    """``<j1 m1; j2 m2 | j m>`` by the Racah sum in exact integer arithmetic."""
    tj1, tm1, tj2, tm2, tj, tm = (_twice(x) for x in (j1, m1, j2, m2, j, m))
    for tjj, tmm in ((tj1, tm1), (tj2, tm2), (tj, tm)):
        if tjj < 0 or abs(tmm) > tjj or (tjj - tmm) % 2:
            raise InvalidAngularMomenta(f"m = {tmm / 2} is not a projection of j = {tjj / 2}")
    if tm1 + tm2 != tm:
        return 0.0
    if tj > tj1 + tj2 or tj < abs(tj1 - tj2) or (tj1 + tj2 + tj) % 2:
        return 0.0
    return _racah(tj1, tm1, tj2, tm2, tj, tm)


@lru_cache(maxsize=None)
def _racah(tj1, tm1, tj2, tm2, tj, tm) -> float:
    # all half-sums below are integers once the triangle and parity checks pass
    h = lambda *xs: sum(xs) // 2  # noqa: E731
    f = factorial
    pref = Fraction(
        (tj + 1) * f(h(tj, tj1, -tj2)) * f(h(tj, -tj1, tj2)) * f(h(tj1, tj2, -tj)),
        f(h(tj1, tj2, tj) + 1),
    )
    pref *= (
        f(h(tj, tm)) * f(h(tj, -tm))
        * f(h(tj1, -tm1)) * f(h(tj1, tm1))
        * f(h(tj2, -tm2)) * f(h(tj2, tm2))
    )
    total = Fraction(0)
    for k in range(0, h(tj1, tj2, -tj) + 1):
        args = (
            k,
            h(tj1, tj2, -tj) - k,
            h(tj1, -tm1) - k,
            h(tj2, tm2) - k,
            h(tj, -tj2, tm1) + k,
            h(tj, -tj1, -tm2) + k,
        )
        if min(args) < 0:
            continue
        den = 1
        for a in args:
            den *= f(a)
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0.0
    sq = total * total * pref
    return (1.0 if total > 0 else -1.0) * sqrt(float(sq))


@dataclass(frozen=True)
class PolarizationBasis:
    n: int
    s: Fraction
    operators: dict

    def keys(self, include_scalar: bool = False) -> list[tuple[int, int]]:
        lo = 0 if include_scalar else 1
        return [(L, M) for L in range(lo, self.n) for M in range(-L, L + 1)]

    def __getitem__(self, lm: tuple[int, int]) -> np.ndarray:
        return self.operators[lm]


@lru_cache(maxsize=None)
def polarization_ops(n: int) -> PolarizationBasis:
    if n < 2:
        raise ValueError("need n >= 2")
    s = Fraction(n - 1, 2)
    ms = [s - k for k in range(n)]
    ops = {}
    for L in range(n):
        for M in range(-L, L + 1):
            t = np.zeros((n, n), dtype=complex)
            for k, mk in enumerate(ms):
                for l, ml in enumerate(ms):
                    if ml + M == mk:
                        t[k, l] = clebsch_gordan(s, ml, L, M, s, mk)
            t *= sqrt((2 * L + 1) / (2 * s + 1))
            t.setflags(write=False)
            ops[(L, M)] = t
    return PolarizationBasis(n, s, ops)


@dataclass(frozen=True)
class PolarizationBloch:
    """Complex Bloch components ``v_LM`` for ``L >= 1``."""

    n: int
    components: dict

    def __post_init__(self):
        expected = set(polarization_ops(self.n).keys())
        comps = {tuple(k): complex(v) for k, v in self.components.items()}
        missing = expected - set(comps)
        for k in missing:
            comps[k] = 0.0j
        extra = set(comps) - expected
        if extra:
            raise NotDensityShape(f"components {sorted(extra)} do not exist for n = {self.n}")
        object.__setattr__(self, "components", comps)

    def hermiticity_defect(self) -> float:
        return max(
            abs(self.components[(L, M)] - (-1) ** M * np.conj(self.components[(L, -M)]))
            for (L, M) in self.components
        )

    def vector(self) -> np.ndarray:
        return np.array([self.components[k] for k in polarization_ops(self.n).keys()])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector()))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "components": {f"{L},{M}": [z.real, z.imag] for (L, M), z in sorted(self.components.items())},
        }

    @classmethod
    def from_json(cls, doc) -> PolarizationBloch:
        from .serialize import complex_from_json

        comps = {}
        for key, val in doc["components"].items():
            L, M = (int(x) for x in key.split(","))
            comps[(L, M)] = complex_from_json(val)
        return cls(int(doc["n"]), comps)


def po_from_density(rho, tol: float = LM_TOL) -> PolarizationBloch:
    """``v_LM = Tr(T_LM^dagger rho)``."""
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    if rho.shape != (n, n) or abs(np.trace(rho) - 1.0) > tol:
        raise NotDensityShape("expected a square unit-trace matrix")
    basis = polarization_ops(n)
    comps = {lm: complex(np.trace(basis[lm].conj().T @ rho)) for lm in basis.keys()}
    v = PolarizationBloch(n, comps)
    if v.hermiticity_defect() > tol:
        raise HermiticityViolation(f"components violate v_LM = (-1)^M conj(v_L,-M) by {v.hermiticity_defect():.3g}")
    return v


def po_to_density(v: PolarizationBloch, tol: float = LM_TOL) -> np.ndarray:
    if v.hermiticity_defect() > tol:
        raise HermiticityViolation("components do not describe a Hermitian matrix")
    basis = polarization_ops(v.n)
    rho = np.eye(v.n, dtype=complex) / v.n
    for lm, z in v.components.items():
        rho = rho + z * basis[lm]
    return rho


def radius_bound(n: int) -> float:
    """``sqrt((n-1)/n)``: no physical state has a longer polarization Bloch vector."""
    return sqrt((n - 1) / n)


def po_physicality(v: PolarizationBloch, eps: float = PHYSICAL_EPS) -> tuple[bool, CharCoeffs]:
    """Positivity from the trace-invariant recursion for ``a_j``."""
    rho = po_to_density(v)
    coeffs = char_coeffs_newton(0.5 * (rho + rho.conj().T))
    return coeffs.nonnegative(eps), coeffs


def qubit_from_abg(alpha: float, beta: float, gamma: float) -> PolarizationBloch:
    """Two-level vector with ``v_11 = alpha + i beta`` and ``v_10 = gamma``.

    The real parameter multiplies ``T_10``; attaching it to ``T_00`` would
    break the unit trace.
    """
    return PolarizationBloch(
        2,
        {(1, 1): complex(alpha, beta), (1, -1): -complex(alpha, -beta), (1, 0): complex(gamma)},
    )


def qubit_abg(v: PolarizationBloch) -> tuple[float, float, float]:
    z = v.components[(1, 1)]
    return z.real, z.imag, v.components[(1, 0)].real


def is_hermitian_po(rho) -> bool:
    return hermiticity_error(np.asarray(rho, dtype=complex)) <= LM_TOL
