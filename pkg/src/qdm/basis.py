"""Generator bases of su(n) and their structure constants.

Indices are 0-based throughout the code. Generator ``k`` here is the
physicists' ``lambda_{k+1}``.

Orderings
---------
``ggm``
    Generalized Gell-Mann matrices for any ``n``: the symmetric pair matrices
    ``|j><k| + |k><j|`` for ``j < k`` in lexicographic order, then the
    antisymmetric ``-i|j><k| + i|k><j|`` in the same order, then the diagonal
    ones ``l = 1 .. n-1``.
``paper-gellmann3``
    The eight 3x3 matrices in the order used for the two-laser three-level
    model (three symmetric, three antisymmetric, two diagonal). For ``n = 3`` it
    coincides with ``ggm`` element by element; the permutation is still exposed.
``gellmann3-standard``
    The textbook Gell-Mann ordering (sigma-blocks on levels 12, 13, 23, then
    ``lambda_8``). The explicit cubic coefficient formula is written in it.
``pauli-tensor-2q``
    ``(1/sqrt 2) {sigma_i x I, I x sigma_i, sigma_i x sigma_j}`` for two qubits.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BasisInvalid
from .linalg import kron

SPARSE_DROP = 1e-13
BASIS_TOL = 1e-12

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class StructureTensor:
    """Sparse rank-3 tensor stored through its canonical ``i <= j <= k`` entries.

    ``symmetric=True`` means invariance under every index permutation (the
    ``g`` constants); otherwise the tensor is totally antisymmetric (``f``) and
    odd permutations flip the sign.
    """

    size: int
    entries: tuple[tuple[int, int, int, float], ...]
    symmetric: bool

    @classmethod
    def from_dense(cls, t: np.ndarray, symmetric: bool, drop: float = SPARSE_DROP) -> StructureTensor:
        size = t.shape[0]
        idx = np.argwhere(np.abs(t) > drop)
        entries = sorted(
            (int(i), int(j), int(k), float(t[i, j, k]))
            for i, j, k in idx
            if i <= j <= k
        )
        return cls(size, tuple(entries), symmetric)

    def dense(self) -> np.ndarray:
        out = np.zeros((self.size,) * 3)
        for i, j, k, val in self.entries:
            for perm in itertools.permutations(range(3)):
                sign = 1.0 if self.symmetric else _parity(perm)
                ijk = (i, j, k)
                out[ijk[perm[0]], ijk[perm[1]], ijk[perm[2]]] = sign * val
        return out

    def __getitem__(self, ijk: tuple[int, int, int]) -> float:
        order = sorted(range(3), key=lambda a: ijk[a])
        key = tuple(ijk[a] for a in order)
        for i, j, k, val in self.entries:
            if (i, j, k) == key:
                return val if self.symmetric else _parity(tuple(order)) * val
        return 0.0

    def to_json(self) -> list[list]:
        return [[i, j, k, v] for i, j, k, v in self.entries]


def _parity(perm: tuple[int, ...]) -> float:
    sign = 1.0
    p = list(perm)
    for a in range(len(p)):
        while p[a] != a:
            b = p[a]
            p[a], p[b] = p[b], p[a]
            sign = -sign
    return sign


@dataclass(frozen=True)
class BasisSet:
    n: int
    ordering: str
    generators: tuple[np.ndarray, ...] = field(repr=False)
    f: StructureTensor = field(repr=False)
    g: StructureTensor = field(repr=False)

    def __post_init__(self):
        for m in self.generators:
            m.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.generators)

    @cached_property
    def stack(self) -> np.ndarray:
        s = np.array(self.generators)
        s.setflags(write=False)
        return s

    @cached_property
    def f_dense(self) -> np.ndarray:
        t = self.f.dense()
        t.setflags(write=False)
        return t

    @cached_property
    def g_dense(self) -> np.ndarray:
        t = self.g.dense()
        t.setflags(write=False)
        return t

    def expand(self, h) -> np.ndarray:
        """Coefficients ``Tr(lambda_k h)`` of a matrix in this basis."""
        h = np.asarray(h, dtype=complex)
        return np.real(np.einsum("kab,ba->k", self.stack, h))

    def resum(self, coeffs) -> np.ndarray:
        """``(1/2) sum_k c_k lambda_k``, the inverse of :meth:`expand` on traceless Hermitian input."""
        return 0.5 * np.einsum("k,kab->ab", np.asarray(coeffs, dtype=float), self.stack)

    def to_json(self) -> dict:
        from .serialize import matrix_to_json

        return {
            "n": self.n,
            "ordering": self.ordering,
            "generators": [matrix_to_json(m) for m in self.generators],
            "f": self.f.to_json(),
            "g": self.g.to_json(),
        }


def structure_constants(generators) -> tuple[StructureTensor, StructureTensor]:
    """Compute ``f`` and ``g`` from the trace formulas.

    ``f_ijk = Tr([l_i, l_j] l_k) / 4i`` and ``g_ijk = Tr({l_i, l_j} l_k) / 4``.
    Raises :class:`BasisInvalid` unless ``Tr(l_i l_j) = 2 delta_ij``.
    """
    g_stack = np.asarray(generators, dtype=complex)
    gram = np.einsum("iab,jba->ij", g_stack, g_stack)
    if np.max(np.abs(gram - 2 * np.eye(len(g_stack))), initial=0.0) > BASIS_TOL:
        raise BasisInvalid("generators are not orthogonal with Tr(l_i l_j) = 2 delta_ij")
    prod = np.einsum("iab,jbc->ijac", g_stack, g_stack)
    comm = prod - prod.transpose(1, 0, 2, 3)
    anti = prod + prod.transpose(1, 0, 2, 3)
    f = np.real(np.einsum("ijab,kba->ijk", comm, g_stack) / 4j)
    g = np.real(np.einsum("ijab,kba->ijk", anti, g_stack) / 4)
    return (
        StructureTensor.from_dense(f, symmetric=False),
        StructureTensor.from_dense(g, symmetric=True),
    )


def check_generators(generators, tol: float = BASIS_TOL) -> None:
    for k, m in enumerate(generators):
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise BasisInvalid(f"generator {k} is not Hermitian")
        if abs(np.trace(m)) > tol:
            raise BasisInvalid(f"generator {k} is not traceless")


def make_basis(generators, ordering: str) -> BasisSet:
    gens = tuple(np.array(m, dtype=complex) for m in generators)
    check_generators(gens)
    n = gens[0].shape[0]
    if len(gens) != n * n - 1:
        raise BasisInvalid(f"{len(gens)} generators cannot span su({n})")
    f, g = structure_constants(gens)
    return BasisSet(n, ordering, gens, f, g)


def _unit(n: int, j: int, k: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    m[j, k] = 1.0
    return m


def ggm_generators(n: int) -> list[np.ndarray]:
    if n < 2:
        raise ValueError("need n >= 2")
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    sym = [_unit(n, j, k) + _unit(n, k, j) for j, k in pairs]
    asym = [-1j * _unit(n, j, k) + 1j * _unit(n, k, j) for j, k in pairs]
    diag = []
    for l in range(1, n):
        d = np.zeros(n)
        d[:l] = 1.0
        d[l] = -l
        diag.append(np.sqrt(2.0 / (l * (l + 1))) * np.diag(d).astype(complex))
    return sym + asym + diag


def ggm_basis(n: int) -> BasisSet:
    """Generalized Gell-Mann basis of su(n)."""
    return make_basis(ggm_generators(n), "ggm")


def paper_gellmann3() -> BasisSet:
    """Three-level basis: symmetric 12, 13, 23; antisymmetric 12, 13, 23; diag(1,-1,0); lambda_8."""
    s = lambda j, k: _unit(3, j, k) + _unit(3, k, j)  # noqa: E731
    a = lambda j, k: -1j * _unit(3, j, k) + 1j * _unit(3, k, j)  # noqa: E731
    gens = [
        s(0, 1), s(0, 2), s(1, 2),
        a(0, 1), a(0, 2), a(1, 2),
        np.diag([1.0, -1.0, 0.0]).astype(complex),
        np.diag([1.0, 1.0, -2.0]).astype(complex) / np.sqrt(3.0),
    ]
    return make_basis(gens, "paper-gellmann3")


def standard_gellmann3() -> BasisSet:
    """Textbook Gell-Mann ordering."""
    s = lambda j, k: _unit(3, j, k) + _unit(3, k, j)  # noqa: E731
    a = lambda j, k: -1j * _unit(3, j, k) + 1j * _unit(3, k, j)  # noqa: E731
    gens = [
        s(0, 1), a(0, 1), np.diag([1.0, -1.0, 0.0]).astype(complex),
        s(0, 2), a(0, 2),
        s(1, 2), a(1, 2),
        np.diag([1.0, 1.0, -2.0]).astype(complex) / np.sqrt(3.0),
    ]
    return make_basis(gens, "gellmann3-standard")


def two_qubit_basis() -> BasisSet:
    """The 15 generators ``(1/sqrt 2) sigma_a x sigma_b`` of su(2) x su(2) in the usual order."""
    r = 1.0 / np.sqrt(2.0)
    gens = [r * kron(s, I2) for s in PAULI]
    gens += [r * kron(I2, s) for s in PAULI]
    gens += [r * kron(si, sj) for si in PAULI for sj in PAULI]
    return make_basis(gens, "pauli-tensor-2q")


def permutation(src: BasisSet, dst: BasisSet) -> np.ndarray:
    """Index map ``perm`` with ``src.generators[k] == dst.generators[perm[k]]``.

    Raises :class:`BasisInvalid` if the two bases are not related by a pure
    relabelling.
    """
    if src.n != dst.n or src.size != dst.size:
        raise BasisInvalid("bases act on different spaces")
    perm = np.full(src.size, -1)
    for k, m in enumerate(src.generators):
        hits = [j for j, d in enumerate(dst.generators) if np.max(np.abs(m - d)) < BASIS_TOL]
        if len(hits) != 1:
            raise BasisInvalid(f"generator {k} has no unique counterpart")
        perm[k] = hits[0]
    return perm


def convert(components, src: BasisSet, dst: BasisSet) -> np.ndarray:
    """Re-express Bloch components from ``src`` in ``dst`` (any two bases of the same su(n))."""
    h = src.resum(components)
    return dst.expand(h)


_BUILDERS = {
    "ggm": ggm_basis,
    "paper-gellmann3": lambda n=3: paper_gellmann3(),
    "gellmann3-standard": lambda n=3: standard_gellmann3(),
    "pauli-tensor-2q": lambda n=4: two_qubit_basis(),
}
_FIXED_N = {"paper-gellmann3": 3, "gellmann3-standard": 3, "pauli-tensor-2q": 4}
_CACHE: dict[tuple[str, int], BasisSet] = {}


def get_basis(ordering: str, n: int | None = None) -> BasisSet:
    """Cached lookup by ordering tag."""
    if ordering not in _BUILDERS:
        raise BasisInvalid(f"unknown ordering {ordering!r}")
    fixed = _FIXED_N.get(ordering)
    if fixed is not None:
        if n is not None and n != fixed:
            raise BasisInvalid(f"ordering {ordering!r} only exists for n = {fixed}")
        n = fixed
    if n is None:
        raise BasisInvalid("n is required for the ggm ordering")
    key = (ordering, n)
    if key not in _CACHE:
        _CACHE[key] = _BUILDERS[ordering](n)
    return _CACHE[key]
