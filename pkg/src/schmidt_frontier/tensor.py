"""Dense complex linear algebra on bipartite spaces C^m (x) C^n.

The composite index of |ij> is ``i * n + j``.  Partial transposes act on
the first tensor factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
EIGEN_TOL = 1e-10
NORM_TOL = 1e-12


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class EigenConvergenceError(RuntimeError):
    def __init__(self, residual: float):
        super().__init__(f"eigendecomposition residual {residual:.3e} exceeds {EIGEN_TOL:g}")
        self.residual = residual


@dataclass(frozen=True)
class Dims:
    m: int
    n: int

    def __post_init__(self):
        if int(self.m) != self.m or int(self.n) != self.n or self.m < 1 or self.n < 1:
            raise DimensionError(f"invalid dims ({self.m}, {self.n})")

    @property
    def total(self) -> int:
        return self.m * self.n

    @property
    def min(self) -> int:
        return min(self.m, self.n)

    def index(self, i: int, j: int) -> int:
        return i * self.n + j


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BipartiteOperator:
    dims: Dims
    entries: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.entries)
        if mat.shape != (self.dims.total, self.dims.total):
            raise DimensionError(f"entries shape {mat.shape} does not match dims {self.dims}")
        object.__setattr__(self, "entries", mat)

    @property
    def hermitian(self) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) <= HERMITIAN_TOL)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def __add__(self, other: BipartiteOperator) -> BipartiteOperator:
        _check_same_dims(self, other)
        return BipartiteOperator(self.dims, self.entries + other.entries)

    def __sub__(self, other: BipartiteOperator) -> BipartiteOperator:
        _check_same_dims(self, other)
        return BipartiteOperator(self.dims, self.entries - other.entries)

    def __mul__(self, c: float) -> BipartiteOperator:
        return BipartiteOperator(self.dims, c * self.entries)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> BipartiteOperator:
        return BipartiteOperator(self.dims, self.entries / c)

    def max_abs_diff(self, other: BipartiteOperator) -> float:
        _check_same_dims(self, other)
        return float(np.max(np.abs(self.entries - other.entries)))

    @classmethod
    def identity(cls, dims: Dims) -> BipartiteOperator:
        return cls(dims, np.eye(dims.total))

    @classmethod
    def maximally_mixed(cls, dims: Dims) -> BipartiteOperator:
        return cls(dims, np.eye(dims.total) / dims.total)

    @classmethod
    def projector(cls, v: PureStateVector | np.ndarray, dims: Dims | None = None) -> BipartiteOperator:
        """|v><v| (no normalization applied)."""
        if isinstance(v, PureStateVector):
            dims, amp = v.dims, v.amplitudes
        else:
            amp = np.asarray(v, dtype=complex)
        return cls(dims, np.outer(amp, amp.conj()))


def _check_same_dims(a: BipartiteOperator, b: BipartiteOperator) -> None:
    if a.dims != b.dims:
        raise DimensionError(f"dimension mismatch: {a.dims} vs {b.dims}")


@dataclass(frozen=True, eq=False)
class PureStateVector:
    dims: Dims
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = _frozen(self.amplitudes).reshape(-1)
        if amp.shape != (self.dims.total,):
            raise DimensionError(f"vector length {amp.size} does not match dims {self.dims}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"vector norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, dims: Dims, amplitudes) -> PureStateVector:
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(dims, amp / np.linalg.norm(amp))

    @classmethod
    def basis(cls, dims: Dims, i: int, j: int) -> PureStateVector:
        amp = np.zeros(dims.total, dtype=complex)
        amp[dims.index(i, j)] = 1.0
        return cls(dims, amp)

    def coefficient_matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims.m, self.dims.n)

    def expectation(self, X: BipartiteOperator) -> float:
        return float(np.vdot(self.amplitudes, X.entries @ self.amplitudes).real)


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending nonnegative Schmidt coefficients with unit sum of squares."""

    p: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        if len(p) < 1:
            raise ValueError("empty spectrum")
        if any(x < 0 for x in p):
            raise ValueError(f"negative Schmidt coefficient in {p}")
        if any(a < b for a, b in zip(p, p[1:])):
            raise ValueError(f"Schmidt coefficients not descending: {p}")
        if abs(sum(x * x for x in p) - 1.0) > HERMITIAN_TOL:
            raise ValueError(f"sum of squared coefficients is {sum(x * x for x in p)!r}, not 1")
        object.__setattr__(self, "p", p)

    @classmethod
    def from_squares(cls, squares, normalize: bool = True) -> SchmidtSpectrum:
        sq = np.asarray(squares, dtype=float)
        if np.any(sq < 0):
            raise ValueError("negative squared coefficient")
        if normalize:
            sq = sq / sq.sum()
        return cls(tuple(np.sqrt(np.sort(sq)[::-1])))

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = True) -> SchmidtSpectrum:
        a = np.abs(np.asarray(amplitudes, dtype=float))
        if normalize:
            a = a / np.linalg.norm(a)
        return cls(tuple(np.sort(a)[::-1]))

    @classmethod
    def isotropic(cls, n: int) -> SchmidtSpectrum:
        return cls((1 / np.sqrt(n),) * n)

    @classmethod
    def product(cls, n: int) -> SchmidtSpectrum:
        return cls((1.0,) + (0.0,) * (n - 1))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> SchmidtSpectrum:
        return cls.from_amplitudes(np.abs(rng.normal(size=n)))

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.p)

    def vector(self) -> PureStateVector:
        """xi = sum_i p_i |ii> in C^n (x) C^n."""
        n = self.n
        dims = Dims(n, n)
        amp = np.zeros(n * n, dtype=complex)
        for i, pi in enumerate(self.p):
            amp[dims.index(i, i)] = pi
        return PureStateVector(dims, amp / np.linalg.norm(amp))

    def state(self) -> BipartiteOperator:
        return BipartiteOperator.projector(self.vector())


def _require_hermitian(*ops: BipartiteOperator) -> None:
    for X in ops:
        if not X.hermitian:
            raise NotHermitianError("operator is not Hermitian")


def hs_inner(A: BipartiteOperator, B: BipartiteOperator) -> float:
    """Hilbert-Schmidt pairing Tr(AB) of two Hermitian operators."""
    _check_same_dims(A, B)
    _require_hermitian(A, B)
    # Tr(AB) = sum_ab A_ab B_ba = sum_ab A_ab conj(B_ab) for Hermitian B
    return float(np.vdot(B.entries, A.entries).real)


def partial_transpose(X: BipartiteOperator) -> BipartiteOperator:
    m, n = X.dims.m, X.dims.n
    t = X.entries.reshape(m, n, m, n).transpose(2, 1, 0, 3)
    return BipartiteOperator(X.dims, t.reshape(m * n, m * n))


def hermitian_eigen(X: BipartiteOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and the matching eigenvectors as columns."""
    _require_hermitian(X)
    H = 0.5 * (X.entries + X.entries.conj().T)
    w, V = np.linalg.eigh(H)
    w, V = w[::-1], V[:, ::-1]
    residual = float(np.max(np.abs((V * w) @ V.conj().T - X.entries), initial=0.0))
    if residual > EIGEN_TOL * max(1.0, float(np.max(np.abs(w), initial=0.0))):
        raise EigenConvergenceError(residual)
    return w, V


def min_eigen(X: BipartiteOperator) -> tuple[float, np.ndarray]:
    w, V = hermitian_eigen(X)
    return float(w[-1]), V[:, -1]


def schmidt_decompose(v: PureStateVector) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (coefficients, left, right) with v = sum_a c_a left[:, a] (x) right[:, a]."""
    U, s, Vh = np.linalg.svd(v.coefficient_matrix())
    r = len(s)
    return s, U[:, :r], Vh[:r, :].T


def choi_of_conjugation(s: np.ndarray, transpose_input: bool, dims: Dims) -> BipartiteOperator:
    """Choi matrix sum_ij |i><j| (x) phi(|i><j|) of phi(a) = s* a s, or s* a^t s."""
    s = np.asarray(s, dtype=complex)
    if s.shape != (dims.m, dims.n):
        raise DimensionError(f"conjugating matrix shape {s.shape} incompatible with {dims}")
    m, n = dims.m, dims.n
    C = np.zeros((m, n, m, n), dtype=complex)
    sh = s.conj().T
    for i in range(m):
        for j in range(m):
            a = np.zeros((m, m))
            a[i, j] = 1.0
            if transpose_input:
                a = a.T
            C[i, :, j, :] = sh @ a @ s
    return BipartiteOperator(dims, C.reshape(m * n, m * n))


def random_hermitian(dims: Dims, rng: np.random.Generator, trace_one: bool = False) -> BipartiteOperator:
    d = dims.total
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = (G + G.conj().T) / 2
    if trace_one:
        H = H - (np.trace(H).real - 1.0) / d * np.eye(d)
    return BipartiteOperator(dims, H)


def random_state(dims: Dims, rng: np.random.Generator, rank: int | None = None) -> BipartiteOperator:
    d = dims.total
    rank = d if rank is None else rank
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ G.conj().T
    return BipartiteOperator(dims, rho / np.trace(rho).real)
