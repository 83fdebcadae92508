"""Membership oracles for states, PPT states, Schmidt-number sets and k-blockpositive matrices.

Every ``Out`` verdict carries a certificate that can be re-evaluated against
the operator with :meth:`MembershipVerdict.recheck`.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .tensor import (
    BipartiteOperator,
    Dims,
    PureStateVector,
    hermitian_eigen,
    hs_inner,
    min_eigen,
    partial_transpose,
    schmidt_decompose,
)

PSD_TOL = 1e-10
TRACE_TOL = 1e-10
NEGATIVE_TOL = 1e-9
THREADS_ENV = "SCHMIDT_FRONTIER_THREADS"


class Status(enum.Enum):
    IN = "in"
    OUT = "out"
    UNKNOWN = "unknown"


class Strategy(enum.Enum):
    LOW_DIM = "low-dim"
    CERTIFICATE = "certificate"
    WITNESS_SEARCH = "witness-search"
    AUTO = "auto"


@dataclass(frozen=True)
class SeeSawConfig:
    restarts: int = 64
    max_iters: int = 500
    step_tol: float = 1e-12
    stall_window: int = 10
    seed: int = 0
    strict: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


def vector_to_json(v: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).reshape(-1)]


def vector_from_json(data) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data])


# Certificates ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EigenvectorWitness:
    vector: np.ndarray
    kind = "eigenvector"

    def value(self, X: BipartiteOperator) -> float:
        return float(np.vdot(self.vector, X.entries @ self.vector).real)

    def to_json(self) -> dict:
        return {"kind": self.kind, "vector": vector_to_json(self.vector)}


@dataclass(frozen=True, eq=False)
class ProductVectorWitness(EigenvectorWitness):
    """A unit vector of Schmidt rank <= k with negative expectation."""

    k: int = 1
    kind = "product-vector"

    def to_json(self) -> dict:
        return {**super().to_json(), "k": self.k}


@dataclass(frozen=True, eq=False)
class PptEigenvectorWitness(EigenvectorWitness):
    """Eigenvector of X (side 'X') or of its partial transpose (side 'gamma')."""

    side: str = "gamma"
    kind = "ppt-eigenvector"

    def value(self, X: BipartiteOperator) -> float:
        Y = partial_transpose(X) if self.side == "gamma" else X
        return float(np.vdot(self.vector, Y.entries @ self.vector).real)

    def to_json(self) -> dict:
        return {**super().to_json(), "side": self.side}


@dataclass(frozen=True, eq=False)
class WitnessOperator:
    """A (heuristically) 1-blockpositive W with <W|X> < 0."""

    witness: BipartiteOperator
    kind = "witness-operator"

    def value(self, X: BipartiteOperator) -> float:
        return hs_inner(self.witness, X)

    def to_json(self) -> dict:
        from .serialize import operator_to_json

        return {"kind": self.kind, "witness": operator_to_json(self.witness)}


@dataclass(frozen=True, eq=False)
class DecompositionRef:
    decomposition: Any
    kind = "decomposition"

    def to_json(self) -> dict:
        from .serialize import decomposition_to_json

        return {"kind": self.kind, "decomposition": decomposition_to_json(self.decomposition)}


@dataclass(frozen=True)
class ClosedFormRef:
    name: str
    kind = "closed-form"

    def to_json(self) -> dict:
        return {"kind": self.kind, "name": self.name}


@dataclass(frozen=True, eq=False)
class MembershipVerdict:
    status: Status
    certificate: Any
    margin: float

    @property
    def is_in(self) -> bool:
        return self.status is Status.IN

    @property
    def is_out(self) -> bool:
        return self.status is Status.OUT

    def recheck(self, X: BipartiteOperator) -> float:
        """Re-evaluate an Out certificate against X; negative means the verdict stands."""
        if not hasattr(self.certificate, "value"):
            raise TypeError(f"certificate {self.certificate.kind!r} has no scalar re-evaluation")
        return self.certificate.value(X)

    def to_json(self) -> dict:
        return {"status": self.status.value, "margin": float(self.margin), "certificate": self.certificate.to_json()}


def _normalize(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _check_state_like(X: BipartiteOperator) -> None:
    if not X.hermitian:
        raise ValueError("operator is not Hermitian")
    if abs(X.trace - 1.0) > TRACE_TOL:
        raise ValueError(f"trace {X.trace!r} is not 1")


def _check_k(k: int, dims: Dims) -> None:
    if not 1 <= k <= dims.min:
        raise ValueError(f"k={k} outside [1, {dims.min}]")


# Spectral oracles -----------------------------------------------------------


def is_density(X: BipartiteOperator) -> MembershipVerdict:
    _check_state_like(X)
    w, v = min_eigen(X)
    if w >= -PSD_TOL:
        return MembershipVerdict(Status.IN, ClosedFormRef("min-eigenvalue-nonnegative"), w)
    return MembershipVerdict(Status.OUT, EigenvectorWitness(_normalize(v)), w)


def is_ppt(X: BipartiteOperator) -> MembershipVerdict:
    _check_state_like(X)
    w, v = min_eigen(X)
    if w < -PSD_TOL:
        return MembershipVerdict(Status.OUT, PptEigenvectorWitness(_normalize(v), side="X"), w)
    wg, vg = min_eigen(partial_transpose(X))
    if wg < -PSD_TOL:
        return MembershipVerdict(Status.OUT, PptEigenvectorWitness(_normalize(vg), side="gamma"), wg)
    return MembershipVerdict(Status.IN, ClosedFormRef("ppt-eigenvalues-nonnegative"), min(w, wg))


# See-saw over Schmidt-rank-k vectors ----------------------------------------


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _seesaw_batch(Xt: np.ndarray, B0: np.ndarray, cfg: SeeSawConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Alternating exact minimization of <v|X|v> over v = sum_r a_r (x) b_r.

    Each half-step fixes one factor with orthonormal columns, so the other
    factor is the lowest eigenvector of a (dim * k)-sized Hermitian matrix.
    Returns (values, A, B) per restart.
    """
    R, n, k = B0.shape
    m = Xt.shape[0]
    B, _ = np.linalg.qr(B0)
    history = []
    vals = np.full(R, np.inf)
    for _ in range(cfg.max_iters):
        HA = np.einsum("bjr,ijkl,bls->birks", B.conj(), Xt, B).reshape(R, m * k, m * k)
        w, V = np.linalg.eigh(HA)
        A = V[:, :, 0].reshape(R, m, k)
        Q, _ = np.linalg.qr(A)
        HB = np.einsum("bir,ijkl,bks->bjrls", Q.conj(), Xt, Q).reshape(R, n * k, n * k)
        w, V = np.linalg.eigh(HB)
        Bn = V[:, :, 0].reshape(R, n, k)
        A = Q
        B, Rb = np.linalg.qr(Bn)
        A = A @ np.swapaxes(Rb, 1, 2)
        vals = w[:, 0]
        history.append(vals)
        if len(history) > cfg.stall_window:
            if np.max(history[-cfg.stall_window - 1] - vals) < cfg.step_tol:
                break
    return vals, A, B


def _initial_factors(dims: Dims, k: int, cfg: SeeSawConfig) -> np.ndarray:
    rng = np.random.default_rng([cfg.seed, k])
    return rng.normal(size=(cfg.restarts, dims.n, k)) + 1j * rng.normal(size=(cfg.restarts, dims.n, k))


def _seesaw_min(X: BipartiteOperator, k: int, cfg: SeeSawConfig) -> tuple[float, np.ndarray]:
    dims = X.dims
    Xt = X.entries.reshape(dims.m, dims.n, dims.m, dims.n)
    B0 = _initial_factors(dims, k, cfg)
    chunks = np.array_split(np.arange(cfg.restarts), min(_thread_count(), cfg.restarts))
    if len(chunks) == 1:
        results = [_seesaw_batch(Xt, B0, cfg)]
    else:
        with ThreadPoolExecutor(len(chunks)) as pool:
            results = list(pool.map(lambda idx: _seesaw_batch(Xt, B0[idx], cfg), chunks))
    A = np.concatenate([r[1] for r in results])
    B = np.concatenate([r[2] for r in results])
    vecs = np.einsum("bir,bjr->bij", A, B).reshape(cfg.restarts, -1)
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    values = np.einsum("bi,ij,bj->b", vecs.conj(), X.entries, vecs).real
    best = int(np.argmin(values))
    return float(values[best]), vecs[best]


def min_schmidt_k_expectation(X: BipartiteOperator, k: int, cfg: SeeSawConfig = SeeSawConfig()) -> tuple[float, PureStateVector]:
    """Lowest <v|X|v> found over unit vectors of Schmidt rank <= k.

    The value is an upper bound on the true minimum; it is exact for
    k = min(m, n), where the problem is the lowest eigenvalue.
    """
    if not X.hermitian:
        raise ValueError("operator is not Hermitian")
    _check_k(k, X.dims)
    if k == X.dims.min:
        w, v = min_eigen(X)
        return w, PureStateVector.normalized(X.dims, v)
    value, v = _seesaw_min(X, k, cfg)
    if k > 1:
        # rank <= k-1 vectors are admissible too; keeps the result monotone in k
        lower, w = min_schmidt_k_expectation(X, k - 1, cfg)
        if lower < value:
            return lower, w
    v = _truncate_rank(v, X.dims, k)
    vec = PureStateVector.normalized(X.dims, v)
    return vec.expectation(X), vec


def _truncate_rank(v: np.ndarray, dims: Dims, k: int) -> np.ndarray:
    U, s, Vh = np.linalg.svd(v.reshape(dims.m, dims.n), full_matrices=False)
    s[k:] = 0
    return ((U * s) @ Vh).reshape(-1)


def is_blockpositive_k(X: BipartiteOperator, k: int, cfg: SeeSawConfig = SeeSawConfig()) -> MembershipVerdict:
    """k-blockpositivity of a trace-one Hermitian X.

    Out is definitive (product-vector witness).  In is definitive for PSD X
    or k = min(m, n); otherwise it rests on the see-saw finding no negative
    value and is tagged heuristic (reported Unknown when ``cfg.strict``).
    """
    _check_state_like(X)
    _check_k(k, X.dims)
    w, _ = min_eigen(X)
    if w >= -PSD_TOL:
        return MembershipVerdict(Status.IN, ClosedFormRef("positive-semidefinite"), w)
    value, v = min_schmidt_k_expectation(X, k, cfg)
    if value < -NEGATIVE_TOL:
        return MembershipVerdict(Status.OUT, ProductVectorWitness(v.amplitudes, k=k), value)
    if k == X.dims.min:
        return MembershipVerdict(Status.IN, ClosedFormRef("positive-semidefinite"), value)
    if cfg.strict:
        return MembershipVerdict(Status.UNKNOWN, ClosedFormRef("see-saw-nonnegative"), value)
    return MembershipVerdict(Status.IN, ClosedFormRef("see-saw-nonnegative"), value)


def schmidt_k_norm(X: BipartiteOperator, k: int, cfg: SeeSawConfig = SeeSawConfig()) -> float:
    """Largest <v|X|v> found over unit vectors of Schmidt rank <= k (a lower bound on the S(k) norm)."""
    value, _ = min_schmidt_k_expectation(-1.0 * X, k, cfg)
    return -value


# Separability ---------------------------------------------------------------


def _low_dim(dims: Dims) -> bool:
    return dims.m * dims.n <= 6


def _low_dim_verdict(X: BipartiteOperator) -> MembershipVerdict:
    v = is_ppt(X)
    if v.is_in:
        return MembershipVerdict(Status.IN, ClosedFormRef("ppt-equals-separable-in-2x2-and-2x3"), v.margin)
    return v


def _certificate_verdict(X: BipartiteOperator) -> MembershipVerdict:
    from .decompositions import certify_separable, verify_decomposition

    d = certify_separable(X)
    if d is None:
        return MembershipVerdict(Status.UNKNOWN, ClosedFormRef("no-constructive-certificate"), float("nan"))
    check = verify_decomposition(d)
    if not check.passed:
        return MembershipVerdict(Status.UNKNOWN, ClosedFormRef("certificate-failed-verification"), check.residual)
    return MembershipVerdict(Status.IN, DecompositionRef(d), check.min_remainder)


def _witness_search_verdict(
    X: BipartiteOperator, candidates: Sequence[BipartiteOperator], cfg: SeeSawConfig
) -> MembershipVerdict:
    wg, Vg = hermitian_eigen(partial_transpose(X))
    pool = []
    for w, v in zip(wg[::-1], Vg[:, ::-1].T):
        if w >= -NEGATIVE_TOL:
            break
        # (|v><v|)^Gamma is blockpositive and pairs with X to <v|X^Gamma|v>
        pool.append(partial_transpose(BipartiteOperator.projector(v, X.dims)))
    pool.extend(candidates)
    best = None
    for W in pool:
        W = W / W.trace
        pairing = hs_inner(W, X)
        if pairing >= -NEGATIVE_TOL:
            continue
        if min_schmidt_k_expectation(W, 1, cfg)[0] < -NEGATIVE_TOL:
            continue
        if best is None or pairing < best[0]:
            best = (pairing, W)
    if best is None:
        return MembershipVerdict(Status.UNKNOWN, ClosedFormRef("no-witness-found"), float("nan"))
    return MembershipVerdict(Status.OUT, WitnessOperator(best[1]), best[0])


def separability_oracle(
    X: BipartiteOperator,
    strategy: Strategy = Strategy.AUTO,
    cfg: SeeSawConfig = SeeSawConfig(),
    candidates: Sequence[BipartiteOperator] = (),
) -> MembershipVerdict:
    """Decide X in S_1 where one of the strategies can.

    AUTO tries low-dimensional PPT, then the constructive certificates,
    then reports NPT states as entangled, then searches witnesses.
    """
    _check_state_like(X)
    if is_density(X).is_out:
        raise ValueError("separability oracle requires a state")
    strategy = Strategy(strategy)
    if strategy is Strategy.LOW_DIM:
        if not _low_dim(X.dims):
            return MembershipVerdict(Status.UNKNOWN, ClosedFormRef("low-dim-rule-not-applicable"), float("nan"))
        return _low_dim_verdict(X)
    if strategy is Strategy.CERTIFICATE:
        return _certificate_verdict(X)
    if strategy is Strategy.WITNESS_SEARCH:
        return _witness_search_verdict(X, candidates, cfg)
    if _low_dim(X.dims):
        return _low_dim_verdict(X)
    verdict = _certificate_verdict(X)
    if verdict.status is not Status.UNKNOWN:
        return verdict
    ppt = is_ppt(X)
    if ppt.is_out:
        return ppt
    return _witness_search_verdict(X, candidates, cfg)


def schmidt_rank(v: PureStateVector, tol: float = 1e-10) -> int:
    c, _, _ = schmidt_decompose(v)
    return int(np.sum(c > tol))
