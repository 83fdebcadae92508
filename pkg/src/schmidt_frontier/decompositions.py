"""Constructive separability certificates and the extreme witnesses behind them.

Two constructions make the pure-state family X_lam separable at both ends of
its PPT interval:

* at mu = 1/(1 + n^2 p0 p1), a uniform phase average of the product vectors
  eta_alpha = xi_alpha (x) conj(xi_alpha), xi_alpha = sum_i sqrt(p_i) alpha_i |i>,
  over alpha in {1, i, -1, -i}^n, plus a nonnegative diagonal;
* at delta^- = -1/(n^2 - 1), phase averages of the two-level product vectors
  eta_ij^alpha, plus a nonnegative diagonal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .family import OneParamFamily, hyperplane_side, perpendicularity_residual, state_at, HyperplaneSide
from .tensor import (
    BipartiteOperator,
    Dims,
    PureStateVector,
    SchmidtSpectrum,
    hermitian_eigen,
    hs_inner,
    partial_transpose,
    schmidt_decompose,
)

RESIDUAL_TOL = 1e-10
REMAINDER_TOL = 1e-12
RANK_ONE_TOL = 1e-10
QUARTER_PHASES = (1.0, 1j, -1.0, -1j)


class DecompositionError(RuntimeError):
    def __init__(self, message: str, residual: float = float("nan"), min_remainder: float = float("nan")):
        super().__init__(message)
        self.residual = residual
        self.min_remainder = min_remainder


@dataclass(frozen=True, eq=False)
class ProductDecomposition:
    """target = sum_t weights[t] |v_t><v_t| + diag(remainder), with unit product vectors v_t."""

    dims: Dims
    weights: np.ndarray
    vectors: np.ndarray
    remainder: np.ndarray
    target: BipartiteOperator

    @property
    def terms(self) -> list[tuple[float, PureStateVector]]:
        return [(float(w), PureStateVector.normalized(self.dims, v)) for w, v in zip(self.weights, self.vectors)]

    def __len__(self) -> int:
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        V = self.vectors / np.linalg.norm(self.vectors, axis=1, keepdims=True)
        return (V.T * self.weights) @ V.conj() + np.diag(self.remainder)


class DecompositionCheck(NamedTuple):
    residual: float
    min_remainder: float
    all_rank_one: bool
    min_weight: float = 0.0

    @property
    def passed(self) -> bool:
        return (
            self.residual <= RESIDUAL_TOL
            and self.min_remainder >= -REMAINDER_TOL
            and self.all_rank_one
            and self.min_weight >= 0
        )


def verify_decomposition(d: ProductDecomposition) -> DecompositionCheck:
    """Recompute the reconstruction and the product-vector property; never raises."""
    residual = float(np.max(np.abs(d.reconstruct() - d.target.entries)))
    min_remainder = float(np.min(d.remainder)) if len(d.remainder) else 0.0
    if len(d.vectors):
        s = np.linalg.svd(d.vectors.reshape(-1, d.dims.m, d.dims.n), compute_uv=False)
        s = s / s[:, :1]
        rank_one = bool(np.all(s[:, 1:] <= RANK_ONE_TOL))
        min_weight = float(np.min(d.weights))
    else:
        rank_one, min_weight = True, 0.0
    return DecompositionCheck(residual, min_remainder, rank_one, min_weight)


def _finish(d: ProductDecomposition) -> ProductDecomposition:
    check = verify_decomposition(d)
    if not check.passed:
        raise DecompositionError(
            f"decomposition failed verification: residual={check.residual:.3e}, "
            f"min remainder={check.min_remainder:.3e}, rank one={check.all_rank_one}",
            check.residual,
            check.min_remainder,
        )
    return d


def _from_raw(dims, raw_vectors, raw_weights, remainder, target) -> ProductDecomposition:
    """Absorb vector norms into the weights; drop vanishing vectors; merge repeated ones."""
    raw_vectors = np.asarray(raw_vectors, dtype=complex).reshape(len(raw_weights), -1)
    norms_sq = np.sum(np.abs(raw_vectors) ** 2, axis=1)
    keep = norms_sq > 1e-28
    vectors = raw_vectors[keep] / np.sqrt(norms_sq[keep])[:, None]
    weights = np.asarray(raw_weights, dtype=float)[keep] * norms_sq[keep]
    vectors, weights = _merge_duplicates(vectors, weights)
    return ProductDecomposition(dims, weights, vectors, np.asarray(remainder, dtype=float), target)


def _merge_duplicates(vectors: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(vectors) == 0:
        return vectors, weights
    lead = np.argmax(np.abs(vectors) > 1e-9, axis=1)
    phase = vectors[np.arange(len(vectors)), lead]
    canon = vectors * (np.abs(phase) / phase)[:, None]
    keys = np.round(np.concatenate([canon.real, canon.imag], axis=1), 9) + 0.0
    merged: dict[bytes, int] = {}
    order = []
    for t, key in enumerate(keys):
        kb = key.tobytes()
        if kb in merged:
            weights[merged[kb]] += weights[t]
        else:
            merged[kb] = t
            order.append(t)
    return vectors[order], weights[order]


# Vectors ---------------------------------------------------------------------


def _check_phases(phases) -> np.ndarray:
    a = np.asarray(phases, dtype=complex)
    if np.any(np.abs(np.abs(a) - 1.0) > 1e-12):
        raise ValueError(f"phases must be unimodular: {phases}")
    return a


def eta_alpha(spectrum: SchmidtSpectrum, phases) -> np.ndarray:
    """Amplitudes sqrt(p_i p_j) alpha_i conj(alpha_j) on |ij>, unnormalized (norm (sum p_i)^2 squared)."""
    a = _check_phases(phases)
    if a.shape != (spectrum.n,):
        raise ValueError(f"need {spectrum.n} phases")
    x = np.sqrt(spectrum.array) * a
    return np.outer(x, x.conj()).reshape(-1)


def eta_ij_alpha(spectrum: SchmidtSpectrum, i: int, j: int, phase: complex) -> np.ndarray:
    """(sqrt(p_j)|i> + a sqrt(p_i)|j>) (x) (sqrt(p_j)|i> - conj(a) sqrt(p_i)|j>), unnormalized."""
    if i <= j:
        raise ValueError("need i > j")
    (a,) = _check_phases([phase])
    p = spectrum.array
    n = spectrum.n
    left = np.zeros(n, dtype=complex)
    right = np.zeros(n, dtype=complex)
    left[i], left[j] = np.sqrt(p[j]), a * np.sqrt(p[i])
    right[i], right[j] = np.sqrt(p[j]), -np.conj(a) * np.sqrt(p[i])
    return np.kron(left, right)


# Separable decompositions ----------------------------------------------------


def sigma_plus(spectrum: SchmidtSpectrum) -> float:
    p = spectrum.p
    return 1.0 / (1.0 + spectrum.n**2 * p[0] * p[1])


def delta_minus(n: int) -> float:
    return -1.0 / (n * n - 1)


def _require_n(spectrum: SchmidtSpectrum) -> None:
    if spectrum.n < 2:
        raise ValueError("need n >= 2")


def decompose_sigma_plus(spectrum: SchmidtSpectrum) -> ProductDecomposition:
    """Separable decomposition of X_mu at the PPT endpoint mu = 1/(1 + n^2 p0 p1).

    The phase average only depends on relative phases, so alpha_0 = 1 is fixed
    and 4^(n-1) vectors are used.
    """
    _require_n(spectrum)
    n, p = spectrum.n, spectrum.array
    scale = 1.0 + n * n * p[0] * p[1]
    f = OneParamFamily.pure(spectrum)
    target = state_at(f, 1.0 / scale)
    phase_sets = [(1.0,) + rest for rest in itertools.product(QUARTER_PHASES, repeat=n - 1)]
    x = np.sqrt(p)[None, :] * np.array(phase_sets)
    raw = np.einsum("ti,tj->tij", x, x.conj()).reshape(len(phase_sets), -1)
    raw_weights = np.full(len(phase_sets), 1.0 / (len(phase_sets) * scale))
    pp = np.outer(p, p)
    np.fill_diagonal(pp, 0.0)
    # |ii>: p0 p1;  |ij>: p0 p1 - p_i p_j
    remainder = (p[0] * p[1] - pp).reshape(-1) / scale
    return _finish(_from_raw(f.dims, raw, raw_weights, remainder, target))


def decompose_delta_minus(spectrum: SchmidtSpectrum) -> ProductDecomposition:
    """Separable decomposition of X_{delta^-} = (I - rho)/(n^2 - 1)."""
    _require_n(spectrum)
    n, p = spectrum.n, spectrum.array
    f = OneParamFamily.pure(spectrum)
    target = state_at(f, delta_minus(n))
    raw = [
        eta_ij_alpha(spectrum, i, j, a)
        for i in range(n)
        for j in range(i)
        for a in QUARTER_PHASES
    ]
    raw_weights = np.full(len(raw), 1.0 / (4 * (n * n - 1)))
    # |ii>: 0;  |ij>: 1 - p_i p_j
    rem = 1.0 - np.outer(p, p)
    np.fill_diagonal(rem, 0.0)
    return _finish(_from_raw(f.dims, raw, raw_weights, rem.reshape(-1) / (n * n - 1), target))


def mix(d1: ProductDecomposition, d2: ProductDecomposition, t: float, target: BipartiteOperator) -> ProductDecomposition:
    """Decomposition of t * d1.target + (1 - t) * d2.target."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("mixing weight outside [0, 1]")
    parts = [(w, d) for w, d in ((t, d1), (1 - t, d2)) if w > 0]
    return ProductDecomposition(
        target.dims,
        np.concatenate([w * d.weights for w, d in parts]),
        np.concatenate([d.vectors for _, d in parts]),
        sum(w * d.remainder for w, d in parts),
        target,
    )


def certify_separable(X: BipartiteOperator) -> ProductDecomposition | None:
    """A verified product decomposition of X when X falls under a known construction.

    Handles diagonal states and members X_lam of a pure-state family in n (x) n
    with lam between delta^- and the PPT endpoint (any Schmidt basis).
    Returns None otherwise.
    """
    dims = X.dims
    diag = np.diag(X.entries).real
    if np.max(np.abs(X.entries - np.diag(diag))) <= 1e-14 and np.min(diag) >= -REMAINDER_TOL:
        return _finish(ProductDecomposition(dims, np.zeros(0), np.zeros((0, dims.total), complex), diag, X))
    if dims.m != dims.n:
        return None
    n = dims.n
    w, V = hermitian_eigen(X)
    if np.ptp(w[1:]) <= 1e-10:
        lam, xi = w[0] - w[1], V[:, 0]
    elif np.ptp(w[:-1]) <= 1e-10:
        lam, xi = w[-1] - w[0], V[:, -1]
    else:
        return None
    c, U, W = schmidt_decompose(PureStateVector.normalized(dims, xi))
    spectrum = SchmidtSpectrum.from_amplitudes(c)
    lo, hi = delta_minus(n), sigma_plus(spectrum)
    if not lo - 1e-12 <= lam <= hi + 1e-12:
        return None
    lam = min(max(lam, lo), hi)
    t = (hi - lam) / (hi - lo)
    base = mix(decompose_delta_minus(spectrum), decompose_sigma_plus(spectrum), t, X)
    rot = np.kron(U, W)
    if np.max(np.abs(rot - np.diag(np.diag(rot)))) <= 1e-14:
        return _finish(ProductDecomposition(dims, base.weights, base.vectors @ rot.T, base.remainder, X))
    # a rotated diagonal is a mixture of rotated basis products
    vectors = np.concatenate([base.vectors @ rot.T, rot.T])
    weights = np.concatenate([base.weights, base.remainder])
    keep = weights > 0
    return _finish(ProductDecomposition(dims, weights[keep], vectors[keep], np.zeros(dims.total), X))


# Witnesses ------------------------------------------------------------------


def rho_ij(spectrum: SchmidtSpectrum, i: int, j: int) -> BipartiteOperator:
    """|xi_ij><xi_ij| with xi_ij = sqrt(p_i p_j)(|ij> - |ji>)."""
    n = spectrum.n
    dims = Dims(n, n)
    v = np.zeros(n * n, dtype=complex)
    c = np.sqrt(spectrum.p[i] * spectrum.p[j])
    v[dims.index(i, j)] = c
    v[dims.index(j, i)] = -c
    return BipartiteOperator.projector(v, dims)


def witness_nu(spectrum: SchmidtSpectrum, i: int, j: int) -> float:
    n = spectrum.n
    return -(n * n * spectrum.p[i] * spectrum.p[j] + 1) / (n * n - 1)


@dataclass(frozen=True, eq=False)
class WitnessBundle:
    pair: tuple[int, int]
    witness: BipartiteOperator
    nu: float
    hyperplane_residual: float


def witness_bundle(spectrum: SchmidtSpectrum, i: int, j: int) -> WitnessBundle:
    """The extreme 1-blockpositive witness rho_ij^Gamma / (2 p_i p_j) and its hyperplane parameter."""
    if i <= j:
        raise ValueError("need i > j")
    pij = spectrum.p[i] * spectrum.p[j]
    if pij <= 0:
        raise ValueError(f"p_{i} p_{j} = 0: witness undefined")
    W = partial_transpose(rho_ij(spectrum, i, j)) / (2 * pij)
    nu = witness_nu(spectrum, i, j)
    f = OneParamFamily.pure(spectrum)
    residual = hs_inner(W - state_at(f, nu), f.rho)
    if abs(residual) > 1e-12:
        raise DecompositionError(f"witness misses its hyperplane by {residual:.3e}", residual)
    return WitnessBundle((i, j), W, nu, residual)


def beta_witness_decomposition(spectrum: SchmidtSpectrum) -> tuple[list[BipartiteOperator], np.ndarray]:
    """Split (n^2 p0^2 - 1) X_{beta^-} = p0^2 I - rho into sum_{i>j} rho_ij^Gamma + D, D diagonal."""
    _require_n(spectrum)
    n, p = spectrum.n, spectrum.array
    if n * n * p[0] ** 2 - 1 <= 0:
        raise ValueError("n^2 p0^2 <= 1")
    terms = [partial_transpose(rho_ij(spectrum, i, j)) for i in range(n) for j in range(i)]
    rho = spectrum.state()
    lhs = p[0] ** 2 * BipartiteOperator.identity(rho.dims).entries - rho.entries
    D = lhs - sum(t.entries for t in terms)
    off = D - np.diag(np.diag(D))
    if np.max(np.abs(off)) > 1e-12:
        raise DecompositionError(f"remainder has off-diagonal entry {np.max(np.abs(off)):.3e}")
    d = np.diag(D).real
    if np.min(d) < -REMAINDER_TOL:
        k = int(np.argmin(d))
        raise DecompositionError(f"remainder entry {k} is {d[k]:.3e} < 0", min_remainder=float(d[k]))
    return terms, d
