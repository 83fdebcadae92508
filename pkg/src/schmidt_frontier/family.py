"""The line X_lam = (1 - lam) rho_* + lam rho through the maximally mixed state."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .tensor import (
    BipartiteOperator,
    Dims,
    SchmidtSpectrum,
    hs_inner,
    min_eigen,
)

ZERO_SIDE_TOL = 1e-9
TRACE_TOL = 1e-10


class HyperplaneSide(enum.Enum):
    MINUS = "minus"
    ZERO = "zero"
    PLUS = "plus"


@dataclass(frozen=True, eq=False)
class OneParamFamily:
    rho: BipartiteOperator
    hs_rho_sq: float = field(init=False)

    def __post_init__(self):
        rho = self.rho
        if not rho.hermitian:
            raise ValueError("rho must be Hermitian")
        if abs(rho.trace - 1.0) > 1e-12:
            raise ValueError(f"rho has trace {rho.trace!r}, expected 1")
        if min_eigen(rho)[0] < -1e-10:
            raise ValueError("rho is not positive semidefinite")
        if rho.max_abs_diff(self.rho_star) <= 1e-10:
            raise ValueError("rho coincides with the maximally mixed state")
        object.__setattr__(self, "hs_rho_sq", hs_inner(rho, rho))
        if self.spread <= 0:
            raise ValueError("degenerate family")

    @classmethod
    def pure(cls, spectrum: SchmidtSpectrum) -> OneParamFamily:
        return cls(spectrum.state())

    @classmethod
    def projection(cls, basis: np.ndarray, dims: Dims) -> OneParamFamily:
        """Family through rho_E = P_E / d; ``basis`` holds a spanning set of E as columns."""
        Q, _ = np.linalg.qr(np.asarray(basis, dtype=complex))
        P = Q @ Q.conj().T
        return cls(BipartiteOperator(dims, P / Q.shape[1]))

    @property
    def dims(self) -> Dims:
        return self.rho.dims

    @property
    def rho_star(self) -> BipartiteOperator:
        return BipartiteOperator.maximally_mixed(self.dims)

    @property
    def spread(self) -> float:
        """||rho||_HS^2 - 1/mn, the slope of the pairing identity."""
        return self.hs_rho_sq - 1.0 / self.dims.total

    @property
    def direction(self) -> BipartiteOperator:
        return self.rho - self.rho_star


def state_at(f: OneParamFamily, lam: float) -> BipartiteOperator:
    return (1 - lam) * f.rho_star + lam * f.rho


def pairing(f: OneParamFamily, nu: float, lam: float) -> float:
    """<X_nu | X_lam> in closed form."""
    return f.spread * nu * lam + 1.0 / f.dims.total


def orthogonal_partner(f: OneParamFamily, nu: float) -> float:
    """The unique mu with <X_nu | X_mu> = 0."""
    if nu == 0:
        raise ValueError("X_0 pairs to 1/mn with every member; no orthogonal partner")
    return -1.0 / (f.dims.total * f.spread * nu)


def _check_in_affine_space(f: OneParamFamily, X: BipartiteOperator) -> None:
    if X.dims != f.dims:
        raise ValueError(f"dimension mismatch: {X.dims} vs {f.dims}")
    if abs(X.trace - 1.0) > TRACE_TOL:
        raise ValueError(f"trace {X.trace!r} is not 1")


def perpendicularity_residual(f: OneParamFamily, nu: float, X: BipartiteOperator, lam: float | None = None) -> float:
    """<X - X_nu | rho - rho_*>.

    Vanishes exactly when X lies on the hyperplane through X_nu perpendicular
    to the family, i.e. on the level set of X -> <X | X_lam> through X_nu for
    any nonzero ``lam`` (the value of ``lam`` does not enter).
    """
    if lam is not None and lam == 0:
        raise ValueError("lam must be nonzero")
    return hs_inner(X - state_at(f, nu), f.direction)


def hyperplane_side(f: OneParamFamily, nu: float, X: BipartiteOperator, tol: float = ZERO_SIDE_TOL) -> HyperplaneSide:
    _check_in_affine_space(f, X)
    r = perpendicularity_residual(f, nu, X)
    if abs(r) <= tol:
        return HyperplaneSide.ZERO
    return HyperplaneSide.PLUS if r > 0 else HyperplaneSide.MINUS
