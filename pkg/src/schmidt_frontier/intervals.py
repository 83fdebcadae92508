"""Membership intervals gamma^-[C] <= lam <= gamma^+[C] along a family and the
perpendicular supporting-hyperplane parameters obtained from them by duality.

For a compact convex C with the maximally mixed state inside, the hyperplane
through X_nu perpendicular to the family supports the dual set exactly when
<X_nu | X_{gamma^-+[C]}> = 0, so tilde^+-[C dual] = orthogonal_partner(gamma^-+[C]).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .decompositions import delta_minus, sigma_plus
from .family import OneParamFamily, orthogonal_partner, pairing, state_at
from .oracles import (
    MembershipVerdict,
    SeeSawConfig,
    Status,
    Strategy,
    is_blockpositive_k,
    is_density,
    separability_oracle,
)
from .tensor import BipartiteOperator, Dims, PureStateVector, SchmidtSpectrum, hermitian_eigen, partial_transpose, schmidt_decompose

SPECTRAL_ZERO = 1e-12
BRACKET_CAP = 1e3
EXACT_TOL = 1e-11
SEESAW_TOL = 1e-6

THEOREM_COLUMNS = (
    "beta_tilde_minus",
    "beta_minus",
    "sigma_minus",
    "sigma_tilde_minus",
    "sigma_plus",
    "sigma_tilde_plus",
    "beta_plus",
    "beta_tilde_plus",
)


class Transform(enum.Enum):
    IDENTITY = "identity"
    PARTIAL_TRANSPOSE = "partial-transpose"


class Direction(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


class Method(str, enum.Enum):
    SPECTRAL = "spectral"
    BISECTION = "bisection"
    CLOSED_FORM = "closed-form"
    DUALITY = "duality"
    CERTIFIED = "spectral+certificate"
    UNRESOLVED = "unresolved"


class UnresolvedEndpoint(RuntimeError):
    def __init__(self, lam: float, verdict: MembershipVerdict):
        super().__init__(f"oracle returned {verdict.status.value} at lambda={lam!r}")
        self.lam = lam
        self.verdict = verdict


class ChainViolation(AssertionError):
    pass


# Spectral and numeric endpoints -----------------------------------------------


def spectral_interval(f: OneParamFamily, transform: Transform = Transform.IDENTITY) -> tuple[float, float]:
    """PSD interval of T(X_lam); T fixes rho_*, so eigenvalues are 1/mn + lam h_i."""
    rho = f.rho if transform is Transform.IDENTITY else partial_transpose(f.rho)
    h, _ = hermitian_eigen(rho - f.rho_star)
    if np.all(np.abs(h) <= SPECTRAL_ZERO):
        raise ValueError("transformed rho coincides with rho_*")
    base = 1.0 / f.dims.total
    neg, pos = h[h < -SPECTRAL_ZERO], h[h > SPECTRAL_ZERO]
    plus = float(np.min(base / -neg)) if neg.size else math.inf
    minus = -float(np.min(base / pos)) if pos.size else -math.inf
    return minus, plus


Oracle = Callable[[BipartiteOperator], MembershipVerdict]


def bisect_endpoint(
    f: OneParamFamily,
    oracle: Oracle,
    direction: Direction,
    bracket: tuple[float, float],
    tol: float,
) -> float:
    """Locate the crossing between an In point and an Out point of a convex body."""
    inside, outside = bracket
    if (outside - inside) * (1 if Direction(direction) is Direction.PLUS else -1) <= 0:
        raise ValueError(f"bracket {bracket} does not point in direction {direction}")
    for lam, want in ((inside, Status.IN), (outside, Status.OUT)):
        v = oracle(state_at(f, lam))
        if v.status is Status.UNKNOWN:
            raise UnresolvedEndpoint(lam, v)
        if v.status is not want:
            raise ValueError(f"invalid bracket: oracle says {v.status.value} at {lam!r}")
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        v = oracle(state_at(f, mid))
        if v.status is Status.UNKNOWN:
            raise UnresolvedEndpoint(mid, v)
        if v.is_in:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def seed_bracket(f: OneParamFamily, oracle: Oracle, start: float, inside: float = 0.0) -> tuple[float, float]:
    """Walk lam = start, 2 start, 4 start, ... until the oracle says Out."""
    lam = start
    while abs(lam) <= BRACKET_CAP:
        v = oracle(state_at(f, lam))
        if v.status is Status.UNKNOWN:
            raise UnresolvedEndpoint(lam, v)
        if v.is_out:
            return inside, lam
        inside, lam = lam, 2 * lam
    raise ValueError(f"no Out point found up to |lambda| = {BRACKET_CAP:g}")


def tilde_endpoint(f: OneParamFamily, opposite_gamma: float) -> float:
    return orthogonal_partner(f, opposite_gamma)


# Closed forms -----------------------------------------------------------------


@dataclass(frozen=True)
class PureFamilyClosedForms:
    n: int
    spectrum: SchmidtSpectrum
    beta_tilde_minus: float
    beta_minus: float
    delta_minus: float
    sigma_plus: float
    sigma_tilde_plus: float
    delta_plus: float = 1.0

    @property
    def sigma_minus(self) -> float:
        return self.delta_minus

    @property
    def sigma_tilde_minus(self) -> float:
        return self.delta_minus

    @property
    def beta_plus(self) -> float:
        return self.delta_plus

    @property
    def beta_tilde_plus(self) -> float:
        return self.delta_plus

    def row(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in THEOREM_COLUMNS)


def closed_forms_pure(n: int, spectrum: SchmidtSpectrum) -> PureFamilyClosedForms:
    """Endpoints for the family through a pure state with Schmidt coefficients p."""
    if n < 2 or spectrum.n != n:
        raise ValueError(f"need a spectrum of length n >= 2, got n={n}, len={spectrum.n}")
    p0, p1 = spectrum.p[0], spectrum.p[1]
    N = n * n
    cf = PureFamilyClosedForms(
        n=n,
        spectrum=spectrum,
        beta_tilde_minus=-(N * p0 * p1 + 1) / (N - 1),
        beta_minus=-1 / (N * p0**2 - 1),
        delta_minus=delta_minus(n),
        sigma_plus=sigma_plus(spectrum),
        sigma_tilde_plus=(N * p0**2 - 1) / (N - 1),
    )
    r = cf.row()
    if not all(a <= b + 1e-12 for a, b in zip(r[:2], r[1:3])) or not (r[2] < 0 < r[4] <= r[5] + 1e-12 <= 1 + 2e-12):
        raise ChainViolation(f"closed forms out of order: {r}")
    for a, b in ((cf.beta_tilde_minus, cf.sigma_plus), (cf.beta_minus, cf.sigma_tilde_plus)):
        if abs(a * b + 1 / (N - 1)) > 1e-12:
            raise ChainViolation(f"duality product {a * b!r} != {-1 / (N - 1)!r}")
    return cf


def closed_form_projection(d: int, m: int, n: int) -> tuple[float, float, float, float]:
    """(delta^-, delta^+, tilde delta^-, tilde delta^+) for the family through P_E / d."""
    if not 1 <= d < m * n:
        raise ValueError(f"subspace dimension {d} outside [1, {m * n - 1}]")
    lo = -d / (m * n - d)
    return lo, 1.0, lo, 1.0


def closed_form_diag2qubit(p: float) -> tuple[float, float]:
    """(beta_1^-, tilde sigma_1^-) for rho = p|00><00| + (1-p)|01><01|, 1/2 < p < 1."""
    if not 0.5 < p < 1.0:
        raise ValueError(f"p={p!r} outside (1/2, 1)")
    beta = -1 / (4 * p - 1)
    sigma_tilde = -1 / (8 * p * p - 8 * p + 3)
    if not sigma_tilde < beta:
        raise ChainViolation(f"expected tilde sigma < beta, got {sigma_tilde} >= {beta}")
    return beta, sigma_tilde


def diag2qubit_family(p: float) -> OneParamFamily:
    rho = np.diag([p, 1 - p, 0.0, 0.0])
    return OneParamFamily(BipartiteOperator(Dims(2, 2), rho))


def pure_spectrum(f: OneParamFamily) -> SchmidtSpectrum | None:
    """Schmidt coefficients of rho when rho is a pure state on n (x) n."""
    if f.dims.m != f.dims.n or abs(f.hs_rho_sq - 1.0) > 1e-10:
        return None
    w, V = hermitian_eigen(f.rho)
    c, _, _ = schmidt_decompose(PureStateVector.normalized(f.dims, V[:, 0]))
    return SchmidtSpectrum.from_amplitudes(c)


# Reports ------------------------------------------------------------------------


@dataclass
class IntervalReport:
    """gamma^+-[C] for one body C, with tilde^+-[C] (the perpendicular supporting hyperplanes of C)."""

    cone: str
    gamma_minus: float
    gamma_plus: float
    tilde_minus: float = math.nan
    tilde_plus: float = math.nan
    methods: dict[str, str] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)

    def check(self) -> None:
        g_lo, g_hi = self.gamma_minus, self.gamma_plus
        if not math.isnan(g_lo) and not g_lo < 0:
            raise ChainViolation(f"{self.cone}: gamma^- = {g_lo} is not negative")
        if not math.isnan(g_hi) and not g_hi > 0:
            raise ChainViolation(f"{self.cone}: gamma^+ = {g_hi} is not positive")
        _le(self.tilde_minus, g_lo, self._slack("tilde_minus", "gamma_minus"), f"{self.cone} tilde^- <= gamma^-")
        _le(g_hi, self.tilde_plus, self._slack("gamma_plus", "tilde_plus"), f"{self.cone} gamma^+ <= tilde^+")

    def _slack(self, *names: str) -> float:
        return 1e-12 + sum(self.tolerances.get(n, 0.0) for n in names)

    def to_json(self) -> dict:
        return {
            "cone": self.cone,
            "gamma_minus": _num(self.gamma_minus),
            "gamma_plus": _num(self.gamma_plus),
            "tilde_minus": _num(self.tilde_minus),
            "tilde_plus": _num(self.tilde_plus),
            "methods": dict(sorted(self.methods.items())),
            "tolerances": dict(sorted(self.tolerances.items())),
        }


def _num(x: float):
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _le(a: float, b: float, slack: float, what: str) -> None:
    if math.isnan(a) or math.isnan(b):
        return
    if a > b + slack:
        raise ChainViolation(f"{what} violated: {a!r} > {b!r} (slack {slack:.1e})")


@dataclass
class FamilyReport:
    k: int
    dims: Dims
    intervals: dict[str, IntervalReport]

    @property
    def schmidt(self) -> IntervalReport:
        return self.intervals[f"S_{self.k}"]

    @property
    def blockpositive(self) -> IntervalReport:
        return self.intervals[f"BP_{self.k}"]

    def chain(self) -> list[float]:
        s, b = self.schmidt, self.blockpositive
        return [b.tilde_minus, b.gamma_minus, s.gamma_minus, s.gamma_plus, b.gamma_plus, b.tilde_plus]

    def check_chain(self) -> None:
        s, b = self.schmidt, self.blockpositive
        tol = {**{f"b.{k}": v for k, v in b.tolerances.items()}, **{f"s.{k}": v for k, v in s.tolerances.items()}}
        names = ["b.tilde_minus", "b.gamma_minus", "s.gamma_minus", None, "s.gamma_plus", "b.gamma_plus", "b.tilde_plus"]
        values = [b.tilde_minus, b.gamma_minus, s.gamma_minus, 0.0, s.gamma_plus, b.gamma_plus, b.tilde_plus]
        for (na, a), (nb, bb) in zip(zip(names, values), zip(names[1:], values[1:])):
            _le(a, bb, 1e-12 + tol.get(na, 0.0) + tol.get(nb, 0.0), f"chain {na or '0'} <= {nb or '0'}")
        for r in self.intervals.values():
            r.check()

    def theorem_row(self) -> tuple[float, ...]:
        s, b = self.intervals["S_1"], self.intervals["BP_1"]
        return (
            b.tilde_minus,
            b.gamma_minus,
            s.gamma_minus,
            s.tilde_minus,
            s.gamma_plus,
            s.tilde_plus,
            b.gamma_plus,
            b.tilde_plus,
        )

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "m": self.dims.m,
            "n": self.dims.n,
            "intervals": {name: r.to_json() for name, r in self.intervals.items()},
        }


def _dual_tolerance(f: OneParamFamily, gamma: float, tol: float) -> float:
    # |d partner / d gamma| = |partner(gamma) / gamma|
    if math.isnan(gamma) or tol == 0.0:
        return 0.0
    return abs(orthogonal_partner(f, gamma) / gamma) * tol * 1.01


def _fill_tildes(f: OneParamFamily, report: IntervalReport, dual: IntervalReport) -> None:
    """tilde^+-[C] from gamma^-+[C dual]."""
    for name, opposite, key in (("tilde_minus", dual.gamma_plus, "gamma_plus"), ("tilde_plus", dual.gamma_minus, "gamma_minus")):
        if math.isnan(opposite) or math.isinf(opposite):
            setattr(report, name, math.nan)
            report.methods[name] = Method.UNRESOLVED.value
            continue
        setattr(report, name, tilde_endpoint(f, opposite))
        report.methods[name] = Method.DUALITY.value
        report.tolerances[name] = _dual_tolerance(f, opposite, dual.tolerances.get(key, 0.0))


def _state_or_out(oracle: Oracle) -> Oracle:
    def wrapped(X: BipartiteOperator) -> MembershipVerdict:
        d = is_density(X)
        return d if d.is_out else oracle(X)

    return wrapped


def _bisect_interval(f: OneParamFamily, oracle: Oracle, start: tuple[float, float], tol: float) -> tuple[float, float]:
    ends = []
    for direction, s in zip((Direction.MINUS, Direction.PLUS), start):
        bracket = seed_bracket(f, oracle, s)
        ends.append(bisect_endpoint(f, oracle, direction, bracket, tol))
    return ends[0], ends[1]


def full_report(
    f: OneParamFamily,
    k: int = 1,
    cfg: SeeSawConfig = SeeSawConfig(),
    prefer_closed_form: bool = False,
    seesaw_tol: float = SEESAW_TOL,
    exact_tol: float = EXACT_TOL,
) -> FamilyReport:
    """Intervals for D, PPT, S_1, S_k and BP_k along the family, checked against the ordering chain."""
    dims = f.dims
    if not 1 <= k <= dims.min:
        raise ValueError(f"k={k} outside [1, {dims.min}]")
    spectrum = pure_spectrum(f)
    closed = closed_forms_pure(spectrum.n, spectrum) if prefer_closed_form and spectrum is not None else None

    lo, hi = spectral_interval(f)
    D = IntervalReport("D", lo, hi, methods={"gamma_minus": "spectral", "gamma_plus": "spectral"})
    _fill_tildes(f, D, D)

    glo, ghi = spectral_interval(f, Transform.PARTIAL_TRANSPOSE)
    ppt = IntervalReport("PPT", max(lo, glo), min(hi, ghi), methods={"gamma_minus": "spectral", "gamma_plus": "spectral"})
    ppt.methods.update(tilde_minus=Method.UNRESOLVED.value, tilde_plus=Method.UNRESOLVED.value)

    intervals = {"D": D, "PPT": ppt}
    s1 = _schmidt_one(f, ppt, closed, exact_tol)
    intervals["S_1"] = s1
    if k == 1:
        sk = s1
    elif k == dims.min:
        sk = IntervalReport(f"S_{k}", lo, hi, methods={"gamma_minus": "spectral", "gamma_plus": "spectral"})
    else:
        sk = IntervalReport(f"S_{k}", math.nan, math.nan, methods={"gamma_minus": "unresolved", "gamma_plus": "unresolved"})
    intervals[f"S_{k}"] = sk

    if k == dims.min:
        bk = IntervalReport(f"BP_{k}", lo, hi, methods={"gamma_minus": "spectral", "gamma_plus": "spectral"})
    elif closed is not None and k == 1:
        bk = IntervalReport(
            "BP_1", closed.beta_minus, closed.beta_plus, methods={"gamma_minus": "closed-form", "gamma_plus": "closed-form"}
        )
    else:
        oracle = lambda X: is_blockpositive_k(X, k, cfg)  # noqa: E731
        b_lo, b_hi = _bisect_interval(f, oracle, (lo, hi), seesaw_tol)
        bk = IntervalReport(
            f"BP_{k}",
            b_lo,
            b_hi,
            methods={"gamma_minus": "bisection", "gamma_plus": "bisection"},
            tolerances={"gamma_minus": seesaw_tol, "gamma_plus": seesaw_tol},
        )
    intervals[f"BP_{k}"] = bk
    _fill_tildes(f, bk, sk)
    _fill_tildes(f, sk, bk)
    if k != 1:
        # S_1 tildes pair with BP_1, which is only assembled for k = 1
        for name in ("tilde_minus", "tilde_plus"):
            s1.methods.setdefault(name, Method.UNRESOLVED.value)
    report = FamilyReport(k, dims, intervals)
    report.check_chain()
    return report


def _schmidt_one(f: OneParamFamily, ppt: IntervalReport, closed: PureFamilyClosedForms | None, tol: float) -> IntervalReport:
    if closed is not None:
        return IntervalReport(
            "S_1", closed.sigma_minus, closed.sigma_plus, methods={"gamma_minus": "closed-form", "gamma_plus": "closed-form"}
        )
    if f.dims.total <= 6:
        oracle = _state_or_out(lambda X: separability_oracle(X, Strategy.LOW_DIM))
        lo, hi = _bisect_interval(f, oracle, (ppt.gamma_minus, ppt.gamma_plus), tol)
        return IntervalReport(
            "S_1", lo, hi, methods={"gamma_minus": "bisection", "gamma_plus": "bisection"}, tolerances={"gamma_minus": tol, "gamma_plus": tol}
        )
    # separable <= PPT, so a certificate at a PPT endpoint pins the separable endpoint
    ends, methods = [], {}
    for name, lam in (("gamma_minus", ppt.gamma_minus), ("gamma_plus", ppt.gamma_plus)):
        v = separability_oracle(state_at(f, lam), Strategy.CERTIFICATE)
        if v.is_in:
            ends.append(lam)
            methods[name] = Method.CERTIFIED.value
        else:
            ends.append(math.nan)
            methods[name] = Method.UNRESOLVED.value
    return IntervalReport("S_1", ends[0], ends[1], methods=methods)


def numeric_theorem_row(spectrum: SchmidtSpectrum, cfg: SeeSawConfig = SeeSawConfig(), seesaw_tol: float = SEESAW_TOL) -> tuple[float, ...]:
    report = full_report(OneParamFamily.pure(spectrum), 1, cfg, seesaw_tol=seesaw_tol)
    return report.theorem_row()


def partial_transpose_itemization(f: OneParamFamily, cfg: SeeSawConfig = SeeSawConfig()) -> dict[str, tuple[float, float]]:
    """Intervals of lam for which X_lam^Gamma is a state, is PPT, is separable.

    Partial transposition maps separable states onto separable states, so the
    last interval is the separable interval of X_lam itself.
    """
    report = full_report(f, 1, cfg, prefer_closed_form=pure_spectrum(f) is not None)
    lo, hi = spectral_interval(f, Transform.PARTIAL_TRANSPOSE)
    ppt = report.intervals["PPT"]
    s1 = report.intervals["S_1"]
    return {
        "state": (lo, hi),
        "ppt": (ppt.gamma_minus, ppt.gamma_plus),
        "separable": (s1.gamma_minus, s1.gamma_plus),
    }
