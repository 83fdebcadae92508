import math

import numpy as np
import pytest

from schmidt_frontier.family import OneParamFamily, pairing, state_at
from schmidt_frontier.intervals import (
    THEOREM_COLUMNS,
    ChainViolation,
    Direction,
    IntervalReport,
    Transform,
    UnresolvedEndpoint,
    bisect_endpoint,
    closed_form_diag2qubit,
    closed_form_projection,
    closed_forms_pure,
    diag2qubit_family,
    full_report,
    numeric_theorem_row,
    partial_transpose_itemization,
    pure_spectrum,
    seed_bracket,
    spectral_interval,
    tilde_endpoint,
)
from schmidt_frontier.oracles import SeeSawConfig, Strategy, is_density, is_ppt, separability_oracle
from schmidt_frontier.tensor import BipartiteOperator, Dims, SchmidtSpectrum

CFG = SeeSawConfig(restarts=16)
SP2 = SchmidtSpectrum.from_squares([0.8, 0.2])
SP3 = SchmidtSpectrum.from_squares([0.5, 0.3, 0.2])


def test_spectral_interval_pure():
    for n, sp in ((2, SP2), (3, SP3)):
        f = OneParamFamily.pure(sp)
        lo, hi = spectral_interval(f)
        assert lo == pytest.approx(-1 / (n * n - 1), abs=1e-12)
        assert hi == pytest.approx(1, abs=1e-12)


def test_spectral_interval_partial_transpose():
    f = OneParamFamily.pure(SP2)
    lo, hi = spectral_interval(f, Transform.PARTIAL_TRANSPOSE)
    assert hi == pytest.approx(1 / 2.6, abs=1e-12)
    assert lo == pytest.approx(-1 / 2.2, abs=1e-12)


def test_spectral_interval_rejects_scalar():
    f = OneParamFamily.pure(SchmidtSpectrum.isotropic(2))
    # rho_* is not on the family line, but a transform that sends rho to rho_* is
    with pytest.raises(ValueError):
        spectral_interval(OneParamFamily(BipartiteOperator.maximally_mixed(Dims(2, 2))))
    assert spectral_interval(f)[1] == pytest.approx(1)


def test_spectral_matches_bisection(rng):
    f = OneParamFamily.pure(SchmidtSpectrum.random(3, rng))
    lo, hi = spectral_interval(f)
    b_hi = bisect_endpoint(f, is_density, Direction.PLUS, (0.0, 1.5), 1e-12)
    b_lo = bisect_endpoint(f, is_density, Direction.MINUS, (0.0, -1.5), 1e-12)
    # the oracle accepts eigenvalues down to -PSD_TOL, which shifts the crossing slightly
    assert b_hi == pytest.approx(hi, abs=1e-8)
    assert b_lo == pytest.approx(lo, abs=1e-8)


def test_bisect_ppt_endpoint():
    f = OneParamFamily.pure(SP2)
    lam = bisect_endpoint(f, is_ppt, Direction.PLUS, (0.0, 1.0), 1e-10)
    assert lam == pytest.approx(1 / 2.6, abs=1e-9)


def test_bisect_rejects_bad_brackets():
    f = OneParamFamily.pure(SP2)
    with pytest.raises(ValueError):
        bisect_endpoint(f, is_ppt, Direction.PLUS, (0.0, -1.0), 1e-6)
    with pytest.raises(ValueError):
        bisect_endpoint(f, is_ppt, Direction.PLUS, (0.1, 0.2), 1e-6)


def test_bisect_unknown_raises():
    f = OneParamFamily.pure(SP3)
    oracle = lambda X: separability_oracle(X, Strategy.LOW_DIM)  # noqa: E731
    with pytest.raises(UnresolvedEndpoint) as info:
        bisect_endpoint(f, oracle, Direction.PLUS, (0.0, 0.9), 1e-6)
    assert info.value.lam == 0.0


def test_seed_bracket_doubles():
    f = OneParamFamily.pure(SP2)
    assert seed_bracket(f, is_density, 0.3) == (0.6, 1.2)
    assert seed_bracket(f, is_density, -0.1) == (-0.2, -0.4)


def test_tilde_endpoint_examples():
    f = OneParamFamily.pure(SP2)
    sp = 1 / 2.6
    t = tilde_endpoint(f, sp)
    assert t == pytest.approx(-(4 * math.sqrt(0.16) + 1) / 3, abs=1e-12)
    assert abs(pairing(f, t, sp)) < 1e-14
    assert tilde_endpoint(f, 1.0) == pytest.approx(-1 / 3, abs=1e-14)


def test_closed_forms_n2():
    cf = closed_forms_pure(2, SP2)
    assert cf.row() == pytest.approx((-0.8666666666666667, -1 / 2.2, -1 / 3, -1 / 3, 1 / 2.6, 2.2 / 3, 1, 1), abs=1e-14)


def test_closed_forms_n3_frozen():
    cf = closed_forms_pure(3, SP3)
    assert cf.beta_tilde_minus == pytest.approx(-0.560710626448334, abs=1e-14)
    assert cf.beta_minus == pytest.approx(-2 / 7, abs=1e-14)
    assert cf.sigma_plus == pytest.approx(0.222931391173693, abs=1e-14)
    assert cf.sigma_tilde_plus == pytest.approx(0.4375, abs=1e-14)
    assert cf.sigma_minus == cf.sigma_tilde_minus == pytest.approx(-1 / 8)


def test_closed_forms_edge_spectra():
    prod = closed_forms_pure(3, SchmidtSpectrum.product(3))
    assert prod.beta_minus == pytest.approx(-1 / 8)
    assert prod.sigma_plus == pytest.approx(1.0)
    iso = closed_forms_pure(4, SchmidtSpectrum.isotropic(4))
    assert iso.beta_minus == pytest.approx(-1 / 3)
    assert iso.sigma_plus == pytest.approx(1 / 5)
    with pytest.raises(ValueError):
        closed_forms_pure(3, SP2)


def test_closed_form_projection():
    assert closed_form_projection(2, 2, 3) == (-0.5, 1.0, -0.5, 1.0)
    with pytest.raises(ValueError):
        closed_form_projection(6, 2, 3)


def test_closed_form_diag2qubit_frozen():
    expected = {0.6: (-0.714285714285714, -0.925925925925926), 0.75: (-0.5, -2 / 3), 0.9: (-0.384615384615385, -0.438596491228070)}
    for p, (b, s) in expected.items():
        assert closed_form_diag2qubit(p) == pytest.approx((b, s), abs=1e-12)
    with pytest.raises(ValueError):
        closed_form_diag2qubit(0.5)


def test_diag2qubit_perpendicularity():
    for p in (0.6, 0.75, 0.9):
        f = diag2qubit_family(p)
        _, s = closed_form_diag2qubit(p)
        diff = BipartiteOperator.projector(np.eye(4)[3], Dims(2, 2)) - state_at(f, s)
        assert abs(np.vdot(diff.entries, f.rho.entries)) < 1e-12


def test_pure_spectrum_roundtrip(rng):
    sp = SchmidtSpectrum.random(4, rng)
    got = pure_spectrum(OneParamFamily.pure(sp))
    assert got.array == pytest.approx(sp.array, abs=1e-12)
    assert pure_spectrum(diag2qubit_family(0.7)) is None


def test_interval_report_check():
    IntervalReport("C", -0.5, 0.5, -0.6, 0.6).check()
    with pytest.raises(ChainViolation):
        IntervalReport("C", 0.1, 0.5).check()
    with pytest.raises(ChainViolation):
        IntervalReport("C", -0.5, 0.5, -0.4, 0.6).check()
    IntervalReport("C", -0.5, 0.5, -0.4999, 0.6, tolerances={"tilde_minus": 1e-3}).check()


def test_full_report_n2():
    rep = full_report(OneParamFamily.pure(SP2), 1, CFG)
    expected = closed_forms_pure(2, SP2).row()
    row = rep.theorem_row()
    for name, got, want in zip(THEOREM_COLUMNS, row, expected):
        assert got == pytest.approx(want, abs=1e-3), name
    s1 = rep.intervals["S_1"]
    assert s1.methods["gamma_plus"] == "bisection"
    rep.check_chain()


def test_full_report_closed_form_and_json():
    rep = full_report(OneParamFamily.pure(SP3), 1, CFG, prefer_closed_form=True)
    assert rep.theorem_row() == pytest.approx(closed_forms_pure(3, SP3).row(), abs=1e-12)
    js = rep.to_json()
    assert js["m"] == js["n"] == 3 and set(js["intervals"]) == {"D", "PPT", "S_1", "BP_1"}


def test_full_report_top_k():
    rep = full_report(OneParamFamily.pure(SP3), 3, CFG)
    bp = rep.blockpositive
    assert (bp.gamma_minus, bp.gamma_plus) == pytest.approx((-1 / 8, 1.0), abs=1e-12)
    assert rep.schmidt.methods["gamma_minus"] == "spectral"
    assert rep.intervals["S_1"].methods["tilde_minus"] == "unresolved"


def test_full_report_middle_k_unresolved():
    sp = SchmidtSpectrum.from_squares([0.4, 0.3, 0.2, 0.1])
    rep = full_report(OneParamFamily.pure(sp), 2, SeeSawConfig(restarts=8))
    assert math.isnan(rep.schmidt.gamma_minus)
    assert rep.blockpositive.gamma_minus < -1 / 15


def test_full_report_projection(rng):
    f = OneParamFamily.projection(np.eye(6)[:, :2], Dims(2, 3))
    rep = full_report(f, 1, CFG)
    assert rep.intervals["D"].gamma_minus == pytest.approx(-0.5, abs=1e-12)
    assert rep.intervals["S_1"].gamma_minus == pytest.approx(-0.5, abs=1e-6)


def test_full_report_bad_k():
    with pytest.raises(ValueError):
        full_report(OneParamFamily.pure(SP2), 3)


def test_chain_holds_on_random_families(rng):
    for n in (2, 3):
        rep = full_report(OneParamFamily.pure(SchmidtSpectrum.random(n, rng)), 1, CFG)
        rep.check_chain()
        chain = rep.chain()
        assert all(a <= b + 1e-5 for a, b in zip(chain, chain[1:]))


def test_numeric_row_matches_closed_form(rng):
    sp = SchmidtSpectrum.random(3, rng)
    row = numeric_theorem_row(sp, CFG)
    assert row == pytest.approx(closed_forms_pure(3, sp).row(), abs=1e-3)


def test_partial_transpose_itemization():
    items = partial_transpose_itemization(OneParamFamily.pure(SP2), CFG)
    assert items["state"] == pytest.approx((-1 / 2.2, 1 / 2.6), abs=1e-12)
    assert items["ppt"] == pytest.approx((-1 / 3, 1 / 2.6), abs=1e-12)
    assert items["separable"] == pytest.approx((-1 / 3, 1 / 2.6), abs=1e-12)
