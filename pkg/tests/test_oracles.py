import numpy as np
import pytest

from conftest import product_grid_minimum
from schmidt_frontier.decompositions import decompose_delta_minus, decompose_sigma_plus
from schmidt_frontier.family import OneParamFamily, state_at
from schmidt_frontier.oracles import (
    SeeSawConfig,
    Status,
    Strategy,
    is_blockpositive_k,
    is_density,
    is_ppt,
    min_schmidt_k_expectation,
    schmidt_k_norm,
    schmidt_rank,
    separability_oracle,
)
from schmidt_frontier.tensor import BipartiteOperator, Dims, SchmidtSpectrum, random_hermitian, random_state

CFG = SeeSawConfig(restarts=16)
SP2 = SchmidtSpectrum.from_squares([0.8, 0.2])
SIGMA_PLUS_2 = 1 / 2.6
BETA_MINUS_2 = -1 / 2.2


def flip_witness(n=2, i=1, j=0):
    d = Dims(n, n)
    W = np.zeros((n * n, n * n))
    W[d.index(i, j), d.index(i, j)] = W[d.index(j, i), d.index(j, i)] = 0.5
    W[d.index(i, i), d.index(j, j)] = W[d.index(j, j), d.index(i, i)] = -0.5
    return BipartiteOperator(d, W)


def test_density_verdicts():
    rs = BipartiteOperator.maximally_mixed(Dims(2, 3))
    v = is_density(rs)
    assert v.is_in and v.margin == pytest.approx(1 / 6)
    f = OneParamFamily.pure(SchmidtSpectrum.from_squares([0.5, 0.3, 0.2]))
    out = is_density(state_at(f, 1.01))
    assert out.is_out and out.recheck(state_at(f, 1.01)) < -1e-10
    edge = is_density(state_at(f, -1 / 8))
    assert edge.is_in and abs(edge.margin) < 1e-12


def test_density_rejects_trace():
    with pytest.raises(ValueError):
        is_density(BipartiteOperator.identity(Dims(2, 2)))


def test_ppt_verdicts():
    f = OneParamFamily.pure(SP2)
    X = state_at(f, SIGMA_PLUS_2 + 0.01)
    v = is_ppt(X)
    assert v.is_out and v.certificate.side == "gamma" and v.recheck(X) < -1e-10
    assert is_ppt(state_at(f, SIGMA_PLUS_2)).is_in
    assert is_ppt(BipartiteOperator.maximally_mixed(Dims(3, 3))).is_in
    for d in (decompose_sigma_plus(SP2), decompose_delta_minus(SchmidtSpectrum.from_squares([0.5, 0.3, 0.2]))):
        assert is_ppt(d.target).is_in


def test_seesaw_on_scalar():
    X = BipartiteOperator.maximally_mixed(Dims(2, 3))
    for k in (1, 2):
        value, _ = min_schmidt_k_expectation(X, k, CFG)
        assert value == pytest.approx(1 / 6, abs=1e-12)


def test_seesaw_pure_state_k1():
    rho = SchmidtSpectrum.from_squares([0.5, 0.3, 0.2]).state()
    value, v = min_schmidt_k_expectation(rho, 1, CFG)
    # 0 is a global lower bound for PSD X and |01> attains it
    assert value == pytest.approx(0, abs=1e-12)
    assert np.vdot(np.eye(9)[1], rho.entries @ np.eye(9)[1]).real == 0
    assert schmidt_rank(v) == 1


def test_seesaw_flip_witness():
    W = flip_witness()
    v1, w1 = min_schmidt_k_expectation(W, 1, CFG)
    assert v1 == pytest.approx(product_grid_minimum(W), abs=1e-6)
    assert v1 == pytest.approx(0, abs=1e-10)
    v2, w2 = min_schmidt_k_expectation(W, 2, CFG)
    assert v2 == pytest.approx(-0.5, abs=1e-12)
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert abs(np.vdot(bell, w2.amplitudes)) == pytest.approx(1, abs=1e-10)


def test_seesaw_matches_grid_oracle(rng):
    for _ in range(20):
        X = random_hermitian(Dims(2, 2), rng)
        value, v = min_schmidt_k_expectation(X, 1, CFG)
        assert value == pytest.approx(product_grid_minimum(X), abs=1e-6)
        assert schmidt_rank(v) == 1


def test_seesaw_rank_bound(rng):
    X = random_hermitian(Dims(4, 4), rng)
    for k in (1, 2, 3):
        _, v = min_schmidt_k_expectation(X, k, CFG)
        assert schmidt_rank(v) <= k


def test_seesaw_dominance_in_k(rng):
    for dims in (Dims(3, 3), Dims(3, 4), Dims(4, 4)):
        X = random_hermitian(dims, rng)
        values = [min_schmidt_k_expectation(X, k, CFG)[0] for k in range(1, dims.min + 1)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(np.linalg.eigvalsh(X.entries)[0], abs=1e-10)


def test_seesaw_k_range():
    X = BipartiteOperator.maximally_mixed(Dims(2, 3))
    for k in (0, 3):
        with pytest.raises(ValueError):
            min_schmidt_k_expectation(X, k, CFG)


def test_determinism(rng):
    X = random_hermitian(Dims(3, 3), rng)
    X = X - (X.trace - 1) / 9 * BipartiteOperator.identity(X.dims)
    a = is_blockpositive_k(X, 1, CFG)
    b = is_blockpositive_k(X, 1, CFG)
    assert a.to_json() == b.to_json()
    va, xa = min_schmidt_k_expectation(X, 2, CFG)
    vb, xb = min_schmidt_k_expectation(X, 2, CFG)
    assert va == vb and np.array_equal(xa.amplitudes, xb.amplitudes)


def test_determinism_across_thread_counts(monkeypatch, rng):
    X = random_hermitian(Dims(3, 3), rng)
    monkeypatch.setenv("SCHMIDT_FRONTIER_THREADS", "1")
    single = min_schmidt_k_expectation(X, 1, CFG)
    monkeypatch.setenv("SCHMIDT_FRONTIER_THREADS", "3")
    multi = min_schmidt_k_expectation(X, 1, CFG)
    assert single[0] == multi[0] and np.array_equal(single[1].amplitudes, multi[1].amplitudes)


def test_blockpositive_psd_any_k(rng):
    X = random_state(Dims(3, 3), rng)
    for k in (1, 2, 3):
        v = is_blockpositive_k(X, k, CFG)
        assert v.is_in


def test_blockpositive_at_beta_boundary():
    sp = SchmidtSpectrum.from_squares([0.5, 0.3, 0.2])
    f = OneParamFamily.pure(sp)
    p0 = sp.p[0]
    X = (p0**2 * BipartiteOperator.identity(f.dims) - f.rho) / (9 * p0**2 - 1)
    assert X.max_abs_diff(state_at(f, -1 / (9 * p0**2 - 1))) <= 1e-14
    v = is_blockpositive_k(X, 1, CFG)
    assert v.is_in and abs(v.margin) <= 1e-9
    assert is_blockpositive_k(X, 1, SeeSawConfig(restarts=16, strict=True)).status is Status.UNKNOWN


def test_blockpositive_out_beyond_beta():
    f = OneParamFamily.pure(SP2)
    X = state_at(f, BETA_MINUS_2 - 0.05)
    v = is_blockpositive_k(X, 1, CFG)
    assert v.is_out
    assert v.recheck(X) < -1e-10
    assert schmidt_rank(__import__("schmidt_frontier").PureStateVector(X.dims, v.certificate.vector)) == 1
    assert product_grid_minimum(X) < 0
    inside = state_at(f, BETA_MINUS_2 + 0.05)
    assert is_blockpositive_k(inside, 1, CFG).is_in and product_grid_minimum(inside) > 0


def test_schmidt_norms():
    sp = SchmidtSpectrum.from_squares([0.5, 0.3, 0.2])
    assert schmidt_k_norm(sp.state(), 1, CFG) == pytest.approx(0.5, abs=1e-10)
    assert schmidt_k_norm(sp.state(), 3, CFG) == pytest.approx(1, abs=1e-12)
    diag = BipartiteOperator(Dims(2, 2), np.diag([0.7, 0.3, 0, 0]))
    assert schmidt_k_norm(diag, 1, CFG) == pytest.approx(0.7, abs=1e-10)


def test_separability_certificate_strategy():
    sp = SchmidtSpectrum.from_squares([0.5, 0.3, 0.2])
    f = OneParamFamily.pure(sp)
    mu = 1 / (1 + 9 * sp.p[0] * sp.p[1])
    for lam in (mu, -1 / 8, 0.1):
        v = separability_oracle(state_at(f, lam), Strategy.CERTIFICATE)
        assert v.is_in
    assert separability_oracle(state_at(f, mu + 0.01), Strategy.CERTIFICATE).status is Status.UNKNOWN


def test_separability_certificate_any_schmidt_basis(rng):
    sp = SchmidtSpectrum.from_squares([0.6, 0.3, 0.1])
    U = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
    V = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
    xi = np.kron(U, V) @ sp.vector().amplitudes
    f = OneParamFamily(BipartiteOperator.projector(xi, Dims(3, 3)))
    v = separability_oracle(state_at(f, 0.2), Strategy.CERTIFICATE)
    assert v.is_in


def test_separability_low_dim():
    f = OneParamFamily.pure(SP2)
    X = state_at(f, SIGMA_PLUS_2 + 0.01)
    v = separability_oracle(X, Strategy.LOW_DIM)
    assert v.is_out and v.recheck(X) < 0
    assert separability_oracle(state_at(f, SIGMA_PLUS_2), Strategy.LOW_DIM).is_in
    assert separability_oracle(BipartiteOperator.maximally_mixed(Dims(2, 3)), Strategy.LOW_DIM).is_in
    assert separability_oracle(BipartiteOperator.maximally_mixed(Dims(3, 3)), Strategy.LOW_DIM).status is Status.UNKNOWN


def test_separability_witness_search():
    sp = SchmidtSpectrum.from_squares([0.5, 0.3, 0.2])
    f = OneParamFamily.pure(sp)
    X = state_at(f, 0.5)
    v = separability_oracle(X, Strategy.WITNESS_SEARCH, CFG)
    assert v.is_out and v.recheck(X) < -1e-9
    assert separability_oracle(f.rho_star, Strategy.WITNESS_SEARCH, CFG).status is Status.UNKNOWN


def test_separability_auto():
    assert separability_oracle(BipartiteOperator.maximally_mixed(Dims(3, 3))).is_in
    f = OneParamFamily.pure(SchmidtSpectrum.isotropic(3))
    assert separability_oracle(state_at(f, 0.3)).is_out
    with pytest.raises(ValueError):
        separability_oracle(state_at(f, 1.2))


def test_monotone_nesting(rng):
    ops = []
    for n in (2, 3):
        f = OneParamFamily.pure(SchmidtSpectrum.random(n, rng))
        ops += [state_at(f, lam) for lam in np.linspace(-0.6, 1.1, 9)]
    for X in ops:
        dens = is_density(X)
        if dens.is_out:
            continue
        sep = separability_oracle(X, cfg=CFG)
        if sep.is_in:
            assert is_ppt(X).is_in
        for k in range(1, X.dims.min + 1):
            assert is_blockpositive_k(X, k, CFG).is_in


def test_certificate_soundness_on_out_verdicts(rng):
    for n in (2, 3):
        f = OneParamFamily.pure(SchmidtSpectrum.random(n, rng))
        for lam in np.linspace(-1.5, 1.5, 13):
            X = state_at(f, lam)
            verdicts = [is_density(X), is_ppt(X)] + [is_blockpositive_k(X, k, CFG) for k in range(1, n + 1)]
            for v in verdicts:
                if v.is_out:
                    assert v.recheck(X) < -1e-10
                    assert np.linalg.norm(v.certificate.vector) == pytest.approx(1, abs=1e-12)
