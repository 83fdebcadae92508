import numpy as np
import pytest

from schmidt_frontier.tensor import BipartiteOperator, Dims


@pytest.fixture
def rng():
    return np.random.default_rng(20251018)


def product_grid_minimum(X: BipartiteOperator, points: int = 24, rounds: int = 12) -> float:
    """Minimum of <a(x)b|X|a(x)b> over 2x2 product vectors by refined 4-angle grid search.

    a = (cos t1, e^{i f1} sin t1), b = (cos t2, e^{i f2} sin t2).  Each round
    re-centres a shrinking grid on the best point so far.
    """
    assert X.dims == Dims(2, 2)
    H = X.entries
    center = np.array([np.pi / 4, np.pi, np.pi / 4, np.pi])
    width = np.array([np.pi / 2, 2 * np.pi, np.pi / 2, 2 * np.pi])
    best = np.inf
    for _ in range(rounds):
        axes = [c + w * np.linspace(-0.5, 0.5, points) for c, w in zip(center, width)]
        t1, f1, t2, f2 = np.meshgrid(*axes, indexing="ij")
        a = np.stack([np.cos(t1), np.exp(1j * f1) * np.sin(t1)], -1)
        b = np.stack([np.cos(t2), np.exp(1j * f2) * np.sin(t2)], -1)
        v = (a[..., :, None] * b[..., None, :]).reshape(*t1.shape, 4)
        vals = np.einsum("...i,ij,...j->...", v.conj(), H, v).real
        idx = np.unravel_index(np.argmin(vals), vals.shape)
        if vals[idx] < best:
            best = float(vals[idx])
            center = np.array([axes[d][idx[d]] for d in range(4)])
        width = width * 4 / points
    return best


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
