"""Agreement between the see-saw minimum and a brute-force grid on random 2x2 Hermitian matrices."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from conftest import product_grid_minimum  # noqa: E402

from schmidt_frontier import Dims, SeeSawConfig  # noqa: E402
from schmidt_frontier.oracles import min_schmidt_k_expectation  # noqa: E402
from schmidt_frontier.tensor import random_hermitian  # noqa: E402


@dataclass(frozen=True)
class GridConfig:
    samples: int = 50
    seed: int = 7
    restarts: int = 16


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=GridConfig.samples)
    ap.add_argument("--seed", type=int, default=GridConfig.seed)
    ap.add_argument("--restarts", type=int, default=GridConfig.restarts)
    a = ap.parse_args(argv)
    cfg = GridConfig(a.samples, a.seed, a.restarts)
    rng = np.random.default_rng(cfg.seed)
    gaps = []
    for _ in range(cfg.samples):
        X = random_hermitian(Dims(2, 2), rng)
        seesaw, _ = min_schmidt_k_expectation(X, 1, SeeSawConfig(restarts=cfg.restarts))
        gaps.append(seesaw - product_grid_minimum(X))
    gaps = np.array(gaps)
    print(f"{cfg.samples} samples: see-saw minus grid in [{gaps.min():.2e}, {gaps.max():.2e}]")
    return 0 if np.all(np.abs(gaps) <= 1e-6) else 1


if __name__ == "__main__":
    sys.exit(main())
