"""Intervals along isotropic lines and their partial transposes (Werner lines).

For each n the script prints the state, PPT and separable ranges of lambda
for X_lambda^Gamma, and the eight endpoints of the isotropic line itself.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

from schmidt_frontier import OneParamFamily, SchmidtSpectrum, SeeSawConfig
from schmidt_frontier.intervals import THEOREM_COLUMNS, closed_forms_pure, partial_transpose_itemization


@dataclass(frozen=True)
class WernerConfig:
    sizes: tuple[int, ...] = (2, 3, 4, 5)
    restarts: int = 16


def run(cfg: WernerConfig) -> list[dict]:
    out = []
    for n in cfg.sizes:
        sp = SchmidtSpectrum.isotropic(n)
        items = partial_transpose_itemization(OneParamFamily.pure(sp), SeeSawConfig(restarts=cfg.restarts))
        out.append(
            {
                "n": n,
                "isotropic": dict(zip(THEOREM_COLUMNS, closed_forms_pure(n, sp).row())),
                "werner": {k: list(v) for k, v in items.items()},
            }
        )
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=list(WernerConfig.sizes))
    ap.add_argument("--restarts", type=int, default=WernerConfig.restarts)
    a = ap.parse_args(argv)
    cfg = WernerConfig(tuple(a.sizes), a.restarts)
    print(json.dumps({"config": asdict(cfg), "results": run(cfg)}, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
