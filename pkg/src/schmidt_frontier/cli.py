"""Command-line entry point: ``schmidt-frontier <subcommand> ...``.

Exit codes: 0 success, 1 verification or tolerance failure, 2 unresolved
endpoint, 64 usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import decompositions as dec
from .family import OneParamFamily, orthogonal_partner, pairing, state_at
from .intervals import (
    THEOREM_COLUMNS,
    UnresolvedEndpoint,
    closed_form_diag2qubit,
    closed_form_projection,
    closed_forms_pure,
    diag2qubit_family,
    full_report,
    partial_transpose_itemization,
    pure_spectrum,
)
from .oracles import SeeSawConfig, min_schmidt_k_expectation
from .serialize import (
    decomposition_from_json,
    decomposition_to_json,
    dump,
    load,
    operator_from_json,
    operator_to_json,
)
from .tensor import BipartiteOperator, Dims, SchmidtSpectrum

EXIT_OK, EXIT_FAIL, EXIT_UNRESOLVED, EXIT_USAGE = 0, 1, 2, 64
SPECTRUM_SUM_TOL = 1e-6
SEESAW_BACKED = {"beta_minus", "beta_plus", "sigma_tilde_minus", "sigma_tilde_plus"}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    m: int | None = None
    spectrum: SchmidtSpectrum | None = None
    k: int = 1
    seed: int = 0
    restarts: int = 64
    tol: float = 1e-3
    fmt: str = "json"
    out: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def seesaw(self) -> SeeSawConfig:
        return SeeSawConfig(restarts=self.restarts, seed=self.seed)


def parse_spectrum(text: str, raw: bool = False) -> SchmidtSpectrum:
    """Comma-separated squared coefficients (or amplitudes with ``raw``); fractions allowed."""
    try:
        values = [float(Fraction(s.strip())) for s in text.split(",") if s.strip()]
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"cannot parse spectrum {text!r}: {e}") from None
    if len(values) < 2:
        raise UsageError("spectrum needs at least two coefficients")
    squares = np.array(values) ** 2 if raw else np.array(values)
    if np.any(squares < 0):
        raise UsageError("squared Schmidt coefficients must be nonnegative")
    total = float(squares.sum())
    if abs(total - 1.0) > SPECTRUM_SUM_TOL:
        raise UsageError(f"squared Schmidt coefficients sum to {total:.12g}, expected 1")
    return SchmidtSpectrum.from_squares(squares)


def _emit(cfg: RunConfig, payload: dict, csv_rows: list[list] | None = None, text: str | None = None) -> None:
    if cfg.fmt == "json":
        out = dump(payload, cfg.out)
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in csv_rows or []:
            w.writerow(row)
        out = buf.getvalue().rstrip("\n")
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(out + "\n")
    else:
        out = text if text is not None else dump(payload, None)
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(out + "\n")
    if not cfg.out:
        print(out)


def _fmt(x) -> str:
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


# Subcommands -------------------------------------------------------------------


def cmd_theorem_table(cfg: RunConfig) -> int:
    sp = cfg.spectrum
    closed = closed_forms_pure(sp.n, sp).row()
    try:
        report = full_report(OneParamFamily.pure(sp), 1, cfg.seesaw)
    except UnresolvedEndpoint as e:
        print(f"unresolved endpoint: {e}", file=sys.stderr)
        return EXIT_UNRESOLVED
    numeric = report.theorem_row()
    if any(math.isnan(x) for x in numeric):
        print("unresolved endpoint in numeric pipeline", file=sys.stderr)
        return EXIT_UNRESOLVED
    discrepancy = max(abs(a - b) for a, b in zip(closed, numeric))
    label = ",".join(f"{x * x:.12g}" for x in sp.p)
    payload = {
        "spectrum_squared": [x * x for x in sp.p],
        "columns": list(THEOREM_COLUMNS),
        "closed_form": list(closed),
        "numeric": list(numeric),
        "max_discrepancy": discrepancy,
        "tolerance": cfg.tol,
    }
    rows = [["source", "spectrum_squared", *THEOREM_COLUMNS], ["closed-form", label, *map(_fmt, closed)], ["numeric", label, *map(_fmt, numeric)]]
    text = "\n".join(
        [f"{'':12s}" + " ".join(f"{c:>18s}" for c in THEOREM_COLUMNS)]
        + [f"{name:12s}" + " ".join(f"{x:18.12f}" for x in row) for name, row in (("closed-form", closed), ("numeric", numeric))]
        + [f"max discrepancy {discrepancy:.3e} (tolerance {cfg.tol:g})"]
    )
    _emit(cfg, payload, rows, text)
    return EXIT_OK if discrepancy <= cfg.tol else EXIT_FAIL


def _family_from_cfg(cfg: RunConfig) -> tuple[OneParamFamily, str, dict]:
    x = cfg.extra
    if x.get("projection_d") is not None:
        m, n = cfg.m or cfg.n or 2, cfg.n or cfg.m or 2
        d = x["projection_d"]
        closed = closed_form_projection(d, m, n)
        basis = np.eye(m * n)[:, :d]
        return OneParamFamily.projection(basis, Dims(m, n)), "projection", dict(
            zip(("delta_minus", "delta_plus", "delta_tilde_minus", "delta_tilde_plus"), closed)
        )
    if x.get("diag2qubit") is not None:
        p = x["diag2qubit"]
        beta, sigma_tilde = closed_form_diag2qubit(p)
        return diag2qubit_family(p), "diag2qubit", {"beta_minus": beta, "sigma_tilde_minus": sigma_tilde}
    if x.get("input") is not None:
        rho = operator_from_json(load(x["input"]))
        return OneParamFamily(rho), "input", {}
    if cfg.spectrum is not None:
        sp = cfg.spectrum
        closed = dict(zip(THEOREM_COLUMNS, closed_forms_pure(sp.n, sp).row()))
        if np.allclose(sp.array, sp.array[0]):
            return OneParamFamily.pure(sp), "isotropic", closed
        return OneParamFamily.pure(sp), "pure", closed
    raise UsageError("specify a family: --spectrum, --projection-d, --diag2qubit or --input")


def cmd_intervals(cfg: RunConfig) -> int:
    f, kind, closed = _family_from_cfg(cfg)
    try:
        report = full_report(f, cfg.k, cfg.seesaw)
    except UnresolvedEndpoint as e:
        print(f"unresolved endpoint: {e}", file=sys.stderr)
        return EXIT_UNRESOLVED
    payload = {"family": kind, "report": report.to_json(), "closed_form": closed}
    lines = [f"family: {kind}  dims: {f.dims.m}x{f.dims.n}  k={cfg.k}"]
    for name, r in report.intervals.items():
        lines.append(
            f"{name:6s} gamma- {_fmt(r.gamma_minus):>22s}  gamma+ {_fmt(r.gamma_plus):>22s}  "
            f"tilde- {_fmt(r.tilde_minus):>22s}  tilde+ {_fmt(r.tilde_plus):>22s}"
        )
    for key, val in closed.items():
        lines.append(f"closed form {key} = {val!r}")
    if cfg.extra.get("gamma"):
        items = partial_transpose_itemization(f, cfg.seesaw)
        payload["partial_transpose"] = {k: list(v) for k, v in items.items()}
        sp = pure_spectrum(f)
        werner = sp is not None and np.allclose(sp.array, sp.array[0])
        payload["werner"] = werner
        if werner:
            lines.append("Werner family: partial transposes of the isotropic line")
        for key, (lo, hi) in items.items():
            lines.append(f"X^Gamma {key:9s} for {lo!r} <= lambda <= {hi!r}")
    rows = None
    if cfg.k == 1:
        rows = [["family", *THEOREM_COLUMNS], [kind, *map(_fmt, report.theorem_row())]]
    elif cfg.fmt == "csv":
        raise UsageError("csv output is defined for k = 1 reports only")
    _emit(cfg, payload, rows, "\n".join(lines))
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    target = cfg.extra.get("target")
    sp = cfg.spectrum
    if sp is None:
        raise UsageError("certify needs --spectrum")
    if target in ("sigma-plus", "delta-minus"):
        build = dec.decompose_sigma_plus if target == "sigma-plus" else dec.decompose_delta_minus
        try:
            d = build(sp)
        except dec.DecompositionError as e:
            print(f"verification failed: {e}", file=sys.stderr)
            return EXIT_FAIL
        payload = decomposition_to_json(d)
        check = dec.verify_decomposition(decomposition_from_json(payload))
        summary = {"terms": len(d), "residual": check.residual, "min_remainder": check.min_remainder, "all_rank_one": check.all_rank_one}
        if not check.passed:
            print(f"round-trip verification failed: {summary}", file=sys.stderr)
            return EXIT_FAIL
        text = f"{target}: {len(d)} product terms, residual {check.residual:.3e}, min remainder {check.min_remainder:.3e}"
        rows = [["target", "terms", "residual", "min_remainder"], [target, len(d), check.residual, check.min_remainder]]
        if cfg.fmt == "json":
            payload = {**payload, "verification": summary}
        _emit(cfg, payload, rows, text)
        return EXIT_OK
    if target == "beta-witness":
        try:
            terms, D = dec.beta_witness_decomposition(sp)
        except dec.DecompositionError as e:
            print(f"verification failed: {e}", file=sys.stderr)
            return EXIT_FAIL
        n = sp.n
        f = OneParamFamily.pure(sp)
        lhs = (n * n * sp.p[0] ** 2 - 1) * state_at(f, closed_forms_pure(n, sp).beta_minus).entries
        residual = float(np.max(np.abs(lhs - sum(t.entries for t in terms) - np.diag(D))))
        pairs = [(i, j) for i in range(n) for j in range(i)]
        payload = {
            "terms": [{"pair": list(p), "matrix": operator_to_json(t)} for p, t in zip(pairs, terms)],
            "diagonal": [float(x) for x in D],
            "residual": residual,
        }
        text = "D = " + " ".join(f"{x:.12g}" for x in D) + f"\nresidual {residual:.3e}"
        rows = [["slot", "D"], *[[i, float(x)] for i, x in enumerate(D)]]
        _emit(cfg, payload, rows, text)
        return EXIT_OK if residual <= 1e-10 and D.min() >= -1e-12 else EXIT_FAIL
    raise UsageError("--target must be sigma-plus, delta-minus or beta-witness")


def cmd_witness(cfg: RunConfig) -> int:
    sp = cfg.spectrum
    if sp is None:
        raise UsageError("witness needs --spectrum")
    i, j = cfg.extra.get("pair") or (1, 0)
    if not (0 <= j < i < sp.n):
        raise UsageError(f"pair ({i}, {j}) must satisfy 0 <= j < i < n")
    if sp.p[i] * sp.p[j] == 0:
        raise UsageError(f"p_{i} p_{j} = 0: witness undefined")
    b = dec.witness_bundle(sp, i, j)
    m1, _ = min_schmidt_k_expectation(b.witness, 1, cfg.seesaw)
    m2, _ = min_schmidt_k_expectation(b.witness, 2, cfg.seesaw)
    payload = {
        "pair": [i, j],
        "nu": b.nu,
        "hyperplane_residual": b.hyperplane_residual,
        "margin_k1": m1,
        "margin_k2": m2,
        "witness": operator_to_json(b.witness),
    }
    text = f"pair ({i},{j}): nu = {b.nu!r}\nhyperplane residual {b.hyperplane_residual:.3e}\nmin over k=1: {m1!r}\nmin over k=2: {m2!r}"
    rows = [["i", "j", "nu", "residual", "margin_k1", "margin_k2"], [i, j, b.nu, b.hyperplane_residual, m1, m2]]
    _emit(cfg, payload, rows, text)
    return EXIT_OK


def cmd_pairing(cfg: RunConfig) -> int:
    f, kind, _ = _family_from_cfg(cfg)
    nu, lam = cfg.extra.get("nu"), cfg.extra.get("lam")
    if nu is None:
        raise UsageError("pairing needs --nu")
    payload = {"family": kind, "nu": nu}
    if lam is not None:
        payload["lam"] = lam
        payload["pairing"] = pairing(f, nu, lam)
    payload["partner"] = orthogonal_partner(f, nu) if nu != 0 else None
    text = "\n".join(f"{k} = {v!r}" for k, v in payload.items())
    rows = [list(payload), list(payload.values())]
    _emit(cfg, payload, rows, text)
    return EXIT_OK


COMMANDS = {
    "theorem-table": cmd_theorem_table,
    "intervals": cmd_intervals,
    "certify": cmd_certify,
    "witness": cmd_witness,
    "pairing": cmd_pairing,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--spectrum", help="squared Schmidt coefficients, comma separated (fractions allowed)")
    common.add_argument("--raw", action="store_true", help="--spectrum lists amplitudes instead of squares")
    common.add_argument("--k", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=64)
    common.add_argument("--tol", type=float, default=1e-3)
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out")

    parser = argparse.ArgumentParser(prog="schmidt-frontier", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("theorem-table", parents=[common])
    p = sub.add_parser("intervals", parents=[common])
    p.add_argument("--projection-d", type=int)
    p.add_argument("--diag2qubit", type=float)
    p.add_argument("--input", help="JSON matrix file holding the state rho")
    p.add_argument("--gamma", action="store_true", help="add the partial-transpose itemization")
    p = sub.add_parser("certify", parents=[common])
    p.add_argument("--target", choices=("sigma-plus", "delta-minus", "beta-witness"), required=True)
    p = sub.add_parser("witness", parents=[common])
    p.add_argument("--pair", help="i,j with i > j (default 1,0)")
    p = sub.add_parser("pairing", parents=[common])
    p.add_argument("--projection-d", type=int)
    p.add_argument("--diag2qubit", type=float)
    p.add_argument("--input")
    p.add_argument("--nu", type=float)
    p.add_argument("--lam", type=float)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    spectrum = parse_spectrum(args.spectrum, args.raw) if args.spectrum else None
    if spectrum is not None and args.n is not None and args.n != spectrum.n:
        raise UsageError(f"--n {args.n} does not match a spectrum of length {spectrum.n}")
    if args.restarts < 1:
        raise UsageError("--restarts must be positive")
    extra = {
        key: getattr(args, key)
        for key in ("projection_d", "diag2qubit", "input", "gamma", "target", "nu", "lam")
        if hasattr(args, key)
    }
    if getattr(args, "pair", None):
        try:
            extra["pair"] = tuple(int(s) for s in args.pair.split(","))
        except ValueError:
            raise UsageError(f"cannot parse --pair {args.pair!r}") from None
        if len(extra["pair"]) != 2:
            raise UsageError("--pair needs two indices")
    return RunConfig(
        command=args.command,
        n=args.n,
        m=args.m,
        spectrum=spectrum,
        k=args.k,
        seed=args.seed,
        restarts=args.restarts,
        tol=args.tol,
        fmt=args.fmt,
        out=args.out,
        extra=extra,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        cfg = config_from_args(args)
        if cfg.command == "theorem-table" and cfg.spectrum is None:
            raise UsageError("theorem-table needs --spectrum")
        return COMMANDS[cfg.command](cfg)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
