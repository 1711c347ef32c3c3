"""Command-line front end.

Subcommands:

* ``verify``             — run the check suite, write the report JSON.
* ``analyze``            — two-arm posterior summary from CSV data.
* ``sample``             — posterior / process CDF draws to JSON.
* ``bootstrap-compare``  — KS distance between bootstrap flavors.

Exit codes: 0 success, 1 check or threshold failure, 2 usage or data
error. All randomness flows from ``--seed`` (default 1729); outputs are
byte-identical across runs and worker counts
(``DP_INVARIANCE_THREADS``).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .dirichlet import DirichletParams, sample as dirichlet_sample
from .errors import DPInvarianceError
from .inference import TwoArmData, analyze_two_arm, bootstrap_equivalence, parse_functional
from .process import (
    DPParams,
    GaussianCDF,
    UniformCDF,
    empirical_cdf,
    sample_stick_breaking,
)
from .simplex import ProbVector
from .verify import DEFAULT_SEED, CheckConfig, negative_control_report, run_all

_STICK_TRUNCATION_TOL = 1e-8


class CliDataError(Exception):
    """Malformed input file or flag combination (exit code 2)."""


def _read_csv(path: str, want_arm: bool = False):
    """Read a CSV with a 'value' header column; optionally split by 'arm'."""
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            fields = reader.fieldnames or []
            if "value" not in fields:
                raise CliDataError(f"{path}: need a 'value' header column")
            has_arm = "arm" in fields
            values: list[float] = []
            arms: list[str] = []
            for line_no, row in enumerate(reader, start=2):
                raw = (row.get("value") or "").strip()
                try:
                    values.append(float(raw))
                except ValueError:
                    raise CliDataError(f"{path}:{line_no}: bad value {raw!r}") from None
                if has_arm:
                    arm = (row.get("arm") or "").strip().upper()
                    if arm not in ("A", "B"):
                        raise CliDataError(f"{path}:{line_no}: arm must be A or B, got {arm!r}")
                    arms.append(arm)
    except OSError as exc:
        raise CliDataError(f"cannot read {path}: {exc}") from exc
    if not values:
        raise CliDataError(f"{path}: no data rows")
    data = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(data)):
        raise CliDataError(f"{path}: values must be finite")
    if want_arm:
        return data, (arms if has_arm else None)
    return data


def _write_json(path: str, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _cmd_verify(args: argparse.Namespace) -> int:
    raw: dict = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot load config: {exc}", file=sys.stderr)
            return 2
    if args.seed is not None:
        raw["seed"] = args.seed
    raw.setdefault("seed", DEFAULT_SEED)
    try:
        cfg = CheckConfig.from_dict(raw)
    except (TypeError, ValueError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 2
    report = negative_control_report(cfg) if args.negative_control else run_all(cfg)
    _write_json(args.out, report.to_json_dict(include_timings=False))
    for result in report.results:
        status = "PASS" if (result.passed and result.control_flagged) else "FAIL"
        if args.negative_control:
            status = "PASS" if result.passed else "FAIL"
        print(f"check {result.name}: {status} (worst={result.worst_stat:.3g})")
    print(f"overall: {'PASS' if report.overall_pass else 'FAIL'}")
    for name, seconds in report.timings.items():
        print(f"timing {name}: {seconds:.3f}s", file=sys.stderr)
    return 0 if report.overall_pass else 1


def _cmd_analyze(args: argparse.Namespace) -> int:
    if args.b:
        control = _read_csv(args.a)
        treatment = _read_csv(args.b)
    else:
        values, arms = _read_csv(args.a, want_arm=True)
        if arms is None:
            raise CliDataError("single-file input needs an 'arm' column (A=control, B=treatment)")
        mask = np.array([a == "A" for a in arms])
        control, treatment = values[mask], values[~mask]
        if control.size == 0 or treatment.size == 0:
            raise CliDataError("both arms A and B need rows")
    functional = parse_functional(args.functional)
    summary = analyze_two_arm(
        TwoArmData(control=control, treatment=treatment),
        functional,
        draws=args.draws,
        level=args.level,
        rng_seed=args.seed,
    )
    _write_json(args.out, summary.to_json_dict())
    print(
        f"difference ({summary.functional}): {summary.point_estimate:.6g} "
        f"[{summary.interval_lo:.6g}, {summary.interval_hi:.6g}] at level {summary.level} "
        f"(draws={summary.draws_used}, seed={summary.seed})"
    )
    return 0


def _parse_base(spec: str):
    kind, _, rest = spec.partition(":")
    parts = rest.split(",") if rest else []
    try:
        if kind == "uniform" and len(parts) == 2:
            return UniformCDF(float(parts[0]), float(parts[1]))
        if kind == "gaussian" and len(parts) == 2:
            return GaussianCDF(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise CliDataError(f"bad base spec {spec!r}: {exc}") from None
    raise CliDataError(f"bad base spec {spec!r}; expected uniform:<lo>,<hi> or gaussian:<mu>,<sigma>")


def _cmd_sample(args: argparse.Namespace) -> int:
    if bool(args.data) == bool(args.base):
        raise CliDataError("exactly one of --data/--base is required")
    draws_out = []
    if args.data:
        data = _read_csv(args.data)
        ecdf = empirical_cdf(data)
        alpha = float(args.alpha) if args.alpha is not None else float(data.size)
        params = DirichletParams(alpha, ProbVector(ecdf.masses)) if ecdf.masses.size >= 2 else None
        if params is None:
            raise CliDataError("need at least two distinct values to sample weights")
        weights = dirichlet_sample(params, args.seed, args.draws)
        model = {
            "kind": "posterior_on_atoms",
            "alpha": alpha,
            "n_obs": int(data.size),
            "atoms": ecdf.atoms.tolist(),
        }
        for row in weights.points:
            draws_out.append(
                {"atoms": ecdf.atoms.tolist(), "weights": row.tolist(), "truncation_mass": 0.0}
            )
        extra = {"clamp_count": weights.clamp_count}
    else:
        if args.alpha is None:
            raise CliDataError("--base requires --alpha")
        params = DPParams(float(args.alpha), _parse_base(args.base))
        model = {"kind": "stick_breaking", "alpha": float(args.alpha), "base": args.base}
        for d in range(args.draws):
            draw = sample_stick_breaking(params, _STICK_TRUNCATION_TOL, args.seed, path=(d,))
            draws_out.append(
                {
                    "atoms": draw.atoms.tolist(),
                    "weights": draw.weights.tolist(),
                    "truncation_mass": draw.truncation_mass,
                }
            )
        extra = {"truncation_tol": _STICK_TRUNCATION_TOL}
    doc = {
        "schema_version": 1,
        "kind": "cdf_draws",
        "model": model,
        "seed": args.seed,
        "n_draws": args.draws,
        "draws": draws_out,
        **extra,
    }
    _write_json(args.out, doc)
    print(f"wrote {args.draws} draws to {args.out}")
    return 0


def _cmd_bootstrap_compare(args: argparse.Namespace) -> int:
    data = _read_csv(args.data)
    functional = parse_functional(args.functional)
    result = bootstrap_equivalence(
        data, functional, draws=args.draws, rng_seed=args.seed, threshold=args.threshold
    )
    status = "PASS" if result.passed else "FAIL"
    print(
        f"ks_distance={result.ks_distance:.6g} threshold={result.threshold:.6g} "
        f"(draws={result.draws}, n={result.n_obs}) {status}"
    )
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dp-invariance",
        description="Invariance checks and posterior resampling for simplex priors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the check suite and write a report")
    p_verify.add_argument("--config", help="JSON file of CheckConfig overrides")
    p_verify.add_argument("--out", required=True, help="report output path")
    p_verify.add_argument("--seed", type=int, default=None, help=f"root seed (default {DEFAULT_SEED})")
    p_verify.add_argument(
        "--negative-control",
        action="store_true",
        help="run the falsified variants as the primary checks (expected exit 1)",
    )
    p_verify.set_defaults(func=_cmd_verify)

    p_analyze = sub.add_parser("analyze", help="two-arm posterior summary")
    p_analyze.add_argument("--a", required=True, help="control CSV (or combined CSV with an arm column)")
    p_analyze.add_argument("--b", help="treatment CSV")
    p_analyze.add_argument("--functional", default="mean", help="mean|quantile:<q>|cdf:<t>")
    p_analyze.add_argument("--draws", type=int, default=4000)
    p_analyze.add_argument("--level", type=float, default=0.95)
    p_analyze.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_analyze.add_argument("--out", required=True)
    p_analyze.set_defaults(func=_cmd_analyze)

    p_sample = sub.add_parser("sample", help="draw CDFs from a posterior or a process")
    p_sample.add_argument("--data", help="CSV of observations (posterior on its atoms)")
    p_sample.add_argument("--base", help="uniform:<lo>,<hi> or gaussian:<mu>,<sigma>")
    p_sample.add_argument("--alpha", type=float, default=None, help="concentration (default: n for --data)")
    p_sample.add_argument("--draws", type=int, default=100)
    p_sample.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sample.add_argument("--out", required=True)
    p_sample.set_defaults(func=_cmd_sample)

    p_compare = sub.add_parser("bootstrap-compare", help="posterior vs classical bootstrap KS")
    p_compare.add_argument("--data", required=True)
    p_compare.add_argument("--functional", default="mean")
    p_compare.add_argument("--draws", type=int, default=5000)
    p_compare.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_compare.add_argument("--threshold", type=float, default=0.05)
    p_compare.set_defaults(func=_cmd_bootstrap_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (CliDataError, DPInvarianceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
