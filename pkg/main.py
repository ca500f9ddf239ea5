# main.py
"""
Command-line front end.

    python main.py sample --n 8 --alpha 1 --count 10 --seed 0
    python main.py bounds theorem3
    python main.py verify --alpha-mode inverse_n_squared --n 4 16 64
    python main.py reproduce-figure --config experiment.cfg --out results/
    python main.py check-proofs

Exit codes: 0 success, 1 verification failure, 2 usage or precondition error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from bounds import THEOREM3_CLAIM, BoundResult, helper_bound, theorem1_bound, theorem2_bound, theorem3_bound
from config import DEFAULT_MASTER_SEED, LOG_LEVEL, NUMERIC_SLACK, OUTPUT_DIR, WORKERS, load_config_file
from errors import ConvergenceError, DirsparseError, DomainError, TrialError
from experiments import ALPHA_MODES, BoundVerdict, ExperimentConfig, check_proofs, reproduce_figure, run_trials, verify_experiment
from reports import write_curves, write_proof_report, write_samples, write_trials, write_verdicts
from samplers import DirichletSpec, StreamSeed, derive_stream, sample_dirichlet_log_batch

logger = logging.getLogger("dirsparse")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

BOUND_CHOICES = ("helper", "theorem1", "theorem2", "theorem3")


class CliConfig(BaseModel):
    """Options shared by every subcommand after flags and config file are merged."""
    model_config = ConfigDict(frozen=True)

    subcommand: Literal["sample", "bounds", "verify", "reproduce-figure", "check-proofs"]
    config_path: Optional[Path] = None
    master_seed: int = Field(default=DEFAULT_MASTER_SEED, ge=0, lt=2 ** 64)
    output_dir: Path = Path(OUTPUT_DIR)
    format: Literal["csv", "json"] = "csv"


# ==================== ARGUMENTS ====================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=None,
        help=f"Logging level (default: {LOG_LEVEL})",
    )
    common.add_argument("--workers", type=int, default=None, help=f"Worker threads (default: {WORKERS})")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--seed", type=int, default=None, help="Master seed (default: 0)")
    output.add_argument("--out", default=None, help=f"Output directory (default: {OUTPUT_DIR})")
    output.add_argument("--format", choices=["csv", "json"], default=None)

    experiment = argparse.ArgumentParser(add_help=False)
    experiment.add_argument("--config", default=None, help="Flat key = value experiment file")
    experiment.add_argument("--n", type=int, nargs="+", default=None, help="Dimension grid")
    experiment.add_argument("--alpha-mode", choices=ALPHA_MODES, default=None)
    experiment.add_argument("--alpha", type=float, default=None, help="Shape for --alpha-mode fixed")
    experiment.add_argument("--trials", type=int, default=None)
    experiment.add_argument("--exponents", type=float, nargs="+", default=None, help="Threshold exponents c (epsilon = n^-c)")

    parser = argparse.ArgumentParser(
        prog="dirsparse",
        description="Sparsity bounds for symmetric Dirichlet draws: samplers, bounds and Monte Carlo checks",
    )
    commands = parser.add_subparsers(dest="subcommand", required=True)

    sample = commands.add_parser("sample", parents=[common, output], help="Write Dirichlet draws in log domain")
    sample.add_argument("--n", type=int, required=True)
    sample.add_argument("--alpha", type=float, required=True)
    sample.add_argument("--count", type=int, default=1)

    bounds = commands.add_parser("bounds", parents=[common], help="Evaluate a closed-form bound")
    bounds.add_argument("which", choices=BOUND_CHOICES)
    bounds.add_argument("--n", type=int, default=None)
    bounds.add_argument("--epsilon", type=float, default=None)
    bounds.add_argument("--alpha", type=float, default=None)
    bounds.add_argument("--k", type=float, default=None)
    bounds.add_argument("--c0", type=float, default=None)
    bounds.add_argument("--c1", type=float, default=None)
    bounds.add_argument("--c2", type=float, default=None)
    bounds.add_argument("--c3", type=float, default=None)
    bounds.add_argument("--ln-g", type=float, default=None, help="theorem3: count ceiling ln g(n)")

    commands.add_parser("verify", parents=[common, output, experiment], help="Test every applicable bound on simulated trials")
    commands.add_parser("reproduce-figure", parents=[common, output, experiment], help="Trials, quantile curves and verdicts")

    proofs = commands.add_parser("check-proofs", parents=[common], help="Numeric checks of the proof steps")
    proofs.add_argument("--seed", type=int, default=None)
    proofs.add_argument("--out", default=None, help="Also write proof_checks.json here")
    proofs.add_argument("--slack", type=float, default=NUMERIC_SLACK, help=argparse.SUPPRESS)

    return parser


def _file_values(args: argparse.Namespace) -> Dict:
    path = getattr(args, "config", None)
    return load_config_file(path) if path else {}


def cli_config(args: argparse.Namespace) -> CliConfig:
    """Merge flags over config-file values; flags win."""
    values = _file_values(args)
    seed = args.seed if getattr(args, "seed", None) is not None else values.get("master_seed", DEFAULT_MASTER_SEED)
    out = getattr(args, "out", None) or values.get("output_dir", OUTPUT_DIR)
    fmt = getattr(args, "format", None) or values.get("format", "csv")
    return CliConfig(
        subcommand=args.subcommand,
        config_path=getattr(args, "config", None),
        master_seed=seed,
        output_dir=Path(out),
        format=fmt,
    )


def experiment_config(args: argparse.Namespace, cli: CliConfig) -> ExperimentConfig:
    values = _file_values(args)
    overrides = {
        "alpha_mode": args.alpha_mode,
        "alpha_value": args.alpha,
        "n_grid": args.n,
        "threshold_exponents": args.exponents,
        "trials": args.trials,
        "workers": args.workers,
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    values.pop("output_dir", None)
    values.pop("format", None)
    values["master_seed"] = cli.master_seed
    return ExperimentConfig(**values)


# ==================== SUBCOMMANDS ====================

def cmd_sample(args: argparse.Namespace) -> int:
    cli = cli_config(args)
    if args.count < 1:
        raise DomainError(f"--count must be >= 1, got {args.count}")
    spec = DirichletSpec(n=args.n, alpha=args.alpha)
    stream = derive_stream(StreamSeed(master=cli.master_seed, index=0))
    points = sample_dirichlet_log_batch(stream, spec, args.count)
    path = write_samples(cli.output_dir, points, cli.format)
    print(f"✓ Wrote {args.count} draws of Dir({spec.alpha}) over n={spec.n} to {path}")
    return EXIT_OK


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name) is None]
    if missing:
        raise DomainError(f"bounds {args.which} requires {', '.join(missing)}")


def _evaluate_bound(args: argparse.Namespace) -> BoundResult:
    if args.which == "helper":
        _need(args, "epsilon", "alpha", "k", "n")
        return helper_bound(args.epsilon, args.alpha, args.k, args.n)
    if args.which == "theorem1":
        _need(args, "n", "c0")
        return theorem1_bound(args.n, args.c0)
    if args.which == "theorem2":
        _need(args, "n", "c1", "c2", "c3")
        return theorem2_bound(args.n, args.c1, args.c2, args.c3)
    # the constant variant does not depend on n; 3 is the smallest admissible dimension
    return theorem3_bound(args.n if args.n is not None else 3, args.ln_g)


def print_bound(result: BoundResult) -> None:
    event = result.event
    print("=" * 70)
    print(f"Bound: {result.name}")
    print("=" * 70)
    print(f"  Event: |{{i : X_i >= {event.epsilon!r}}}| <= {event.k!r}  (n={event.n}, alpha={event.alpha!r})")
    print(f"  First term:  {result.terms.first_term!r}")
    print(f"  Second term: {result.terms.second_term!r}")
    print(f"  Preconditions met: {'true' if result.preconditions_met else 'false'}")
    if result.lower_bound is not None:
        print(f"  Lower bound: {result.lower_bound!r}")
        if result.vacuous:
            print("  ⚠ Bound is negative (vacuous)")
    if result.parent is not None and result.parent.lower_bound is not None:
        mark = "✓" if result.implied_by_parent else "✗"
        print(f"  {mark} Parent {result.parent.name}: {result.parent.lower_bound!r}")


def cmd_bounds(args: argparse.Namespace) -> int:
    result = _evaluate_bound(args)
    print_bound(result)
    if not result.preconditions_met:
        print(f"✗ Preconditions of {result.name} are not met")
        return EXIT_USAGE
    if result.name == "theorem3":
        holds = result.lower_bound >= THEOREM3_CLAIM
        print(f"  ≥ {THEOREM3_CLAIM}: {'true' if holds else 'false'}")
    return EXIT_OK


def print_verdicts(verdicts: List[BoundVerdict]) -> None:
    print("=" * 70)
    print("Bound verdicts")
    print("=" * 70)
    for v in verdicts:
        mark = "✓" if v.passed else "✗"
        notes = []
        if v.rerun:
            notes.append("rerun")
        if not v.resolvable:
            notes.append("exact test")
        suffix = f"  [{', '.join(notes)}]" if notes else ""
        print(
            f"  {mark} {v.bound_name:<10} n={v.event.n:<5} c={v.threshold_exponent!r:<5} "
            f"rate={v.empirical_success_rate:.4f} lower={v.confidence_lower:.4f} "
            f"bound={v.theoretical_lower_bound:.6f}{suffix}"
        )
    failed = sum(1 for v in verdicts if not v.passed)
    print(f"\n{len(verdicts) - failed}/{len(verdicts)} verdicts passed")


def cmd_verify(args: argparse.Namespace) -> int:
    cli = cli_config(args)
    config = experiment_config(args, cli)
    records = run_trials(config)
    verdicts = verify_experiment(config, records)
    write_verdicts(cli.output_dir, verdicts, cli.format)
    print_verdicts(verdicts)
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_FAILED


def cmd_reproduce_figure(args: argparse.Namespace) -> int:
    cli = cli_config(args)
    config = experiment_config(args, cli)
    report = reproduce_figure(config)

    write_trials(cli.output_dir, report.records, cli.format)
    write_curves(cli.output_dir, report.curves, cli.format)
    write_verdicts(cli.output_dir, report.verdicts, cli.format)

    print_verdicts(report.verdicts)
    if report.scaling is not None:
        mark = "✓" if report.scaling.holds else "⚠"
        ratios = ", ".join(f"c={c:g}: {r:.2f}" for c, r in report.scaling.median_ratio_by_exponent.items())
        print(f"{mark} ln(n)-scaled median spread across n ({ratios})")
    if report.single_coordinate is not None:
        mark = "✓" if report.single_coordinate.holds else "⚠"
        print(f"{mark} Median count at n^-2: {report.single_coordinate.median_by_n}")
    return EXIT_OK if report.all_passed else EXIT_FAILED


def cmd_check_proofs(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else DEFAULT_MASTER_SEED
    report = check_proofs(slack=args.slack, seed=seed)

    print("=" * 70)
    print(f"Proof-step checks (slack {report.slack:g})")
    print("=" * 70)
    zero_rows = sum(1 for row in report.blowup.rows if row.violation == 0.0)
    print(f"  {'✓' if report.blowup.holds else '✗'} Gamma blow-up: max violation {report.blowup.max_violation!r} "
          f"over {len(report.blowup.rows)} points ({zero_rows} exact zeros)")
    worst = max(r.max_gap for r in report.thresholds)
    print(f"  {'✓' if all(r.holds for r in report.thresholds) else '✗'} Threshold chain: max gap {worst!r}")
    for r in report.chernoff:
        print(f"  {'✓' if r.holds else '✗'} Chernoff n={r.n} p={r.p:.6g}: exact {r.exact_tail:.4e} <= bound {r.chernoff_bound:.4e}")
    for r in report.decompositions:
        print(f"  {'✓' if r.holds else '✗'} Event split n={r.n} k={r.k:g}: Pr[not A]={r.not_a_rate:.4f}, "
              f"Pr[not B]={r.not_b_rate:.4f}, violations={r.implication_violations}")
    print(f"  {'✓' if report.min_power_weakening_gap >= -report.slack else '✗'} "
          f"Power weakening: min gap {report.min_power_weakening_gap!r}")

    if args.out:
        write_proof_report(args.out, report)
    return EXIT_OK if report.all_within_slack else EXIT_FAILED


HANDLERS = {
    "sample": cmd_sample,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
    "reproduce-figure": cmd_reproduce_figure,
    "check-proofs": cmd_check_proofs,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=(args.log_level or LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return HANDLERS[args.subcommand](args)
    except (ConvergenceError, TrialError) as e:
        logger.error(f"{args.subcommand} failed: {e}")
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_FAILED
    except (DirsparseError, ValueError) as e:
        logger.error(f"Invalid arguments for {args.subcommand}: {e}")
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
