"""``diffal`` command line: ``generate``, ``al`` and ``plot``.

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 training
divergence (or a failed matrix cell; completed results are kept).
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from .config import SolverConfig, load_config
from .constants import DEFAULT_PROFILE, PROFILES
from .exceptions import (
    CorruptRoundRecord, DatasetFormatError, RunLocked, ScenarioError, SolverNonConvergence, TrainingDivergence,
)
from .orchestrator import ActiveLearningRunner, expand_matrix, resume, run_active_learning, run_matrix
from .report import error_maps, param_histograms, plot_learning_curves, quarterly_table, read_metrics
from .storage import load_checkpoint, load_dataset
from .types import PhysicsConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_DIVERGENCE = 4

def _csv_list(value: str, cast=str) -> list:
    return [cast(v.strip()) for v in value.split(",") if v.strip()]

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diffal", description="Active learning for diffusion-solver surrogates.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="Generate, split and save a dataset")
    gen.add_argument("--out", required=True, help="Dataset container directory")
    gen.add_argument("--profile", default=DEFAULT_PROFILE, choices=sorted(PROFILES))
    gen.add_argument("--n", type=int, default=None, help="Number of entries (profile default)")
    gen.add_argument("--size", type=int, default=None, help="Lattice side length (profile default)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--mode", choices=["fixed", "flux"], default="fixed")
    gen.add_argument("--method", choices=["conjugate-gradient", "direct-sparse"], default="conjugate-gradient")
    gen.add_argument("--tolerance", type=float, default=1e-10)
    gen.add_argument("--diffusivity", type=float, default=None)
    gen.add_argument("--decay", type=float, default=None)
    gen.add_argument("--split", default=None, help="train,val,test fractions, e.g. 0.8,0.1,0.1")
    gen.add_argument("--parallelism", type=int, default=1)
    gen.add_argument("--allow-overlap", action="store_true")
    gen.add_argument("--bins", type=int, default=10, help="Bins of the parameter histograms")
    gen.add_argument("--summary-csv", default=None, help="Also write the parameter histograms here")

    al = sub.add_parser("al", help="Run active learning (one run or an arch x strategy x seed matrix)")
    al.add_argument("--out", required=True, help="Run (or matrix) directory")
    al.add_argument("--dataset", default=None)
    al.add_argument("--config", default=None, help="JSON document with ALConfig fields")
    al.add_argument("--profile", default=None, choices=sorted(PROFILES))
    al.add_argument("--arch", default=None, help="unet, cnn or a comma list")
    al.add_argument("--acq", default=None, help="random, entropy, tod, trueloss, diversity or a comma list")
    al.add_argument("--seeds", default=None, help="Comma list of run seeds")
    al.add_argument("--initial", type=int, default=None, help="Initial labeled count")
    al.add_argument("--batch", type=int, default=None, help="Samples acquired per round (B)")
    al.add_argument("--epochs", type=int, default=None)
    al.add_argument("--lr", type=float, default=None)
    al.add_argument("--loss-w", type=float, default=None)
    al.add_argument("--entropy-k", type=int, default=None, help="MC-dropout passes")
    al.add_argument("--max-labeled", type=int, default=None, help="Stop at this labeled-set size")
    al.add_argument("--target-wmae", type=float, default=None, help="Stop once test wmae reaches this")
    al.add_argument("--max-rounds", type=int, default=None, help="Pause after this many rounds")
    al.add_argument("--warm-start", action="store_true")
    al.add_argument("--progress", action="store_true")
    al.add_argument("--resume", action="store_true", help="Continue the run in --out")

    plot = sub.add_parser("plot", help="Learning curves, quarterly tables and error maps")
    plot.add_argument("csvs", nargs="+", help="metrics.csv files")
    plot.add_argument("--out", required=True)
    plot.add_argument("--metric", default="wmae_all")
    plot.add_argument("--linear", action="store_true", help="Linear instead of log y-axis")
    plot.add_argument("--regions", action="store_true", help="Per-region panels")
    plot.add_argument("--quarterly", action="store_true", help="Write quarterly.csv")
    plot.add_argument("--checkpoint", default=None, help="Checkpoint for error maps")
    plot.add_argument("--dataset", default=None, help="Dataset for error maps")
    plot.add_argument("--samples", default=None, help="Dataset indices for error maps (first 3 test entries)")
    return parser

def cmd_generate(args) -> int:
    if args.n is not None and args.n < 1:
        raise ValueError(f"--n must be at least 1, got {args.n}")
    physics = PhysicsConfig(**{k: v for k, v in (("D", args.diffusivity), ("gamma", args.decay)) if v is not None})
    solver = SolverConfig(mode=args.mode, method=args.method, tolerance=args.tolerance)
    fractions = _csv_list(args.split, float) if args.split else None
    ds = ActiveLearningRunner(args.profile).generate(
        args.out, n=args.n, size=args.size, seed=args.seed, physics=physics, solver=solver,
        fractions=fractions, parallelism=args.parallelism, allow_overlap=args.allow_overlap,
    )
    table = param_histograms(ds, bins=args.bins)
    print(f"{ds.n} entries, {ds.size}x{ds.size}, splits {ds.split_counts()}, "
          f"max residual {float(ds.residuals.max()):.3e}")
    print(table.to_string(index=False))
    if args.summary_csv:
        table.to_csv(args.summary_csv, index=False, lineterminator="\n")
    return EXIT_OK

def _overrides(args) -> dict:
    overrides = {}
    flat = {
        "dataset": args.dataset,
        "profile": args.profile,
        "initial_labeled": args.initial,
        "round_batch": args.batch,
        "mc_passes": args.entropy_k,
    }
    overrides.update({k: v for k, v in flat.items() if v is not None})
    train = {
        "epochs": args.epochs,
        "learning_rate": args.lr,
        "loss_w": args.loss_w,
        "warm_start": args.warm_start or None,
        "progress": args.progress or None,
    }
    train = {k: v for k, v in train.items() if v is not None}
    if train:
        overrides["train"] = train
    if args.max_labeled is not None:
        overrides["stop"] = {"kind": "max-labeled", "max_labeled": args.max_labeled}
    elif args.target_wmae is not None:
        overrides["stop"] = {"kind": "target-metric", "target_wmae": args.target_wmae}
    return overrides

def cmd_al(args) -> int:
    if args.resume:
        state = resume(args.out, max_rounds=args.max_rounds)
        print(f"round {state.round}, {len(state.labeled)} labeled, finished={state.finished}")
        return EXIT_OK

    archs = _csv_list(args.arch) if args.arch else []
    strategies = _csv_list(args.acq) if args.acq else []
    seeds = _csv_list(args.seeds, int) if args.seeds else []
    overrides = _overrides(args)
    single = len(archs) <= 1 and len(strategies) <= 1 and len(seeds) <= 1
    if single:
        # unsupported combinations are rejected here; a matrix skips them instead
        for key, values in (("arch", archs), ("strategy", strategies), ("seed", seeds)):
            if values:
                overrides[key] = values[0]
    cfg = load_config(args.config, overrides)

    if single:
        state = run_active_learning(cfg, args.out, max_rounds=args.max_rounds)
        print(f"{len(state.history)} rounds, {len(state.labeled)} labeled; metrics in {Path(args.out) / 'metrics.csv'}")
        return EXIT_OK

    # an explicit model spec applies to the cells of its own architecture
    models = {cfg.arch: cfg.model} if cfg.model is not None else None
    cfgs = expand_matrix(cfg, archs or [cfg.arch], strategies or [cfg.strategy], seeds or [cfg.seed], models)
    if not cfgs:
        raise ValueError("No supported cell in the requested matrix")
    result = run_matrix(cfgs, args.out)
    for cell in result.cells:
        print(f"{cell.arch:5s} {cell.strategy:9s} seed {cell.seed}: {'ok' if cell.status else cell.error}")
    return EXIT_OK if all(cell.status for cell in result.cells) else EXIT_DIVERGENCE

def cmd_plot(args) -> int:
    out = Path(args.out)
    written = plot_learning_curves(args.csvs, out, metric=args.metric, log_y=not args.linear, regions=args.regions)
    if args.quarterly:
        table = quarterly_table(read_metrics(args.csvs))
        table.to_csv(out / "quarterly.csv", index=False, float_format="%.17g", lineterminator="\n")
        written.append(out / "quarterly.csv")
    if args.checkpoint:
        if not args.dataset:
            raise ValueError("--checkpoint needs --dataset")
        _, model = load_checkpoint(args.checkpoint)
        ds = load_dataset(args.dataset)
        indices = _csv_list(args.samples, int) if args.samples else ds.split_indices("test")[:3]
        written += error_maps(model, ds, np.asarray(indices), out)
    for path in written:
        print(path)
    return EXIT_OK

COMMANDS = {"generate": cmd_generate, "al": cmd_al, "plot": cmd_plot}

def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except SolverNonConvergence as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except TrainingDivergence as e:
        logger.error("%s (completed rounds are kept; use --resume)", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ValidationError, ValueError, ScenarioError, DatasetFormatError,
            CorruptRoundRecord, RunLocked, FileExistsError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

if __name__ == "__main__":
    sys.exit(main())
