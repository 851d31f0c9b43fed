"""The active-learning loop, its run directory and the ``ActiveLearningRunner`` facade.

Run directory layout::

    run_manifest.json       resolved configuration, dataset fingerprint, seeds, host
    state.json              latest ALState
    metrics.csv             one row per completed round
    round_000/
        checkpoint.ssck     best-validation model of the round
        train_log.csv       epoch,train_loss,val_loss,wall_s
        metrics.json        test (and optionally val) metrics
        acquired.csv        order,idx of the samples moved to the labeled set
        scores.csv          pool_idx,score,selected (score-based strategies)
        round.json          completion record, written last
"""
import json
import logging
import platform
import shutil
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
import torch
import torch.nn as nn
from pydantic import BaseModel, ConfigDict, ValidationError

from .acquisition import (
    acquire_diversity, acquire_entropy, acquire_random, acquire_tod, acquire_true_loss, scores_table,
)
from .config import ALConfig, ModelSpec, SolverConfig
from .constants import (
    PROFILES, DEFAULT_PROFILE, METRICS_COLUMNS, STREAM_ACQUISITION, STREAM_INITIAL, TOOL_VERSION,
)
from .datagen import Dataset, UNASSIGNED, generate_dataset, split_counts_from_fractions, split_dataset
from .exceptions import CorruptRoundRecord, RunLocked, UnreachableException
from .lattice import compute_region_masks
from .metrics import region_mae
from .models import forward
from .storage import dataset_fingerprint, load_checkpoint, load_dataset, save_checkpoint, save_dataset
from .training import TrainResult, fresh_model, train_round
from .types import ALState, AcquisitionResult, CellResult, MetricsReport, PhysicsConfig, RunManifest
from .utils import derive_seed, rng_stream

logger = logging.getLogger(__name__)

MANIFEST_FILE = "run_manifest.json"
STATE_FILE = "state.json"
METRICS_FILE = "metrics.csv"
LOCK_FILE = ".lock"
ROUND_RECORD = "round.json"
CHECKPOINT_FILE = "checkpoint.ssck"

def round_dir(run_dir: Path, index: int) -> Path:
    return run_dir / f"round_{index:03d}"

@contextmanager
def run_lock(run_dir: Path):
    """Hold the single-writer lock of ``run_dir``.

    Raises:
        RunLocked: If another writer holds the lock
    """
    path = run_dir / LOCK_FILE
    try:
        with open(path, "x") as f:
            f.write("locked\n")
    except FileExistsError as e:
        raise RunLocked(run_dir) from e
    try:
        yield path
    finally:
        path.unlink(missing_ok=True)

def _write_json(path: Path, document: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    tmp.replace(path)

def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")

def resolve_config(cfg: ALConfig, ds: Dataset) -> ALConfig:
    """Materialize every profile default of ``cfg`` against the dataset.

    The model input size follows the dataset; the initial labeled count and
    B follow the profile unless set; training is seeded with the model seed.

    Raises:
        ValueError: If the dataset has no training split or too few samples
    """
    profile = PROFILES[cfg.profile]
    n_train = len(ds.split_indices("train"))
    if n_train < 2:
        raise ValueError(f"Dataset has {n_train} training samples, need at least 2")
    initial = cfg.initial_labeled or min(profile.initial_labeled, n_train - 1)
    if initial >= n_train:
        raise ValueError(f"Initial labeled count {initial} leaves an empty pool of {n_train} training samples")
    round_batch = cfg.round_batch or max(1, (n_train - initial) // profile.round_divisor)
    model = cfg.resolved_model().model_copy(update={"input_size": ds.size})
    train = cfg.train.model_copy(update={"seed": cfg.seeds.model})
    return cfg.model_copy(update={
        "initial_labeled": initial,
        "round_batch": round_batch,
        "model": ModelSpec(**model.model_dump()),
        "train": train,
    })

def initial_labeled_set(ds: Dataset, cfg: ALConfig) -> list[int]:
    """Seeded draw of the initial labeled set from the training split (ascending)."""
    train_ids = ds.split_indices("train")
    rng = rng_stream(cfg.seeds.data, STREAM_INITIAL)
    return sorted(int(i) for i in rng.choice(train_ids, size=cfg.initial_labeled, replace=False))

def check_partition(ds: Dataset, labeled: Sequence[int], pool: Sequence[int]) -> None:
    """Assert that L and U partition the training split and never touch val/test."""
    train_ids = set(int(i) for i in ds.split_indices("train"))
    labeled, pool = set(labeled), set(pool)
    if labeled & pool:
        raise UnreachableException(f"Labeled and pool sets share {sorted(labeled & pool)[:5]}")
    if labeled | pool != train_ids:
        leaked = sorted((labeled | pool) - train_ids)
        raise UnreachableException(f"Labeled/pool sets do not cover the training split exactly (extra {leaked[:5]})")

def evaluate(model: nn.Module, ds: Dataset, split: str, w: float) -> MetricsReport:
    """Region metrics of ``model`` pooled over one split.

    Raises:
        ValueError: If the split is empty
    """
    ids = ds.split_indices(split)
    if len(ids) == 0:
        raise ValueError(f"Split '{split}' is empty")
    inputs, targets = ds.inputs[ids], ds.targets[ids]
    pred = forward(model, inputs)
    return region_mae(pred, targets, compute_region_masks(inputs, targets), w)

def acquire(
    cfg: ALConfig,
    round_index: int,
    ds: Dataset,
    result: TrainResult,
    labeled: Sequence[int],
    pool: Sequence[int],
    b: int,
) -> AcquisitionResult:
    """Run the configured strategy for one round.

    Only training-split indices reach a strategy; the random draw and the
    dropout masks are seeded by ``(acquisition seed, round)``.
    """
    pool = np.asarray(sorted(pool), dtype=np.int64)
    seed = derive_seed(cfg.seeds.acquisition, STREAM_ACQUISITION, round_index)
    match cfg.strategy:
        case "random":
            return acquire_random(pool, b, rng_stream(cfg.seeds.acquisition, STREAM_ACQUISITION, round_index))
        case "entropy":
            return acquire_entropy(result.model, pool, ds.inputs[pool], b, k=cfg.mc_passes, seed=seed)
        case "tod":
            return acquire_tod(result.snapshots, pool, ds.inputs[pool], b)
        case "trueloss":
            return acquire_true_loss(result.model, pool, ds.inputs[pool], ds.targets[pool], b, cfg.train.loss_w)
        case "diversity":
            identifiers = ds.identifiers()
            bounds = (identifiers.min(axis=0), identifiers.max(axis=0))
            labeled = np.asarray(labeled, dtype=np.int64)
            return acquire_diversity(identifiers[labeled], identifiers[pool], b, pool_indices=pool, bounds=bounds)
    raise UnreachableException(f"Unknown strategy {cfg.strategy}")

def _stop(cfg: ALConfig, state: ALState, report: MetricsReport) -> bool:
    if not state.pool:
        return True
    if cfg.stop.kind == "max-labeled":
        return len(state.labeled) >= cfg.stop.max_labeled
    if cfg.stop.kind == "target-metric":
        return report.wmae_all is not None and report.wmae_all <= cfg.stop.target_wmae
    return False

def _metrics_row(cfg: ALConfig, state: ALState, n_train: int, report: MetricsReport,
                 train_wall: float, acq_wall: float) -> dict:
    zero = cfg.train.deterministic
    row = {
        "arch": cfg.arch,
        "strategy": cfg.strategy,
        "seed": cfg.seed,
        "round": state.round,
        "labeled_count": len(state.labeled),
        "labeled_frac": len(state.labeled) / n_train,
        **{k: getattr(report, k) for k in METRICS_COLUMNS if k.startswith(("wmae_", "mae_"))},
        "train_wall_s": 0.0 if zero else train_wall,
        "acq_wall_s": 0.0 if zero else acq_wall,
    }
    return {k: row[k] for k in METRICS_COLUMNS}

def _host() -> dict[str, str]:
    return {
        "python": platform.python_version(),
        "platform": platform.platform(),
        "torch": torch.__version__,
        "numpy": np.__version__,
    }

def _persist_state(run_dir: Path, state: ALState) -> None:
    _write_json(run_dir / STATE_FILE, state.model_dump())
    _write_csv(pd.DataFrame(state.history, columns=METRICS_COLUMNS), run_dir / METRICS_FILE)

def _run_round(cfg: ALConfig, ds: Dataset, run_dir: Path, state: ALState, previous: nn.Module | None) -> nn.Module:
    """Train, evaluate, persist and (unless the stop rule fires) acquire."""
    rdir = round_dir(run_dir, state.round)
    if rdir.exists():
        logger.warning("re-running interrupted round %d", state.round)
        shutil.rmtree(rdir)
    rdir.mkdir(parents=True)
    logger.info("round %d: training on %d labeled samples (%d in pool)",
                state.round, len(state.labeled), len(state.pool))

    val_ids = ds.split_indices("val")
    labeled = np.asarray(state.labeled, dtype=np.int64)
    start = time.perf_counter()
    result = train_round(
        fresh_model(cfg.model, cfg.train, previous),
        ds.inputs[labeled], ds.targets[labeled],
        ds.inputs[val_ids], ds.targets[val_ids],
        cfg.train,
    )
    train_wall = time.perf_counter() - start

    report = evaluate(result.model, ds, "test", cfg.train.loss_w)
    metrics = {"test": report.model_dump()}
    if "val" in cfg.eval_splits and len(val_ids):
        metrics["val"] = evaluate(result.model, ds, "val", cfg.train.loss_w).model_dump()
    checkpoint = save_checkpoint(result.model, cfg.model, rdir / CHECKPOINT_FILE)
    log = result.log.copy()
    if cfg.train.deterministic:
        log["wall_s"] = 0.0
    _write_csv(log, rdir / "train_log.csv")
    _write_json(rdir / "metrics.json", metrics)
    logger.info("round %d: test wmae %.6g", state.round, report.wmae_all)

    final = _stop(cfg, state, report)
    acquired: list[int] = []
    acq_wall = 0.0
    if not final:
        b = min(cfg.round_batch, len(state.pool))
        if cfg.stop.kind == "max-labeled":
            b = min(b, cfg.stop.max_labeled - len(state.labeled))
        start = time.perf_counter()
        selection = acquire(cfg, state.round, ds, result, state.labeled, state.pool, b)
        acq_wall = time.perf_counter() - start
        acquired = selection.selected
        if not set(acquired) <= set(state.pool) or len(set(acquired)) != len(acquired):
            raise UnreachableException(f"Strategy {cfg.strategy} selected outside the pool")
        _write_csv(pd.DataFrame({"order": range(len(acquired)), "idx": acquired}), rdir / "acquired.csv")
        if cfg.dump_scores and selection.scores is not None:
            _write_csv(scores_table(selection), rdir / "scores.csv")

    row = _metrics_row(cfg, state, len(state.labeled) + len(state.pool), report, train_wall, acq_wall)
    _write_json(rdir / ROUND_RECORD, {
        "round": state.round,
        "labeled_count": len(state.labeled),
        "acquired": acquired,
        "final": final,
        "row": row,
    })
    _advance(state, row, str(checkpoint.relative_to(run_dir)), acquired, final)
    check_partition(ds, state.labeled, state.pool)
    _persist_state(run_dir, state)
    return result.model

def _advance(state: ALState, row: dict, checkpoint: str, acquired: list[int], final: bool) -> None:
    chosen = set(acquired)
    state.history.append(row)
    state.checkpoints.append(checkpoint)
    state.labeled = state.labeled + list(acquired)
    state.pool = [i for i in state.pool if i not in chosen]
    state.round += 1
    state.finished = final

def _loop(cfg: ALConfig, ds: Dataset, run_dir: Path, state: ALState,
          previous: nn.Module | None, max_rounds: int | None) -> ALState:
    done = 0
    while not state.finished:
        if max_rounds is not None and done >= max_rounds:
            logger.info("stopping after %d rounds; resume to continue", done)
            break
        previous = _run_round(cfg, ds, run_dir, state, previous if cfg.train.warm_start else None)
        done += 1
    if state.finished:
        logger.info("run finished after %d rounds at %d labeled samples", state.round, len(state.labeled))
    return state

def _load_split_dataset(path: str) -> Dataset:
    ds = load_dataset(path)
    if np.any(ds.splits == UNASSIGNED):
        raise ValueError(f"Dataset at {path} has entries without a split")
    return ds

def run_active_learning(cfg: ALConfig, run_dir: str | Path, max_rounds: int | None = None) -> ALState:
    """Run the active-learning protocol from scratch.

    Every round trains on the labeled set, evaluates the best-validation model
    on the test split, persists the round and then moves B pool samples to the
    labeled set. The round on which the stop rule fires trains and evaluates
    but does not acquire. A short final batch is used when fewer than B
    samples remain.

    Args:
        cfg: Run configuration
        run_dir: Directory for the run artifacts; must not hold an earlier run
        max_rounds: Stop after this many rounds without finishing (resumable)

    Returns:
        ALState: State after the last executed round

    Raises:
        FileExistsError: If ``run_dir`` already holds a run
        RunLocked: If another writer holds the run directory
        TrainingDivergence: The round is aborted; completed rounds stay resumable
    """
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    if (run_dir / MANIFEST_FILE).exists():
        raise FileExistsError(f"{run_dir} already holds a run; use resume")
    with run_lock(run_dir):
        ds = _load_split_dataset(cfg.dataset)
        cfg = resolve_config(cfg, ds)
        manifest = RunManifest(
            tool_version=TOOL_VERSION,
            config=cfg.model_dump(mode="json"),
            dataset_fingerprint=dataset_fingerprint(cfg.dataset),
            seeds=cfg.seeds.model_dump(),
            host=_host(),
            reference_only=cfg.strategy == "trueloss",
        )
        _write_json(run_dir / MANIFEST_FILE, manifest.model_dump())
        labeled = initial_labeled_set(ds, cfg)
        chosen = set(labeled)
        state = ALState(labeled=labeled, pool=[int(i) for i in ds.split_indices("train") if i not in chosen])
        check_partition(ds, state.labeled, state.pool)
        logger.info("starting %s/%s run: %d labeled, %d in pool, B=%d",
                    cfg.arch, cfg.strategy, len(state.labeled), len(state.pool), cfg.round_batch)
        _persist_state(run_dir, state)
        return _loop(cfg, ds, run_dir, state, None, max_rounds)

def _read_record(rdir: Path, index: int) -> dict:
    try:
        record = json.loads((rdir / ROUND_RECORD).read_text())
    except json.JSONDecodeError as e:
        raise CorruptRoundRecord(index, "round record is not valid JSON") from e
    missing = {"round", "labeled_count", "acquired", "final", "row"} - set(record)
    if missing:
        raise CorruptRoundRecord(index, f"round record lacks {sorted(missing)}")
    if record["round"] != index:
        raise CorruptRoundRecord(index, f"record claims round {record['round']}")
    if not (rdir / CHECKPOINT_FILE).exists():
        raise CorruptRoundRecord(index, "checkpoint is missing")
    return record

def load_run(run_dir: str | Path) -> tuple[ALConfig, Dataset, ALState]:
    """Rebuild the configuration and state of a run from its round records.

    Raises:
        FileNotFoundError: If ``run_dir`` holds no run manifest
        CorruptRoundRecord: If a completed round's record is inconsistent
        ValueError: If the dataset changed since the run started
    """
    run_dir = Path(run_dir)
    manifest = RunManifest(**json.loads((run_dir / MANIFEST_FILE).read_text()))
    cfg = ALConfig.model_validate(manifest.config)
    if dataset_fingerprint(cfg.dataset) != manifest.dataset_fingerprint:
        raise ValueError(f"Dataset {cfg.dataset} changed since the run started")
    ds = _load_split_dataset(cfg.dataset)

    labeled = initial_labeled_set(ds, cfg)
    chosen = set(labeled)
    state = ALState(labeled=labeled, pool=[int(i) for i in ds.split_indices("train") if i not in chosen])
    index = 0
    while (rdir := round_dir(run_dir, index)).exists() and (rdir / ROUND_RECORD).exists():
        record = _read_record(rdir, index)
        if record["labeled_count"] != len(state.labeled):
            raise CorruptRoundRecord(index, f"labeled count {record['labeled_count']} != {len(state.labeled)}")
        if not set(record["acquired"]) <= set(state.pool):
            raise CorruptRoundRecord(index, "acquired indices are not in the pool")
        if record["final"] and record["acquired"]:
            raise CorruptRoundRecord(index, "final round acquired samples")
        _advance(state, record["row"], str((rdir / CHECKPOINT_FILE).relative_to(run_dir)),
                 record["acquired"], record["final"])
        if state.finished:
            break
        index += 1
    try:
        check_partition(ds, state.labeled, state.pool)
    except UnreachableException as e:
        raise CorruptRoundRecord(index, str(e)) from e
    return cfg, ds, state

def resume(run_dir: str | Path, max_rounds: int | None = None) -> ALState:
    """Continue a run from its last completed round.

    Random streams are keyed by round index, so the remaining trajectory is the
    one an uninterrupted run would have taken. A round directory without its
    completion record is re-run from its start.

    Raises:
        RunLocked: If another writer holds the run directory
        CorruptRoundRecord: Naming the round whose record cannot be trusted
    """
    run_dir = Path(run_dir)
    with run_lock(run_dir):
        cfg, ds, state = load_run(run_dir)
        if state.finished:
            logger.info("run in %s is already finished", run_dir)
            _persist_state(run_dir, state)
            return state
        previous = None
        if cfg.train.warm_start and state.checkpoints:
            _, previous = load_checkpoint(run_dir / state.checkpoints[-1])
        logger.info("resuming %s at round %d", run_dir, state.round)
        return _loop(cfg, ds, run_dir, state, previous, max_rounds)

class MatrixResult(BaseModel):
    """
    Outcome of a run matrix.

    Attributes:
        cells (list[CellResult]): One entry per (arch, strategy, seed) cell
        combined (pd.DataFrame): Every cell's metrics rows
        summary (pd.DataFrame): Mean and standard deviation over seeds per round
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    cells: list[CellResult]
    combined: pd.DataFrame
    summary: pd.DataFrame

def expand_matrix(
    base: ALConfig,
    archs: Sequence[str],
    strategies: Sequence[str],
    seeds: Sequence[int],
    models: dict[str, ModelSpec] | None = None,
) -> list[ALConfig]:
    """Cross product of architectures, strategies and seeds over ``base``.

    ``models`` maps an architecture to an explicit spec; the profile preset is
    used otherwise. Unsupported cells (entropy on the U-Net) are skipped with a
    warning.
    """
    models = models or {}
    cfgs = []
    for arch in archs:
        for strategy in strategies:
            for seed in seeds:
                model = models.get(arch)
                try:
                    cfgs.append(ALConfig.model_validate({
                        **base.model_dump(exclude={"seeds", "model"}),
                        "arch": arch, "strategy": strategy, "seed": seed,
                        "model": model.model_dump() if model is not None else None,
                    }))
                except ValidationError as e:
                    logger.warning("skipping %s/%s seed %d: %s", arch, strategy, seed, e.errors()[0]["msg"])
    return cfgs

def cell_name(cfg: ALConfig) -> str:
    return f"{cfg.arch}-{cfg.strategy}-seed{cfg.seed}"

def summarize(combined: pd.DataFrame) -> pd.DataFrame:
    """Per (arch, strategy, round) mean and standard deviation over seeds."""
    value_columns = [c for c in METRICS_COLUMNS if c.startswith(("wmae_", "mae_"))] + ["labeled_frac"]
    grouped = combined.groupby(["arch", "strategy", "round"])[value_columns]
    summary = grouped.agg(["mean", "std"])
    summary.columns = [f"{col}_{stat}" for col, stat in summary.columns]
    summary["n_seeds"] = grouped.size()
    return summary.reset_index()

def run_matrix(cfgs: Sequence[ALConfig], out_dir: str | Path) -> MatrixResult:
    """Run every configuration in its own cell directory under ``out_dir``.

    A failing cell is recorded in its ``CellResult`` and the remaining cells
    proceed. ``metrics.csv`` (all rows) and ``summary.csv`` (mean / std over
    seeds) are written to ``out_dir``.

    Raises:
        ValueError: If the configurations do not share a dataset
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if len({cfg.dataset for cfg in cfgs}) > 1:
        raise ValueError("All cells of a matrix must share one dataset")

    cells, frames = [], []
    for cfg in cfgs:
        run_dir = out_dir / cell_name(cfg)
        try:
            if (run_dir / MANIFEST_FILE).exists():
                resume(run_dir)
            else:
                run_active_learning(cfg, run_dir)
            frames.append(pd.read_csv(run_dir / METRICS_FILE, float_precision="round_trip"))
            cells.append(CellResult(arch=cfg.arch, strategy=cfg.strategy, seed=cfg.seed,
                                    run_dir=str(run_dir), status=True))
        except Exception as e:
            logger.error("cell %s failed: %s", cell_name(cfg), e)
            cells.append(CellResult(arch=cfg.arch, strategy=cfg.strategy, seed=cfg.seed,
                                    run_dir=str(run_dir), status=False, error=str(e)))

    combined = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=METRICS_COLUMNS)
    combined = combined.sort_values(["arch", "strategy", "seed", "round"], kind="stable").reset_index(drop=True)
    _write_csv(combined, out_dir / METRICS_FILE)
    summary = summarize(combined) if len(combined) else pd.DataFrame()
    _write_csv(summary, out_dir / "summary.csv")
    return MatrixResult(cells=cells, combined=combined, summary=summary)

class ActiveLearningRunner:
    """Drives dataset generation, active-learning runs and reporting.

    Attributes:
        profile (str): Named profile supplying sizes and defaults
    """

    def __init__(self, profile: str = DEFAULT_PROFILE):
        if profile not in PROFILES:
            raise ValueError(f"Unknown profile '{profile}', expected one of {sorted(PROFILES)}")
        self.profile = profile

    def generate(
        self,
        out: str | Path,
        n: int | None = None,
        size: int | None = None,
        seed: int = 0,
        physics: PhysicsConfig | None = None,
        solver: SolverConfig | None = None,
        fractions: Sequence[float] | None = None,
        parallelism: int = 1,
        allow_overlap: bool = False,
    ) -> Dataset:
        """Generate, split and save a dataset.

        Without ``fractions`` the profile's split counts are used when ``n``
        equals the profile size, and their proportions otherwise.

        Args:
            out: Container directory to write
            n: Number of entries; profile default if None
            size: Lattice side length; profile default if None
            seed: Master seed
            physics: Diffusion constants
            solver: Solver settings
            fractions: (train, val, test) fractions
            parallelism: Worker threads for the solves
            allow_overlap: Allow overlapping source disks

        Returns:
            Dataset: The split dataset that was written
        """
        p = PROFILES[self.profile]
        n = p.n if n is None else n
        size = p.size if size is None else size
        ds = generate_dataset(n, size, physics or PhysicsConfig(), solver or SolverConfig(), seed,
                              parallelism=parallelism, allow_overlap=allow_overlap)
        if fractions is None and n == p.n:
            ds = split_dataset(ds, counts=p.split_counts)
        else:
            fractions = fractions or [c / p.n for c in p.split_counts]
            ds = split_dataset(ds, counts=split_counts_from_fractions(n, fractions))
        save_dataset(ds, out)
        return ds

    def run(self, cfg: ALConfig, run_dir: str | Path, max_rounds: int | None = None) -> ALState:
        return run_active_learning(cfg, run_dir, max_rounds)

    def resume(self, run_dir: str | Path, max_rounds: int | None = None) -> ALState:
        return resume(run_dir, max_rounds)

    def run_matrix(
        self,
        base: ALConfig,
        out_dir: str | Path,
        archs: Sequence[str] = ("unet", "cnn"),
        strategies: Sequence[str] = ("random", "diversity", "tod", "entropy"),
        seeds: Sequence[int] = (0,),
        models: dict[str, ModelSpec] | None = None,
    ) -> MatrixResult:
        """Run the arch x strategy x seed cross product (U-Net entropy excluded)."""
        return run_matrix(expand_matrix(base, archs, strategies, seeds, models), out_dir)

    def plot(self, csvs: Sequence[str | Path], out_dir: str | Path, **kwargs) -> list[Path]:
        """Learning-curve charts for one or more metrics CSVs; see ``report.plot_learning_curves``."""
        from .report import plot_learning_curves

        return plot_learning_curves(csvs, out_dir, **kwargs)
