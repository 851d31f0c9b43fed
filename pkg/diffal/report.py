"""Tables and vector-graphic charts built from datasets, checkpoints and metrics CSVs.

Charts are written as SVG through the Agg backend with the date stripped from
the metadata and a fixed hash salt, so the same inputs give the same bytes.
"""
import logging
from pathlib import Path
from typing import Sequence

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import torch.nn as nn

from .constants import ERROR_MAP_RANGE, METRICS_COLUMNS
from .datagen import Dataset
from .models import forward
from .types import FieldGrid

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "diffal"

REGION_PANELS = {
    "wmae_all": "ALL (weighted)",
    "mae_src": "SRC",
    "mae_field": "FIELD",
    "mae_ring1": "RING1",
    "mae_ring2": "RING2",
    "mae_ring3": "RING3",
}
QUARTERS = (0.25, 0.5, 0.75, 1.0)
HISTOGRAM_FEATURES = ("d", "q2", "cx1", "cy1", "cx2", "cy2")

def param_histograms(ds: Dataset, bins: int = 10) -> pd.DataFrame:
    """Histogram of each scenario parameter as rows ``feature,bin_lo,bin_hi,count``."""
    values = {
        "d": [p.d for p in ds.params],
        "q2": [p.q2 for p in ds.params],
        "cx1": [p.cx1 for p in ds.params],
        "cy1": [p.cy1 for p in ds.params],
        "cx2": [p.cx2 for p in ds.params],
        "cy2": [p.cy2 for p in ds.params],
    }
    rows = []
    for feature in HISTOGRAM_FEATURES:
        counts, edges = np.histogram(values[feature], bins=bins)
        rows += [(feature, float(lo), float(hi), int(c)) for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
    return pd.DataFrame(rows, columns=["feature", "bin_lo", "bin_hi", "count"])

def read_metrics(csvs: Sequence[str | Path]) -> pd.DataFrame:
    """Concatenate metrics CSVs.

    Raises:
        ValueError: If a CSV lacks one of the metrics columns
    """
    frames = []
    for path in csvs:
        frame = pd.read_csv(path, float_precision="round_trip")
        missing = [c for c in METRICS_COLUMNS if c not in frame.columns]
        if missing:
            raise ValueError(f"{path} is missing columns {missing}")
        frames.append(frame[METRICS_COLUMNS])
    if not frames:
        raise ValueError("No metrics CSV given")
    return pd.concat(frames, ignore_index=True)

def common_rounds(metrics: pd.DataFrame) -> pd.DataFrame:
    """Keep only the rounds present in every (arch, strategy, seed) run."""
    per_run = metrics.groupby(["arch", "strategy", "seed"])["round"].apply(set)
    shared = set.intersection(*per_run)
    if any(rounds != shared for rounds in per_run):
        logger.warning("runs disagree on their rounds; plotting the %d shared rounds", len(shared))
    return metrics[metrics["round"].isin(shared)]

def _curves(metrics: pd.DataFrame, column: str) -> pd.DataFrame:
    return (metrics.groupby(["strategy", "round"], sort=True)
            .agg(labeled_frac=("labeled_frac", "mean"), value=(column, "mean"))
            .reset_index())

def _draw(ax, metrics: pd.DataFrame, column: str, log_y: bool, title: str) -> None:
    curves = _curves(metrics, column)
    for strategy, curve in curves.groupby("strategy", sort=True):
        ax.plot(curve["labeled_frac"] * 100, curve["value"], marker="o", markersize=3, label=strategy)
    if log_y and (curves["value"] > 0).all():
        ax.set_yscale("log")
    ax.set_title(title, fontsize=9)
    ax.set_xlabel("labeled data (%)")
    ax.legend(loc="upper right", fontsize=7)

def _save(fig, path: Path, description: str | None = None) -> Path:
    metadata = {"Date": None}
    if description:
        metadata["Description"] = description
    fig.savefig(path, format="svg", metadata=metadata)
    plt.close(fig)
    return path

def plot_learning_curves(
    csvs: Sequence[str | Path],
    out_dir: str | Path,
    metric: str = "wmae_all",
    log_y: bool = True,
    regions: bool = False,
) -> list[Path]:
    """Test error against labeled fraction, one series per strategy.

    One chart per architecture is written as ``learning_curve_<arch>.svg``;
    seeds are averaged. With ``regions`` an extra ``regions_<arch>.svg`` holds
    one panel per region of interest.

    Args:
        csvs: Metrics CSVs of runs or matrices
        out_dir: Output directory
        metric: Metrics column on the y-axis
        log_y: Logarithmic y-axis
        regions: Also emit the per-region panels

    Returns:
        list[Path]: The written files

    Raises:
        ValueError: If a CSV lacks columns or ``metric`` is unknown
    """
    if metric not in REGION_PANELS:
        raise ValueError(f"Unknown metric '{metric}', expected one of {list(REGION_PANELS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics = common_rounds(read_metrics(csvs))

    written = []
    for arch, frame in metrics.groupby("arch", sort=True):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        _draw(ax, frame, metric, log_y, f"{arch}: test {metric}")
        ax.set_ylabel(metric)
        fig.tight_layout()
        written.append(_save(fig, out_dir / f"learning_curve_{arch}.svg"))

        if regions:
            fig, axes = plt.subplots(2, 3, figsize=(12, 7))
            for ax, (column, title) in zip(axes.flat, REGION_PANELS.items()):
                if frame[column].isna().all():
                    ax.set_visible(False)
                    continue
                _draw(ax, frame.dropna(subset=[column]), column, log_y, title)
            fig.tight_layout()
            written.append(_save(fig, out_dir / f"regions_{arch}.svg"))
    logger.info("wrote %d charts to %s", len(written), out_dir)
    return written

def render_error_map(input: FieldGrid, target: FieldGrid, prediction: FieldGrid, arch: str, path: str | Path) -> Path:
    """Four panels: initial condition, ground truth, prediction and absolute error.

    The error colour range is fixed per architecture and recorded in the SVG
    description.
    """
    limit = ERROR_MAP_RANGE[arch]
    fig, axes = plt.subplots(1, 4, figsize=(14, 3.5))
    panels = [
        ("initial condition", input, 0.0, 1.0),
        ("ground truth", target, 0.0, 1.0),
        ("prediction", prediction, 0.0, 1.0),
        ("|error|", np.abs(np.asarray(prediction) - np.asarray(target)), 0.0, limit),
    ]
    for ax, (title, grid, lo, hi) in zip(axes, panels):
        image = ax.imshow(grid, origin="upper", vmin=lo, vmax=hi, cmap="viridis")
        ax.set_title(title, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
        fig.colorbar(image, ax=ax, fraction=0.046, pad=0.04)
    fig.tight_layout()
    return _save(fig, Path(path), description=f"arch={arch} error_range=0-{limit}")

def error_maps(model: nn.Module, ds: Dataset, indices: Sequence[int], out_dir: str | Path) -> list[Path]:
    """Error-map panels for chosen dataset entries, ``error_map_<idx>.svg`` each."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    indices = [int(i) for i in indices]
    predictions = forward(model, ds.inputs[indices])
    return [
        render_error_map(ds.inputs[i], ds.targets[i], pred, model.spec.arch, out_dir / f"error_map_{i}.svg")
        for i, pred in zip(indices, predictions)
    ]

def quarterly_table(metrics: pd.DataFrame | str | Path) -> pd.DataFrame:
    """Seed-averaged metrics at the rounds nearest 25, 50, 75 and 100 % labeled.

    Returns:
        pd.DataFrame: One row per (arch, strategy, quarter)
    """
    if not isinstance(metrics, pd.DataFrame):
        metrics = read_metrics([metrics])
    value_columns = list(REGION_PANELS)
    curves = (metrics.groupby(["arch", "strategy", "round"], sort=True)
              .agg({"labeled_frac": "mean", **{c: "mean" for c in value_columns}})
              .reset_index())
    rows = []
    for (arch, strategy), curve in curves.groupby(["arch", "strategy"], sort=True):
        for quarter in QUARTERS:
            nearest = curve.iloc[int(np.argmin(np.abs(curve["labeled_frac"].to_numpy() - quarter)))]
            rows.append({"arch": arch, "strategy": strategy, "quarter": quarter,
                         **{c: nearest[c] for c in ["round", "labeled_frac", *value_columns]}})
    return pd.DataFrame(rows, columns=["arch", "strategy", "quarter", "round", "labeled_frac", *value_columns])
