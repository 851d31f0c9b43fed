"""On-disk formats: the dataset container directory and model checkpoints.

Dataset container (a directory)::

    manifest.json   version, n, size, physics, solver, seed, split counts, residuals
    inputs.f32      header + n * size * size little-endian float32, entry-major
    targets.f32     same layout as inputs.f32
    params.csv      idx,cx1,cy1,cx2,cy2,q2,d,split

Both binary files start with ``<4sIIII``: magic ``SSDS``, version, n, height,
width. The recorded residuals are those of the float64 solves; the targets are
stored rounded to float32.

A checkpoint starts with magic ``SSCK``, version and the byte length of
a JSON block holding the model spec and the tensor layout, followed by every
state tensor as little-endian float32 in layout order.
"""
import json
import logging
import struct
from pathlib import Path

import numpy as np
import pandas as pd
import torch
from pydantic import ValidationError

from .config import ModelSpec, SolverConfig
from .constants import (
    DATASET_MAGIC, DATASET_VERSION, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
    PARAMS_COLUMNS, SPLIT_NAMES,
)
from .datagen import Dataset, UNASSIGNED
from .exceptions import DatasetFormatError, MagicMismatch, VersionMismatch, TruncatedPayload
from .lattice import render_input
from .types import PhysicsConfig, ScenarioParams
from .utils import fingerprint

logger = logging.getLogger(__name__)

GRID_HEADER = struct.Struct("<4sIIII")
CHECKPOINT_HEADER = struct.Struct("<4sII")

MANIFEST_FILE = "manifest.json"
INPUTS_FILE = "inputs.f32"
TARGETS_FILE = "targets.f32"
PARAMS_FILE = "params.csv"

def _write_grids(path: Path, grids: np.ndarray) -> None:
    n, h, w = grids.shape
    with open(path, "wb") as f:
        f.write(GRID_HEADER.pack(DATASET_MAGIC, DATASET_VERSION, n, h, w))
        f.write(np.ascontiguousarray(grids, dtype="<f4").tobytes())

def _read_grids(path: Path) -> np.ndarray:
    try:
        raw = path.read_bytes()
    except FileNotFoundError as e:
        raise DatasetFormatError(path, "Missing container file") from e
    if len(raw) < GRID_HEADER.size:
        raise TruncatedPayload(path, GRID_HEADER.size, len(raw))
    magic, version, n, h, w = GRID_HEADER.unpack_from(raw)
    if magic != DATASET_MAGIC:
        raise MagicMismatch(path, magic, DATASET_MAGIC)
    if version != DATASET_VERSION:
        raise VersionMismatch(path, version, DATASET_VERSION)
    expected = n * h * w * 4
    payload = raw[GRID_HEADER.size:]
    if len(payload) < expected:
        raise TruncatedPayload(path, expected, len(payload))
    if len(payload) > expected:
        raise DatasetFormatError(path, "Trailing bytes after payload")
    return np.frombuffer(payload, dtype="<f4").reshape(n, h, w).astype(np.float32)

def save_dataset(ds: Dataset, path: str | Path) -> Path:
    """Write ``ds`` as a container directory at ``path``.

    Returns:
        Path: The container directory
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    _write_grids(path / INPUTS_FILE, ds.inputs)
    _write_grids(path / TARGETS_FILE, ds.targets)

    table = pd.DataFrame({
        "idx": np.arange(ds.n),
        "cx1": [p.cx1 for p in ds.params],
        "cy1": [p.cy1 for p in ds.params],
        "cx2": [p.cx2 for p in ds.params],
        "cy2": [p.cy2 for p in ds.params],
        "q2": [p.q2 for p in ds.params],
        "d": [p.d for p in ds.params],
        "split": [SPLIT_NAMES[s] if s != UNASSIGNED else "" for s in ds.splits],
    }, columns=PARAMS_COLUMNS)
    table.to_csv(path / PARAMS_FILE, index=False, float_format="%.17g", lineterminator="\n")

    manifest = {
        "version": DATASET_VERSION,
        "n": ds.n,
        "size": ds.size,
        "seed": ds.seed,
        "allow_overlap": ds.allow_overlap,
        "radius": ds.params[0].r if ds.params else None,
        "physics": ds.physics.model_dump(),
        "solver": ds.solver.model_dump(),
        "split_counts": ds.split_counts(),
        "residual_summary": {
            "max": float(ds.residuals.max()),
            "mean": float(ds.residuals.mean()),
        },
        "residuals": [float(r) for r in ds.residuals],
    }
    (path / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    logger.info("saved dataset of %d entries to %s", ds.n, path)
    return path

def load_dataset(path: str | Path, checked: bool = False) -> Dataset:
    """Read a container directory written by ``save_dataset``.

    Args:
        path: Container directory
        checked: Re-render every input from its params and compare

    Returns:
        Dataset: The decoded dataset

    Raises:
        MagicMismatch: If a binary file does not start with ``SSDS``
        VersionMismatch: If the manifest or a binary file has another version
        TruncatedPayload: If a binary file or the params table is short
        DatasetFormatError: For any other malformed content
    """
    path = Path(path)
    try:
        manifest = json.loads((path / MANIFEST_FILE).read_text())
    except FileNotFoundError as e:
        raise DatasetFormatError(path / MANIFEST_FILE, "Missing manifest") from e
    except json.JSONDecodeError as e:
        raise DatasetFormatError(path / MANIFEST_FILE, "Malformed manifest") from e
    if manifest.get("version") != DATASET_VERSION:
        raise VersionMismatch(path / MANIFEST_FILE, manifest.get("version"), DATASET_VERSION)

    inputs = _read_grids(path / INPUTS_FILE)
    targets = _read_grids(path / TARGETS_FILE)
    n, size = manifest["n"], manifest["size"]
    for name, grids in ((INPUTS_FILE, inputs), (TARGETS_FILE, targets)):
        if grids.shape != (n, size, size):
            raise DatasetFormatError(path / name, f"Shape {grids.shape} disagrees with manifest")

    try:
        table = pd.read_csv(path / PARAMS_FILE, float_precision="round_trip", keep_default_na=False)
    except (FileNotFoundError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DatasetFormatError(path / PARAMS_FILE, "Unreadable params table") from e
    if list(table.columns) != PARAMS_COLUMNS:
        raise DatasetFormatError(path / PARAMS_FILE, f"Unexpected columns {list(table.columns)}")
    if len(table) < n:
        raise TruncatedPayload(path / PARAMS_FILE, n, len(table))
    if len(table) > n:
        raise DatasetFormatError(path / PARAMS_FILE, f"{len(table) - n} rows beyond the {n} entries")

    radius = manifest.get("radius")
    try:
        params = [
            ScenarioParams(cx1=row.cx1, cy1=row.cy1, cx2=row.cx2, cy2=row.cy2, q2=row.q2,
                           **({"r": radius} if radius is not None else {}))
            for row in table.itertuples(index=False)
        ]
        physics = PhysicsConfig(**manifest["physics"])
        solver = SolverConfig(**manifest["solver"])
    except (ValidationError, KeyError) as e:
        raise DatasetFormatError(path, f"Invalid dataset content ({e})") from e

    splits = np.array([SPLIT_NAMES.index(s) if s else UNASSIGNED for s in table["split"]], dtype=np.int8)
    residuals = np.asarray(manifest.get("residuals", []), dtype=np.float64)
    if residuals.shape != (n,):
        raise TruncatedPayload(path / MANIFEST_FILE, n, residuals.size)

    ds = Dataset(
        size=size,
        physics=physics,
        solver=solver,
        seed=manifest["seed"],
        params=params,
        inputs=inputs,
        targets=targets,
        residuals=residuals,
        splits=splits,
        allow_overlap=manifest.get("allow_overlap", False),
    )
    if checked:
        for i, p in enumerate(ds.params):
            expected = render_input(p, size, ds.allow_overlap).astype(np.float32)
            if not np.array_equal(expected, ds.inputs[i]):
                raise DatasetFormatError(path / INPUTS_FILE, f"Input {i} does not match its params")
    return ds

def dataset_fingerprint(path: str | Path) -> str:
    """Content hash of a container directory (binary payloads and params table)."""
    path = Path(path)
    return fingerprint([path / INPUTS_FILE, path / TARGETS_FILE, path / PARAMS_FILE])

def save_checkpoint(model: torch.nn.Module, spec: ModelSpec, path: str | Path) -> Path:
    """Write every state tensor of ``model`` in the ``SSCK`` format."""
    path = Path(path)
    state = model.state_dict()
    layout = [{"name": name, "shape": list(t.shape), "dtype": str(t.dtype).removeprefix("torch.")}
              for name, t in state.items()]
    block = json.dumps({"spec": spec.model_dump(), "layout": layout}, sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(CHECKPOINT_HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(block)))
        f.write(block)
        for t in state.values():
            f.write(t.detach().cpu().numpy().astype("<f4").tobytes())
    return path

def load_checkpoint(path: str | Path) -> tuple[ModelSpec, torch.nn.Module]:
    """Rebuild the model stored at ``path`` (in eval mode).

    Raises:
        MagicMismatch, VersionMismatch, TruncatedPayload, DatasetFormatError
    """
    from .models import build_model

    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < CHECKPOINT_HEADER.size:
        raise TruncatedPayload(path, CHECKPOINT_HEADER.size, len(raw))
    magic, version, block_len = CHECKPOINT_HEADER.unpack_from(raw)
    if magic != CHECKPOINT_MAGIC:
        raise MagicMismatch(path, magic, CHECKPOINT_MAGIC)
    if version != CHECKPOINT_VERSION:
        raise VersionMismatch(path, version, CHECKPOINT_VERSION)
    offset = CHECKPOINT_HEADER.size
    try:
        block = json.loads(raw[offset:offset + block_len])
        spec = ModelSpec(**block["spec"])
    except (json.JSONDecodeError, ValidationError, KeyError) as e:
        raise DatasetFormatError(path, "Malformed checkpoint header") from e
    offset += block_len

    model = build_model(spec)
    state = {}
    for entry in block["layout"]:
        count = int(np.prod(entry["shape"], dtype=np.int64))
        end = offset + 4 * count
        if end > len(raw):
            raise TruncatedPayload(path, end, len(raw))
        values = np.frombuffer(raw[offset:end], dtype="<f4").reshape(entry["shape"])
        state[entry["name"]] = torch.from_numpy(values.copy()).to(getattr(torch, entry["dtype"]))
        offset = end
    model.load_state_dict(state)
    model.eval()
    return spec, model
