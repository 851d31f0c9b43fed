"""Scenario sampling, dataset generation and train/val/test splits."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from .config import SolverConfig
from .constants import SOURCE_RADIUS, SPLIT_NAMES, STREAM_SCENARIO, STREAM_SPLIT
from .exceptions import AdmissibleRegionEmpty, SolverNonConvergence
from .lattice import render_input
from .solver import solve_input
from .types import PhysicsConfig, ScenarioParams
from .utils import rng_stream

logger = logging.getLogger(__name__)

UNASSIGNED = -1

class Dataset(BaseModel):
    """
    Aligned (params, input, target) entries with split assignments.

    Attributes:
        size (int): Pixels per lattice side
        physics (PhysicsConfig): Physics the targets were solved with
        solver (SolverConfig): Solver settings of the targets
        seed (int): Master generation seed
        params (list[ScenarioParams]): Scenario parameters per entry
        inputs (np.ndarray): (n, size, size) float32 initial conditions
        targets (np.ndarray): (n, size, size) float32 steady states
        residuals (np.ndarray): (n,) relative residual of the float64 solve per entry
        splits (np.ndarray): (n,) split code per entry, 0/1/2 = train/val/test, -1 unassigned
        allow_overlap (bool): Whether source disks were allowed to overlap
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    size: int
    physics: PhysicsConfig
    solver: SolverConfig
    seed: int
    params: list[ScenarioParams]
    inputs: np.ndarray
    targets: np.ndarray
    residuals: np.ndarray
    splits: np.ndarray
    allow_overlap: bool = False

    @property
    def n(self) -> int:
        return len(self.params)

    def split_indices(self, name: str) -> np.ndarray:
        """Ascending dataset indices assigned to split ``name``."""
        return np.flatnonzero(self.splits == SPLIT_NAMES.index(name))

    def split_counts(self) -> dict[str, int]:
        return {name: int(np.sum(self.splits == code)) for code, name in enumerate(SPLIT_NAMES)}

    def identifiers(self) -> np.ndarray:
        """(n, 6) matrix of diversity identifiers (cx1, cy1, cx2, cy2, d, Q)."""
        return np.stack([p.identifiers() for p in self.params]) if self.params else np.zeros((0, 6))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.size == other.size
            and self.physics == other.physics
            and self.solver == other.solver
            and self.seed == other.seed
            and self.allow_overlap == other.allow_overlap
            and self.params == other.params
            and np.array_equal(self.inputs, other.inputs)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.residuals, other.residuals)
            and np.array_equal(self.splits, other.splits)
        )

def sample_scenario(
    rng: np.random.Generator,
    size: int,
    radius: float = SOURCE_RADIUS,
    allow_overlap: bool = False,
    max_attempts: int = 100_000,
) -> ScenarioParams:
    """Draw one two-source scenario.

    Centers are uniform over the admissible box [r, size-1-r]^2, resampled
    until the disks are disjoint (d >= 2r) unless overlap is allowed; the
    second intensity is uniform on [0, 1].

    Args:
        rng: Seeded generator
        size: Lattice side length
        radius: Source radius
        allow_overlap: Skip the non-overlap rejection step
        max_attempts: Rejection-sampling cap

    Returns:
        ScenarioParams: The sampled scenario

    Raises:
        AdmissibleRegionEmpty: If no admissible placement exists
    """
    lo, hi = radius, size - 1 - radius
    if hi < lo:
        raise AdmissibleRegionEmpty(size, radius)
    if not allow_overlap and math.sqrt(2.0) * (hi - lo) < 2 * radius:
        raise AdmissibleRegionEmpty(size, radius)
    for _ in range(max_attempts):
        cx1, cy1, cx2, cy2 = rng.uniform(lo, hi, size=4)
        if allow_overlap or math.hypot(cx1 - cx2, cy1 - cy2) >= 2 * radius:
            q2 = rng.uniform(0.0, 1.0)
            return ScenarioParams(cx1=cx1, cy1=cy1, cx2=cx2, cy2=cy2, q2=q2, r=radius)
    raise AdmissibleRegionEmpty(size, radius)

def generate_entry(
    index: int,
    size: int,
    physics: PhysicsConfig,
    solver_cfg: SolverConfig,
    seed: int,
    allow_overlap: bool = False,
) -> tuple[ScenarioParams, np.ndarray, np.ndarray, float]:
    """Sample and solve entry ``index`` from its own counter-based stream.

    The returned residual belongs to the float64 solve, before the target is
    rounded to float32.
    """
    rng = rng_stream(seed, STREAM_SCENARIO, index)
    params = sample_scenario(rng, size, allow_overlap=allow_overlap)
    x = render_input(params, size, allow_overlap)
    try:
        y, residual, _ = solve_input(x, physics, solver_cfg)
    except SolverNonConvergence as e:
        raise e.at_index(index) from e
    return params, x.astype(np.float32), y.astype(np.float32), residual

def generate_dataset(
    n: int,
    size: int,
    physics: PhysicsConfig,
    solver_cfg: SolverConfig,
    seed: int,
    parallelism: int = 1,
    allow_overlap: bool = False,
) -> Dataset:
    """Generate ``n`` (input, target) pairs.

    Entry ``i`` depends only on ``(seed, i)``, so the result is identical for
    any ``parallelism``.

    Raises:
        ValueError: If ``n`` < 1
        SolverNonConvergence: With the offending entry index
    """
    if n < 1:
        raise ValueError(f"Dataset size must be at least 1, got {n}")
    if parallelism < 1:
        raise ValueError(f"Parallelism must be at least 1, got {parallelism}")

    def entry(i: int):
        return generate_entry(i, size, physics, solver_cfg, seed, allow_overlap)

    if parallelism == 1:
        entries = [entry(i) for i in range(n)]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            entries = list(pool.map(entry, range(n)))

    params, inputs, targets, residuals = zip(*entries)
    ds = Dataset(
        size=size,
        physics=physics,
        solver=solver_cfg,
        seed=seed,
        params=list(params),
        inputs=np.stack(inputs),
        targets=np.stack(targets),
        residuals=np.asarray(residuals, dtype=np.float64),
        splits=np.full(n, UNASSIGNED, dtype=np.int8),
        allow_overlap=allow_overlap,
    )
    logger.info("generated %d scenarios on a %dx%d lattice (max residual %.2e)",
                n, size, size, float(ds.residuals.max()))
    return ds

def split_counts_from_fractions(n: int, fractions: Sequence[float]) -> tuple[int, int, int]:
    """Turn (train, val, test) fractions into counts; train takes the remainder."""
    if len(fractions) != 3 or any(f < 0 for f in fractions) or not math.isclose(sum(fractions), 1.0, abs_tol=1e-9):
        raise ValueError(f"Split fractions must be three non-negative numbers summing to 1, got {fractions}")
    val = int(math.floor(fractions[1] * n + 1e-9))
    test = int(math.floor(fractions[2] * n + 1e-9))
    return n - val - test, val, test

def split_dataset(
    ds: Dataset,
    fractions: Sequence[float] | None = None,
    counts: Sequence[int] | None = None,
    seed: int | None = None,
) -> Dataset:
    """Assign every entry to train, val or test by a seeded shuffle.

    Exactly one of ``fractions`` and ``counts`` is given; counts are used as is
    and must add up to the dataset size.

    Returns:
        Dataset: A copy with ``splits`` filled in

    Raises:
        ValueError: If the fractions or counts are invalid
    """
    if (fractions is None) == (counts is None):
        raise ValueError("Give exactly one of fractions and counts")
    if counts is None:
        counts = split_counts_from_fractions(ds.n, fractions)
    counts = tuple(int(c) for c in counts)
    if len(counts) != 3 or any(c < 0 for c in counts) or sum(counts) != ds.n:
        raise ValueError(f"Split counts must be three non-negative numbers summing to {ds.n}, got {counts}")

    rng = rng_stream(ds.seed if seed is None else seed, STREAM_SPLIT)
    order = rng.permutation(ds.n)
    splits = np.empty(ds.n, dtype=np.int8)
    start = 0
    for code, count in enumerate(counts):
        splits[order[start:start + count]] = code
        start += count
    return ds.model_copy(update={"splits": splits})
