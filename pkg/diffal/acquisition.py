"""Selection strategies over the unlabeled pool.

Every strategy returns exactly B distinct pool indices. Score-based strategies
take the B highest scores, ties going to the lower dataset index.
"""
import logging
from typing import Literal, Sequence

import numpy as np
import pandas as pd
import torch.nn as nn
from pydantic import BaseModel, field_validator, model_validator
from scipy.spatial.distance import cdist

from .constants import DEFAULT_MC_PASSES
from .exceptions import AcquisitionError
from .metrics import entropy_score, per_sample_weighted_mae, tod_scores
from .models import forward, mc_dropout_forward
from .training import ModelSnapshots
from .types import AcquisitionResult
from .utils import top_b

logger = logging.getLogger(__name__)

class AcquisitionRequest(BaseModel):
    """
    Attributes:
        strategy (str): random, entropy, tod, trueloss or diversity
        batch_size (int): B, how many samples to label
        k (int): MC-dropout passes (entropy only)
        seed (int): Seed of the random draw or of the dropout masks
    """
    strategy: Literal["random", "entropy", "tod", "trueloss", "diversity"]
    batch_size: int
    k: int = DEFAULT_MC_PASSES
    seed: int = 0

    @field_validator('batch_size')
    def validate_batch_size(cls, v):
        if v < 1:
            raise ValueError(f"Batch size must be at least 1, got {v}")
        return v

    @model_validator(mode='after')
    def validate_k(self):
        if self.strategy == "entropy" and self.k < 2:
            raise ValueError(f"Entropy needs k >= 2, got {self.k}")
        return self

def _sorted_pool(strategy: str, pool_indices: Sequence[int], b: int) -> np.ndarray:
    pool = np.asarray(pool_indices, dtype=np.int64)
    if len(np.unique(pool)) != len(pool):
        raise AcquisitionError(strategy, "pool indices are not distinct")
    if b < 1 or b > len(pool):
        raise AcquisitionError(strategy, f"batch size {b} not in [1, {len(pool)}]")
    return pool

def _ranked(strategy: str, pool: np.ndarray, scores: np.ndarray, b: int, reference_only: bool = False) -> AcquisitionResult:
    return AcquisitionResult(
        strategy=strategy,
        selected=top_b(pool, scores, b),
        scores={int(i): float(s) for i, s in zip(pool, scores)},
        reference_only=reference_only,
    )

def acquire_random(pool_indices: Sequence[int], b: int, rng: np.random.Generator) -> AcquisitionResult:
    """Uniform draw of ``b`` pool indices without replacement.

    Raises:
        AcquisitionError: If ``b`` exceeds the pool size
    """
    pool = np.sort(_sorted_pool("random", pool_indices, b))
    selected = rng.choice(pool, size=b, replace=False)
    return AcquisitionResult(strategy="random", selected=[int(i) for i in selected])

def acquire_entropy(
    model: nn.Module,
    pool_indices: Sequence[int],
    pool_inputs: np.ndarray,
    b: int,
    k: int = DEFAULT_MC_PASSES,
    seed: int = 0,
) -> AcquisitionResult:
    """Rank the pool by the MC-dropout variance of ``k`` passes.

    Every sample sees the same dropout seed, so identical inputs score identically.

    Raises:
        AcquisitionError: For a U-Net, a model without dropout, or k < 2
    """
    pool = _sorted_pool("entropy", pool_indices, b)
    if model.spec.arch == "unet":
        raise AcquisitionError("entropy", "unsupported for the U-Net architecture")
    if model.spec.dropout_rate <= 0:
        raise AcquisitionError("entropy", "model was built without dropout")
    if k < 2:
        raise AcquisitionError("entropy", f"needs k >= 2 passes, got {k}")
    scores = np.array([entropy_score(mc_dropout_forward(model, x, k, seed)) for x in pool_inputs])
    return _ranked("entropy", pool, scores, b)

def acquire_tod(
    snapshots: ModelSnapshots,
    pool_indices: Sequence[int],
    pool_inputs: np.ndarray,
    b: int,
) -> AcquisitionResult:
    """Rank the pool by the output discrepancy between the two last snapshots."""
    pool = _sorted_pool("tod", pool_indices, b)
    return _ranked("tod", pool, tod_scores(snapshots, pool_inputs), b)

def acquire_true_loss(
    model: nn.Module,
    pool_indices: Sequence[int],
    pool_inputs: np.ndarray,
    pool_targets: np.ndarray | None,
    b: int,
    w: float,
) -> AcquisitionResult:
    """Rank the pool by its actual weighted MAE.

    This reads the simulation outputs of unlabeled samples, so it only serves
    as a reference for the label-free strategies and is flagged as such.

    Raises:
        AcquisitionError: If the targets are missing
    """
    pool = _sorted_pool("trueloss", pool_indices, b)
    if pool_targets is None:
        raise AcquisitionError("trueloss", "ground-truth targets are required")
    scores = per_sample_weighted_mae(forward(model, pool_inputs), pool_targets, w)
    return _ranked("trueloss", pool, scores, b, reference_only=True)

def normalize_identifiers(identifiers: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Per-feature min-max scaling to [0, 1]; constant features map to 0."""
    span = np.where(hi > lo, hi - lo, 1.0)
    return (identifiers - lo) / span

def acquire_diversity(
    labeled_identifiers: np.ndarray,
    pool_identifiers: np.ndarray,
    b: int,
    pool_indices: Sequence[int] | None = None,
    bounds: tuple[np.ndarray, np.ndarray] | None = None,
) -> AcquisitionResult:
    """Greedy k-center selection on normalized scenario identifiers.

    Each pick maximizes the minimal distance to the labeled set plus every
    sample picked before it in the batch.

    Args:
        labeled_identifiers: (L, 6) identifiers of the labeled set
        pool_identifiers: (U, 6) identifiers of the pool
        b: How many to pick
        pool_indices: Dataset index of each pool row; 0..U-1 if omitted
        bounds: Per-feature (min, max) used for normalization; taken from
            labeled and pool together if omitted

    Returns:
        AcquisitionResult: Picks in greedy order; scores are the minimal
        distances before the first pick

    Raises:
        AcquisitionError: If the labeled set is empty or ``b`` is out of range
    """
    labeled_identifiers = np.atleast_2d(np.asarray(labeled_identifiers, dtype=np.float64))
    pool_identifiers = np.atleast_2d(np.asarray(pool_identifiers, dtype=np.float64))
    if pool_indices is None:
        pool_indices = np.arange(len(pool_identifiers))
    pool = _sorted_pool("diversity", pool_indices, b)
    if labeled_identifiers.size == 0:
        raise AcquisitionError("diversity", "labeled set is empty")
    order = np.argsort(pool, kind="stable")
    pool, pool_identifiers = pool[order], pool_identifiers[order]

    if bounds is None:
        stacked = np.vstack([labeled_identifiers, pool_identifiers])
        bounds = (stacked.min(axis=0), stacked.max(axis=0))
    lo, hi = (np.asarray(x, dtype=np.float64) for x in bounds)
    candidates = normalize_identifiers(pool_identifiers, lo, hi)
    covered = normalize_identifiers(labeled_identifiers, lo, hi)

    min_dist = cdist(candidates, covered).min(axis=1)
    initial = min_dist.copy()
    picks = []
    for _ in range(b):
        # argmax returns the first maximum, i.e. the lowest index
        j = int(np.argmax(min_dist))
        picks.append(int(pool[j]))
        min_dist = np.minimum(min_dist, cdist(candidates, candidates[j:j + 1])[:, 0])
        min_dist[j] = -np.inf
    return AcquisitionResult(
        strategy="diversity",
        selected=picks,
        scores={int(i): float(s) for i, s in zip(pool, initial)},
    )

def scores_table(result: AcquisitionResult) -> pd.DataFrame:
    """``pool_idx,score,selected`` rows, one per scored pool sample."""
    chosen = set(result.selected)
    scores = result.scores or {i: float("nan") for i in result.selected}
    rows = [(idx, score, int(idx in chosen)) for idx, score in sorted(scores.items())]
    return pd.DataFrame(rows, columns=["pool_idx", "score", "selected"])
