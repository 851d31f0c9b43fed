"""Loss, region metrics and acquisition scores.

The weighted MAE gives pixel ``i`` the weight ``exp(-(1 - y_i) / w)``: 1 at
``y = 1`` and ``exp(-1/w)`` at ``y = 0``. Dataset aggregates are flat means
over every pixel of every sample.
"""
import numpy as np
import torch

from .exceptions import ShapeMismatch
from .models import forward
from .types import FieldGrid, MetricsReport, RegionMasks

def _check_pair(pred, target) -> None:
    if pred.shape != target.shape:
        raise ShapeMismatch(target.shape, pred.shape)

def _check_w(w: float) -> None:
    if not w > 0:
        raise ValueError(f"Loss weight w must be positive, got {w}")

def pixel_weights(target: np.ndarray, w: float) -> np.ndarray:
    return np.exp(-(1.0 - target) / w)

def weighted_mae(pred: FieldGrid, target: FieldGrid, w: float, alpha: float = 1.0) -> float:
    """Exponentially weighted MAE, flat mean over all pixels (and samples).

    Args:
        pred: Prediction, any shape
        target: Ground truth, same shape
        w: Weight scale, > 0
        alpha: Exponent of the absolute error

    Returns:
        float: mean of exp(-(1 - y) / w) * |pred - y| ** alpha

    Raises:
        ShapeMismatch: If shapes differ
        ValueError: If w <= 0
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check_pair(pred, target)
    _check_w(w)
    return float(np.mean(pixel_weights(target, w) * np.abs(pred - target) ** alpha))

def per_sample_weighted_mae(pred: np.ndarray, target: np.ndarray, w: float) -> np.ndarray:
    """Weighted MAE of each sample of an (n, H, W) stack."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check_pair(pred, target)
    _check_w(w)
    return np.mean(pixel_weights(target, w) * np.abs(pred - target), axis=(-2, -1))

def weighted_mae_loss(pred: torch.Tensor, target: torch.Tensor, w: float, reduction: str = "mean") -> torch.Tensor:
    """Differentiable weighted MAE used as the training objective."""
    if pred.shape != target.shape:
        raise ShapeMismatch(tuple(target.shape), tuple(pred.shape))
    loss = torch.exp(-(1.0 - target) / w) * (pred - target).abs()
    return loss.sum() if reduction == "sum" else loss.mean()

def region_mae(pred: FieldGrid, target: FieldGrid, masks: RegionMasks, w: float) -> MetricsReport:
    """Plain MAE inside each region plus the weighted MAE over the full lattice.

    ``pred``, ``target`` and the masks may be single lattices or (n, H, W)
    stacks; a stack is pooled pixel-wise. Empty regions are reported as None.

    Raises:
        ShapeMismatch: If the shapes disagree
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check_pair(pred, target)
    err = np.abs(pred - target)
    values, counts = {}, {}
    for name, mask in masks.items():
        if mask.shape != err.shape:
            raise ShapeMismatch(err.shape, mask.shape)
        count = int(mask.sum())
        counts[name] = count
        values[f"mae_{name}"] = float(err[mask].mean()) if count else None
    return MetricsReport(wmae_all=weighted_mae(pred, target, w), counts=counts, **values)

def entropy_score(predictions: np.ndarray) -> float:
    """Mean over pixels of the (divide-by-k) variance of ``k`` stochastic predictions.

    Args:
        predictions: (k, H, W) stack of MC-dropout outputs

    Raises:
        ValueError: If k < 2
    """
    predictions = np.asarray(predictions, dtype=np.float64)
    if predictions.ndim < 2 or predictions.shape[0] < 2:
        raise ValueError(f"Entropy needs at least 2 predictions, got shape {predictions.shape}")
    mean = predictions.mean(axis=0)
    return float(np.sum((predictions - mean) ** 2) / predictions.size)

def output_discrepancy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Euclidean norm of ``a - b`` over the trailing two (pixel) axes."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_pair(a, b)
    return np.sqrt(np.sum((a - b) ** 2, axis=(-2, -1)))

def tod_scores(snapshots, inputs: np.ndarray) -> np.ndarray:
    """Temporal output discrepancy of each lattice in an (n, H, W) stack."""
    late = forward(snapshots.model_at("t_plus_T"), inputs)
    early = forward(snapshots.model_at("t"), inputs)
    return output_discrepancy(late, early)

def tod_score(snapshots, input: FieldGrid) -> float:
    """||f(x; theta_{t+T}) - f(x; theta_t)||_2 over the flattened pixels of one lattice."""
    return float(tod_scores(snapshots, np.asarray(input)[None])[0])
