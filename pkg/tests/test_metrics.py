import math

import numpy as np
import pytest
import torch

from diffal.exceptions import ShapeMismatch
from diffal.lattice import compute_region_masks, render_input
from diffal.metrics import (
    entropy_score, output_discrepancy, per_sample_weighted_mae, region_mae, tod_score, weighted_mae, weighted_mae_loss,
)
from diffal.models import build_model
from diffal.training import ModelSnapshots, _buffers, _parameters
from diffal.types import MetricsReport

def test_weighted_mae_hand_values():
    ones = np.ones((4, 4))
    assert weighted_mae(np.full((4, 4), 0.5), ones, w=0.2) == pytest.approx(0.5, abs=1e-9)
    zeros = np.zeros((4, 4))
    assert weighted_mae(np.full((4, 4), 0.5), zeros, w=0.5) == pytest.approx(math.exp(-2) * 0.5, abs=1e-9)
    assert weighted_mae(np.full((4, 4), 0.5), zeros, w=0.5) == pytest.approx(0.0676676, abs=1e-7)

def test_weighted_mae_zero_on_exact_prediction():
    target = np.random.default_rng(0).uniform(size=(8, 8))
    assert weighted_mae(target, target, w=0.2) == 0.0

def test_weighted_mae_large_w_is_plain_mae():
    rng = np.random.default_rng(1)
    pred, target = rng.uniform(size=(2, 10, 10))
    assert weighted_mae(pred, target, w=1e6) == pytest.approx(np.mean(np.abs(pred - target)), rel=1e-6)

def test_weighted_mae_weights_follow_target():
    # the same error counts more where the target is close to 1
    target = np.array([[0.0, 1.0]])
    near_zero = weighted_mae(np.array([[0.1, 1.0]]), target, w=0.2)
    near_one = weighted_mae(np.array([[0.0, 1.1]]), target, w=0.2)
    assert near_one > near_zero
    assert near_one == pytest.approx(0.05, abs=1e-9)
    assert near_zero == pytest.approx(0.05 * math.exp(-5), abs=1e-9)

def test_weighted_mae_alpha():
    target = np.ones((2, 2))
    assert weighted_mae(np.full((2, 2), 0.5), target, w=0.2, alpha=2.0) == pytest.approx(0.25)

def test_weighted_mae_rejects_bad_input():
    with pytest.raises(ShapeMismatch):
        weighted_mae(np.zeros((3, 3)), np.zeros((3, 4)), w=0.2)
    with pytest.raises(ValueError):
        weighted_mae(np.zeros((3, 3)), np.zeros((3, 3)), w=0.0)

def test_dataset_mean_is_flat():
    rng = np.random.default_rng(2)
    pred, target = rng.uniform(size=(2, 5, 6, 6))
    per_sample = per_sample_weighted_mae(pred, target, w=0.2)
    assert per_sample.shape == (5,)
    assert weighted_mae(pred, target, w=0.2) == pytest.approx(per_sample.mean())

def test_torch_loss_matches_numpy():
    rng = np.random.default_rng(3)
    pred, target = rng.uniform(size=(2, 3, 1, 8, 8))
    loss = weighted_mae_loss(torch.from_numpy(pred), torch.from_numpy(target), w=0.2)
    assert float(loss) == pytest.approx(weighted_mae(pred, target, w=0.2), rel=1e-12)
    summed = weighted_mae_loss(torch.from_numpy(pred), torch.from_numpy(target), w=0.2, reduction="sum")
    assert float(summed) == pytest.approx(float(loss) * pred.size, rel=1e-12)
    with pytest.raises(ShapeMismatch):
        weighted_mae_loss(torch.zeros(1, 1, 4, 4), torch.zeros(1, 1, 4, 5), w=0.2)

def test_region_mae_constant_shift(two_sources):
    input = render_input(two_sources, 32)
    target = np.clip(input + np.linspace(0, 0.4, 32)[None, :], 0, 1)
    masks = compute_region_masks(input, target)
    report = region_mae(target + 0.1, target, masks, w=0.2)
    for name in ("mae_src", "mae_field", "mae_ring1", "mae_ring2", "mae_ring3"):
        assert getattr(report, name) == pytest.approx(0.1)
    assert report.counts["src"] == int(np.sum(input > 0))
    assert report.wmae_all == pytest.approx(weighted_mae(target + 0.1, target, w=0.2))

def test_region_mae_empty_region_is_none():
    target = np.full((6, 6), 0.3)
    masks = compute_region_masks(np.zeros((6, 6)), target)
    report = region_mae(target, target, masks, w=0.2)
    assert report.mae_src is None
    assert report.mae_ring2 is None and report.mae_ring3 is None
    assert report.mae_ring1 == 0.0
    assert report.counts["src"] == 0

def test_metrics_report_rejects_negative():
    with pytest.raises(ValueError):
        MetricsReport(wmae_all=-1.0)
    with pytest.raises(ValueError):
        MetricsReport(wmae_all=float("nan"))

def test_entropy_score():
    predictions = np.stack([np.zeros((4, 4)), np.ones((4, 4))])
    assert entropy_score(predictions) == pytest.approx(0.25, abs=1e-9)
    assert entropy_score(np.ones((5, 4, 4))) == 0.0
    with pytest.raises(ValueError):
        entropy_score(np.ones((1, 4, 4)))

def test_output_discrepancy():
    a = np.full((3, 4, 4), 0.3)
    b = np.zeros((3, 4, 4))
    np.testing.assert_allclose(output_discrepancy(a, b), 0.3 * 4)
    assert output_discrepancy(a[0], a[0]) == 0.0
    with pytest.raises(ShapeMismatch):
        output_discrepancy(a, b[:, :3])

def test_entropy_score_is_mean_pixel_variance():
    predictions = np.random.default_rng(4).normal(size=(16, 8, 8))
    assert entropy_score(predictions) == pytest.approx(np.var(predictions, axis=0).mean(), rel=1e-12)

def test_entropy_score_scales_quadratically():
    predictions = np.random.default_rng(5).uniform(size=(8, 6, 6))
    for c in (0.5, 3.0, -2.0):
        assert entropy_score(c * predictions) == pytest.approx(c ** 2 * entropy_score(predictions), rel=1e-12)

def _constant_theta(model, value):
    """Parameters under which the U-Net outputs ``value`` at every pixel."""
    theta = {name: torch.zeros_like(p, dtype=torch.float64) for name, p in _parameters(model).items()}
    theta["head.bias"] = torch.full_like(theta["head.bias"], value)
    return theta

def test_tod_score_of_constant_outputs(mini_unet, small_dataset):
    model = build_model(mini_unet, seed=0)
    snapshots = ModelSnapshots(
        spec=mini_unet, theta_t=_constant_theta(model, 0.25), theta_t_plus_T=_constant_theta(model, 0.75),
        buffers=_buffers(model),
    )
    expected = 0.5 * math.sqrt(24 * 24)
    for x in small_dataset.inputs[:3]:
        assert tod_score(snapshots, x) == pytest.approx(expected, abs=1e-9)

def test_tod_score_triangle_inequality(mini_unet, small_dataset):
    thetas = [_parameters(build_model(mini_unet, seed=s)) for s in (0, 1, 2)]

    def score(a, b, x):
        pair = ModelSnapshots(spec=mini_unet, theta_t=thetas[a], theta_t_plus_T=thetas[b], buffers={})
        return tod_score(pair, x)

    for x in small_dataset.inputs[:4]:
        assert score(0, 2, x) <= score(0, 1, x) + score(1, 2, x) + 1e-5
        assert score(0, 1, x) == pytest.approx(score(1, 0, x), abs=1e-6)
