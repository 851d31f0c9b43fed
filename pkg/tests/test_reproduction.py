"""Desk-scale strategy and architecture ordering.

Runs the U-Net and CNN autoencoder with random and TOD acquisition over three
seeds on the desk profile (pool 2000, initial 200, B = 200). Expect hours of
CPU time: ``pytest tests/test_reproduction.py -m slow``.
"""
import numpy as np
import pytest

from diffal import ALConfig, ActiveLearningRunner
from diffal.report import quarterly_table

pytestmark = pytest.mark.slow

SEEDS = [0, 1, 2]

@pytest.fixture(scope="module")
def desk_matrix(tmp_path_factory):
    root = tmp_path_factory.mktemp("desk")
    runner = ActiveLearningRunner(profile="desk")
    runner.generate(root / "data", seed=0)
    base = ALConfig(dataset=str(root / "data"), profile="desk", initial_labeled=200, round_batch=200)
    result = runner.run_matrix(base, root / "matrix", archs=["unet", "cnn"], strategies=["random", "tod"],
                               seeds=SEEDS)
    assert all(cell.status for cell in result.cells)
    return result

def _wmae_at(result, arch: str, strategy: str, quarter: float) -> np.ndarray:
    """Per-seed test wmae_all at the round nearest ``quarter`` labeled."""
    table = quarterly_table(result.combined)
    row = table[(table["arch"] == arch) & (table["strategy"] == strategy) & (table["quarter"] == quarter)].iloc[0]
    rows = result.combined[
        (result.combined["arch"] == arch)
        & (result.combined["strategy"] == strategy)
        & (result.combined["round"] == row["round"])
    ]
    values = rows.sort_values("seed")["wmae_all"].to_numpy()
    assert len(values) == len(SEEDS)
    return values

def test_tod_at_half_matches_random_at_three_quarters(desk_matrix):
    tod_half = _wmae_at(desk_matrix, "unet", "tod", 0.5)
    assert tod_half.mean() <= _wmae_at(desk_matrix, "unet", "random", 0.5).mean()
    assert np.sum(tod_half <= _wmae_at(desk_matrix, "unet", "random", 0.75)) >= 2

def test_unet_beats_cnn_and_gains_more_from_tod(desk_matrix):
    assert _wmae_at(desk_matrix, "unet", "random", 1.0).mean() < _wmae_at(desk_matrix, "cnn", "random", 1.0).mean()
    gaps = {
        arch: _wmae_at(desk_matrix, arch, "random", 0.5).mean() - _wmae_at(desk_matrix, arch, "tod", 0.5).mean()
        for arch in ("unet", "cnn")
    }
    assert gaps["unet"] > gaps["cnn"]
