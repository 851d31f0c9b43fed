import numpy as np
import pytest
from pydantic import ValidationError

from diffal.exceptions import ScenarioError, ShapeMismatch
from diffal.lattice import compute_region_masks, disk_masks, render_input
from diffal.types import PhysicsConfig, ScenarioParams

def test_scenario_params_d_and_identifiers():
    p = ScenarioParams(cx1=10.0, cy1=10.0, cx2=13.0, cy2=14.0, q2=0.25)
    assert p.d == 5.0
    assert p.q1 == 1.0
    assert p.r == 5.0
    np.testing.assert_array_equal(p.identifiers(), [10.0, 10.0, 13.0, 14.0, 5.0, 0.25])

def test_scenario_params_validation():
    with pytest.raises(ValidationError):
        ScenarioParams(cx1=10, cy1=10, cx2=30, cy2=30, q2=1.5)
    with pytest.raises(ValidationError):
        ScenarioParams(cx1=10, cy1=10, cx2=30, cy2=30, q2=0.5, q1=0.5)
    with pytest.raises(ValidationError):
        ScenarioParams(cx1=10, cy1=10, cx2=30, cy2=30, q2=0.5, r=0)

def test_physics_diffusion_length():
    assert PhysicsConfig().diffusion_length == 20.0
    assert PhysicsConfig(D=4.0, gamma=1.0).diffusion_length == 2.0
    with pytest.raises(ValidationError):
        PhysicsConfig(gamma=0.0)

def test_render_input_disk_values(two_sources):
    grid = render_input(two_sources, 32)
    assert grid.shape == (32, 32)
    assert set(np.unique(grid)) == {0.0, 0.6, 1.0}
    # row-major: pixel [row, col] = [y, x]
    assert grid[10, 8] == 1.0
    assert grid[20, 22] == 0.6
    assert grid[0, 0] == 0.0

def test_render_input_integer_center_pixel_count():
    p = ScenarioParams(cx1=10.0, cy1=10.0, cx2=25.0, cy2=25.0, q2=1.0)
    grid = render_input(p, 36)
    # lattice points within distance 5 of an integer point
    assert int(np.sum(grid == 1.0)) == 2 * 81

def test_render_input_zero_intensity_source_invisible():
    p = ScenarioParams(cx1=10.0, cy1=12.0, cx2=22.0, cy2=20.0, q2=0.0)
    grid = render_input(p, 32)
    assert np.array_equal(grid > 0, disk_masks(p, 32)[0])
    assert grid.max() == 1.0

def test_render_input_two_percent_at_paper_scale():
    p = ScenarioParams(cx1=30.3, cy1=40.7, cx2=70.1, cy2=60.2, q2=0.5)
    count = int(np.sum(render_input(p, 100) > 0))
    # about 2 * floor(pi * 25) = 156 pixels, 2% of the lattice
    assert 0.013 < count / 100 ** 2 < 0.019

def test_render_input_mirror():
    p = ScenarioParams(cx1=8.2, cy1=9.5, cx2=20.7, cy2=21.0, q2=0.3)
    mirrored = ScenarioParams(cx1=31 - 8.2, cy1=9.5, cx2=31 - 20.7, cy2=21.0, q2=0.3)
    np.testing.assert_array_equal(render_input(mirrored, 32), np.fliplr(render_input(p, 32)))

def test_render_input_rotation():
    p = ScenarioParams(cx1=8.0, cy1=10.0, cx2=22.0, cy2=20.0, q2=0.7)
    # 90 degree counter-clockwise turn about the center of a 32 lattice: (x, y) -> (y, 31 - x)
    rotated = ScenarioParams(cx1=10.0, cy1=31 - 8.0, cx2=20.0, cy2=31 - 22.0, q2=0.7)
    np.testing.assert_array_equal(render_input(rotated, 32), np.rot90(render_input(p, 32)))

def test_render_input_rejects_bad_scenarios():
    with pytest.raises(ScenarioError):
        render_input(ScenarioParams(cx1=3.0, cy1=10.0, cx2=20.0, cy2=20.0, q2=0.5), 32)
    with pytest.raises(ScenarioError) as e:
        render_input(ScenarioParams(cx1=10.0, cy1=10.0, cx2=14.0, cy2=10.0, q2=0.5), 32)
    assert e.value.field == "d"
    with pytest.raises(ScenarioError):
        render_input(ScenarioParams(cx1=5.0, cy1=5.0, cx2=5.0, cy2=5.0, q2=0.5), 11)

def test_render_input_overlap_max_wins():
    p = ScenarioParams(cx1=10.0, cy1=10.0, cx2=14.0, cy2=10.0, q2=0.4)
    grid = render_input(p, 32, allow_overlap=True)
    masks = disk_masks(p, 32)
    assert np.all(grid[masks[0]] == 1.0)
    assert np.all(grid[masks[1] & ~masks[0]] == 0.4)

def test_region_masks_bands():
    target = np.array([[1.0, 0.2, 0.15, 0.1, 0.07, 0.05, 0.04, 0.0]])
    masks = compute_region_masks(np.zeros_like(target), target)
    np.testing.assert_array_equal(masks.ring1, [[1, 1, 0, 0, 0, 0, 0, 0]])
    np.testing.assert_array_equal(masks.ring2, [[0, 0, 1, 1, 0, 0, 0, 0]])
    np.testing.assert_array_equal(masks.ring3, [[0, 0, 0, 0, 1, 1, 0, 0]])
    assert not masks.src.any()
    assert masks.field.all()

def test_region_masks_partition(two_sources):
    input = render_input(two_sources, 32)
    target = np.linspace(0, 1, 32 * 32).reshape(32, 32)
    masks = compute_region_masks(input, target)
    assert np.array_equal(masks.src | masks.field, np.ones_like(masks.src))
    assert not (masks.src & masks.field).any()
    rings = masks.ring1.astype(int) + masks.ring2 + masks.ring3
    assert rings.max() == 1
    np.testing.assert_array_equal(rings == 1, (target >= 0.05) & (target <= 1.0))

def test_region_masks_zero_target():
    masks = compute_region_masks(np.zeros((4, 4)), np.zeros((4, 4)))
    assert not (masks.ring1.any() or masks.ring2.any() or masks.ring3.any())

def test_region_masks_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        compute_region_masks(np.zeros((4, 4)), np.zeros((4, 5)))
