import numpy as np

from .constants import RING_BANDS
from .exceptions import ScenarioError, ShapeMismatch
from .types import FieldGrid, RegionMasks, ScenarioParams, check_field

def disk_masks(params: ScenarioParams, size: int) -> list[np.ndarray]:
    """Pixel membership of each source disk.

    A pixel belongs to a source when its integer center lies within Euclidean
    distance ``r`` of the (continuous) source center.
    """
    rows, cols = np.mgrid[0:size, 0:size]
    return [(cols - cx) ** 2 + (rows - cy) ** 2 <= params.r ** 2 for cx, cy, _ in params.sources]

def render_input(params: ScenarioParams, size: int, allow_overlap: bool = False) -> FieldGrid:
    """Rasterize the initial-condition image of a scenario.

    Args:
        params: Scenario parameters
        size: Lattice side length in pixels
        allow_overlap: Accept scenarios whose disks overlap

    Returns:
        FieldGrid: ``size`` x ``size`` float64 grid, ``q_k`` inside disk k and
        0 elsewhere; where disks overlap the larger intensity wins

    Raises:
        ScenarioError: If the lattice is too small or the params violate their bounds
    """
    if size < 2 * params.r + 2:
        raise ScenarioError("size", size, f"Lattice must be at least {2 * params.r + 2} pixels")
    params.check_bounds(size, allow_overlap=allow_overlap)
    grid = np.zeros((size, size), dtype=np.float64)
    for mask, (_, _, q) in zip(disk_masks(params, size), params.sources):
        np.maximum(grid, np.where(mask, q, 0.0), out=grid)
    return grid

def compute_region_masks(input: FieldGrid, target: FieldGrid) -> RegionMasks:
    """Regions of interest of a lattice (or of a stack of lattices).

    SRC/FIELD come from the input image, RING1-3 from target-value bands
    [0.2, 1.0], [0.1, 0.2) and [0.05, 0.1).

    Raises:
        ShapeMismatch: If input and target shapes differ
    """
    if input.shape != target.shape:
        raise ShapeMismatch(input.shape, target.shape)
    check_field(target)
    src = input > 0
    lo1, hi1 = RING_BANDS["ring1"]
    lo2, hi2 = RING_BANDS["ring2"]
    lo3, hi3 = RING_BANDS["ring3"]
    return RegionMasks(
        src=src,
        field=~src,
        ring1=(target >= lo1) & (target <= hi1),
        ring2=(target >= lo2) & (target < hi2),
        ring3=(target >= lo3) & (target < hi3),
    )
