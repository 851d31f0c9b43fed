import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .constants import SOURCE_RADIUS, PRIMARY_INTENSITY, DEFAULT_DIFFUSIVITY, DEFAULT_DECAY
from .exceptions import ScenarioError, ShapeMismatch

# A FieldGrid is a 2-D float array indexed [row, col] = [y, x].
FieldGrid = np.ndarray

REGION_NAMES = ("src", "field", "ring1", "ring2", "ring3")

def check_field(grid: FieldGrid, shape: tuple | None = None) -> FieldGrid:
    """Validate that a grid is finite and, optionally, of a given shape.

    Args:
        grid: Array whose trailing two axes are the lattice
        shape: Required full shape, if any

    Returns:
        FieldGrid: The grid itself

    Raises:
        ShapeMismatch: If the shape differs from ``shape``
        ValueError: If the grid holds NaN or Inf
    """
    if shape is not None and tuple(grid.shape) != tuple(shape):
        raise ShapeMismatch(shape, grid.shape)
    if grid.ndim < 2:
        raise ShapeMismatch((None, None), grid.shape)
    if not np.all(np.isfinite(grid)):
        raise ValueError("Field grid contains non-finite values")
    return grid

class ScenarioParams(BaseModel):
    """
    The generative parameters of one two-source simulation.

    Coordinates are continuous lattice units; ``cx`` is the column and ``cy``
    the row of a source center.

    Attributes:
        cx1 (float): Column of source 1
        cy1 (float): Row of source 1
        cx2 (float): Column of source 2
        cy2 (float): Row of source 2
        q2 (float): Intensity of source 2 in [0, 1]
        q1 (float): Intensity of source 1, fixed to 1
        r (float): Source radius in lattice units
    """
    model_config = ConfigDict(frozen=True)

    cx1: float
    cy1: float
    cx2: float
    cy2: float
    q2: float
    q1: float = PRIMARY_INTENSITY
    r: float = SOURCE_RADIUS

    @field_validator('q2')
    def validate_q2(cls, v):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"q2 must lie in [0, 1], got {v}")
        return v

    @field_validator('q1')
    def validate_q1(cls, v):
        if v != PRIMARY_INTENSITY:
            raise ValueError(f"q1 is fixed to {PRIMARY_INTENSITY}, got {v}")
        return v

    @field_validator('r')
    def validate_r(cls, v):
        if v <= 0:
            raise ValueError(f"Radius must be positive, got {v}")
        return v

    @property
    def d(self) -> float:
        """Euclidean distance between the two source centers."""
        return math.hypot(self.cx1 - self.cx2, self.cy1 - self.cy2)

    @property
    def sources(self) -> list[tuple[float, float, float]]:
        return [(self.cx1, self.cy1, self.q1), (self.cx2, self.cy2, self.q2)]

    def identifiers(self) -> np.ndarray:
        """The diversity identifier vector (cx1, cy1, cx2, cy2, d, Q)."""
        return np.array([self.cx1, self.cy1, self.cx2, self.cy2, self.d, self.q2], dtype=np.float64)

    def check_bounds(self, size: int, allow_overlap: bool = False) -> "ScenarioParams":
        """Check that both disks lie inside a ``size`` lattice (and do not overlap).

        Raises:
            ScenarioError: On the first violated invariant
        """
        lo, hi = self.r, size - 1 - self.r
        for name in ('cx1', 'cy1', 'cx2', 'cy2'):
            value = getattr(self, name)
            if not lo <= value <= hi:
                raise ScenarioError(name, value, f"Source center outside [{lo}, {hi}]")
        if not allow_overlap and self.d < 2 * self.r:
            raise ScenarioError('d', self.d, f"Source disks overlap (d < {2 * self.r})")
        return self

class PhysicsConfig(BaseModel):
    """
    Diffusion-with-decay constants.

    Attributes:
        D (float): Diffusivity in units^2/s
        gamma (float): Decay rate in 1/s
    """
    model_config = ConfigDict(frozen=True)

    D: float = DEFAULT_DIFFUSIVITY
    gamma: float = DEFAULT_DECAY

    @field_validator('D', 'gamma')
    def validate_positive(cls, v):
        if not v > 0:
            raise ValueError(f"Value must be positive, got {v}")
        return v

    @property
    def diffusion_length(self) -> float:
        return math.sqrt(self.D / self.gamma)

class RegionMasks(BaseModel):
    """Boolean region-of-interest masks sharing the lattice shape."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    src: np.ndarray
    field: np.ndarray
    ring1: np.ndarray
    ring2: np.ndarray
    ring3: np.ndarray

    def items(self) -> list[tuple[str, np.ndarray]]:
        return [(name, getattr(self, name)) for name in REGION_NAMES]

class MetricsReport(BaseModel):
    """
    Test-split errors of a surrogate.

    A metric over an empty mask is ``None`` (reported as an empty CSV cell),
    never 0.

    Attributes:
        wmae_all (float | None): Weighted MAE over every pixel
        mae_src (float | None): Plain MAE on source pixels
        mae_field (float | None): Plain MAE on non-source pixels
        mae_ring1 (float | None): Plain MAE where the target is in [0.2, 1.0]
        mae_ring2 (float | None): Plain MAE where the target is in [0.1, 0.2)
        mae_ring3 (float | None): Plain MAE where the target is in [0.05, 0.1)
        counts (dict[str, int]): Pixel count per region
    """
    wmae_all: float | None = None
    mae_src: float | None = None
    mae_field: float | None = None
    mae_ring1: float | None = None
    mae_ring2: float | None = None
    mae_ring3: float | None = None
    counts: dict[str, int] = Field(default_factory=dict)

    @field_validator('wmae_all', 'mae_src', 'mae_field', 'mae_ring1', 'mae_ring2', 'mae_ring3')
    def validate_metric(cls, v):
        if v is not None and (not math.isfinite(v) or v < 0):
            raise ValueError(f"Metric must be finite and non-negative, got {v}")
        return v

class AcquisitionResult(BaseModel):
    """
    Outcome of one acquisition step.

    Attributes:
        strategy (str): Strategy echo
        selected (list[int]): Dataset indices to label, in selection order
        scores (dict[int, float] | None): Per-pool-index score; None for random
        reference_only (bool): True for the true-loss oracle, which needs labels
    """
    strategy: str
    selected: list[int]
    scores: dict[int, float] | None = None
    reference_only: bool = False

class CellResult(BaseModel):
    """
    Outcome of one (arch, strategy, seed) cell of a run matrix.

    Attributes:
        arch (str): Architecture of the cell
        strategy (str): Acquisition strategy of the cell
        seed (int): Run seed
        run_dir (str): Directory holding the cell's artifacts
        status (bool): Whether the cell completed
        error (str | None): Error message if the cell failed, None if successful
    """
    arch: str
    strategy: str
    seed: int
    run_dir: str
    status: bool
    error: str | None = None

class RunManifest(BaseModel):
    tool_version: str
    config: dict
    dataset_fingerprint: str
    seeds: dict[str, int]
    host: dict[str, str]
    reference_only: bool = False

class ALState(BaseModel):
    """
    Progress of an active-learning run.

    Attributes:
        round (int): Index of the next round to run
        labeled (list[int]): Labeled training indices, in the order they were added
        pool (list[int]): Unlabeled training indices, ascending
        history (list[dict]): One metrics row per completed round
        checkpoints (list[str]): Best-validation checkpoint path per completed round
        finished (bool): Whether the stop rule has fired
    """
    round: int = 0
    labeled: list[int] = Field(default_factory=list)
    pool: list[int] = Field(default_factory=list)
    history: list[dict] = Field(default_factory=list)
    checkpoints: list[str] = Field(default_factory=list)
    finished: bool = False

    @model_validator(mode='after')
    def validate_partition(self):
        if set(self.labeled) & set(self.pool):
            raise ValueError("Labeled and pool index sets overlap")
        if len(self.history) != len(self.checkpoints):
            raise ValueError("Every completed round needs a checkpoint")
        return self
