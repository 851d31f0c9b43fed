"""Configuration records for the solver, the surrogates, training and active learning."""
import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .constants import (
    PROFILES, DEFAULT_PROFILE, DEFAULT_LOSS_W, DEFAULT_LEARNING_RATE,
    DEFAULT_LEAKY_SLOPE, DEFAULT_MC_PASSES, DEFAULT_ENTROPY_DROPOUT,
)
from .utils import deep_merge

Arch = Literal["cnn", "unet"]
Strategy = Literal["random", "entropy", "tod", "trueloss", "diversity"]

STRATEGY_ALIASES = {"true-loss": "trueloss", "true_loss": "trueloss"}
ARCH_ALIASES = {"cnn-autoencoder": "cnn", "cnn_autoencoder": "cnn"}

class SolverConfig(BaseModel):
    """
    Steady-state solver settings.

    Attributes:
        mode (str): ``fixed`` holds source pixels at their intensity,
            ``flux`` adds the rendered input as a volumetric source term
        tolerance (float): Bound on the relative residual ||Au - b|| / ||b||
        max_iterations (int): Iteration cap of the conjugate-gradient path
        method (str): ``conjugate-gradient`` (Jacobi preconditioned) or ``direct-sparse``
    """
    model_config = ConfigDict(frozen=True)

    mode: Literal["fixed", "flux"] = "fixed"
    tolerance: float = 1e-10
    max_iterations: int = 10000
    method: Literal["conjugate-gradient", "direct-sparse"] = "conjugate-gradient"

    @field_validator('tolerance')
    def validate_tolerance(cls, v):
        if not v > 0:
            raise ValueError(f"Tolerance must be positive, got {v}")
        return v

    @field_validator('max_iterations')
    def validate_max_iterations(cls, v):
        if v < 1:
            raise ValueError(f"max_iterations must be at least 1, got {v}")
        return v

class ModelSpec(BaseModel):
    """
    Architecture of a surrogate network.

    ``encoder_channels`` starts with the single input channel. For the U-Net
    the bottleneck width is given separately in ``bottleneck_channels``.

    Attributes:
        arch (str): ``cnn`` (autoencoder) or ``unet``
        input_size (int): Lattice side length in pixels
        encoder_channels (list[int]): Channel sequence of the encoder
        bottleneck_channels (int | None): U-Net bottleneck width
        kernel_size (int): Odd convolution kernel size
        leaky_slope (float): LeakyReLU slope of the autoencoder
        dropout_rate (float): Dropout after the first two encoder normalizations
        batch_norm (bool | None): Defaults to on for ``cnn`` and off for ``unet``
    """
    model_config = ConfigDict(frozen=True)

    arch: Arch
    input_size: int
    encoder_channels: list[int]
    bottleneck_channels: int | None = None
    kernel_size: int = 3
    leaky_slope: float = DEFAULT_LEAKY_SLOPE
    dropout_rate: float = 0.0
    batch_norm: bool | None = None

    @field_validator('arch', mode='before')
    def normalize_arch(cls, v):
        return ARCH_ALIASES.get(v, v)

    @field_validator('kernel_size')
    def validate_kernel(cls, v):
        if v < 1 or v % 2 == 0:
            raise ValueError(f"Kernel size must be a positive odd number, got {v}")
        return v

    @field_validator('dropout_rate')
    def validate_dropout(cls, v):
        if not 0.0 <= v < 1.0:
            raise ValueError(f"Dropout rate must lie in [0, 1), got {v}")
        return v

    @field_validator('encoder_channels')
    def validate_channels(cls, v):
        if len(v) < 2 or v[0] != 1 or any(c < 1 for c in v):
            raise ValueError(f"Channel sequence must start at 1 and have a stage, got {v}")
        return v

    @model_validator(mode='after')
    def validate_arch_fields(self):
        if self.arch == "unet" and self.bottleneck_channels is None:
            raise ValueError("U-Net spec requires bottleneck_channels")
        if self.batch_norm is None:
            object.__setattr__(self, 'batch_norm', self.arch == "cnn")
        return self

    @staticmethod
    def for_profile(arch: str, profile: str = DEFAULT_PROFILE, dropout_rate: float = 0.0) -> "ModelSpec":
        """Build the spec of ``arch`` with the channel preset of a named profile."""
        arch = ARCH_ALIASES.get(arch, arch)
        p = PROFILES[profile]
        if arch == "cnn":
            return ModelSpec(arch="cnn", input_size=p.size, encoder_channels=p.cnn_channels,
                             dropout_rate=dropout_rate)
        return ModelSpec(arch="unet", input_size=p.size, encoder_channels=p.unet_channels,
                         bottleneck_channels=p.unet_bottleneck, dropout_rate=dropout_rate)

class TrainConfig(BaseModel):
    """
    Per-round training settings.

    Attributes:
        epochs (int): Epochs per round
        batch_size (int): Mini-batch size
        optimizer (str): ``adam`` or ``sgd``
        learning_rate (float): Step size; 0 freezes the parameters
        betas (tuple[float, float]): Adam moment coefficients
        momentum (float): SGD momentum
        loss_w (float): The ``w`` of the exponentially weighted MAE
        seed (int): Initialization and shuffling seed
        snapshot_gap (int): Optimizer steps T between the two TOD snapshots
        warm_start (bool): Start a round from the previous round's weights
        deterministic (bool): Request deterministic kernels
        device (str): Torch device
        progress (bool): Show a progress bar over epochs
    """
    epochs: int = PROFILES[DEFAULT_PROFILE].epochs
    batch_size: int = PROFILES[DEFAULT_PROFILE].batch_size
    optimizer: Literal["adam", "sgd"] = "adam"
    learning_rate: float = DEFAULT_LEARNING_RATE
    betas: tuple[float, float] = (0.9, 0.999)
    momentum: float = 0.0
    loss_w: float = DEFAULT_LOSS_W
    seed: int = 0
    snapshot_gap: int = 1
    warm_start: bool = False
    deterministic: bool = True
    device: str = "cpu"
    progress: bool = False

    @field_validator('epochs', 'batch_size', 'snapshot_gap')
    def validate_count(cls, v):
        if v < 1:
            raise ValueError(f"Value must be at least 1, got {v}")
        return v

    @field_validator('learning_rate')
    def validate_lr(cls, v):
        if v < 0:
            raise ValueError(f"Learning rate must be non-negative, got {v}")
        return v

    @field_validator('loss_w')
    def validate_w(cls, v):
        if not v > 0:
            raise ValueError(f"Loss weight w must be positive, got {v}")
        return v

class StopRule(BaseModel):
    """
    When the active-learning loop ends.

    Attributes:
        kind (str): ``pool-exhausted``, ``max-labeled`` (S) or ``target-metric`` (P)
        max_labeled (int | None): Labeled-set size S
        target_wmae (float | None): Threshold P on the test weighted MAE
    """
    kind: Literal["pool-exhausted", "max-labeled", "target-metric"] = "pool-exhausted"
    max_labeled: int | None = None
    target_wmae: float | None = None

    @model_validator(mode='after')
    def validate_threshold(self):
        if self.kind == "max-labeled" and (self.max_labeled is None or self.max_labeled < 1):
            raise ValueError("max-labeled stop rule requires max_labeled >= 1")
        if self.kind == "target-metric" and (self.target_wmae is None or self.target_wmae <= 0):
            raise ValueError("target-metric stop rule requires target_wmae > 0")
        return self

class SeedConfig(BaseModel):
    data: int
    model: int
    acquisition: int

class ALConfig(BaseModel):
    """
    One active-learning run.

    Unset fields are materialized from the profile when the run starts and
    written to ``run_manifest.json``.

    Attributes:
        dataset (str): Dataset container directory
        arch (str): Surrogate architecture
        strategy (str): Acquisition strategy
        profile (str): Named profile supplying the defaults
        initial_labeled (int | None): Size of the initial labeled set
        round_batch (int | None): B, samples acquired per round
        stop (StopRule): Stop rule
        train (TrainConfig): Per-round training settings
        model (ModelSpec | None): Explicit architecture; profile preset if None
        seed (int): Run seed, the default for all three seed streams
        seeds (SeedConfig | None): Separate data / model / acquisition seeds
        mc_passes (int): k, MC-dropout passes of the entropy strategy
        entropy_dropout (float): Dropout rate used by the entropy strategy
        eval_splits (list[str]): Splits evaluated each round
        dump_scores (bool): Write per-round ``scores.csv``
    """
    dataset: str
    arch: Arch = "unet"
    strategy: Strategy = "random"
    profile: str = DEFAULT_PROFILE
    initial_labeled: int | None = None
    round_batch: int | None = None
    stop: StopRule = Field(default_factory=StopRule)
    train: TrainConfig = Field(default_factory=TrainConfig)
    model: ModelSpec | None = None
    seed: int = 0
    seeds: SeedConfig | None = None
    mc_passes: int = DEFAULT_MC_PASSES
    entropy_dropout: float = DEFAULT_ENTROPY_DROPOUT
    eval_splits: list[Literal["val", "test"]] = Field(default_factory=lambda: ["test"])
    dump_scores: bool = True

    @field_validator('arch', mode='before')
    def normalize_arch(cls, v):
        return ARCH_ALIASES.get(v, v)

    @field_validator('strategy', mode='before')
    def normalize_strategy(cls, v):
        return STRATEGY_ALIASES.get(v, v)

    @field_validator('profile')
    def validate_profile(cls, v):
        if v not in PROFILES:
            raise ValueError(f"Unknown profile '{v}', expected one of {sorted(PROFILES)}")
        return v

    @field_validator('initial_labeled', 'round_batch')
    def validate_optional_count(cls, v):
        if v is not None and v < 1:
            raise ValueError(f"Value must be at least 1, got {v}")
        return v

    @field_validator('mc_passes')
    def validate_mc_passes(cls, v):
        if v < 2:
            raise ValueError(f"Entropy needs at least 2 MC passes, got {v}")
        return v

    @model_validator(mode='after')
    def validate_combination(self):
        if self.strategy == "entropy" and self.arch == "unet":
            raise ValueError("entropy acquisition is unsupported for the U-Net architecture "
                             "(no dropout placement is defined for it)")
        if self.model is not None and self.model.arch != self.arch:
            raise ValueError(f"Model spec arch '{self.model.arch}' differs from run arch '{self.arch}'")
        if self.seeds is None:
            self.seeds = SeedConfig(data=self.seed, model=self.seed, acquisition=self.seed)
        return self

    def resolved_model(self) -> ModelSpec:
        """The architecture spec of the run, with dropout placed for entropy."""
        dropout = self.entropy_dropout if self.strategy == "entropy" else 0.0
        if self.model is not None:
            return self.model.model_copy(update={"dropout_rate": dropout}) if dropout else self.model
        return ModelSpec.for_profile(self.arch, self.profile, dropout_rate=dropout)

def load_config(path: str | Path | None = None, overrides: dict | None = None) -> ALConfig:
    """Read an ``ALConfig`` from a JSON document, letting ``overrides`` win.

    Args:
        path: JSON file mirroring the ALConfig / TrainConfig / SolverConfig field names
        overrides: Values taken from explicit command-line flags

    Returns:
        ALConfig: The validated configuration

    Raises:
        pydantic.ValidationError: If the merged document is invalid
    """
    document = {}
    if path is not None:
        document = json.loads(Path(path).read_text())
    document = deep_merge(document, overrides or {})
    return ALConfig.model_validate(document)
