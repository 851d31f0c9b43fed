from pydantic import BaseModel

TOOL_VERSION = "0.1.0"

class Profile(BaseModel):
    size: int
    n: int
    split_counts: tuple[int, int, int]
    initial_labeled: int
    round_divisor: int
    epochs: int
    batch_size: int
    cnn_channels: list[int]
    unet_channels: list[int]
    unet_bottleneck: int

PROFILES = {
    "desk": Profile(
        size=32,
        n=2600,
        split_counts=(2200, 300, 300),
        initial_labeled=200,
        round_divisor=10,
        epochs=60,
        batch_size=16,
        cnn_channels=[1, 16, 32, 64, 128, 256],
        unet_channels=[1, 16, 32, 64],
        unet_bottleneck=128,
    ),
    "paper": Profile(
        size=100,
        n=20000,
        # 16000/4000/4000 would exceed n; validation and test share the rest
        split_counts=(16000, 2000, 2000),
        initial_labeled=1000,
        round_divisor=15,
        epochs=500,
        batch_size=64,
        cnn_channels=[1, 64, 128, 256, 512, 1024, 2048],
        unet_channels=[1, 64, 128, 256, 512],
        unet_bottleneck=1024,
    ),
}

DEFAULT_PROFILE = "desk"

# Scenario geometry
SOURCE_RADIUS = 5.0
PRIMARY_INTENSITY = 1.0

# Physics
DEFAULT_DIFFUSIVITY = 1.0
DEFAULT_DECAY = 1.0 / 400.0

# Target-value bands of the ring regions: [lo, hi) except RING1 which is closed
RING_BANDS = {
    "ring1": (0.2, 1.0),
    "ring2": (0.1, 0.2),
    "ring3": (0.05, 0.1),
}

# Training defaults
DEFAULT_LOSS_W = 0.2
DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_LEAKY_SLOPE = 0.02
DEFAULT_ENTROPY_DROPOUT = 0.4
DEFAULT_MC_PASSES = 16

# Container formats
DATASET_MAGIC = b"SSDS"
DATASET_VERSION = 1
CHECKPOINT_MAGIC = b"SSCK"
CHECKPOINT_VERSION = 1

SPLIT_NAMES = ("train", "val", "test")
PARAMS_COLUMNS = ["idx", "cx1", "cy1", "cx2", "cy2", "q2", "d", "split"]
TRAIN_LOG_COLUMNS = ["epoch", "train_loss", "val_loss", "wall_s"]
METRICS_COLUMNS = [
    "arch", "strategy", "seed", "round", "labeled_count", "labeled_frac",
    "wmae_all", "mae_src", "mae_ring1", "mae_ring2", "mae_ring3", "mae_field",
    "train_wall_s", "acq_wall_s",
]

# Absolute-error colour range of the error-map panels, per architecture
ERROR_MAP_RANGE = {
    "unet": 0.05,
    "cnn": 0.2,
}

# RNG stream identifiers for counter-based derivation
STREAM_SCENARIO = 0
STREAM_SPLIT = 1
STREAM_INITIAL = 2
STREAM_ACQUISITION = 3
STREAM_TRAIN = 4
STREAM_DROPOUT = 5
