import pytest

from diffal.config import ALConfig, ModelSpec, SolverConfig, TrainConfig
from diffal.datagen import generate_dataset, split_dataset
from diffal.storage import save_dataset
from diffal.types import PhysicsConfig, ScenarioParams

SMALL_SIZE = 24

@pytest.fixture
def physics():
    return PhysicsConfig()

@pytest.fixture
def direct():
    return SolverConfig(method="direct-sparse")

@pytest.fixture
def two_sources():
    return ScenarioParams(cx1=8.0, cy1=9.5, cx2=22.3, cy2=20.0, q2=0.6)

@pytest.fixture(scope="session")
def small_dataset():
    ds = generate_dataset(60, SMALL_SIZE, PhysicsConfig(), SolverConfig(), seed=11)
    return split_dataset(ds, counts=(40, 10, 10))

@pytest.fixture(scope="session")
def small_dataset_dir(small_dataset, tmp_path_factory):
    return save_dataset(small_dataset, tmp_path_factory.mktemp("data") / "small")

@pytest.fixture
def mini_cnn():
    return ModelSpec(arch="cnn", input_size=SMALL_SIZE, encoder_channels=[1, 4, 8])

@pytest.fixture
def mini_unet():
    return ModelSpec(arch="unet", input_size=SMALL_SIZE, encoder_channels=[1, 4, 8], bottleneck_channels=8)

@pytest.fixture
def fast_train():
    return TrainConfig(epochs=2, batch_size=8, progress=False)

@pytest.fixture
def micro_config(small_dataset_dir, mini_unet, fast_train):
    """Two-round U-Net run: 20 initial labels and a pool of 20 taken in one batch."""
    return ALConfig(
        dataset=str(small_dataset_dir),
        arch="unet",
        strategy="random",
        initial_labeled=20,
        round_batch=20,
        model=mini_unet,
        train=fast_train,
        seed=3,
    )
