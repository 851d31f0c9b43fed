"""Active learning for steady-state diffusion surrogates"""

from .constants import TOOL_VERSION as __version__
from .orchestrator import ActiveLearningRunner, run_active_learning, resume, run_matrix
from .config import ALConfig, ModelSpec, SolverConfig, TrainConfig, StopRule, load_config
from .types import ScenarioParams, PhysicsConfig, ALState

__all__ = [
    'ActiveLearningRunner',
    'run_active_learning',
    'resume',
    'run_matrix',
    'ALConfig',
    'ModelSpec',
    'SolverConfig',
    'TrainConfig',
    'StopRule',
    'load_config',
    'ScenarioParams',
    'PhysicsConfig',
    'ALState',
]
