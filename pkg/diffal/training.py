"""One round of surrogate training with best-validation checkpointing."""
import copy
import logging
import math
import time

import numpy as np
import pandas as pd
import torch
import torch.nn as nn
from pydantic import BaseModel, ConfigDict, model_validator
from torch.utils.data import DataLoader, TensorDataset
from tqdm import tqdm

from .config import ModelSpec, TrainConfig
from .constants import TRAIN_LOG_COLUMNS
from .exceptions import ShapeMismatch, TrainingDivergence
from .metrics import weighted_mae_loss
from .models import build_model

logger = logging.getLogger(__name__)

class ModelSnapshots(BaseModel):
    """
    Parameters of a model T optimizer steps apart, for the output discrepancy.

    Both snapshots share the final buffers (batch-norm running statistics), so
    they differ only in trainable parameters.

    Attributes:
        spec (ModelSpec): Architecture shared by both snapshots
        theta_t (dict): Parameters T steps before the end of training
        theta_t_plus_T (dict): Final parameters
        buffers (dict): Final non-trainable state
        T (int): Step gap
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: ModelSpec
    theta_t: dict[str, torch.Tensor]
    theta_t_plus_T: dict[str, torch.Tensor]
    buffers: dict[str, torch.Tensor]
    T: int = 1

    @model_validator(mode='after')
    def validate_coherent(self):
        if self.T < 1:
            raise ValueError(f"Snapshot gap T must be at least 1, got {self.T}")
        if self.theta_t.keys() != self.theta_t_plus_T.keys():
            raise ValueError("Snapshots do not share a parameter layout")
        for name, t in self.theta_t.items():
            if t.shape != self.theta_t_plus_T[name].shape:
                raise ShapeMismatch(tuple(t.shape), tuple(self.theta_t_plus_T[name].shape))
        return self

    def model_at(self, which: str) -> nn.Module:
        """Eval-mode model at ``"t"`` or ``"t_plus_T"``."""
        theta = self.theta_t if which == "t" else self.theta_t_plus_T
        model = build_model(self.spec).to(next(iter(theta.values())).dtype)
        model.load_state_dict({**self.buffers, **theta})
        return model.eval()

class TrainResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    model: nn.Module
    snapshots: ModelSnapshots
    log: pd.DataFrame
    best_epoch: int
    best_val_loss: float

def _parameters(model: nn.Module) -> dict[str, torch.Tensor]:
    return {name: p.detach().clone() for name, p in model.named_parameters()}

def _buffers(model: nn.Module) -> dict[str, torch.Tensor]:
    return {name: b.detach().clone() for name, b in model.named_buffers()}

def _tensor(array: np.ndarray, dtype: torch.dtype, device: str) -> torch.Tensor:
    return torch.as_tensor(np.asarray(array), dtype=dtype, device=device).unsqueeze(1)

def evaluate_loss(model: nn.Module, inputs: np.ndarray, targets: np.ndarray, w: float, batch_size: int = 64) -> float:
    """Weighted MAE of ``model`` over a split, accumulated in float64."""
    param = next(model.parameters())
    x = _tensor(inputs, param.dtype, param.device)
    y = _tensor(targets, torch.float64, param.device)
    total = 0.0
    was_training = model.training
    model.eval()
    with torch.no_grad():
        for xb, yb in zip(torch.split(x, batch_size), torch.split(y, batch_size)):
            total += float(weighted_mae_loss(model(xb).double(), yb, w, reduction="sum"))
    model.train(was_training)
    return total / y.numel()

def set_deterministic(enabled: bool) -> None:
    torch.use_deterministic_algorithms(enabled, warn_only=True)

def train_round(
    model: nn.Module,
    train_inputs: np.ndarray,
    train_targets: np.ndarray,
    val_inputs: np.ndarray,
    val_targets: np.ndarray,
    cfg: TrainConfig,
) -> TrainResult:
    """Train ``model`` on the labeled data, keeping the best-validation checkpoint.

    Args:
        model: Freshly built (cold start) or previous-round (warm start) network
        train_inputs: (n, H, W) labeled inputs
        train_targets: (n, H, W) labeled targets
        val_inputs: (m, H, W) validation inputs
        val_targets: (m, H, W) validation targets
        cfg: Training settings

    Returns:
        TrainResult: The best-validation model, the final TOD snapshots and the
        per-epoch log (``epoch,train_loss,val_loss,wall_s``)

    Raises:
        ValueError: If the labeled set is empty
        TrainingDivergence: If a batch loss is not finite
    """
    if len(train_inputs) == 0:
        raise ValueError("Cannot train on an empty labeled set")
    set_deterministic(cfg.deterministic)
    # dropout masks during training draw from the global stream
    torch.manual_seed(cfg.seed)
    model.to(cfg.device)
    dtype = next(model.parameters()).dtype
    data = TensorDataset(_tensor(train_inputs, dtype, cfg.device), _tensor(train_targets, dtype, cfg.device))
    generator = torch.Generator().manual_seed(cfg.seed)
    loader = DataLoader(data, batch_size=cfg.batch_size, shuffle=True, generator=generator)

    if cfg.optimizer == "adam":
        optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate, betas=cfg.betas)
    else:
        optimizer = torch.optim.SGD(model.parameters(), lr=cfg.learning_rate, momentum=cfg.momentum)

    total_steps = cfg.epochs * len(loader)
    capture_step = total_steps - cfg.snapshot_gap
    theta_t = _parameters(model) if capture_step <= 0 else None
    has_val = len(val_inputs) > 0

    rows = []
    best_val, best_epoch, best_state = math.inf, 0, None
    step = 0
    for epoch in tqdm(range(1, cfg.epochs + 1), desc="epochs", disable=not cfg.progress, leave=False):
        start = time.perf_counter()
        model.train()
        loss_sum, count = 0.0, 0
        for xb, yb in loader:
            optimizer.zero_grad()
            loss = weighted_mae_loss(model(xb), yb, cfg.loss_w)
            if not torch.isfinite(loss):
                raise TrainingDivergence(epoch, float(loss))
            loss.backward()
            optimizer.step()
            step += 1
            if step == capture_step:
                theta_t = _parameters(model)
            loss_sum += float(loss) * yb.numel()
            count += yb.numel()
        train_loss = loss_sum / count
        val_loss = evaluate_loss(model, val_inputs, val_targets, cfg.loss_w) if has_val else train_loss
        if val_loss < best_val:
            best_val, best_epoch = val_loss, epoch
            best_state = copy.deepcopy(model.state_dict())
        rows.append((epoch, train_loss, val_loss, time.perf_counter() - start))
        logger.debug("epoch %d: train %.6g val %.6g", epoch, train_loss, val_loss)

    snapshots = ModelSnapshots(
        spec=model.spec,
        theta_t=theta_t,
        theta_t_plus_T=_parameters(model),
        buffers=_buffers(model),
        T=cfg.snapshot_gap,
    )
    best = copy.deepcopy(model)
    if best_state is not None:
        best.load_state_dict(best_state)
    best.eval()
    log = pd.DataFrame(rows, columns=TRAIN_LOG_COLUMNS)
    logger.info("trained %d epochs on %d samples: best val %.6g at epoch %d",
                cfg.epochs, len(train_inputs), best_val, best_epoch)
    return TrainResult(model=best, snapshots=snapshots, log=log, best_epoch=best_epoch, best_val_loss=best_val)

def fresh_model(spec: ModelSpec, cfg: TrainConfig, previous: nn.Module | None = None) -> nn.Module:
    """Cold start from ``cfg.seed`` every round, or warm start from ``previous``."""
    model = build_model(spec, seed=cfg.seed)
    if cfg.warm_start and previous is not None:
        model.load_state_dict(previous.state_dict())
    return model
