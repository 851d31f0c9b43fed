"""Convolutional surrogates: the average-pool autoencoder and the U-Net."""
from contextlib import contextmanager

import numpy as np
import torch
import torch.nn as nn

from .config import ModelSpec
from .exceptions import ModelConfigError, ShapeMismatch

def halving_sizes(size: int, stages: int) -> list[int]:
    """Spatial sizes after each of ``stages`` floor-halvings, starting with ``size``.

    Raises:
        ModelConfigError: If a halving reaches 0
    """
    sizes = [size]
    for _ in range(stages):
        nxt = sizes[-1] // 2
        if nxt < 1:
            raise ModelConfigError(f"Input size {size} cannot be halved {stages} times")
        sizes.append(nxt)
    return sizes

def _conv(cin: int, cout: int, k: int) -> nn.Conv2d:
    return nn.Conv2d(cin, cout, kernel_size=k, padding=k // 2)

class CNNAutoencoder(nn.Module):
    """
    Encoder of conv / batch-norm / LeakyReLU / average-pool stages followed by a
    mirrored decoder of nearest resize to the exact mirror size plus conv.

    With dropout enabled, dropout sits right after the batch normalization of
    the first two encoder stages.
    """

    def __init__(self, spec: ModelSpec):
        super().__init__()
        self.spec = spec
        channels = spec.encoder_channels
        k = spec.kernel_size
        self.sizes = halving_sizes(spec.input_size, len(channels) - 1)
        pairs = list(zip(channels[:-1], channels[1:]))

        self.encoder = nn.ModuleList()
        for i, (cin, cout) in enumerate(pairs):
            layers = [_conv(cin, cout, k)]
            if spec.batch_norm:
                layers.append(nn.BatchNorm2d(cout))
            if spec.dropout_rate > 0 and i < 2:
                layers.append(nn.Dropout(spec.dropout_rate))
            layers += [nn.LeakyReLU(spec.leaky_slope), nn.AvgPool2d(2)]
            self.encoder.append(nn.Sequential(*layers))

        self.decoder = nn.ModuleList()
        mirror = list(reversed(pairs))
        for j, (cout, cin) in enumerate(mirror):
            size = self.sizes[-(j + 2)]
            layers = [nn.Upsample(size=(size, size), mode="nearest"), _conv(cin, cout, k)]
            if j < len(mirror) - 1:
                if spec.batch_norm:
                    layers.append(nn.BatchNorm2d(cout))
                layers.append(nn.LeakyReLU(spec.leaky_slope))
            self.decoder.append(nn.Sequential(*layers))

    def encode(self, x: torch.Tensor) -> torch.Tensor:
        for stage in self.encoder:
            x = stage(x)
        return x

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.encode(x)
        for stage in self.decoder:
            x = stage(x)
        return x

class DoubleConv(nn.Sequential):
    def __init__(self, cin: int, cout: int, k: int, batch_norm: bool = False):
        layers = [_conv(cin, cout, k)]
        if batch_norm:
            layers.append(nn.BatchNorm2d(cout))
        layers += [nn.ReLU(), _conv(cout, cout, k)]
        if batch_norm:
            layers.append(nn.BatchNorm2d(cout))
        layers.append(nn.ReLU())
        super().__init__(*layers)

class UpBlock(nn.Module):
    def __init__(self, cin: int, cskip: int, size: int, k: int, batch_norm: bool = False):
        super().__init__()
        self.up = nn.Sequential(nn.Upsample(size=(size, size), mode="nearest"), _conv(cin, cskip, k))
        self.conv = DoubleConv(2 * cskip, cskip, k, batch_norm)

    def forward(self, x: torch.Tensor, skip: torch.Tensor) -> torch.Tensor:
        return self.conv(torch.cat((skip, self.up(x)), dim=1))

class UNet(nn.Module):
    """
    U-Net whose encoder blocks run at 100^2, 50^2, 25^2 and 12^2 for an input of
    100^2, each followed by a max-pool, down to 512 channels at 6^2 and a
    bottleneck at 3^2.

    Every block output is kept as a skip before its pool, and so is the last
    pooled map, so the decoder concatenates same-resolution encoder features at
    6^2, 12^2, 25^2, 50^2 and the full input size before the final 64 -> 1
    convolution.
    """

    def __init__(self, spec: ModelSpec):
        super().__init__()
        if spec.dropout_rate > 0:
            raise ModelConfigError("No dropout placement is defined for the U-Net")
        self.spec = spec
        channels = spec.encoder_channels
        k = spec.kernel_size
        bn = bool(spec.batch_norm)
        self.sizes = halving_sizes(spec.input_size, len(channels))
        self.pool = nn.MaxPool2d(2)

        self.down = nn.ModuleList(DoubleConv(cin, cout, k, bn) for cin, cout in zip(channels[:-1], channels[1:]))
        self.bottleneck = DoubleConv(channels[-1], spec.bottleneck_channels, k, bn)

        # skip channels by level: block outputs, then the pooled last block
        skip_channels = list(channels[1:]) + [channels[-1]]
        self.up = nn.ModuleList()
        cin = spec.bottleneck_channels
        for level in reversed(range(len(skip_channels))):
            self.up.append(UpBlock(cin, skip_channels[level], self.sizes[level], k, bn))
            cin = skip_channels[level]
        self.head = _conv(channels[1], 1, k)

    def encode(self, x: torch.Tensor) -> tuple[list[torch.Tensor], torch.Tensor]:
        skips = []
        for block in self.down:
            x = block(x)
            skips.append(x)
            x = self.pool(x)
        skips.append(x)
        return skips, self.bottleneck(self.pool(x))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        skips, x = self.encode(x)
        for block, skip in zip(self.up, reversed(skips)):
            x = block(x, skip)
        return self.head(x)

def _init_parameters(model: nn.Module) -> None:
    for m in model.modules():
        if isinstance(m, nn.Conv2d):
            nn.init.kaiming_uniform_(m.weight, nonlinearity="relu")
            nn.init.zeros_(m.bias)

def build_model(spec: ModelSpec, seed: int | None = None) -> nn.Module:
    """Construct and initialize the surrogate described by ``spec``.

    Convolution weights are fan-in-scaled uniform (Kaiming), biases zero.

    Args:
        spec: Architecture description
        seed: Initialization seed; the global torch RNG is left untouched when given

    Returns:
        nn.Module: A ``CNNAutoencoder`` or ``UNet``

    Raises:
        ModelConfigError: If the input size cannot be halved enough times
    """
    with torch.random.fork_rng(devices=[]):
        if seed is not None:
            torch.manual_seed(seed)
        model = CNNAutoencoder(spec) if spec.arch == "cnn" else UNet(spec)
        _init_parameters(model)
    return model

def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())

def _as_batch(model: nn.Module, inputs) -> torch.Tensor:
    param = next(model.parameters())
    x = torch.as_tensor(np.asarray(inputs), dtype=param.dtype, device=param.device)
    if x.dim() == 2:
        x = x.unsqueeze(0)
    size = model.spec.input_size
    if x.dim() != 3 or tuple(x.shape[-2:]) != (size, size):
        raise ShapeMismatch((-1, size, size), tuple(x.shape))
    return x.unsqueeze(1)

def forward(model: nn.Module, inputs, batch_size: int = 64) -> np.ndarray:
    """Eval-mode predictions for a batch of lattices.

    Args:
        model: Surrogate network
        inputs: (b, H, W) or (H, W) array
        batch_size: Chunk size of the forward passes

    Returns:
        np.ndarray: (b, H, W) predictions

    Raises:
        ShapeMismatch: If the lattice size differs from ``model.spec.input_size``
    """
    x = _as_batch(model, inputs)
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            out = [model(chunk) for chunk in torch.split(x, batch_size)]
    finally:
        model.train(was_training)
    return torch.cat(out).squeeze(1).cpu().numpy()

@contextmanager
def mc_dropout(model: nn.Module):
    """Eval mode everywhere except the dropout layers."""
    was_training = model.training
    model.eval()
    for m in model.modules():
        if isinstance(m, nn.Dropout):
            m.train()
    try:
        yield model
    finally:
        model.train(was_training)

def mc_dropout_forward(model: nn.Module, input, k: int, seed: int) -> np.ndarray:
    """``k`` stochastic passes over one lattice with dropout active.

    Args:
        model: Surrogate built with ``dropout_rate`` > 0
        input: (H, W) lattice
        k: Number of passes
        seed: Seed of the dropout masks

    Returns:
        np.ndarray: (k, H, W) predictions

    Raises:
        ModelConfigError: If the model has no dropout
    """
    if model.spec.dropout_rate <= 0:
        raise ModelConfigError("MC dropout requested on a model built without dropout")
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    x = _as_batch(model, input)
    if x.shape[0] != 1:
        raise ShapeMismatch((1, model.spec.input_size, model.spec.input_size), tuple(x.shape[:1]) + tuple(x.shape[2:]))
    with mc_dropout(model), torch.no_grad(), torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        out = model(x.expand(k, -1, -1, -1).contiguous())
    return out.squeeze(1).cpu().numpy()
