"""Learner (latent -> log-potentials) and critic networks."""
from __future__ import annotations

import math

import torch
from torch import nn

from .autodiff import DTYPE
from .errors import StructureError

LEAK = 0.1
DROPOUT = 0.2


def latent_dim_for(n_nodes: int) -> int:
    return 64 if n_nodes < 500 else 128


def _init_linear(layer: nn.Linear, gen: torch.Generator) -> None:
    bound = 1.0 / math.sqrt(layer.in_features)
    with torch.no_grad():
        layer.weight.uniform_(-bound, bound, generator=gen)
        layer.bias.zero_()


class Learner(nn.Module):
    """Linear(m, 2m) -> BatchNorm -> LeakyReLU(0.1) -> Linear(2m, k)."""

    def __init__(self, latent_dim: int, output_dim: int, seed: int = 0):
        super().__init__()
        self.latent_dim = latent_dim
        self.output_dim = output_dim
        self.fc1 = nn.Linear(latent_dim, 2 * latent_dim, dtype=DTYPE)
        self.bn = nn.BatchNorm1d(2 * latent_dim, eps=1e-5, momentum=0.1, dtype=DTYPE)
        self.fc2 = nn.Linear(2 * latent_dim, output_dim, dtype=DTYPE)
        gen = torch.Generator().manual_seed(seed)
        _init_linear(self.fc1, gen)
        _init_linear(self.fc2, gen)

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        if z.dim() != 2 or z.shape[1] != self.latent_dim:
            raise StructureError(f"latent batch must be (B, {self.latent_dim}), got {tuple(z.shape)}")
        if self.training and z.shape[0] < 2:
            raise StructureError("batch norm in train mode needs at least 2 latents per batch")
        h = nn.functional.leaky_relu(self.bn(self.fc1(z)), LEAK)
        return self.fc2(h)


def learner_forward(learner: Learner, z, mode: str = "eval") -> torch.Tensor:
    learner.train(mode == "train")
    return learner(torch.as_tensor(z, dtype=DTYPE))


class Discriminator(nn.Module):
    """Three linear layers N|X| -> 2N|X| -> 2N|X| -> 1 with dropout after each.

    Dropout masks are explicit: ``sample_masks`` draws them and ``forward``
    applies whatever it is given, so a training step can be replayed exactly.
    """

    def __init__(self, input_dim: int, seed: int = 0, p: float = DROPOUT):
        super().__init__()
        self.input_dim = input_dim
        self.p = p
        width = 2 * input_dim
        self.fc1 = nn.Linear(input_dim, width, dtype=DTYPE)
        self.fc2 = nn.Linear(width, width, dtype=DTYPE)
        self.fc3 = nn.Linear(width, 1, dtype=DTYPE)
        gen = torch.Generator().manual_seed(seed)
        for layer in (self.fc1, self.fc2, self.fc3):
            _init_linear(layer, gen)

    def sample_masks(self, batch: int, gen: torch.Generator | None = None):
        keep = 1.0 - self.p
        widths = (self.fc1.out_features, self.fc2.out_features, 1)
        return tuple(
            (torch.rand((batch, w), generator=gen, dtype=DTYPE) < keep).to(DTYPE) / keep for w in widths
        )

    def forward(self, x: torch.Tensor, masks=None) -> torch.Tensor:
        if x.dim() != 2 or x.shape[1] != self.input_dim:
            raise StructureError(f"critic input must be (B, {self.input_dim}), got {tuple(x.shape)}")
        if masks is None and self.training:
            masks = self.sample_masks(x.shape[0])
        h = self.fc1(x)
        if masks is not None:
            h = h * masks[0]
        h = nn.functional.leaky_relu(h, LEAK)
        h = self.fc2(h)
        if masks is not None:
            h = h * masks[1]
        h = nn.functional.leaky_relu(h, LEAK)
        out = self.fc3(h)
        if masks is not None:
            out = out * masks[2]
        return out.squeeze(-1)


def discriminator_forward(disc: Discriminator, x, mode: str = "eval", masks=None) -> torch.Tensor:
    disc.train(mode == "train")
    return disc(torch.as_tensor(x, dtype=DTYPE), masks if mode == "train" else None)


def init_params(kind: str, seed: int, **dims) -> nn.Module:
    """``init_params("learner", seed, latent_dim=m, output_dim=k)`` or
    ``init_params("discriminator", seed, input_dim=n)``."""
    if kind == "learner":
        return Learner(dims["latent_dim"], dims["output_dim"], seed=seed)
    if kind == "discriminator":
        return Discriminator(dims["input_dim"], seed=seed)
    raise ValueError(f"unknown parameter kind {kind!r}")
