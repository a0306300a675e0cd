"""Adversarial (WGAN-GP) training of a learner that emits MRF log-potentials.

The generator is learner + BP: ``z -> psi -> beliefs`` with empty evidence;
its sample is the concatenation of node marginals. The critic compares it to
one-hot encoded data, with a gradient penalty at real/fake interpolates.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np
import torch

from .autodiff import DTYPE, gradient_penalty
from .bp import run_bp
from .data import Dataset, encode_dataset, encode_onehot
from .errors import ConfigError, StructureError, TrainingDivergedError
from .graph import GraphStructure
from .nets import Discriminator, Learner, latent_dim_for

CHECKPOINT_EVERY = 100


@dataclass
class AgmConfig:
    lam: float = 10.0
    critic_steps: int = 10
    bp_steps: int = 5
    batch_size: int = 128
    total_generator_steps: int = 3000
    learning_rate: float = 1e-4
    betas: tuple = (0.0, 0.9)
    eps: float = 1e-8
    latent_dim: int | None = None  # None -> 64 below 500 nodes, else 128
    seed: int = 0

    def __post_init__(self):
        for name in ("critic_steps", "bp_steps", "batch_size", "total_generator_steps"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.lam < 0 or self.learning_rate <= 0:
            raise ConfigError("lam must be >= 0 and learning_rate > 0")


@dataclass
class TrainState:
    learner: Learner
    disc: Discriminator
    opt_learner: torch.optim.Optimizer
    opt_disc: torch.optim.Optimizer
    gen: torch.Generator
    step: int = 0
    history: list = field(default_factory=list)  # (step, critic_loss, generator_loss, penalty)


def init_state(structure: GraphStructure, config: AgmConfig) -> TrainState:
    m = config.latent_dim or latent_dim_for(structure.n_nodes)
    learner = Learner(m, structure.n_params, seed=config.seed)
    disc = Discriminator(structure.n_nodes * structure.support_size, seed=config.seed + 1)
    adam = dict(lr=config.learning_rate, betas=config.betas, eps=config.eps)
    return TrainState(
        learner,
        disc,
        torch.optim.Adam(learner.parameters(), **adam),
        torch.optim.Adam(disc.parameters(), **adam),
        torch.Generator().manual_seed(config.seed),
    )


def fake_from_latents(learner: Learner, structure: GraphStructure, z: torch.Tensor, t: int) -> torch.Tensor:
    learner.train()
    psi = learner(z)
    unary = torch.zeros((1, structure.n_nodes, structure.support_size), dtype=DTYPE)
    return run_bp(structure, psi, unary, t).reshape(z.shape[0], -1)


def generate_fake_batch(learner, structure, batch_size, t, gen, grad=False) -> torch.Tensor:
    """``(B, N|X|)`` concatenated marginals for fresh latents ``z ~ N(0, I)``."""
    z = torch.randn((batch_size, learner.latent_dim), generator=gen, dtype=DTYPE)
    with torch.set_grad_enabled(grad):
        return fake_from_latents(learner, structure, z, t)


def critic_loss(disc, real, fake, mix, masks, lam):
    """WGAN-GP critic objective; returns ``(loss, penalty)``.

    ``mix`` is a ``(B, 1)`` column of interpolation weights and ``masks`` a
    triple of dropout-mask sets for the fake, real and interpolate passes.
    """
    disc.train()
    fake = fake.detach()
    w_term = disc(fake, masks[0]).mean() - disc(real, masks[1]).mean()
    interp = mix * real + (1.0 - mix) * fake
    penalty = gradient_penalty(lambda x: disc(x, masks[2]), interp)
    return w_term + lam * penalty, penalty


def critic_step(state: TrainState, real_batch, structure, config: AgmConfig):
    B = real_batch.shape[0]
    fake = generate_fake_batch(state.learner, structure, B, config.bp_steps, state.gen)
    mix = torch.rand((B, 1), generator=state.gen, dtype=DTYPE)
    masks = tuple(state.disc.sample_masks(B, state.gen) for _ in range(3))
    state.opt_disc.zero_grad()
    loss, penalty = critic_loss(state.disc, real_batch, fake, mix, masks, config.lam)
    if not torch.isfinite(loss):
        raise TrainingDivergedError(f"critic loss became {loss.item()}")
    loss.backward()
    state.opt_disc.step()
    return loss.item(), penalty.item()


def generator_loss(learner, disc, structure, z, t, masks) -> torch.Tensor:
    """``-E[D(fake)]`` with gradients flowing through BP into the learner."""
    disc.train()
    return -disc(fake_from_latents(learner, structure, z, t), masks).mean()


def generator_step(state: TrainState, structure, config: AgmConfig) -> float:
    B = config.batch_size
    z = torch.randn((B, state.learner.latent_dim), generator=state.gen, dtype=DTYPE)
    masks = state.disc.sample_masks(B, state.gen)
    state.opt_learner.zero_grad()
    for p in state.disc.parameters():
        p.requires_grad_(False)
    try:
        loss = generator_loss(state.learner, state.disc, structure, z, config.bp_steps, masks)
        if not torch.isfinite(loss):
            raise TrainingDivergedError(f"generator loss became {loss.item()}")
        loss.backward()
    finally:
        for p in state.disc.parameters():
            p.requires_grad_(True)
    state.opt_learner.step()
    return loss.item()


def _real_matrix(data, support_size) -> torch.Tensor:
    if isinstance(data, Dataset):
        return torch.as_tensor(encode_dataset(data), dtype=DTYPE)
    return torch.as_tensor(encode_onehot(np.asarray(data, dtype=np.int64), support_size), dtype=DTYPE)


def train_agm(data, structure: GraphStructure, config: AgmConfig, on_checkpoint=None, state=None):
    """Alternate ``critic_steps`` critic updates with one learner update.

    ``data`` is a ``Dataset`` or an integer matrix of assignments. Returns the
    final ``TrainState``; ``state.history`` is the loss trace.
    """
    real = _real_matrix(data, structure.support_size)
    if real.shape[1] != structure.n_nodes * structure.support_size:
        raise StructureError("dataset width does not match the structure")
    state = state or init_state(structure, config)
    last_good = copy.deepcopy(state.learner.state_dict())
    while state.step < config.total_generator_steps:
        try:
            for _ in range(config.critic_steps):
                rows = torch.randint(len(real), (config.batch_size,), generator=state.gen)
                c_loss, penalty = critic_step(state, real[rows], structure, config)
            g_loss = generator_step(state, structure, config)
        except TrainingDivergedError as err:
            err.checkpoint = last_good
            raise
        state.step += 1
        state.history.append((state.step, c_loss, g_loss, penalty))
        if state.step % CHECKPOINT_EVERY == 0 or state.step == config.total_generator_steps:
            last_good = copy.deepcopy(state.learner.state_dict())
            if on_checkpoint is not None:
                on_checkpoint(state)
    return state
