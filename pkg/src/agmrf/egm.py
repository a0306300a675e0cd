"""Empirical risk minimization of a single log-potential vector through unrolled BP."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import torch

from .autodiff import DTYPE
from .bp import run_bp
from .errors import ConfigError, QueryError, TrainingDivergedError
from .graph import GraphStructure
from .queries import TaskSpec, curriculum

BELIEF_FLOOR = 1e-30
CHECKPOINT_EVERY = 100


@dataclass
class EgmConfig:
    bp_steps: int = 25
    learning_rate: float = 1e-2
    batch_size: int = 128
    total_steps: int = 500
    tasks: tuple = field(default_factory=lambda: (TaskSpec("fractional", 0.5),))
    exclude: TaskSpec | None = None
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        for name in ("bp_steps", "batch_size", "total_steps"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")


def stack_queries(structure: GraphStructure, queries):
    """Unary log-factors ``(B, N, X)``, query mask ``(B, N)`` and targets ``(B, N)``."""
    N, X = structure.n_nodes, structure.support_size
    unary = np.stack([q.evidence.unary(N, X) for q in queries])
    mask = np.zeros((len(queries), N), dtype=bool)
    targets = np.zeros((len(queries), N), dtype=np.int64)
    for b, q in enumerate(queries):
        if len(q.query) == 0:
            raise QueryError("query set is empty")
        mask[b, q.query] = True
        targets[b, q.query] = q.targets
    return torch.as_tensor(unary, dtype=DTYPE), torch.as_tensor(mask), torch.as_tensor(targets)


def batch_erm_loss(structure, psi, unary, mask, targets, t):
    """Mean over queries of the node-averaged conditional NLL; also the floored count."""
    psi = psi if psi.dim() == 2 else psi.unsqueeze(0)
    beliefs = run_bp(structure, psi, unary, t)
    picked = beliefs.gather(-1, targets.unsqueeze(-1)).squeeze(-1)
    floored = int(((picked < BELIEF_FLOOR) & mask).sum())
    nll = -torch.log(picked.clamp_min(BELIEF_FLOOR))
    per_query = (nll * mask).sum(-1) / mask.sum(-1)
    return per_query.mean(), floored


def erm_loss(structure: GraphStructure, psi, query, t: int = 25) -> torch.Tensor:
    """``-(1/|Q|) sum_{i in Q} log mu_i(x_i* | x_E)``; differentiable in ``psi``."""
    psi = torch.as_tensor(psi, dtype=DTYPE)
    loss, floored = batch_erm_loss(structure, psi, *stack_queries(structure, [query]), t)
    if floored:
        warnings.warn(f"{floored} target beliefs clamped at {BELIEF_FLOOR}")
    return loss


def train_egm(data, structure: GraphStructure, config: EgmConfig, on_checkpoint=None):
    """Fit one log-potential vector; returns ``(psi, trace)``.

    ``trace`` holds one ``(step, loss, n_floored)`` row per update.
    """
    data = np.asarray(data, dtype=np.int64)
    rng = np.random.default_rng(config.seed)
    tasks = curriculum(config.tasks, rng, config.exclude)
    psi = torch.zeros(structure.n_params, dtype=DTYPE, requires_grad=True)
    opt = torch.optim.Adam([psi], lr=config.learning_rate, betas=config.betas, eps=config.eps)
    trace = []
    last_good = psi.detach().clone()
    for step in range(1, config.total_steps + 1):
        rows = data[rng.integers(len(data), size=config.batch_size)]
        queries = [next(tasks).make(x, rng, structure.support_size) for x in rows]
        batch = stack_queries(structure, queries)
        opt.zero_grad()
        loss, floored = batch_erm_loss(structure, psi, *batch, config.bp_steps)
        if not torch.isfinite(loss):
            raise TrainingDivergedError(f"EGM loss became {loss.item()} at step {step}", last_good.numpy())
        loss.backward()
        opt.step()
        trace.append((step, loss.item(), floored))
        if step % CHECKPOINT_EVERY == 0 or step == config.total_steps:
            last_good = psi.detach().clone()
            if on_checkpoint is not None:
                on_checkpoint(step, last_good.numpy())
    return psi.detach().numpy().copy(), trace
