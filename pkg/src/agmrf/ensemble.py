"""Ensemble inference: sample members from a learner and pool their beliefs log-linearly."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from .autodiff import DTYPE
from .bp import batch_inference
from .errors import ConfigError, InputError
from .nets import Learner
from .queries import TaskSpec

BELIEF_FLOOR = 1e-30


@dataclass
class EnsembleConfig:
    n_members: int = 1000
    bp_steps: int = 5
    chunk: int = 250  # members per BP batch
    seed: int = 0

    def __post_init__(self):
        if self.n_members < 1 or self.chunk < 1:
            raise ConfigError("n_members and chunk must be >= 1")


@dataclass
class PooledPrediction:
    nodes: np.ndarray  # query node ids
    predicted: np.ndarray
    scores: np.ndarray  # (|Q|, X) mean log-beliefs across members


def sample_members(learner: Learner, n_members: int, gen: torch.Generator) -> np.ndarray:
    """``(M, k)`` log-potentials for ``M`` latents mapped through the learner in eval mode."""
    z = torch.randn((n_members, learner.latent_dim), generator=gen, dtype=DTYPE)
    learner.eval()
    with torch.no_grad():
        return learner(z).numpy()


def pool_log_linear(beliefs: np.ndarray) -> np.ndarray:
    """Geometric-mean pooling in log form: ``(M, ..., X) -> (..., X)``.

    Members are accumulated in index order so the result is reproducible bit for bit.
    """
    logs = np.log(np.maximum(beliefs, BELIEF_FLOOR))
    acc = np.zeros(logs.shape[1:])
    for row in logs:
        acc += row
    return acc / len(logs)


def member_beliefs(structure, members, evidence, t, chunk=250) -> np.ndarray:
    members = np.atleast_2d(members)
    parts = [batch_inference(structure, members[s:s + chunk], evidence, t) for s in range(0, len(members), chunk)]
    return np.concatenate(parts)


def pooled_predict(structure, members, query, t: int = 5, chunk: int = 250) -> PooledPrediction:
    """Argmax of pooled beliefs at every query node; ties go to the smaller value."""
    if len(np.atleast_2d(members)) == 0:
        raise ConfigError("ensemble has no members")
    beliefs = member_beliefs(structure, members, query.evidence, t, chunk)
    scores = pool_log_linear(beliefs[:, query.query])
    return PooledPrediction(query.query, scores.argmax(-1), scores)


@dataclass
class TaskReport:
    accuracy: float
    n_correct: int
    n_total: int
    per_query: list = field(default_factory=list)  # (query id, correct, total)
    predictions: list = field(default_factory=list)  # (query id, PooledPrediction, targets)


def evaluate_task(model, structure, data, task: TaskSpec, n_queries: int, config: EnsembleConfig,
                  members=None, keep_predictions=False) -> TaskReport:
    """Percentage of query variables guessed correctly over ``n_queries`` queries.

    ``model`` is a ``Learner`` (ensemble, ``config.n_members`` members) or a
    flat log-potential vector (single model). Query ``q`` uses the data row
    ``q % len(data)``; pass pre-sampled ``members`` to share them across calls.
    """
    if len(data) == 0:
        raise InputError("empty dataset")
    data = np.asarray(data)
    rng = np.random.default_rng(config.seed)
    if members is None:
        if isinstance(model, Learner):
            members = sample_members(model, config.n_members, torch.Generator().manual_seed(config.seed))
        else:
            members = np.asarray(model, dtype=np.float64)[None]
    report = TaskReport(0.0, 0, 0)
    for q in range(n_queries):
        query = task.make(data[q % len(data)], rng, structure.support_size)
        pred = pooled_predict(structure, members, query, config.bp_steps, config.chunk)
        correct = int((pred.predicted == query.targets).sum())
        report.n_correct += correct
        report.n_total += len(query.targets)
        report.per_query.append((q, correct, len(query.targets)))
        if keep_predictions:
            report.predictions.append((q, pred, query.targets))
    report.accuracy = 100.0 * report.n_correct / max(report.n_total, 1)
    return report


def eval_rows(data, n_queries: int, seed: int) -> np.ndarray:
    """A fixed random subset of ``n_queries`` test rows (all rows, in order, if there are fewer)."""
    values = getattr(data, "values", data)
    if n_queries >= len(values):
        return values
    idx = np.sort(np.random.default_rng(seed).choice(len(values), n_queries, replace=False))
    return values[idx]


def oneshot_samples(learner: Learner, structure, n: int, t: int, seed: int, chunk: int = 250):
    """One pass ``z -> psi -> BP`` per sample; returns ``(marginals, assignments)``.

    An assignment takes the most probable value at each node.
    """
    members = sample_members(learner, n, torch.Generator().manual_seed(seed))
    marginals = member_beliefs(structure, members, None, t, chunk)
    return marginals, marginals.argmax(-1)
