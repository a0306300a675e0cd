"""Log-domain loopy belief propagation on pairwise MRFs, batched and differentiable.

Messages live on the ``2|E|`` directed edges. Directed edge ``d < |E|`` runs
``i -> j`` for ``edges[d] == (i, j)``; ``d + |E|`` is its reverse. One
iteration updates every message at once (flooding schedule) from the
previous iterate, then shifts each message to log-normalize it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import torch

from .autodiff import DTYPE, small_logsumexp
from .errors import InputError, StructureError
from .graph import GraphStructure

HARD_OFF = -1e9


@dataclass
class Evidence:
    """Observed values (``hard``) and categorical priors (``soft``) per node."""

    hard: dict = field(default_factory=dict)
    soft: dict = field(default_factory=dict)

    def __post_init__(self):
        overlap = set(self.hard) & set(self.soft)
        if overlap:
            raise InputError(f"nodes {sorted(overlap)} have both hard and soft evidence")
        for i, row in self.soft.items():
            if abs(float(np.sum(row)) - 1.0) > 1e-9:
                raise InputError(f"soft evidence at node {i} does not sum to 1")

    def unary(self, n_nodes: int, support_size: int) -> np.ndarray:
        u = np.zeros((n_nodes, support_size))
        for i, v in self.hard.items():
            if not 0 <= v < support_size:
                raise StructureError(f"evidence value {v} out of range at node {i}")
            u[i] = HARD_OFF
            u[i, v] = 0.0
        for i, row in self.soft.items():
            row = np.asarray(row, dtype=np.float64)
            if row.shape != (support_size,):
                raise StructureError(f"soft evidence at node {i} must have {support_size} entries")
            with np.errstate(divide="ignore"):
                u[i] = np.where(row > 0, np.log(np.where(row > 0, row, 1.0)), HARD_OFF)
        return u


def soft_log_prior(prior: torch.Tensor) -> torch.Tensor:
    """Differentiable log of a prior tensor with zeros mapped to the hard off-value."""
    positive = prior > 0
    return torch.where(positive, torch.log(torch.where(positive, prior, torch.ones_like(prior))), HARD_OFF)


@lru_cache(maxsize=64)
def _indices(structure: GraphStructure):
    e = structure.edge_array
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    n_dir = len(src)
    rev = (np.arange(n_dir) + n_dir // 2) % max(n_dir, 1)
    as_long = lambda a: torch.as_tensor(a, dtype=torch.long)
    return as_long(src), as_long(dst), as_long(rev)


def _as_unary(structure, evidence, batch):
    N, X = structure.n_nodes, structure.support_size
    if evidence is None:
        return torch.zeros((1, N, X), dtype=DTYPE)
    if isinstance(evidence, Evidence):
        return torch.as_tensor(evidence.unary(N, X), dtype=DTYPE).unsqueeze(0)
    if isinstance(evidence, (list, tuple)):
        if len(evidence) != batch:
            raise StructureError(f"{len(evidence)} evidence sets for a batch of {batch}")
        return torch.stack([torch.as_tensor(ev.unary(N, X), dtype=DTYPE) for ev in evidence])
    u = torch.as_tensor(evidence, dtype=DTYPE)
    if u.dim() == 2:
        u = u.unsqueeze(0)
    if u.shape[1:] != (N, X) or u.shape[0] not in (1, batch):
        raise StructureError(f"unary log-factors of shape {tuple(u.shape)} do not match ({batch}, {N}, {X})")
    return u


def run_bp(structure: GraphStructure, psi: torch.Tensor, unary: torch.Tensor, t: int) -> torch.Tensor:
    """Core message passing on tensors.

    ``psi`` is ``(B or 1, k)``; ``unary`` is ``(B or 1, N, X)`` in log domain.
    A batch dimension of 1 broadcasts against the other argument.
    Returns normalized beliefs ``(B, N, X)``; autograd flows through psi and unary.
    """
    if t < 0:
        raise InputError("t must be non-negative")
    N, X, E = structure.n_nodes, structure.support_size, structure.n_edges
    if psi.dim() != 2 or psi.shape[1] != structure.n_params:
        raise StructureError(f"log-potentials must be (B, {structure.n_params}), got {tuple(psi.shape)}")
    if torch.isnan(psi).any():
        raise InputError("NaN in log-potentials")
    B = max(psi.shape[0], unary.shape[0])
    if psi.shape[0] not in (1, B) or unary.shape[0] not in (1, B):
        raise StructureError(f"batch sizes {psi.shape[0]} and {unary.shape[0]} do not broadcast")
    if E == 0 or t == 0:
        return torch.softmax(unary.expand(B, N, X), dim=-1)
    src, dst, rev = _indices(structure)
    tables = psi.reshape(psi.shape[0], E, X, X)
    # pot[b, d, x_src, x_dst]
    pot = torch.cat([tables, tables.transpose(-1, -2)], dim=1)
    unary_src = unary[:, src]
    msg = torch.full((B, 2 * E, X), -float(np.log(X)), dtype=DTYPE)
    for _ in range(t):
        incoming = torch.zeros((B, N, X), dtype=DTYPE).index_add(1, dst, msg)
        cavity = unary_src + incoming[:, src] - msg[:, rev]
        msg = small_logsumexp(pot + cavity.unsqueeze(-1), dim=2)
        msg = msg - small_logsumexp(msg, dim=-1).unsqueeze(-1)
    incoming = torch.zeros((B, N, X), dtype=DTYPE).index_add(1, dst, msg)
    return torch.softmax(unary + incoming, dim=-1)


def inference_unrolled(structure: GraphStructure, psi, evidence=None, t: int = 5) -> torch.Tensor:
    """Beliefs ``(N, X)`` for one potential vector, kept on the autograd graph."""
    psi = torch.as_tensor(psi, dtype=DTYPE)
    if psi.dim() != 1:
        raise StructureError("inference_unrolled takes a single log-potential vector")
    return run_bp(structure, psi.unsqueeze(0), _as_unary(structure, evidence, 1), t)[0]


def inference(structure: GraphStructure, psi, evidence=None, t: int = 5) -> np.ndarray:
    """Approximate conditional node marginals after ``t`` flooding iterations."""
    with torch.no_grad():
        return inference_unrolled(structure, psi, evidence, t).numpy()


def batch_inference(structure: GraphStructure, psi_batch, evidence_batch=None, t: int = 5) -> np.ndarray:
    """``B`` independent inference calls as one batched computation, ``(B, N, X)``.

    ``evidence_batch`` may be ``None``, one ``Evidence`` shared by every row,
    a list of ``B`` ``Evidence`` objects, or a unary log-factor array.
    """
    with torch.no_grad():
        psi = torch.as_tensor(psi_batch, dtype=DTYPE)
        if psi.dim() != 2:
            raise StructureError("psi_batch must be two-dimensional")
        return run_bp(structure, psi, _as_unary(structure, evidence_batch, psi.shape[0]), t).numpy()
