"""Systematic-scan Gibbs sampling on the joint defined by a log-potential vector."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import GraphStructure, edge_tables


@dataclass
class GibbsConfig:
    burn_in: int = 0  # full sweeps discarded before the first sample
    thinning: int = 1
    seed: int = 0
    initial: np.ndarray | None = None  # None -> uniform random per node

    def __post_init__(self):
        if self.burn_in < 0 or self.thinning < 1:
            raise ConfigError("burn_in must be >= 0 and thinning >= 1")


def _oriented_tables(structure: GraphStructure, psi):
    """Per node: neighbor indices and tables indexed ``[x_i, x_neighbor]``."""
    tables = edge_tables(structure, psi)
    nbrs = [[] for _ in range(structure.n_nodes)]
    tabs = [[] for _ in range(structure.n_nodes)]
    for e, (i, j) in enumerate(structure.edges):
        nbrs[i].append(j)
        tabs[i].append(tables[e])
        nbrs[j].append(i)
        tabs[j].append(tables[e].T)
    X = structure.support_size
    return [
        (np.asarray(n, dtype=np.int64), np.stack(t) if t else np.zeros((0, X, X)))
        for n, t in zip(nbrs, tabs)
    ]


def _logits(node_tables, states):
    """Conditional log-weights for one node across a batch of chain states ``(C, N)``."""
    nbrs, tabs = node_tables
    if len(nbrs) == 0:
        return np.zeros((states.shape[0], tabs.shape[1]))
    # tabs[k, :, states[c, nbrs[k]]] summed over k
    picked = tabs[np.arange(len(nbrs))[None, :], :, states[:, nbrs]]
    return picked.sum(axis=1)


def conditional(structure: GraphStructure, psi, state, i: int) -> np.ndarray:
    """``p(x_i | x_-i)``, which only touches the neighbors of ``i``."""
    state = np.asarray(state, dtype=np.int64)[None]
    logits = _logits(_oriented_tables(structure, psi)[i], state)[0]
    p = np.exp(logits - logits.max())
    return p / p.sum()


def sample(structure: GraphStructure, psi, config: GibbsConfig, n_samples: int, n_chains: int = 1) -> np.ndarray:
    """Run ``n_chains`` independent chains; each emits ``n_samples // n_chains`` states.

    Nodes are visited in index order within a sweep. Samples are returned
    chain-interleaved, shape ``(n_samples, N)``.
    """
    if n_samples < 1:
        raise ConfigError("n_samples must be >= 1")
    if n_samples % n_chains:
        raise ConfigError("n_samples must be a multiple of n_chains")
    rng = np.random.default_rng(config.seed)
    N, X = structure.n_nodes, structure.support_size
    node_tables = _oriented_tables(structure, psi)
    if config.initial is None:
        states = rng.integers(X, size=(n_chains, N))
    else:
        states = np.tile(np.asarray(config.initial, dtype=np.int64), (n_chains, 1))
    per_chain = n_samples // n_chains
    out = np.empty((per_chain, n_chains, N), dtype=np.int64)

    def sweep():
        for i in range(N):
            logits = _logits(node_tables[i], states)
            p = np.exp(logits - logits.max(axis=1, keepdims=True))
            cdf = np.cumsum(p, axis=1)
            u = rng.random((n_chains, 1)) * cdf[:, -1:]
            states[:, i] = np.minimum((u >= cdf).sum(axis=1), X - 1)

    for _ in range(config.burn_in):
        sweep()
    for s in range(per_chain):
        for _ in range(config.thinning):
            sweep()
        out[s] = states
    return out.reshape(-1, N)


def independent_samples(structure: GraphStructure, psi, n: int, burn_in: int, seed: int) -> np.ndarray:
    """``n`` samples, each the state of its own chain after ``burn_in`` + 1 sweeps."""
    return sample(structure, psi, GibbsConfig(burn_in=burn_in, seed=seed), n, n_chains=n)
