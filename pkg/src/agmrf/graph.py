"""Pairwise discrete MRF structures, flat log-potential layout and exact oracles.

Log-potentials live in a flat vector of length ``|E| * |X|**2``. Entry
``param_index(s, e, a, b)`` holds ``log psi_e(x_i=a, x_j=b)`` for the edge
``s.edges[e] == (i, j)`` with ``i < j``. Edges are kept sorted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConfigError, OracleSizeError, ParseError, StructureError

DEFAULT_ORACLE_CAP = 2**20
STRUCTURE_HEADER = "mrf-structure v1"


@dataclass(frozen=True)
class GraphStructure:
    n_nodes: int
    support_size: int
    edges: tuple = field(default=())

    def __post_init__(self):
        if self.n_nodes < 1 or self.support_size < 1:
            raise StructureError("n_nodes and support_size must be positive")
        canon = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise StructureError(f"edge ({i}, {j}) out of range for {self.n_nodes} nodes")
            if i == j:
                raise StructureError(f"self-loop at node {i}")
            pair = (min(i, j), max(i, j))
            if pair in canon:
                raise StructureError(f"duplicate edge {pair}")
            canon.add(pair)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_params(self) -> int:
        return self.n_edges * self.support_size**2

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edge_array.ravel(), minlength=self.n_nodes)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n_nodes else 0

    def neighbors(self, i: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return out


def param_index(structure: GraphStructure, edge_idx: int, x_i: int, x_j: int) -> int:
    X = structure.support_size
    if not 0 <= edge_idx < structure.n_edges:
        raise IndexError(f"edge index {edge_idx} out of range [0, {structure.n_edges})")
    if not (0 <= x_i < X and 0 <= x_j < X):
        raise IndexError(f"values ({x_i}, {x_j}) out of range for support {X}")
    return edge_idx * X * X + x_i * X + x_j


def edge_tables(structure: GraphStructure, psi) -> np.ndarray:
    """View a flat log-potential vector as an ``(|E|, |X|, |X|)`` array."""
    psi = np.asarray(psi, dtype=np.float64)
    if psi.shape != (structure.n_params,):
        raise StructureError(f"expected log-potentials of length {structure.n_params}, got {psi.shape}")
    X = structure.support_size
    return psi.reshape(structure.n_edges, X, X)


def _round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def make_random_structure(n_nodes: int, edge_factor: float, seed: int, support_size: int = 2) -> GraphStructure:
    """Uniformly sample ``round(edge_factor * n_nodes)`` distinct unordered pairs."""
    n_edges = _round_half_away(edge_factor * n_nodes)
    n_pairs = n_nodes * (n_nodes - 1) // 2
    if n_edges < 0 or n_edges > n_pairs:
        raise ConfigError(f"cannot place {n_edges} edges on {n_nodes} nodes (max {n_pairs})")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(n_pairs, size=n_edges, replace=False)
    iu, ju = np.triu_indices(n_nodes, k=1)
    edges = zip(iu[chosen].tolist(), ju[chosen].tolist())
    return GraphStructure(n_nodes, support_size, tuple(edges))


def make_grid_structure(height: int, width: int, support_size: int = 2) -> GraphStructure:
    if height < 1 or width < 1:
        raise ConfigError("grid dimensions must be >= 1")
    edges = []
    for r in range(height):
        for c in range(width):
            v = r * width + c
            if c + 1 < width:
                edges.append((v, v + 1))
            if r + 1 < height:
                edges.append((v, v + width))
    return GraphStructure(height * width, support_size, tuple(edges))


def log_score(structure: GraphStructure, psi, x) -> float:
    """Log of the unnormalized product of edge potentials at assignment ``x``."""
    tables = edge_tables(structure, psi)
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (structure.n_nodes,):
        raise StructureError(f"assignment must have length {structure.n_nodes}")
    if structure.n_edges == 0:
        return 0.0
    e = structure.edge_array
    return float(tables[np.arange(structure.n_edges), x[e[:, 0]], x[e[:, 1]]].sum())


def _split_evidence(evidence):
    if evidence is None:
        return {}, {}
    if hasattr(evidence, "hard"):
        return dict(evidence.hard), dict(getattr(evidence, "soft", {}) or {})
    return dict(evidence), {}


def _enumerate(structure, psi, evidence, cap):
    """All completions of the evidence with their log weights."""
    N, X = structure.n_nodes, structure.support_size
    hard, soft = _split_evidence(evidence)
    free = [i for i in range(N) if i not in hard]
    if X ** len(free) > cap:
        raise OracleSizeError(f"{X}**{len(free)} states exceeds oracle cap {cap}")
    n_states = X ** len(free)
    states = np.empty((n_states, N), dtype=np.int64)
    for i, v in hard.items():
        if not 0 <= v < X:
            raise StructureError(f"evidence value {v} out of range at node {i}")
        states[:, i] = v
    if free:
        grid = np.indices((X,) * len(free)).reshape(len(free), -1).T
        states[:, free] = grid
    logw = np.zeros(n_states)
    tables = edge_tables(structure, psi)
    for e, (i, j) in enumerate(structure.edges):
        logw += tables[e][states[:, i], states[:, j]]
    for i, prior in soft.items():
        with np.errstate(divide="ignore"):
            logw += np.log(np.asarray(prior, dtype=np.float64))[states[:, i]]
    return states, logw


def brute_force_marginals(structure: GraphStructure, psi, evidence=None, cap: int = DEFAULT_ORACLE_CAP) -> np.ndarray:
    """Exact conditional node marginals, shape ``(n_nodes, support_size)``.

    ``evidence`` is either a ``{node: value}`` mapping or an object with
    ``hard``/``soft`` mappings (soft rows multiply in as unary priors).
    """
    states, logw = _enumerate(structure, psi, evidence, cap)
    w = np.exp(logw - logw.max())
    w /= w.sum()
    X = structure.support_size
    out = np.zeros((structure.n_nodes, X))
    for i in range(structure.n_nodes):
        out[i] = np.bincount(states[:, i], weights=w, minlength=X)
    return out / out.sum(axis=1, keepdims=True)


def brute_force_pairwise(structure: GraphStructure, psi, i: int, j: int, cap: int = DEFAULT_ORACLE_CAP) -> np.ndarray:
    """Exact joint marginal of nodes ``i`` and ``j`` as an ``(X, X)`` table."""
    states, logw = _enumerate(structure, psi, None, cap)
    w = np.exp(logw - logw.max())
    w /= w.sum()
    X = structure.support_size
    flat = np.bincount(states[:, i] * X + states[:, j], weights=w, minlength=X * X)
    return flat.reshape(X, X)


def brute_force_log_partition(structure: GraphStructure, psi, cap: int = DEFAULT_ORACLE_CAP) -> float:
    _, logw = _enumerate(structure, psi, None, cap)
    top = logw.max()
    return float(top + np.log(np.exp(logw - top).sum()))


def save_structure(structure: GraphStructure, path) -> None:
    lines = [
        STRUCTURE_HEADER,
        f"n_nodes {structure.n_nodes}",
        f"support_size {structure.support_size}",
        f"edges {structure.n_edges}",
    ]
    lines += [f"{i} {j}" for i, j in structure.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def load_structure(path) -> GraphStructure:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != STRUCTURE_HEADER:
        raise ParseError(f"expected header {STRUCTURE_HEADER!r}", line=1)
    fields = {}
    for lineno, key in zip((2, 3, 4), ("n_nodes", "support_size", "edges")):
        try:
            name, value = lines[lineno - 1].split()
            if name != key:
                raise ValueError
            fields[key] = int(value)
        except (IndexError, ValueError):
            raise ParseError(f"expected '{key} <int>'", line=lineno) from None
    body = lines[4:]
    if len(body) != fields["edges"]:
        raise ParseError(f"header declares {fields['edges']} edges, found {len(body)}")
    edges = []
    for lineno, line in enumerate(body, start=5):
        try:
            i, j = (int(tok) for tok in line.split())
        except ValueError:
            raise ParseError(f"malformed edge {line!r}", line=lineno) from None
        edges.append((i, j))
    return GraphStructure(fields["n_nodes"], fields["support_size"], tuple(edges))
