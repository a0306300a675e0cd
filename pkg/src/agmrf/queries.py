"""Inference queries built from data points, and task curricula."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bp import Evidence
from .errors import ConfigError, QueryError

KINDS = ("fractional", "corrupt", "window", "quadrant")


@dataclass
class Query:
    evidence: Evidence
    query: np.ndarray
    hidden: np.ndarray
    targets: np.ndarray  # aligned with ``query``
    n_nodes: int

    def __post_init__(self):
        self.query = np.asarray(self.query, dtype=np.int64)
        self.hidden = np.asarray(self.hidden, dtype=np.int64)
        self.targets = np.asarray(self.targets, dtype=np.int64)
        observed = list(self.evidence.hard) + list(self.evidence.soft)
        parts = np.concatenate([np.asarray(observed, dtype=np.int64), self.query, self.hidden])
        if len(parts) != self.n_nodes or set(parts.tolist()) != set(range(self.n_nodes)):
            raise QueryError("evidence, query and hidden sets must partition the nodes")
        if self.targets.shape != self.query.shape:
            raise QueryError("every query node needs a target")


@dataclass(frozen=True)
class TaskSpec:
    kind: str
    parameter: float
    image_shape: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown task kind {self.kind!r}")
        if self.kind in ("window", "quadrant") and self.image_shape is None:
            raise ConfigError(f"{self.kind} needs an image shape")
        if self.kind in ("fractional", "corrupt") and not 0 <= self.parameter <= 1:
            raise ConfigError(f"{self.kind} parameter must lie in [0, 1]")
        if self.kind == "quadrant" and self.parameter not in (1, 2, 3):
            raise ConfigError("quadrant parameter must be 1, 2 or 3")

    def __str__(self):
        p = self.parameter
        return f"{self.kind}={int(p) if self.kind in ('window', 'quadrant') else p:g}"

    def make(self, x, rng: np.random.Generator, support_size: int = 2) -> Query:
        if self.kind == "fractional":
            return fractional(self.parameter, x, rng)
        if self.kind == "corrupt":
            return corrupt(self.parameter, x, rng, support_size)
        if self.kind == "window":
            return window(int(self.parameter), x, self.image_shape, rng)
        return quadrant(int(self.parameter), x, self.image_shape, rng)


def _round_half_away(v: float) -> int:
    return int(math.floor(v + 0.5))


def _split(x, query_idx, evidence_values=None) -> Query:
    x = np.asarray(x, dtype=np.int64)
    shown = x if evidence_values is None else np.asarray(evidence_values, dtype=np.int64)
    query_idx = np.sort(np.asarray(query_idx, dtype=np.int64))
    mask = np.zeros(len(x), dtype=bool)
    mask[query_idx] = True
    hard = {int(i): int(shown[i]) for i in np.flatnonzero(~mask)}
    return Query(Evidence(hard=hard), query_idx, np.empty(0, np.int64), x[query_idx], len(x))


def fractional(f: float, x, rng: np.random.Generator) -> Query:
    """Hide ``round(f * N)`` uniformly chosen variables; reveal the rest."""
    if not 0 <= f <= 1:
        raise ConfigError("fraction must lie in [0, 1]")
    n = len(x)
    return _split(x, rng.choice(n, size=_round_half_away(f * n), replace=False))


def corrupt(c: float, x, rng: np.random.Generator, support_size: int = 2) -> Query:
    """Switch each value w.p. ``c`` to a different uniform value, then fractional(0.5).

    Evidence carries the corrupted values, targets the original ones.
    """
    if not 0 <= c <= 1:
        raise ConfigError("corruption rate must lie in [0, 1]")
    x = np.asarray(x, dtype=np.int64)
    flip = rng.random(len(x)) < c
    # offset in 1..X-1 guarantees a different value
    offset = rng.integers(1, support_size, size=len(x)) if support_size > 1 else np.zeros(len(x), np.int64)
    noisy = np.where(flip, (x + offset) % support_size, x)
    n = len(x)
    q = rng.choice(n, size=_round_half_away(0.5 * n), replace=False)
    return _split(x, q, evidence_values=noisy)


def window(w: int, x, image_shape, rng=None) -> Query:
    h, width = image_shape
    if not 0 <= w <= min(h, width):
        raise ConfigError(f"window {w} does not fit a {h}x{width} image")
    if len(x) != h * width:
        raise QueryError("image shape does not match the data point")
    r0, c0 = (h - w) // 2, (width - w) // 2
    rows, cols = np.meshgrid(np.arange(r0, r0 + w), np.arange(c0, c0 + w), indexing="ij")
    return _split(x, (rows * width + cols).ravel())


def quadrant_indices(image_shape, which: int) -> np.ndarray:
    """Pixels of quadrant 0..3 (TL, TR, BL, BR); odd remainders go bottom/right."""
    h, width = image_shape
    hr, wc = h // 2, width // 2
    r = (0, hr) if which in (0, 1) else (hr, h)
    c = (0, wc) if which in (0, 2) else (wc, width)
    rows, cols = np.meshgrid(np.arange(*r), np.arange(*c), indexing="ij")
    return (rows * width + cols).ravel()


def quadrant(q: int, x, image_shape, rng: np.random.Generator) -> Query:
    """Hide ``q`` distinct uniformly chosen quadrants."""
    if q not in (1, 2, 3):
        raise ConfigError("quadrant count must be 1, 2 or 3")
    h, width = image_shape
    if len(x) != h * width:
        raise QueryError("image shape does not match the data point")
    chosen = rng.choice(4, size=q, replace=False)
    return _split(x, np.concatenate([quadrant_indices(image_shape, int(k)) for k in chosen]))


def curriculum(specs, rng: np.random.Generator, exclude: TaskSpec | None = None):
    """Endless stream of task specs: uniform over ``specs`` minus ``exclude``."""
    pool = [s for s in specs if exclude is None or s != exclude]
    if not pool:
        raise ConfigError("curriculum is empty after exclusion")
    while True:
        yield pool[rng.integers(len(pool))]


def parse_tasks(text: str, image_shape=None):
    """Parse ``fractional=0.7,window=7,exclude=window=7`` into (specs, exclude)."""
    specs, exclude = [], None
    for item in filter(None, (s.strip() for s in text.split(","))):
        if item.startswith("exclude="):
            exclude = _parse_one(item[len("exclude="):], image_shape)
        else:
            specs.append(_parse_one(item, image_shape))
    if not specs:
        raise ConfigError(f"no task in {text!r}")
    return specs, exclude


def _parse_one(item: str, image_shape) -> TaskSpec:
    kind, sep, value = item.partition("=")
    if not sep:
        raise ConfigError(f"malformed task {item!r}, expected kind=value")
    try:
        param = float(value)
    except ValueError:
        raise ConfigError(f"malformed task parameter in {item!r}") from None
    return TaskSpec(kind.strip(), param, image_shape)
