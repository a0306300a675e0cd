"""Datasets, the ``mrf-data v1`` text format, encodings and synthetic corpora."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InputError, ParseError

DATA_HEADER = "mrf-data v1"


@dataclass
class Dataset:
    values: np.ndarray  # (n_points, n_vars); int64 for kind="int", float64 in [0, 1] for "soft"
    support_size: int
    kind: str = "int"
    split: str = "train"
    image_shape: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("int", "soft"):
            raise ConfigError(f"unknown dataset kind {self.kind!r}")
        v = np.asarray(self.values)
        if v.ndim != 2:
            raise InputError("dataset values must be a 2-d matrix")
        if self.kind == "int":
            v = v.astype(np.int64)
            if v.size and (v.min() < 0 or v.max() >= self.support_size):
                raise InputError(f"values outside [0, {self.support_size})")
        else:
            v = v.astype(np.float64)
            if self.support_size != 2:
                raise InputError("soft datasets are Bernoulli and need support_size 2")
            if v.size and (v.min() < 0 or v.max() > 1):
                raise InputError("soft values outside [0, 1]")
        self.values = v

    @property
    def n_points(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.values[idx], self.support_size, self.kind, self.split, self.image_shape)


def save_dataset(ds: Dataset, path) -> None:
    meta = f"n_vars={ds.n_vars},support_size={ds.support_size},kind={ds.kind},split={ds.split}"
    if ds.image_shape is not None:
        meta += f",image_shape={ds.image_shape[0]}x{ds.image_shape[1]}"
    fmt = str if ds.kind == "int" else repr
    rows = (",".join(fmt(v) for v in row.tolist()) for row in ds.values)
    with open(path, "w") as fh:
        fh.write(f"{DATA_HEADER}\n{meta}\n")
        for row in rows:
            fh.write(row + "\n")


def load_dataset(path, format: str = "mrf-data") -> Dataset:
    if format != "mrf-data":
        raise ConfigError(f"unsupported dataset format {format!r}")
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != DATA_HEADER:
        raise ParseError(f"expected header {DATA_HEADER!r}", line=1)
    if len(lines) < 2:
        raise ParseError("missing metadata line", line=2)
    try:
        meta = dict(item.split("=", 1) for item in lines[1].split(","))
        n_vars, X, kind = int(meta["n_vars"]), int(meta["support_size"]), meta["kind"]
    except (KeyError, ValueError):
        raise ParseError("metadata must give n_vars, support_size and kind", line=2) from None
    if kind not in ("int", "soft"):
        raise ParseError(f"unknown kind {kind!r}", line=2)
    image_shape = None
    if "image_shape" in meta:
        h, w = meta["image_shape"].split("x")
        image_shape = (int(h), int(w))
    parse = int if kind == "int" else float
    rows = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        try:
            row = [parse(tok) for tok in line.split(",")]
        except ValueError:
            raise ParseError(f"malformed value in {line!r}", line=lineno) from None
        if len(row) != n_vars:
            raise ParseError(f"expected {n_vars} values, got {len(row)}", line=lineno)
        if kind == "int":
            bad = [v for v in row if not 0 <= v < X]
        else:
            bad = [v for v in row if not 0.0 <= v <= 1.0]
        if bad:
            raise ParseError(f"value {bad[0]} outside the support", line=lineno)
        rows.append(row)
    values = np.array(rows, dtype=np.int64 if kind == "int" else np.float64).reshape(-1, n_vars)
    return Dataset(values, X, kind, meta.get("split", "train"), image_shape)


def encode_onehot(x, support_size: int) -> np.ndarray:
    """Concatenated one-hot blocks; works on a single point or a batch of rows."""
    x = np.asarray(x, dtype=np.int64)
    if x.size and (x.min() < 0 or x.max() >= support_size):
        raise InputError(f"values outside [0, {support_size})")
    out = np.zeros(x.shape + (support_size,))
    np.put_along_axis(out, x[..., None], 1.0, axis=-1)
    return out.reshape(*x.shape[:-1], -1)


def decode_onehot(v, support_size: int) -> np.ndarray:
    v = np.asarray(v)
    return v.reshape(*v.shape[:-1], -1, support_size).argmax(-1)


def bernoulli_encode(v):
    """Soft evidence row ``(1 - v, v)`` for an intensity in [0, 1]."""
    v = np.asarray(v, dtype=np.float64)
    if np.any((v < 0) | (v > 1)):
        raise InputError("Bernoulli intensities must lie in [0, 1]")
    return np.stack([1.0 - v, v], axis=-1)


def bernoulli_decode(row):
    row = np.asarray(row, dtype=np.float64)
    if np.any(np.abs(row.sum(-1) - 1.0) > 1e-9):
        raise InputError("belief row is not normalized")
    return row[..., 1]


def encode_dataset(ds: Dataset) -> np.ndarray:
    """Critic inputs: one-hot blocks for integer data, Bernoulli rows for soft data."""
    if ds.kind == "int":
        return encode_onehot(ds.values, ds.support_size)
    return bernoulli_encode(ds.values).reshape(ds.n_points, -1)


def binarize_images(gray, threshold: float = 0.5, image_shape=None) -> Dataset:
    gray = np.asarray(gray, dtype=np.float64)
    if gray.ndim == 1:
        gray = gray[None]
    if gray.ndim == 3:
        image_shape = image_shape or gray.shape[1:]
        gray = gray.reshape(gray.shape[0], -1)
    return Dataset((gray > threshold).astype(np.int64), 2, image_shape=image_shape)


def read_pgm(path) -> np.ndarray:
    """Portable graymap (P2 or P5) scaled to [0, 1]."""
    raw = Path(path).read_bytes()
    magic = raw[:2]
    if magic not in (b"P2", b"P5"):
        raise ParseError("not a PGM file", line=1)
    tokens, pos = [], 2
    while len(tokens) < 3:
        while raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            pos = raw.index(b"\n", pos)
            continue
        start = pos
        while not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(int(raw[start:pos]))
    width, height, maxval = tokens
    if magic == b"P5":
        dtype = np.uint8 if maxval < 256 else ">u2"
        pix = np.frombuffer(raw[pos + 1:], dtype=dtype, count=width * height)
    else:
        pix = np.array(raw[pos:].split(), dtype=np.int64)[: width * height]
    return pix.reshape(height, width).astype(np.float64) / maxval


def write_pgm(image, path, maxval: int = 255) -> None:
    image = np.clip(np.asarray(image, dtype=np.float64), 0, 1)
    h, w = image.shape
    pix = np.round(image * maxval).astype(np.uint8)
    Path(path).write_bytes(f"P5\n{w} {h}\n{maxval}\n".encode() + pix.tobytes())


def make_synthetic_dataset(spec: dict, n: int, seed: int) -> Dataset:
    """Draw ``n`` points from a generator with known ground truth.

    Kinds: ``independent`` (n_vars, p), ``constant`` (values),
    ``mrf`` (structure, psi, method="exact"|"gibbs", burn_in),
    ``rectangles`` (height, width: filled axis-aligned boxes on a grid).
    """
    rng = np.random.default_rng(seed)
    kind = spec.get("kind")
    if kind == "independent":
        p = np.broadcast_to(np.asarray(spec.get("p", 0.5), dtype=np.float64), (spec["n_vars"],))
        return Dataset((rng.random((n, len(p))) < p).astype(np.int64), 2)
    if kind == "constant":
        vals = np.asarray(spec["values"], dtype=np.int64)
        return Dataset(np.tile(vals, (n, 1)), int(spec.get("support_size", max(2, vals.max() + 1))))
    if kind == "mrf":
        structure, psi = spec["structure"], spec["psi"]
        if spec.get("method", "exact") == "exact":
            from .graph import _enumerate

            states, logw = _enumerate(structure, psi, None, cap=2**22)
            w = np.exp(logw - logw.max())
            idx = rng.choice(len(states), size=n, p=w / w.sum())
            values = states[idx]
        else:
            from .gibbs import GibbsConfig, sample

            cfg = GibbsConfig(burn_in=spec.get("burn_in", 100), thinning=spec.get("thinning", 1), seed=seed)
            values = sample(structure, psi, cfg, n)
        return Dataset(values, structure.support_size)
    if kind == "rectangles":
        h, w = spec["height"], spec["width"]
        imgs = np.zeros((n, h, w), dtype=np.int64)
        for k in range(n):
            r0, c0 = rng.integers(0, h - 2), rng.integers(0, w - 2)
            r1, c1 = rng.integers(r0 + 2, h + 1), rng.integers(c0 + 2, w + 1)
            imgs[k, r0:r1, c0:c1] = 1
        return Dataset(imgs.reshape(n, -1), 2, image_shape=(h, w))
    raise ConfigError(f"unknown synthetic dataset kind {kind!r}")
