"""Checkpoint files: text header, little-endian float64 blob, 8-byte checksum.

Layout (see docs/FORMAT.md)::

    mrf-store v1
    kind=<structure|potentials|learner|discriminator|trainstate>
    <key>=<value>            (any number of metadata lines)
    tensor <name> <shape>    (one per tensor, in blob order; shape like 3x4, or - for scalars)
    end
    <blob><blake2b-64 digest of blob>
"""
from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np
import torch

from .errors import FormatError
from .graph import STRUCTURE_HEADER, GraphStructure, load_structure, save_structure

STORE_HEADER = "mrf-store v1"
KINDS = ("structure", "potentials", "learner", "discriminator", "trainstate")


def _digest(blob: bytes) -> bytes:
    return hashlib.blake2b(blob, digest_size=8).digest()


def save_tensors(path, kind: str, meta: dict, tensors: dict) -> None:
    if kind not in KINDS:
        raise FormatError(f"unknown artifact kind {kind!r}")
    lines = [STORE_HEADER, f"kind={kind}"]
    for key, value in meta.items():
        if "\n" in str(value) or "=" in str(key):
            raise FormatError(f"metadata {key!r} cannot be stored on one line")
        lines.append(f"{key}={value}")
    chunks = []
    for name, arr in tensors.items():
        arr = np.asarray(arr, dtype="<f8")
        shape = "x".join(str(d) for d in arr.shape) if arr.ndim else "-"
        lines.append(f"tensor {name} {shape}")
        chunks.append(arr.tobytes(order="C"))
    lines.append("end")
    blob = b"".join(chunks)
    Path(path).write_bytes(("\n".join(lines) + "\n").encode() + blob + _digest(blob))


def load_tensors(path, kind: str | None = None):
    """Return ``(kind, meta, tensors)``; ``kind`` if given must match the file."""
    raw = Path(path).read_bytes()
    end = raw.find(b"\nend\n")
    if not raw.startswith(STORE_HEADER.encode() + b"\n") or end < 0:
        raise FormatError(f"{path}: not a {STORE_HEADER!r} file (or unsupported version)")
    header = raw[:end].decode().split("\n")[1:]
    body = raw[end + len(b"\nend\n"):]
    blob, digest = body[:-8], body[-8:]
    if len(body) < 8 or _digest(blob) != digest:
        raise FormatError(f"{path}: checksum mismatch")
    meta, specs, file_kind = {}, [], None
    for line in header:
        if line.startswith("tensor "):
            _, name, shape = line.split(" ")
            specs.append((name, () if shape == "-" else tuple(int(d) for d in shape.split("x"))))
        else:
            key, _, value = line.partition("=")
            if key == "kind":
                file_kind = value
            else:
                meta[key] = value
    if kind is not None and file_kind != kind:
        raise FormatError(f"{path}: expected a {kind} artifact, found {file_kind}")
    tensors, offset = {}, 0
    for name, shape in specs:
        n = int(np.prod(shape)) if shape else 1
        tensors[name] = np.frombuffer(blob, dtype="<f8", count=n, offset=offset).reshape(shape).copy()
        offset += 8 * n
    if offset != len(blob):
        raise FormatError(f"{path}: blob length does not match the tensor manifest")
    return file_kind, meta, tensors


def save_potentials(psi, structure: GraphStructure, path, structure_ref: str = "") -> None:
    psi = np.asarray(psi, dtype=np.float64)
    if psi.shape != (structure.n_params,):
        raise FormatError(f"log-potentials of shape {psi.shape} do not fit k={structure.n_params}")
    meta = dict(structure=structure_ref, n_nodes=structure.n_nodes, support_size=structure.support_size,
                n_edges=structure.n_edges, k=structure.n_params)
    save_tensors(path, "potentials", meta, {"psi": psi})


def load_potentials(path, structure: GraphStructure | None = None) -> np.ndarray:
    _, meta, tensors = load_tensors(path, "potentials")
    psi = tensors["psi"]
    if structure is not None and (int(meta["k"]) != structure.n_params or psi.shape != (structure.n_params,)):
        raise FormatError(f"checkpoint has k={meta['k']}, structure needs k={structure.n_params}")
    return psi


def _state_arrays(module: torch.nn.Module) -> dict:
    return {name: t.detach().numpy().astype(np.float64) for name, t in module.state_dict().items()}


def _load_state(module: torch.nn.Module, tensors: dict, prefix: str = "") -> None:
    current = module.state_dict()
    new = {}
    for name, ref in current.items():
        key = prefix + name
        if key not in tensors:
            raise FormatError(f"missing tensor {key}")
        arr = tensors[key]
        if tuple(arr.shape) != tuple(ref.shape):
            raise FormatError(f"tensor {key} has shape {arr.shape}, expected {tuple(ref.shape)}")
        new[name] = torch.as_tensor(arr).to(ref.dtype)
    module.load_state_dict(new)


def save_learner(learner, path, **meta) -> None:
    head = dict(m=learner.latent_dim, k=learner.output_dim, **meta)
    save_tensors(path, "learner", head, _state_arrays(learner))


def load_learner(path):
    from .nets import Learner

    _, meta, tensors = load_tensors(path, "learner")
    learner = Learner(int(meta["m"]), int(meta["k"]))
    _load_state(learner, tensors)
    learner.eval()
    return learner, meta


def save_discriminator(disc, path, **meta) -> None:
    save_tensors(path, "discriminator", dict(input_dim=disc.input_dim, **meta), _state_arrays(disc))


def load_discriminator(path):
    from .nets import Discriminator

    _, meta, tensors = load_tensors(path, "discriminator")
    disc = Discriminator(int(meta["input_dim"]))
    _load_state(disc, tensors)
    return disc, meta


def _optimizer_arrays(opt, prefix):
    out = {}
    for i, state in opt.state_dict()["state"].items():
        for key, value in state.items():
            out[f"{prefix}.{i}.{key}"] = torch.as_tensor(value).detach().numpy().astype(np.float64)
    return out


def _load_optimizer(opt, tensors, prefix):
    sd = opt.state_dict()
    state = {}
    for name, arr in tensors.items():
        if name.startswith(prefix + "."):
            _, i, key = name.split(".")
            state.setdefault(int(i), {})[key] = torch.as_tensor(arr, dtype=torch.float64)
    sd["state"] = state
    opt.load_state_dict(sd)


def save_trainstate(state, structure: GraphStructure, config, path) -> None:
    tensors = {f"learner.{k}": v for k, v in _state_arrays(state.learner).items()}
    tensors.update({f"disc.{k}": v for k, v in _state_arrays(state.disc).items()})
    tensors.update(_optimizer_arrays(state.opt_learner, "opt_learner"))
    tensors.update(_optimizer_arrays(state.opt_disc, "opt_disc"))
    tensors["rng"] = state.gen.get_state().numpy().astype(np.float64)
    tensors["history"] = np.asarray(state.history, dtype=np.float64).reshape(-1, 4)
    meta = dict(step=state.step, m=state.learner.latent_dim, k=state.learner.output_dim,
                n_nodes=structure.n_nodes, support_size=structure.support_size, seed=config.seed)
    save_tensors(path, "trainstate", meta, tensors)


def load_trainstate(path, structure: GraphStructure, config):
    from .agm import init_state

    _, meta, tensors = load_tensors(path, "trainstate")
    if int(meta["k"]) != structure.n_params:
        raise FormatError(f"train state has k={meta['k']}, structure needs {structure.n_params}")
    state = init_state(structure, config)
    _load_state(state.learner, tensors, "learner.")
    _load_state(state.disc, tensors, "disc.")
    _load_optimizer(state.opt_learner, tensors, "opt_learner")
    _load_optimizer(state.opt_disc, tensors, "opt_disc")
    state.gen.set_state(torch.as_tensor(tensors["rng"]).to(torch.uint8))
    state.step = int(meta["step"])
    state.history = [tuple(row) for row in tensors["history"].tolist()]
    return state


def artifact_kind(path) -> str:
    with open(path, "rb") as fh:
        first = fh.readline().decode(errors="replace").strip()
        if first == STRUCTURE_HEADER:
            return "structure"
        if first != STORE_HEADER:
            raise FormatError(f"{path}: unrecognized or unsupported file version {first!r}")
        kind_line = fh.readline().decode(errors="replace").strip()
    return kind_line.partition("=")[2]


def save(artifact, path, **kwargs) -> None:
    """Dispatch on the artifact type (potentials need ``structure=``)."""
    from .nets import Discriminator, Learner

    if isinstance(artifact, GraphStructure):
        save_structure(artifact, path)
    elif isinstance(artifact, Learner):
        save_learner(artifact, path, **kwargs)
    elif isinstance(artifact, Discriminator):
        save_discriminator(artifact, path, **kwargs)
    else:
        save_potentials(artifact, kwargs.pop("structure"), path, **kwargs)


def load(path, kind: str | None = None, **kwargs):
    found = artifact_kind(path)
    if kind is not None and found != kind:
        raise FormatError(f"{path}: expected a {kind} artifact, found {found}")
    if found == "structure":
        return load_structure(path)
    if found == "potentials":
        return load_potentials(path, kwargs.get("structure"))
    if found == "learner":
        return load_learner(path)[0]
    if found == "discriminator":
        return load_discriminator(path)[0]
    if found == "trainstate":
        return load_trainstate(path, kwargs["structure"], kwargs["config"])
    raise FormatError(f"{path}: unknown artifact kind {found!r}")
