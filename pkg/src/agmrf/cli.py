"""Command-line entry point: ``agmrf <command> [flags]``.

Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import subprocess
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import torch

from . import __version__
from .agm import AgmConfig, train_agm
from .bp import batch_inference
from .data import Dataset, load_dataset, write_pgm
from .egm import EgmConfig, train_egm
from .ensemble import EnsembleConfig, eval_rows, evaluate_task, oneshot_samples, sample_members
from .errors import ConfigError, FormatError, MRFError, ParseError
from .gibbs import independent_samples
from .graph import GraphStructure, load_structure, make_grid_structure, make_random_structure, save_structure
from .queries import TaskSpec, parse_tasks
from . import store


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- config files

def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {raw!r}", line=lineno)
        out[key.strip()] = value.strip()
    return out


def _coerce(name, value, default):
    if name == "betas":
        return tuple(float(v) for v in str(value).split(",")) if isinstance(value, str) else tuple(value)
    if name == "latent_dim":
        return None if value in (None, "", "none", "None") else int(value)
    if isinstance(default, bool):
        return str(value).lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def build_config(cls, values: dict, image_shape=None):
    """Instantiate a config dataclass from string values, rejecting unknown keys."""
    defaults = cls()
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(values) - names
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {', '.join(sorted(unknown))}")
    kwargs = {}
    for key, value in values.items():
        try:
            if key in ("tasks", "exclude") and isinstance(value, str):
                specs, excl = parse_tasks(value, image_shape)
                kwargs[key] = tuple(specs) if key == "tasks" else specs[0]
                if key == "tasks" and excl is not None:
                    kwargs["exclude"] = excl
            else:
                kwargs[key] = _coerce(key, value, getattr(defaults, key))
        except (ValueError, TypeError) as err:
            raise ConfigError(f"bad value for {key}: {value!r} ({err})") from None
    return cls(**kwargs)


def config_snapshot(cfg) -> dict:
    out = {}
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple) and v and isinstance(v[0], TaskSpec):
            v = [str(t) for t in v]
        elif isinstance(v, TaskSpec):
            v = str(v)
        out[f.name] = list(v) if isinstance(v, tuple) else v
    return out


# ---------------------------------------------------------------- manifests

def _build_id() -> str:
    try:
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"], capture_output=True, text=True,
                             cwd=Path(__file__).parent, timeout=5)
        if rev.returncode == 0:
            return f"{__version__}+g{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def write_manifest(out_dir: Path, command: str, config: dict, seeds: dict, started: float, outputs: list) -> Path:
    missing = [p for p in outputs if not Path(p).exists()]
    if missing:
        raise MRFError(f"expected outputs were not written: {missing}")
    manifest = dict(command=command, config=config, seeds=seeds, build=_build_id(),
                    wall_clock_seconds=round(time.time() - started, 3),
                    outputs=[str(Path(p).relative_to(out_dir)) for p in outputs])
    path = out_dir / "manifest.json"
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, path)
    return path


def _csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------- shared loaders

def _dataset(path) -> Dataset:
    if path is None:
        raise UsageError("--dataset is required")
    if not Path(path).exists():
        raise UsageError(f"dataset not found: {path}")
    return load_dataset(path)


def _image_shape(text):
    if text is None:
        return None
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError:
        raise UsageError(f"--image-shape must look like 28x28, got {text!r}") from None


def _structure_for_training(args, ds: Dataset, out_dir: Path, seed: int) -> tuple[GraphStructure, Path]:
    target = out_dir / "structure.txt"
    if args.structure:
        if not Path(args.structure).exists():
            raise UsageError(f"structure not found: {args.structure}")
        s = load_structure(args.structure)
    elif ds.image_shape is not None:
        s = make_grid_structure(*ds.image_shape, support_size=ds.support_size)
    else:
        s = make_random_structure(ds.n_vars, args.edge_factor, seed, support_size=ds.support_size)
    if s.n_nodes != ds.n_vars or s.support_size != ds.support_size:
        raise ConfigError(f"structure ({s.n_nodes} nodes, |X|={s.support_size}) does not match the dataset "
                          f"({ds.n_vars} vars, |X|={ds.support_size})")
    save_structure(s, target)
    return s, target


def _load_model(args):
    """Return ``(kind, model, structure, meta)`` for a learner or potentials checkpoint."""
    if args.checkpoint is None:
        raise UsageError("--checkpoint is required")
    ckpt = Path(args.checkpoint)
    if not ckpt.exists():
        raise UsageError(f"checkpoint not found: {ckpt}")
    kind = store.artifact_kind(ckpt)
    _, meta, _ = store.load_tensors(ckpt)
    if args.structure:
        s_path = Path(args.structure)
    elif meta.get("structure"):
        s_path = ckpt.parent / meta["structure"]
    else:
        raise UsageError("checkpoint does not name its structure; pass --structure")
    if not s_path.exists():
        raise UsageError(f"structure not found: {s_path}")
    structure = load_structure(s_path)
    if kind == "learner":
        model, meta = store.load_learner(ckpt)
        if model.output_dim != structure.n_params:
            raise FormatError(f"learner emits k={model.output_dim}, structure needs k={structure.n_params}")
    elif kind == "potentials":
        model = store.load_potentials(ckpt, structure)
    else:
        raise UsageError(f"cannot run inference with a {kind} artifact")
    return kind, model, structure, meta


def _bp_steps(args, meta, fallback):
    if args.bp_steps is not None:
        return args.bp_steps
    return int(meta.get("bp_steps", fallback))


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- commands

def cmd_train_agm(args):
    started = time.time()
    ds = _dataset(args.dataset)
    values = read_config(args.config) if args.config else {}
    if args.seed is not None:
        values["seed"] = args.seed
    if args.bp_steps is not None:
        values["bp_steps"] = args.bp_steps
    if args.steps is not None:
        values["total_generator_steps"] = args.steps
    edge_factor = values.pop("edge_factor", None)
    if edge_factor is not None:
        args.edge_factor = float(edge_factor)
    cfg = build_config(AgmConfig, values)
    out = _out_dir(args)
    structure, s_path = _structure_for_training(args, ds, out, cfg.seed)
    ckpt_path, state_path, trace_path = out / "learner.bin", out / "trainstate.bin", out / "trace.csv"
    meta = dict(structure=s_path.name, bp_steps=cfg.bp_steps, seed=cfg.seed)
    if ds.image_shape:
        meta["image_shape"] = f"{ds.image_shape[0]}x{ds.image_shape[1]}"

    def checkpoint(state):
        store.save_learner(state.learner, ckpt_path, step=state.step, **meta)
        store.save_trainstate(state, structure, cfg, state_path)

    state = train_agm(ds, structure, cfg, on_checkpoint=checkpoint)
    _csv(trace_path, ["step", "critic_loss", "generator_loss", "penalty"],
         [(int(s), repr(c), repr(g), repr(p)) for s, c, g, p in state.history])
    write_manifest(out, "train-agm", config_snapshot(cfg), {"seed": cfg.seed}, started,
                   [s_path, ckpt_path, state_path, trace_path])
    print(f"trained AGM for {state.step} generator steps; checkpoint {ckpt_path}")


def cmd_train_egm(args):
    started = time.time()
    ds = _dataset(args.dataset)
    values = read_config(args.config) if args.config else {}
    if args.seed is not None:
        values["seed"] = args.seed
    if args.bp_steps is not None:
        values["bp_steps"] = args.bp_steps
    if args.steps is not None:
        values["total_steps"] = args.steps
    if args.task is not None:
        values["tasks"] = args.task
    edge_factor = values.pop("edge_factor", None)
    if edge_factor is not None:
        args.edge_factor = float(edge_factor)
    cfg = build_config(EgmConfig, values, ds.image_shape)
    out = _out_dir(args)
    structure, s_path = _structure_for_training(args, ds, out, cfg.seed)
    ckpt_path, trace_path = out / "potentials.bin", out / "trace.csv"
    meta_shape = f"{ds.image_shape[0]}x{ds.image_shape[1]}" if ds.image_shape else ""

    def checkpoint(step, psi):
        store.save_potentials(psi, structure, ckpt_path, structure_ref=s_path.name)

    psi, trace = train_egm(ds.values, structure, cfg, on_checkpoint=checkpoint)
    store.save_tensors(ckpt_path, "potentials",
                       dict(structure=s_path.name, n_nodes=structure.n_nodes, support_size=structure.support_size,
                            n_edges=structure.n_edges, k=structure.n_params, bp_steps=cfg.bp_steps,
                            seed=cfg.seed, image_shape=meta_shape),
                       {"psi": psi})
    _csv(trace_path, ["step", "loss", "floored"], [(s, repr(l), f) for s, l, f in trace])
    write_manifest(out, "train-egm", config_snapshot(cfg), {"seed": cfg.seed}, started,
                   [s_path, ckpt_path, trace_path])
    print(f"trained EGM for {len(trace)} steps; final loss {trace[-1][1]:.4f}; checkpoint {ckpt_path}")


def _task(args, image_shape):
    if args.task is None:
        raise UsageError("--task is required")
    specs, _ = parse_tasks(args.task, image_shape)
    if len(specs) != 1:
        raise UsageError("--task takes exactly one task here")
    return specs[0]


def cmd_infer(args):
    started = time.time()
    if args.queries is not None and args.queries <= 0:
        raise UsageError("--queries must be positive")
    kind, model, structure, meta = _load_model(args)
    ds = _dataset(args.dataset)
    task = _task(args, ds.image_shape or _image_shape(meta.get("image_shape") or None))
    n_queries = args.queries or 1000
    t = _bp_steps(args, meta, 5 if kind == "learner" else 25)
    seed = args.seed if args.seed is not None else 0
    if kind == "potentials" and args.ensemble_size is not None:
        print("warning: --ensemble-size is ignored for a single-model (EGM) checkpoint", file=sys.stderr)
    M = args.ensemble_size or 1000
    cfg = EnsembleConfig(n_members=M if kind == "learner" else 1, bp_steps=t, seed=seed)
    rows = eval_rows(ds, n_queries, seed)
    report = evaluate_task(model, structure, rows, task, n_queries, cfg)
    out = _out_dir(args)
    detail, summary = out / "report.csv", out / "accuracy.csv"
    _csv(detail, ["query", "correct", "total"], report.per_query)
    _csv(summary, ["task", "model", "ensemble_size", "bp_steps", "queries", "correct", "total", "accuracy"],
         [(str(task), kind, cfg.n_members, t, n_queries, report.n_correct, report.n_total, f"{report.accuracy:.4f}")])
    write_manifest(out, "infer", dict(task=str(task), ensemble_size=cfg.n_members, bp_steps=t, queries=n_queries,
                                      checkpoint=str(args.checkpoint), dataset=str(args.dataset)),
                   {"seed": seed}, started, [detail, summary])
    print(f"accuracy={report.accuracy:.2f} ({report.n_correct}/{report.n_total}) task={task} M={cfg.n_members}")


def _grid(images: np.ndarray, shape, cols: int = 8) -> np.ndarray:
    h, w = shape
    n = len(images)
    rows = -(-n // cols)
    canvas = np.ones((rows * (h + 1) + 1, min(n, cols) * (w + 1) + 1))
    for k, img in enumerate(images):
        r, c = divmod(k, cols)
        canvas[1 + r * (h + 1):1 + r * (h + 1) + h, 1 + c * (w + 1):1 + c * (w + 1) + w] = img.reshape(h, w)
    return canvas


def _draw_samples(args, kind, model, structure, meta, seed):
    mode = args.mode
    if mode == "agm-oneshot":
        if kind != "learner":
            raise UsageError("agm-oneshot sampling needs a learner checkpoint")
        t = _bp_steps(args, meta, 5)
        marginals, assignments = oneshot_samples(model, structure, args.n, t, seed)
        return marginals, assignments
    if mode == "gibbs":
        if kind == "learner":
            # a learner has no single potential vector; draw one member for the chain
            model = sample_members(model, 1, torch.Generator().manual_seed(seed))[0]
        return None, independent_samples(structure, model, args.n, args.burn, seed)
    raise UsageError(f"unknown sampling mode {mode!r} (agm-oneshot or gibbs)")


def cmd_sample(args):
    started = time.time()
    if args.n <= 0:
        raise UsageError("--n must be positive")
    kind, model, structure, meta = _load_model(args)
    seed = args.seed if args.seed is not None else 0
    marginals, assignments = _draw_samples(args, kind, model, structure, meta, seed)
    out = _out_dir(args)
    outputs = []
    samples_path = out / "samples.csv"
    _csv(samples_path, [f"x{i}" for i in range(structure.n_nodes)], assignments.tolist())
    outputs.append(samples_path)
    if marginals is not None:
        marg_path = out / "marginals.csv"
        X = structure.support_size
        _csv(marg_path, [f"p{i}_{v}" for i in range(structure.n_nodes) for v in range(X)],
             [[repr(float(p)) for p in row] for row in marginals.reshape(len(marginals), -1)])
        outputs.append(marg_path)
    shape = _image_shape(args.image_shape) or _image_shape(meta.get("image_shape") or None)
    if shape is not None and structure.support_size == 2:
        pixels = marginals[..., 1] if marginals is not None else assignments.astype(float)
        grid_path = out / "grid.pgm"
        write_pgm(_grid(pixels[:64], shape), grid_path)
        outputs.append(grid_path)
    write_manifest(out, "sample", dict(mode=args.mode, n=args.n, burn=args.burn, checkpoint=str(args.checkpoint)),
                   {"seed": seed}, started, outputs)
    print(f"wrote {len(assignments)} samples to {samples_path}")


def cmd_distill(args):
    started = time.time()
    seed = args.seed if args.seed is not None else 0
    test = _dataset(args.dataset)
    if args.mode == "data":
        if args.source_dataset is None:
            raise UsageError("--mode data needs --source-dataset")
        source = _dataset(args.source_dataset)
        rng = np.random.default_rng(seed)
        samples = source.values[rng.choice(source.n_points, min(args.n, source.n_points), replace=False)]
        structure = load_structure(args.structure) if args.structure else None
        if structure is None:
            raise UsageError("--mode data needs --structure")
    else:
        kind, model, structure, meta = _load_model(args)
        _, samples = _draw_samples(args, kind, model, structure, meta, seed)
    values = read_config(args.config) if args.config else {}
    values.setdefault("seed", seed)
    values["tasks"] = "fractional=0.5"
    cfg = build_config(EgmConfig, values)
    psi, trace = train_egm(samples, structure, cfg)
    n_queries = args.queries or 1000
    rows = eval_rows(test, n_queries, seed)
    report = evaluate_task(psi, structure, rows, TaskSpec("fractional", 0.5), n_queries,
                           EnsembleConfig(n_members=1, bp_steps=cfg.bp_steps, seed=seed))
    out = _out_dir(args)
    result = out / "distill.csv"
    _csv(result, ["sampler", "burn", "n_samples", "queries", "accuracy"],
         [(args.mode, args.burn if args.mode == "gibbs" else "", len(samples), n_queries, f"{report.accuracy:.4f}")])
    samples_path = out / "samples.csv"
    _csv(samples_path, [f"x{i}" for i in range(structure.n_nodes)], np.asarray(samples).tolist())
    write_manifest(out, "distill", dict(mode=args.mode, burn=args.burn, n=args.n, egm=config_snapshot(cfg)),
                   {"seed": seed}, started, [result, samples_path])
    print(f"distillation accuracy={report.accuracy:.2f} sampler={args.mode}")


def cmd_sweep_m(args):
    started = time.time()
    kind, model, structure, meta = _load_model(args)
    if kind != "learner":
        raise UsageError("sweep-M needs a learner checkpoint")
    ds = _dataset(args.dataset)
    task = _task(args, ds.image_shape or _image_shape(meta.get("image_shape") or None))
    try:
        m_list = [int(v) for v in args.m_list.split(",")]
    except ValueError:
        raise UsageError(f"bad --m-list {args.m_list!r}") from None
    if not m_list or min(m_list) < 1:
        raise UsageError("--m-list entries must be positive")
    seed = args.seed if args.seed is not None else 0
    n_queries = args.queries or 1000
    t = _bp_steps(args, meta, 5)
    rows = eval_rows(ds, n_queries, seed)
    # nested ensembles: every M uses a prefix of one shared member draw and the same queries
    pool = sample_members(model, max(m_list), torch.Generator().manual_seed(seed))
    results = []
    for M in m_list:
        cfg = EnsembleConfig(n_members=M, bp_steps=t, seed=seed)
        report = evaluate_task(model, structure, rows, task, n_queries, cfg, members=pool[:M])
        results.append((M, report.n_correct, report.n_total, f"{report.accuracy:.4f}"))
        print(f"M={M} accuracy={report.accuracy:.2f}")
    out = _out_dir(args)
    path = out / "sweep.csv"
    _csv(path, ["ensemble_size", "correct", "total", "accuracy"], results)
    write_manifest(out, "sweep-M", dict(task=str(task), m_list=m_list, bp_steps=t, queries=n_queries),
                   {"seed": seed}, started, [path])


def time_grid(cases, batch, reps, seed=0):
    """Min wall-clock of ``batch_inference`` per ``(structure, t)`` case.

    Cases are interleaved inside each repetition so slow drifts in machine load
    hit every grid point alike.
    """
    rng = np.random.default_rng(seed)
    psis = [rng.normal(size=(batch, s.n_params)) for s, _ in cases]
    for (s, t), psi in zip(cases, psis):
        batch_inference(s, psi, None, t)  # warm-up
    best = [float("inf")] * len(cases)
    for _ in range(reps):
        for k, ((s, t), psi) in enumerate(zip(cases, psis)):
            t0 = time.perf_counter()
            batch_inference(s, psi, None, t)
            best[k] = min(best[k], time.perf_counter() - t0)
    return best


def doubling_ratios(xs, times):
    return [times[k + 1] / times[k] for k in range(len(xs) - 1)]


def cmd_bench_bp(args):
    started = time.time()
    try:
        t_list = [int(v) for v in args.t_list.split(",")]
        e_list = [int(v) for v in args.e_list.split(",")]
    except ValueError:
        raise UsageError("--t-list and --e-list take comma-separated integers") from None
    seed = args.seed if args.seed is not None else 0
    rows = []
    base_e = e_list[0]
    base_t = t_list[0]
    structures = {E: make_random_structure(args.nodes, E / args.nodes, seed) for E in e_list}
    cases = [(structures[base_e], t) for t in t_list] + [(structures[E], base_t) for E in e_list]
    times = time_grid(cases, args.batch, args.reps, seed)
    t_times, e_times = times[:len(t_list)], times[len(t_list):]
    for t, sec in zip(t_list, t_times):
        s = structures[base_e]
        rows.append(("t", "random", s.n_nodes, s.n_edges, s.max_degree, t, args.batch, f"{sec:.6f}"))
    for E, sec in zip(e_list, e_times):
        s = structures[E]
        rows.append(("edges", "random", s.n_nodes, s.n_edges, s.max_degree, base_t, args.batch, f"{sec:.6f}"))
    out = _out_dir(args)
    path = out / "bench.csv"
    _csv(path, ["sweep", "family", "n_nodes", "n_edges", "max_degree", "bp_steps", "batch", "seconds"], rows)
    t_ratios, e_ratios = doubling_ratios(t_list, t_times), doubling_ratios(e_list, e_times)
    ok = all(1.6 <= r <= 2.6 for r in t_ratios) and all(1.5 <= r <= 3.0 for r in e_ratios)
    ratio_path = out / "ratios.csv"
    _csv(ratio_path, ["sweep", "from", "to", "ratio"],
         [("t", a, b, f"{r:.4f}") for a, b, r in zip(t_list, t_list[1:], t_ratios)]
         + [("edges", a, b, f"{r:.4f}") for a, b, r in zip(e_list, e_list[1:], e_ratios)])
    write_manifest(out, "bench-bp", dict(t_list=t_list, e_list=e_list, nodes=args.nodes, batch=args.batch,
                                         reps=args.reps), {"seed": seed}, started, [path, ratio_path])
    print("t ratios: " + " ".join(f"{r:.2f}" for r in t_ratios))
    print("|E| ratios: " + " ".join(f"{r:.2f}" for r in e_ratios))
    print("linear scaling: " + ("yes" if ok else "no"))
    if args.check and not ok:
        raise MRFError("timing ratios fell outside the linear-scaling bands")


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agmrf", description="Adversarial and ERM-trained pairwise MRFs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--dataset")
        p.add_argument("--structure")
        p.add_argument("--checkpoint")
        p.add_argument("--task")
        p.add_argument("--ensemble-size", type=int)
        p.add_argument("--bp-steps", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out-dir", default="runs/latest")
        p.add_argument("--queries", type=int)
        p.add_argument("--image-shape", help="HxW, for image grids")
        return p

    for name, fn in (("train-agm", cmd_train_agm), ("train-egm", cmd_train_egm)):
        p = common(sub.add_parser(name))
        p.add_argument("--steps", type=int, help="override the number of training steps")
        p.add_argument("--edge-factor", type=float, default=5.0, help="|E| / N for a generated structure")
        p.set_defaults(func=fn)
    common(sub.add_parser("infer")).set_defaults(func=cmd_infer)
    for name, fn in (("sample", cmd_sample), ("distill", cmd_distill)):
        p = common(sub.add_parser(name))
        p.add_argument("--mode", default="agm-oneshot",
                       choices=["agm-oneshot", "gibbs"] + (["data"] if name == "distill" else []))
        p.add_argument("--burn", type=int, default=0)
        p.add_argument("--n", type=int, default=1000)
        if name == "distill":
            p.add_argument("--source-dataset", help="real data used as the sampler (control arm)")
        p.set_defaults(func=fn)
    p = common(sub.add_parser("sweep-M"))
    p.add_argument("--m-list", default="10,100,1000")
    p.set_defaults(func=cmd_sweep_m)
    p = common(sub.add_parser("bench-bp"))
    p.add_argument("--t-list", default="10,20,40,80")
    p.add_argument("--e-list", default="800,1600,3200,6400")
    p.add_argument("--nodes", type=int, default=800)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--reps", type=int, default=9)
    p.add_argument("--check", action="store_true", help="exit nonzero if scaling is not near-linear")
    p.set_defaults(func=cmd_bench_bp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    threads = os.environ.get("MRF_THREADS")
    if threads:
        torch.set_num_threads(max(1, int(threads)))
    warnings.simplefilter("default")
    try:
        args.func(args)
    except (UsageError, ConfigError, ParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (MRFError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
