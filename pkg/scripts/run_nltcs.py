"""Desk-scale NLTCS experiments: EGM and AGM accuracy, the ensemble-size sweep and sampling distillation.

    python scripts/run_nltcs.py --data-dir data/nltcs --out-dir runs/nltcs
    python scripts/run_nltcs.py --standin --seeds 1 --out-dir runs/standin

``--standin`` swaps in a synthetic 16-variable dataset drawn from a random
MRF. Its numbers exercise the pipeline and its runtime only; they say nothing
about the benchmark.
"""
import argparse
import csv
import time
from pathlib import Path

import numpy as np

from agmrf.agm import AgmConfig
from agmrf.data import Dataset, make_synthetic_dataset
from agmrf.egm import EgmConfig
from agmrf.experiments import (
    find_nltcs,
    nltcs_structure,
    run_agm,
    run_egm,
    sampling_comparison,
    sweep_ensemble_size,
)
from agmrf.graph import make_random_structure


def standin(seed=0):
    s = make_random_structure(16, 1.5, seed=100 + seed)
    psi = np.random.default_rng(seed).normal(scale=1.2, size=s.n_params)
    full = make_synthetic_dataset({"kind": "mrf", "structure": s, "psi": psi}, 19_000, seed=seed)
    return full.subset(slice(0, 16_000)), Dataset(full.values[16_000:], 2, split="test")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data-dir", type=Path)
    ap.add_argument("--standin", action="store_true")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--agm-steps", type=int, default=AgmConfig().total_generator_steps)
    ap.add_argument("--out-dir", type=Path, default=Path("runs/nltcs"))
    args = ap.parse_args()
    if args.standin:
        train, test = standin()
        label = "stand-in"
    else:
        import os

        if args.data_dir:
            os.environ["MRF_NLTCS_DIR"] = str(args.data_dir)
        found = find_nltcs(Path(__file__).resolve().parents[1])
        if found is None:
            raise SystemExit("NLTCS not found; pass --data-dir or use --standin")
        train, test = found
        label = "nltcs"
    args.out_dir.mkdir(parents=True, exist_ok=True)
    s = nltcs_structure(train.n_vars)
    rows = []

    def log(name, value, seconds):
        rows.append((label, name, f"{value:.4f}", f"{seconds:.1f}"))
        print(f"[{label}] {name}: {value:.2f} ({seconds:.0f}s)", flush=True)

    t0 = time.time()
    egm = run_egm(train, test, s, seed=0, config=EgmConfig())
    log("egm_fractional0.7", egm.accuracy, time.time() - t0)
    agms = []
    for seed in range(args.seeds):
        t0 = time.time()
        res = run_agm(train, test, s, seed=seed, config=AgmConfig(total_generator_steps=args.agm_steps, seed=seed))
        agms.append(res)
        log(f"agm_fractional0.7_seed{seed}", res.accuracy, time.time() - t0)
    best = max(agms, key=lambda r: r.accuracy)
    t0 = time.time()
    for M, acc in sweep_ensemble_size(best.model, s, test, [10, 100, 1000], seed=best.seed).items():
        log(f"agm_M{M}", acc, time.time() - t0)
    t0 = time.time()
    for name, acc in sampling_comparison(best.model, egm.model, s, test, n=1000, seed=0).items():
        log(f"distill_{name}", acc, time.time() - t0)
    with open(args.out_dir / "results.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["data", "metric", "value", "seconds"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
