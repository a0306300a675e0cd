"""Desk-scale experiment drivers shared by the scripts and the acceptance suite."""
from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import torch

from .agm import AgmConfig, train_agm
from .data import Dataset, load_dataset
from .egm import EgmConfig, train_egm
from .ensemble import EnsembleConfig, eval_rows, evaluate_task, oneshot_samples, sample_members
from .graph import GraphStructure, make_random_structure
from .gibbs import independent_samples
from .queries import TaskSpec

NLTCS_ENV = "MRF_NLTCS_DIR"
STRUCTURE_SEED = 0
N_TEST_QUERIES = 1000


def find_nltcs(root=None):
    """``(train, test)`` datasets, or ``None`` when no copy is on disk.

    Looks in ``$MRF_NLTCS_DIR`` then ``<root>/data/nltcs`` for
    ``nltcs.train.txt`` and ``nltcs.test.txt`` in ``mrf-data v1`` form
    (see ``scripts/convert_nltcs.py``).
    """
    dirs = []
    if os.environ.get(NLTCS_ENV):
        dirs.append(Path(os.environ[NLTCS_ENV]))
    if root is not None:
        dirs.append(Path(root) / "data" / "nltcs")
    for d in dirs:
        train, test = d / "nltcs.train.txt", d / "nltcs.test.txt"
        if train.exists() and test.exists():
            return load_dataset(train), load_dataset(test)
    return None


def nltcs_structure(n_vars: int = 16) -> GraphStructure:
    """Random structure with ``|E| = 5 N`` edges (80 for 16 variables)."""
    return make_random_structure(n_vars, 5.0, STRUCTURE_SEED)


@dataclass
class RunResult:
    accuracy: float
    model: object
    seed: int


def run_egm(train: Dataset, test: Dataset, structure, seed: int = 0, config: EgmConfig | None = None,
            test_task=TaskSpec("fractional", 0.7), n_queries: int = N_TEST_QUERIES) -> RunResult:
    cfg = replace(config or EgmConfig(), seed=seed)
    psi, _ = train_egm(train.values, structure, cfg)
    report = evaluate_task(psi, structure, eval_rows(test, n_queries, seed), test_task, n_queries,
                           EnsembleConfig(n_members=1, bp_steps=cfg.bp_steps, seed=seed))
    return RunResult(report.accuracy, psi, seed)


def run_agm(train: Dataset, test: Dataset, structure, seed: int = 0, config: AgmConfig | None = None,
            test_task=TaskSpec("fractional", 0.7), n_members: int = 1000,
            n_queries: int = N_TEST_QUERIES) -> RunResult:
    cfg = replace(config or AgmConfig(), seed=seed)
    state = train_agm(train, structure, cfg)
    report = evaluate_task(state.learner, structure, eval_rows(test, n_queries, seed), test_task, n_queries,
                           EnsembleConfig(n_members=n_members, bp_steps=cfg.bp_steps, seed=seed))
    return RunResult(report.accuracy, state.learner, seed)


def sweep_ensemble_size(learner, structure, test: Dataset, m_list, seed: int = 0, bp_steps: int = 5,
                        test_task=TaskSpec("fractional", 0.7), n_queries: int = N_TEST_QUERIES) -> dict:
    """Accuracy per ``M`` on shared queries, with nested member sets."""
    pool = sample_members(learner, max(m_list), torch.Generator().manual_seed(seed))
    rows = eval_rows(test, n_queries, seed)
    out = {}
    for M in m_list:
        cfg = EnsembleConfig(n_members=M, bp_steps=bp_steps, seed=seed)
        out[M] = evaluate_task(learner, structure, rows, test_task, n_queries, cfg, members=pool[:M]).accuracy
    return out


def distillation_score(samples, structure, test: Dataset, seed: int = 0, config: EgmConfig | None = None,
                       n_queries: int = N_TEST_QUERIES) -> float:
    """Accuracy on fractional(0.5) test queries of a fresh EGM fit only to ``samples``."""
    cfg = replace(config or EgmConfig(), seed=seed, tasks=(TaskSpec("fractional", 0.5),))
    psi, _ = train_egm(np.asarray(samples), structure, cfg)
    report = evaluate_task(psi, structure, eval_rows(test, n_queries, seed), TaskSpec("fractional", 0.5),
                           n_queries, EnsembleConfig(n_members=1, bp_steps=cfg.bp_steps, seed=seed))
    return report.accuracy


def sampling_comparison(agm_learner, egm_psi, structure, test: Dataset, n: int = 1000, seed: int = 0,
                        burns=(0, 10), bp_steps: int = 5) -> dict:
    """Distillation scores for AGM one-shot samples and Gibbs samples from the EGM."""
    _, oneshot = oneshot_samples(agm_learner, structure, n, bp_steps, seed)
    scores = {"agm": distillation_score(oneshot, structure, test, seed)}
    for burn in burns:
        samples = independent_samples(structure, egm_psi, n, burn, seed)
        scores[f"gibbs_burn{burn}"] = distillation_score(samples, structure, test, seed)
    return scores


def cross_task_smoke(train: Dataset, test: Dataset, structure, held_out: TaskSpec, tasks, seed: int = 0,
                     config: EgmConfig | None = None, n_queries: int = 200) -> dict:
    """EGM accuracy on ``held_out`` after MIX (all tasks) and MIX-1 (all but ``held_out``) curricula."""
    base = config or EgmConfig()
    out = {}
    for name, exclude in (("MIX", None), ("MIX-1", held_out)):
        cfg = replace(base, seed=seed, tasks=tuple(tasks), exclude=exclude)
        out[name] = run_egm(train, test, structure, seed, cfg, held_out, n_queries).accuracy
    return out
