import math
import warnings

import numpy as np
import pytest

from agmrf import autodiff as ad
from agmrf.bp import Evidence
from agmrf.egm import EgmConfig, batch_erm_loss, erm_loss, stack_queries, train_egm
from agmrf.errors import ConfigError, QueryError
from agmrf.graph import GraphStructure, brute_force_marginals, make_random_structure, param_index
from agmrf.queries import Query, TaskSpec
from oracles import central_diff, rel_err


def make_query(n, hard, query, targets):
    hidden = [i for i in range(n) if i not in hard and i not in query]
    return Query(Evidence(hard), np.array(query), np.array(hidden, dtype=int), np.array(targets), n)


def test_uniform_model_loss_is_log_support():
    for X in (2, 3):
        s = make_random_structure(7, 1.5, seed=X, support_size=X)
        q = make_query(7, {0: 1}, [2, 3, 6], [0, 1, 1])
        assert erm_loss(s, np.zeros(s.n_params), q).item() == pytest.approx(math.log(X), abs=1e-12)


def test_one_hot_beliefs_give_zero_loss():
    s = GraphStructure(2, 2, ((0, 1),))
    psi = np.zeros(4)
    psi[param_index(s, 0, 0, 1)] = 200.0  # forces x1 = 1 once x0 = 0 is observed
    q = make_query(2, {0: 0}, [1], [1])
    assert erm_loss(s, psi, q).item() == pytest.approx(0.0, abs=1e-12)


def test_tree_loss_matches_exact_nll():
    rng = np.random.default_rng(1)
    for trial in range(10):
        n = 7
        s = GraphStructure(n, 2, tuple((int(rng.integers(i)), i) for i in range(1, n)))
        psi = rng.normal(size=s.n_params)
        x = rng.integers(0, 2, size=n)
        order = rng.permutation(n)
        hard = {int(i): int(x[i]) for i in order[:2]}
        query = sorted(int(i) for i in order[2:5])
        exact = brute_force_marginals(s, psi, hard)
        want = -np.mean([np.log(exact[i, x[i]]) for i in query])
        got = erm_loss(s, psi, make_query(n, hard, query, x[query]), t=n).item()
        assert got == pytest.approx(want, abs=1e-6)


def test_empty_query_and_floor():
    s = GraphStructure(2, 2, ((0, 1),))
    with pytest.raises(QueryError):
        erm_loss(s, np.zeros(4), make_query(2, {0: 0}, [], []))
    psi = np.zeros(4)
    psi[param_index(s, 0, 0, 1)] = 1000.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        loss = erm_loss(s, psi, make_query(2, {0: 0}, [1], [0]))
    assert loss.item() == pytest.approx(-math.log(1e-30)) and caught


def test_batch_gradient_matches_finite_differences():
    s = GraphStructure(3, 2, ((0, 1), (0, 2), (1, 2)))
    rng = np.random.default_rng(2)
    psi = rng.normal(size=s.n_params)
    queries = [make_query(3, {0: 1}, [1, 2], [0, 1]), make_query(3, {}, [2], [1]), make_query(3, {2: 0}, [0], [0])]
    batch = stack_queries(s, queries)
    f = lambda p: batch_erm_loss(s, p, *batch, 4)[0]
    (g,) = ad.grad(f, [psi])
    assert rel_err(g.numpy(), central_diff(lambda p: f(ad.tensor(p)).item(), psi)) < 1e-4


def test_gradient_zero_on_unreachable_edges():
    s = GraphStructure(5, 2, ((0, 1), (1, 2), (3, 4)))
    psi = np.random.default_rng(3).normal(size=s.n_params)
    q = make_query(5, {0: 1}, [2], [0])
    (g,) = ad.grad(lambda p: erm_loss(s, p, q, t=5), [psi])
    assert np.all(g.numpy()[8:] == 0.0) and np.any(g.numpy()[:8] != 0)


def test_smoke_training_halves_loss():
    s = make_random_structure(5, 1.0, seed=4)
    data = np.tile([1, 0, 1, 1, 0], (64, 1))
    cfg = EgmConfig(total_steps=200, batch_size=32, seed=4)
    _, trace = train_egm(data, s, cfg)
    assert trace[-1][1] <= 0.5 * trace[0][1]


def test_determinism_and_checkpoints():
    s = make_random_structure(6, 1.0, seed=5)
    data = np.random.default_rng(5).integers(0, 2, size=(50, 6))
    cfg = EgmConfig(total_steps=120, batch_size=8, bp_steps=5, seed=5,
                    tasks=(TaskSpec("fractional", 0.5), TaskSpec("corrupt", 0.3)))
    seen = []
    psi_a, trace_a = train_egm(data, s, cfg, on_checkpoint=lambda step, p: seen.append(step))
    psi_b, trace_b = train_egm(data, s, cfg)
    assert trace_a == trace_b and np.array_equal(psi_a, psi_b)
    assert seen == [100, 120]


def test_config_validation():
    with pytest.raises(ConfigError):
        EgmConfig(bp_steps=0)
    with pytest.raises(ConfigError):
        EgmConfig(learning_rate=-1.0)
