import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agmrf.errors import ConfigError, OracleSizeError, ParseError, StructureError
from agmrf.graph import (
    GraphStructure,
    brute_force_log_partition,
    brute_force_marginals,
    edge_tables,
    load_structure,
    log_score,
    make_grid_structure,
    make_random_structure,
    param_index,
    save_structure,
)


def chain(n, X=2):
    return GraphStructure(n, X, tuple((i, i + 1) for i in range(n - 1)))


def test_param_index_examples():
    s2 = GraphStructure(2, 2, ((0, 1),))
    assert param_index(s2, 0, 0, 0) == 0
    assert param_index(s2, 0, 1, 0) == 2
    s3 = make_random_structure(6, 1.0, seed=1, support_size=3)
    assert param_index(s3, 3, 2, 1) == 34


@pytest.mark.parametrize("n_edges,X", [(1, 1), (7, 2), (50, 3), (50, 4)])
def test_param_index_is_bijection(n_edges, X):
    s = make_random_structure(20, n_edges / 20, seed=0, support_size=X)
    seen = [param_index(s, e, a, b) for e, a, b in itertools.product(range(n_edges), range(X), range(X))]
    assert sorted(seen) == list(range(s.n_params))


def test_param_index_out_of_range():
    s = chain(3)
    with pytest.raises(IndexError):
        param_index(s, 2, 0, 0)
    with pytest.raises(IndexError):
        param_index(s, 0, 2, 0)


def test_structure_invariants():
    s = GraphStructure(4, 2, ((2, 1), (0, 3), (1, 0)))
    assert s.edges == ((0, 1), (0, 3), (1, 2))
    assert s.max_degree == 2
    with pytest.raises(StructureError):
        GraphStructure(3, 2, ((0, 1), (1, 0)))
    with pytest.raises(StructureError):
        GraphStructure(3, 2, ((0, 3),))
    with pytest.raises(StructureError):
        GraphStructure(3, 2, ((1, 1),))


def test_random_structure_counts():
    assert make_random_structure(16, 5.0, seed=3).n_edges == 80
    assert make_random_structure(2, 0.5, seed=3).edges == ((0, 1),)
    s = make_random_structure(4, 1.0, seed=3)
    assert s.n_edges == 4 and len(set(s.edges)) == 4
    assert all(i < j for i, j in s.edges)
    with pytest.raises(ConfigError):
        make_random_structure(4, 2.0, seed=0)


def test_random_structure_seeding():
    assert make_random_structure(16, 5.0, 7).edges == make_random_structure(16, 5.0, 7).edges
    lists = [make_random_structure(16, 5.0, seed).edges for seed in range(100)]
    collisions = 100 - len(set(lists))
    assert collisions <= 1


def test_grid_structure():
    g = make_grid_structure(28, 28)
    assert g.n_nodes == 784 and g.n_edges == 1512
    explicit = {(r * 28 + c, r * 28 + c + 1) for r in range(28) for c in range(27)}
    explicit |= {(r * 28 + c, (r + 1) * 28 + c) for r in range(27) for c in range(28)}
    assert set(g.edges) == explicit
    assert make_grid_structure(1, 1).n_edges == 0
    assert make_grid_structure(2, 2).n_edges == 4


def test_log_score():
    s = GraphStructure(2, 2, ((0, 1),))
    assert log_score(s, np.zeros(4), [1, 0]) == 0.0
    psi = np.zeros(4)
    psi[param_index(s, 0, 1, 1)] = math.log(2)
    assert log_score(s, psi, [1, 1]) == pytest.approx(math.log(2))


def test_log_score_matches_linear_product():
    s = chain(3)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=s.n_params)
    lin = np.exp(psi).reshape(2, 2, 2)
    for x in itertools.product(range(2), repeat=3):
        prod = lin[0, x[0], x[1]] * lin[1, x[1], x[2]]
        assert math.exp(log_score(s, psi, x)) == pytest.approx(prod, rel=1e-12)
    with pytest.raises(StructureError):
        log_score(s, psi[:-1], [0, 0, 0])


def test_brute_force_marginals_examples():
    s = chain(4, X=3)
    np.testing.assert_allclose(brute_force_marginals(s, np.zeros(s.n_params)), 1 / 3)
    rng = np.random.default_rng(1)
    m = brute_force_marginals(s, rng.normal(size=s.n_params), {2: 1})
    np.testing.assert_array_equal(m[2], [0, 1, 0])
    pair = GraphStructure(2, 2, ((0, 1),))
    psi = np.log([2.0, 1.0, 1.0, 2.0])
    np.testing.assert_allclose(brute_force_marginals(pair, psi), 0.5, atol=1e-15)


def test_brute_force_rows_and_idempotence():
    s = make_random_structure(6, 1.5, seed=2, support_size=3)
    rng = np.random.default_rng(2)
    psi = rng.normal(size=s.n_params)
    m = brute_force_marginals(s, psi, {0: 2})
    np.testing.assert_allclose(m.sum(1), 1.0, atol=1e-12)
    # extra evidence agreeing with existing evidence changes nothing
    np.testing.assert_array_equal(brute_force_marginals(s, psi, {0: 2}), m)


def test_log_partition_examples():
    s = chain(5, X=3)
    assert brute_force_log_partition(s, np.zeros(s.n_params)) == pytest.approx(5 * math.log(3))
    pair = GraphStructure(2, 2, ((0, 1),))
    assert brute_force_log_partition(pair, np.log([2.0, 1.0, 1.0, 2.0])) == pytest.approx(math.log(6))
    assert brute_force_log_partition(GraphStructure(3, 2), np.zeros(0)) == pytest.approx(math.log(8))


@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 9), seed=st.integers(0, 10_000))
def test_partition_equals_sum_of_scores(n, seed):
    rng = np.random.default_rng(seed)
    s = make_random_structure(n, rng.uniform(0, (n - 1) / 2), seed, support_size=2)
    psi = rng.normal(size=s.n_params)
    total = sum(math.exp(log_score(s, psi, x)) for x in itertools.product(range(2), repeat=n))
    assert total == pytest.approx(math.exp(brute_force_log_partition(s, psi)), rel=1e-9)


def test_oracle_cap():
    s = chain(12)
    with pytest.raises(OracleSizeError):
        brute_force_marginals(s, np.zeros(s.n_params), cap=2**10)


def test_structure_file_roundtrip(tmp_path):
    s = make_random_structure(16, 5.0, seed=4, support_size=3)
    path = tmp_path / "s.txt"
    save_structure(s, path)
    assert load_structure(path) == s
    text = path.read_text()
    save_structure(load_structure(path), path)
    assert path.read_text() == text
    path.write_text(text.replace("mrf-structure v1", "mrf-structure v2"))
    with pytest.raises(ParseError):
        load_structure(path)


def test_edge_tables_layout():
    s = chain(3, X=3)
    psi = np.arange(s.n_params, dtype=float)
    t = edge_tables(s, psi)
    assert t[1, 2, 0] == psi[param_index(s, 1, 2, 0)]
