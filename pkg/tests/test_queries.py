from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agmrf.errors import ConfigError
from agmrf.queries import (
    TaskSpec,
    corrupt,
    curriculum,
    fractional,
    parse_tasks,
    quadrant,
    quadrant_indices,
    window,
)


def rng(seed=0):
    return np.random.default_rng(seed)


def test_fractional_extremes_and_count():
    x = np.arange(10) % 2
    q = fractional(1.0, x, rng())
    assert len(q.query) == 10 and not q.evidence.hard
    q = fractional(0.0, x, rng())
    assert len(q.query) == 0 and len(q.evidence.hard) == 10
    assert len(fractional(0.5, np.zeros(784, int), rng()).query) == 392
    # ties round away from zero: 0.5 * 5 = 2.5 -> 3
    assert len(fractional(0.5, np.zeros(5, int), rng()).query) == 3


def test_corrupt_zero_matches_fractional():
    x = rng(1).integers(0, 3, size=40)
    a, b = corrupt(0.0, x, rng(5), 3), fractional(0.5, x, rng(5))
    assert len(a.query) == len(b.query) == 20
    assert all(a.evidence.hard[i] == x[i] for i in a.evidence.hard)
    np.testing.assert_array_equal(a.targets, x[a.query])


def test_corrupt_one_binary_flips_every_evidence_bit():
    x = rng(2).integers(0, 2, size=100)
    q = corrupt(1.0, x, rng(3), 2)
    assert all(v == 1 - x[i] for i, v in q.evidence.hard.items())
    np.testing.assert_array_equal(q.targets, x[q.query])


def test_corrupt_rate_concentration():
    x = np.zeros(10_000, dtype=int)
    q = corrupt(0.5, x, rng(4), 2)
    flipped = np.mean([v for v in q.evidence.hard.values()])
    assert abs(flipped - 0.5) < 0.02
    assert np.all(q.targets == 0)


def test_corrupt_multivalue_always_changes_value():
    x = rng(5).integers(0, 4, size=2000)
    q = corrupt(1.0, x, rng(6), 4)
    assert all(v != x[i] for i, v in q.evidence.hard.items())


def test_window():
    img = np.zeros(28 * 28, dtype=int)
    q = window(7, img, (28, 28))
    assert len(q.query) == 49
    rows, cols = np.divmod(q.query, 28)
    assert set(rows) == set(range(10, 17)) and set(cols) == set(range(10, 17))
    assert len(window(28, img, (28, 28)).query) == 784
    assert len(window(0, img, (28, 28)).query) == 0
    with pytest.raises(ConfigError):
        window(29, img, (28, 28))


def test_quadrant_counts_and_frequency():
    img = np.zeros(28 * 28, dtype=int)
    assert len(quadrant(1, img, (28, 28), rng()).query) == 196
    q3 = quadrant(3, img, (28, 28), rng())
    assert len(q3.query) == 588 and len(q3.evidence.hard) == 196
    quads = [frozenset(quadrant_indices((28, 28), k).tolist()) for k in range(4)]
    r, counts = rng(7), Counter()
    for _ in range(10_000):
        counts[quads.index(frozenset(quadrant(1, img, (28, 28), r).query.tolist()))] += 1
    assert all(abs(counts[k] / 10_000 - 0.25) < 0.02 for k in range(4))
    with pytest.raises(ConfigError):
        quadrant(4, img, (28, 28), rng())


def test_quadrant_odd_split():
    sizes = [len(quadrant_indices((5, 7), k)) for k in range(4)]
    assert sizes == [2 * 3, 2 * 4, 3 * 3, 3 * 4]


def test_curriculum():
    specs = [TaskSpec("fractional", 0.5), TaskSpec("corrupt", 0.5),
             TaskSpec("window", 3, (10, 10)), TaskSpec("quadrant", 1, (10, 10))]
    stream = curriculum(specs[:1], rng())
    assert all(next(stream) == specs[0] for _ in range(50))
    stream, counts = curriculum(specs, rng(8)), Counter()
    for _ in range(10_000):
        counts[next(stream)] += 1
    assert all(abs(counts[s] / 10_000 - 0.25) < 0.02 for s in specs)
    stream = curriculum(specs, rng(9), exclude=specs[1])
    assert all(next(stream) != specs[1] for _ in range(1000))
    with pytest.raises(ConfigError):
        next(curriculum(specs[:1], rng(), exclude=specs[0]))


def test_parse_tasks():
    specs, exclude = parse_tasks("fractional=0.5,corrupt=0.5,window=7,quadrant=1,exclude=corrupt=0.5", (28, 28))
    assert [str(s) for s in specs] == ["fractional=0.5", "corrupt=0.5", "window=7", "quadrant=1"]
    assert exclude == TaskSpec("corrupt", 0.5)
    with pytest.raises(ConfigError):
        parse_tasks("window=7")  # needs an image shape
    with pytest.raises(ConfigError):
        parse_tasks("fractional")
    with pytest.raises(ConfigError):
        parse_tasks("bogus=1")


task_strategy = st.one_of(
    st.builds(lambda f: TaskSpec("fractional", f), st.floats(0, 1)),
    st.builds(lambda c: TaskSpec("corrupt", c), st.floats(0, 1)),
    st.builds(lambda w: TaskSpec("window", w, (6, 8)), st.integers(0, 6)),
    st.builds(lambda q: TaskSpec("quadrant", q, (6, 8)), st.integers(1, 3)),
)


@settings(max_examples=200, deadline=None)
@given(spec=task_strategy, seed=st.integers(0, 2**32 - 1), X=st.integers(2, 4))
def test_queries_partition_nodes_and_keep_original_targets(spec, seed, X):
    r = np.random.default_rng(seed)
    x = r.integers(0, X, size=48)
    q = spec.make(x, r, X)
    parts = sorted(list(q.evidence.hard) + q.query.tolist() + q.hidden.tolist())
    assert parts == list(range(48))
    np.testing.assert_array_equal(q.targets, x[q.query])
    r1, r2 = np.random.default_rng(seed), np.random.default_rng(seed)
    r1.integers(0, X, size=48), r2.integers(0, X, size=48)
    a, b = spec.make(x, r1, X), spec.make(x, r2, X)
    np.testing.assert_array_equal(a.query, b.query)
    assert a.evidence.hard == b.evidence.hard
