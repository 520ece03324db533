"""Scoring math: recency curve, cosine/relevance mapping, rating
normalization, and the weighted sum that ties them together."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mnemex.scoring import (
    DecayConfig,
    MemoryEntry,
    MemoryKind,
    TaskContext,
    cosine_similarity,
    normalize_user_utility,
    recency,
    relevance,
    utility_score,
)

finite = st.floats(allow_nan=False, allow_infinity=False)
small_rates = st.floats(min_value=0.0, max_value=5.0)
elapsed = st.floats(min_value=0.0, max_value=200.0)


# -- recency -----------------------------------------------------------------


def test_recency_is_one_at_zero_elapsed():
    assert recency(10, 10, 0.5) == 1.0


def test_recency_zero_rate_never_decays():
    assert recency(1_000_000, 0, 0.0) == 1.0


def test_recency_known_value():
    # independent arithmetic, not the implementation's
    assert recency(30, 10, 0.05) == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_recency_rejects_future_entries():
    with pytest.raises(ValueError):
        recency(5, 6, 0.1)


def test_recency_rejects_bad_rate():
    with pytest.raises(ValueError):
        recency(5, 4, -0.1)
    with pytest.raises(ValueError):
        recency(5, 4, float("nan"))


@given(elapsed, small_rates)
def test_recency_bounded(delta, rate):
    # exp underflows to exactly 0.0 for huge elapsed*rate; that's fine
    r = recency(delta, 0.0, rate)
    assert 0.0 <= r <= 1.0


@given(elapsed, elapsed, small_rates)
def test_recency_monotone_in_elapsed_time(d1, d2, rate):
    lo, hi = sorted((d1, d2))
    assert recency(hi, 0.0, rate) <= recency(lo, 0.0, rate) + 1e-12


# -- cosine / relevance --------------------------------------------------------


def test_cosine_identical_vectors():
    v = np.array([1.0, 2.0, 3.0])
    assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-12)


def test_cosine_opposite_vectors():
    v = np.array([1.0, -2.0, 0.5])
    assert cosine_similarity(v, -v) == pytest.approx(-1.0, abs=1e-12)


def test_cosine_orthogonal():
    assert cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 3.0])) == 0.0


def test_cosine_rejects_zero_vector():
    with pytest.raises(ValueError):
        cosine_similarity(np.zeros(3), np.ones(3))


def test_cosine_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        cosine_similarity(np.ones(3), np.ones(4))


def test_relevance_maps_to_unit_interval():
    v = np.array([1.0, 0.0])
    assert relevance(v, v) == pytest.approx(1.0)
    assert relevance(v, -v) == pytest.approx(0.0)
    assert relevance(v, np.array([0.0, 1.0])) == pytest.approx(0.5)


@given(st.integers(0, 2**32), st.integers(2, 64))
def test_cosine_symmetry_and_bounds(seed, dim):
    gen = np.random.default_rng(seed)
    a = gen.normal(size=dim) + 1e-3
    b = gen.normal(size=dim) + 1e-3
    c_ab = cosine_similarity(a, b)
    c_ba = cosine_similarity(b, a)
    assert abs(c_ab - c_ba) < 1e-12
    assert -1.0 <= c_ab <= 1.0


@given(st.integers(0, 2**32), st.floats(min_value=0.01, max_value=1000.0))
def test_cosine_scale_invariance(seed, scale):
    gen = np.random.default_rng(seed)
    a = gen.normal(size=8) + 1e-3
    b = gen.normal(size=8) + 1e-3
    assert cosine_similarity(a, b) == pytest.approx(
        cosine_similarity(a * scale, b), abs=1e-9
    )


# -- rating normalization ------------------------------------------------------


@pytest.mark.parametrize("utility,expected", [(0, 0.0), (1, 0.5), (2, 1.0)])
def test_normalize_default_scale(utility, expected):
    assert normalize_user_utility(utility, 2) == expected


def test_normalize_rejects_out_of_range():
    with pytest.raises(ValueError):
        normalize_user_utility(3, 2)
    with pytest.raises(ValueError):
        normalize_user_utility(-1, 2)


def test_normalize_rejects_non_integer():
    with pytest.raises(ValueError):
        normalize_user_utility(0.5, 2)


# -- the weighted sum ----------------------------------------------------------


def _entry(turn, vec, utility=1, n_max=2):
    v = np.asarray(vec, dtype=np.float64)
    v = v / np.linalg.norm(v)
    return MemoryEntry(
        id=0, kind=MemoryKind.OBSERVATION, content="x", turn=turn,
        embedding=v, user_utility=utility, n_max=n_max,
    )


def test_utility_score_hand_computed():
    config = DecayConfig()  # alpha .3, beta .5, gamma .2, rate .05, n_max 2
    task = TaskContext(np.array([1.0, 0.0]), current_turn=20)
    entry = _entry(10, [1.0, 0.0], utility=1)
    got = utility_score(entry, task, config)
    r = math.exp(-0.05 * 10)
    assert got.recency == pytest.approx(r, abs=1e-12)
    assert got.relevance == pytest.approx(1.0, abs=1e-12)
    assert got.user_utility_norm == 0.5
    assert got.total == pytest.approx(0.3 * r + 0.5 * 1.0 + 0.2 * 0.5, abs=1e-12)


def test_utility_score_is_exact_weighted_sum():
    config = DecayConfig(alpha=0.11, beta=0.77, gamma=0.12)
    task = TaskContext(np.array([0.6, 0.8]), current_turn=7)
    entry = _entry(3, [0.8, 0.6], utility=2)
    got = utility_score(entry, task, config)
    expected = (
        config.alpha * got.recency
        + config.beta * got.relevance
        + config.gamma * got.user_utility_norm
    )
    assert got.total == expected  # literally the same float


def test_utility_score_requires_embedding():
    entry = MemoryEntry(id=1, kind=MemoryKind.TOOL_CALL, content="x", turn=0)
    task = TaskContext(np.array([1.0, 0.0]), current_turn=0)
    with pytest.raises(ValueError):
        utility_score(entry, task, DecayConfig())


def test_wall_clock_mode_requires_wall_times():
    config = DecayConfig(use_wall_clock=True)
    task = TaskContext(np.array([1.0, 0.0]), current_turn=5)
    with pytest.raises(ValueError):
        utility_score(_entry(1, [1.0, 0.0]), task, config)


def test_wall_clock_mode_uses_seconds_not_turns():
    config = DecayConfig(use_wall_clock=True, decay_rate=0.1)
    task = TaskContext(np.array([1.0, 0.0]), current_turn=999, current_wall_time=30.0)
    entry = MemoryEntry(
        id=0, kind=MemoryKind.OBSERVATION, content="x", turn=0,
        embedding=np.array([1.0, 0.0]), wall_time=10.0,
    )
    got = utility_score(entry, task, config)
    assert got.recency == pytest.approx(math.exp(-0.1 * 20.0), abs=1e-12)


def test_score_bounds_when_weights_form_convex_combination():
    config = DecayConfig()  # weights sum to 1
    gen = np.random.default_rng(7)
    task_vec = gen.normal(size=16)
    task = TaskContext(task_vec, current_turn=50)
    for _ in range(200):
        entry = _entry(int(gen.integers(0, 51)), gen.normal(size=16) + 1e-6,
                       utility=int(gen.integers(0, 3)))
        total = utility_score(entry, task, config).total
        assert 0.0 <= total <= 1.0


# -- config validation ---------------------------------------------------------


def test_config_rejects_all_zero_weights():
    with pytest.raises(ValueError):
        DecayConfig(alpha=0.0, beta=0.0, gamma=0.0)


def test_config_rejects_negative_weight():
    with pytest.raises(ValueError):
        DecayConfig(alpha=-0.1)


def test_config_rejects_bad_n_max():
    with pytest.raises(ValueError):
        DecayConfig(n_max=0)


def test_config_rejects_bad_cadence():
    with pytest.raises(ValueError):
        DecayConfig(cadence_turns=0)


def test_config_round_trips_through_dict():
    config = DecayConfig(alpha=0.25, beta=0.5, gamma=0.25, theta_decay=0.4)
    assert DecayConfig.from_dict(config.to_dict()) == config
