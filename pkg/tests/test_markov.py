import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from excess_entropy.entropy import entropy_curve, estimator_series, excess_entropy_estimate
from excess_entropy.errors import InvalidModelError, NoUniqueStationaryError
from excess_entropy.markov import (
    MarkovModel,
    enumerated_block_entropy,
    markov_entropy_curve,
    markov_entropy_rate,
    markov_excess_entropy,
    path_log_probability,
    random_model,
    stationary_distribution,
    symmetric_flip,
)

from conftest import E_FLIP_01, HB_01, LN2, exact_source

CYCLE = [[0.0, 1.0], [1.0, 0.0]]


@pytest.mark.parametrize(
    "P, mu",
    [
        ([[0.9, 0.1], [0.1, 0.9]], [0.5, 0.5]),
        ([[1.0]], [1.0]),
        ([[0.5, 0.5], [0.2, 0.8]], [2 / 7, 5 / 7]),
        (CYCLE, [0.5, 0.5]),
        ([[0, 1, 0], [0, 0, 1], [1, 0, 0]], [1 / 3, 1 / 3, 1 / 3]),
    ],
)
def test_stationary_distribution(P, mu):
    out = stationary_distribution(P)
    np.testing.assert_allclose(out, mu, atol=1e-10)
    assert np.abs(out @ np.asarray(P) - out).sum() <= 1e-10


def test_reducible_chain_rejected():
    with pytest.raises(NoUniqueStationaryError):
        stationary_distribution([[1.0, 0.0], [0.0, 1.0]])


def test_transient_state_allowed():
    # state 0 leaks into the closed class {1}
    np.testing.assert_allclose(stationary_distribution([[0.5, 0.5], [0.0, 1.0]]), [0, 1], atol=1e-10)


@pytest.mark.parametrize(
    "P",
    [[[1.0, 0.1], [0.1, 0.9]], [[0.5, 0.5]], [[-0.1, 1.1], [0.5, 0.5]], [[np.nan, 1], [0.5, 0.5]]],
)
def test_invalid_transition(P):
    with pytest.raises(InvalidModelError):
        MarkovModel.from_transition(P)


def test_row_sum_message_names_row():
    with pytest.raises(InvalidModelError, match="row 0"):
        MarkovModel.from_transition([[1.0, 0.1], [0.1, 0.9]])


def test_supplied_stationary_is_verified():
    P = [[0.5, 0.5], [0.2, 0.8]]
    m = MarkovModel.from_transition(P, stationary=[2 / 7, 5 / 7])
    assert m.n_states == 2
    with pytest.raises(InvalidModelError):
        MarkovModel.from_transition(P, stationary=[0.5, 0.5])


def test_model_is_read_only():
    m = symmetric_flip(0.1)
    with pytest.raises(ValueError):
        m.transition[0, 0] = 0.5


@pytest.mark.parametrize("p, expected", [(0.5, LN2), (0.1, HB_01)])
def test_entropy_rate_flip(p, expected):
    assert markov_entropy_rate(symmetric_flip(p)) == pytest.approx(expected, abs=1e-14)


def test_entropy_rate_cycle_is_zero():
    assert markov_entropy_rate(CYCLE) == 0.0


def test_excess_entropy_examples():
    assert markov_excess_entropy(symmetric_flip(0.5)) == pytest.approx(0.0, abs=1e-14)
    assert markov_excess_entropy(symmetric_flip(0.1)) == pytest.approx(E_FLIP_01, abs=1e-12)
    assert markov_excess_entropy(CYCLE) == pytest.approx(LN2, abs=1e-12)


def test_entropy_curve_examples():
    np.testing.assert_allclose(
        markov_entropy_curve(symmetric_flip(0.1), 3).values,
        [0, LN2, LN2 + HB_01, LN2 + 2 * HB_01],
        atol=1e-14,
    )
    np.testing.assert_allclose(
        markov_entropy_curve(symmetric_flip(0.5), 3).values, [0, LN2, 2 * LN2, 3 * LN2], atol=1e-14
    )
    np.testing.assert_array_equal(markov_entropy_curve([[1.0]], 5).values, np.zeros(6))


def test_enumeration_of_eight_paths():
    m = symmetric_flip(0.1)
    assert enumerated_block_entropy(m, 3) == pytest.approx(LN2 + 2 * HB_01, abs=1e-12)


def test_closed_form_equals_estimator_limit():
    m = symmetric_flip(0.1)
    curve = markov_entropy_curve(m, 10)
    s = estimator_series(curve, markov_entropy_rate(m))
    np.testing.assert_allclose(s.e_n[1:], markov_excess_entropy(m), atol=1e-12)
    np.testing.assert_allclose(s.d_n[1:], markov_excess_entropy(m), atol=1e-12)
    assert excess_entropy_estimate(s).value == pytest.approx(markov_excess_entropy(m), abs=1e-12)


def test_closed_form_curve_matches_block_distribution_curve():
    m = random_model(3, np.random.default_rng(7))
    np.testing.assert_allclose(
        markov_entropy_curve(m, 6).values, entropy_curve(exact_source(m), 6).values, atol=1e-12
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_bounds_and_relabeling(S, seed):
    rng = np.random.default_rng(seed)
    m = random_model(S, rng)
    h, E = markov_entropy_rate(m), markov_excess_entropy(m)
    assert -1e-12 <= h <= math.log(S) + 1e-12
    assert -1e-12 <= E <= math.log(S) + 1e-12
    r = m.relabel(rng.permutation(S))
    assert markov_entropy_rate(r) == pytest.approx(h, abs=1e-12)
    assert markov_excess_entropy(r) == pytest.approx(E, abs=1e-12)


@pytest.mark.parametrize("S", [2, 3, 4])
def test_brute_force_random_models(S):
    rng = np.random.default_rng(100 + S)
    for _ in range(3):
        m = random_model(S, rng)
        curve = markov_entropy_curve(m, 6).values
        for n in range(1, 7 if S < 4 else 6):
            assert enumerated_block_entropy(m, n) == pytest.approx(curve[n], abs=1e-10)


def test_path_log_probability():
    m = symmetric_flip(0.1)
    assert path_log_probability(m, [0, 0, 1]) == pytest.approx(math.log(0.5 * 0.9 * 0.1))
    assert path_log_probability(CYCLE, [0, 0]) == -math.inf
