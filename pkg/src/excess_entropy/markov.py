"""Finite-state stationary Markov chains: exact entropy rate and excess entropy."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .entropy import EntropyCurve, SymbolSequence, block_entropy_exact
from .errors import InvalidModelError, NoUniqueStationaryError

__all__ = [
    "MarkovModel",
    "stationary_distribution",
    "markov_entropy_rate",
    "markov_excess_entropy",
    "markov_entropy_curve",
    "markov_block_distribution",
    "enumerated_block_entropy",
    "path_log_probability",
    "symmetric_flip",
    "random_model",
]

ROW_TOL = 1e-12
STATIONARY_TOL = 1e-12
RESIDUAL_TOL = 1e-10
MAX_ITER = 10 ** 6
# plain power iteration is tried this long before switching to the lazy chain
_UNDAMPED_ITER = 1000


def _validate_transition(P):
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise InvalidModelError("transition matrix must be square and nonempty")
    if not np.all(np.isfinite(P)):
        raise InvalidModelError("transition matrix has non-finite entries")
    if np.any(P < 0) or np.any(P > 1):
        raise InvalidModelError("transition probabilities must lie in [0, 1]")
    sums = P.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOL)
    if bad.size:
        i = int(bad[0])
        raise InvalidModelError(f"row {i} of the transition matrix sums to {float(sums[i])!r}, not 1")
    return P


def _check_single_recurrent_class(P):
    S = P.shape[0]
    ncomp, labels = connected_components(P > 0, directed=True, connection="strong")
    closed = 0
    for c in range(ncomp):
        members = labels == c
        # a class is closed when no probability leaves it
        if not np.any(P[np.ix_(members, ~members)] > 0):
            closed += 1
    if closed != 1:
        raise NoUniqueStationaryError(
            f"chain on {S} states has {closed} closed communicating classes; stationary distribution is not unique"
        )


def stationary_distribution(P):
    """Stationary distribution ``mu`` with ``mu P = mu``.

    Power iteration from the uniform vector; if it has not settled after a
    short run (periodic chains oscillate), iteration continues on the lazy
    chain ``(I + P) / 2``, which has the same stationary vector.

    Raises
    ------
    NoUniqueStationaryError
        For chains with more than one closed class, or when the iteration
        budget is exhausted.
    """
    P = _validate_transition(P)
    _check_single_recurrent_class(P)
    S = P.shape[0]
    mu = np.full(S, 1.0 / S)
    step = P
    for it in range(MAX_ITER):
        if it == _UNDAMPED_ITER:
            step = 0.5 * (np.eye(S) + P)
        nxt = mu @ step
        nxt /= nxt.sum()
        if np.abs(nxt - mu).sum() < STATIONARY_TOL:
            mu = nxt
            break
        mu = nxt
    else:
        raise NoUniqueStationaryError(f"power iteration did not converge in {MAX_ITER} steps")
    mu = np.clip(mu, 0.0, None)
    mu /= mu.sum()
    if np.abs(mu @ P - mu).sum() > RESIDUAL_TOL:
        raise NoUniqueStationaryError("stationary residual above tolerance")
    return mu


@dataclass(frozen=True)
class MarkovModel:
    """Row-stochastic transition matrix with its stationary distribution."""

    transition: np.ndarray
    stationary: np.ndarray

    @classmethod
    def from_transition(cls, P, stationary=None):
        """Build a model; a supplied ``stationary`` is verified, never trusted."""
        P = _validate_transition(P)
        if stationary is None:
            mu = stationary_distribution(P)
        else:
            mu = np.asarray(stationary, dtype=float)
            if mu.shape != (P.shape[0],) or np.any(mu < 0) or abs(mu.sum() - 1) > ROW_TOL:
                raise InvalidModelError("supplied stationary vector is not a distribution")
            if np.abs(mu @ P - mu).sum() > RESIDUAL_TOL:
                raise InvalidModelError("supplied stationary vector does not satisfy mu P = mu")
            _check_single_recurrent_class(P)
        P.setflags(write=False)
        mu.setflags(write=False)
        return cls(P, mu)

    @property
    def n_states(self):
        return self.transition.shape[0]

    def relabel(self, permutation):
        """Same chain with state ``i`` renamed ``permutation[i]``."""
        perm = np.asarray(permutation)
        inv = np.argsort(perm)
        return MarkovModel.from_transition(self.transition[np.ix_(inv, inv)])


def _as_model(model):
    return model if isinstance(model, MarkovModel) else MarkovModel.from_transition(model)


def _xlogx(p):
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log(p[nz])
    return out


def markov_entropy_rate(model):
    """``h = -sum_ij mu_i P_ij ln P_ij`` in nats."""
    m = _as_model(model)
    return float(-np.sum(m.stationary[:, None] * _xlogx(m.transition)))


def markov_excess_entropy(model):
    """``E = H(mu) - h``, equivalently ``-sum mu_i ln mu_i + sum mu_i P_ij ln P_ij``."""
    m = _as_model(model)
    return block_entropy_exact(m.stationary, tol=1e-9) - markov_entropy_rate(m)


def markov_entropy_curve(model, N):
    """Exact ``H(0..N)``: ``H(n) = H(mu) + (n - 1) h`` for ``n >= 1``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    m = _as_model(model)
    h0 = block_entropy_exact(m.stationary, tol=1e-9)
    h = markov_entropy_rate(m)
    n = np.arange(1, N + 1)
    return EntropyCurve(np.concatenate([[0.0], h0 + (n - 1) * h]), "exact")


def markov_block_distribution(model, n):
    """Joint law of ``(X_1..X_n)`` under stationarity, as an ``S``-ary ``n``-way array."""
    m = _as_model(model)
    p = m.stationary.copy()
    for _ in range(n - 1):
        p = p[..., :, None] * m.transition
    return p


def enumerated_block_entropy(model, n):
    """``H(n)`` by listing every path explicitly (brute-force oracle, small ``S**n`` only)."""
    m = _as_model(model)
    P, mu = m.transition, m.stationary
    probs = []
    for path in itertools.product(range(m.n_states), repeat=n):
        p = mu[path[0]]
        for a, b in zip(path, path[1:]):
            p *= P[a, b]
        probs.append(p)
    return block_entropy_exact(probs, tol=1e-9)


def path_log_probability(model, seq):
    """``ln p(x_1..x_n)`` of an observed path under the stationary chain."""
    m = _as_model(model)
    x = seq.symbols if isinstance(seq, SymbolSequence) else np.asarray(seq, dtype=np.int64)
    with np.errstate(divide="ignore"):
        return float(np.log(m.stationary[x[0]]) + np.sum(np.log(m.transition[x[:-1], x[1:]])))


def symmetric_flip(p):
    """Two-state chain that switches state with probability ``p``."""
    return MarkovModel.from_transition([[1 - p, p], [p, 1 - p]])


def random_model(n_states, rng):
    """Dense random chain (all transitions positive, hence irreducible)."""
    P = rng.dirichlet(np.ones(n_states), size=n_states)
    P /= P.sum(axis=1, keepdims=True)
    return MarkovModel.from_transition(P)
