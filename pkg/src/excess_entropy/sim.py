"""Seeded samplers for the example processes and quantisation to symbols.

Randomness comes from numpy's counter-based Philox4x32-10 bit generator, so a
(seed, kind, parameters, length) tuple reproduces the same output on every
platform.
"""
from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .entropy import SymbolSequence
from .errors import EmbeddingFailureError, InvalidDistributionError, InvalidModelError
from .fgn import fgn_autocovariance, HurstParam
from .markov import MarkovModel

log = logging.getLogger(__name__)

__all__ = [
    "RNG_ALGORITHM",
    "make_rng",
    "SimSpec",
    "simulate",
    "sample_iid",
    "sample_markov",
    "sample_fgn",
    "sample_ar1",
    "quantize",
]

RNG_ALGORITHM = "numpy.random.Philox(4x32-10)"
EMBEDDING_NEG_TOL = 1e-10
SYMBOL_KINDS = ("iid", "markov")
REAL_KINDS = ("ar1", "fgn")


def make_rng(seed):
    """Generator for a 64-bit seed."""
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(seed))


def _check_length(length):
    if int(length) != length or length < 1:
        raise ValueError(f"length must be a positive integer, got {length!r}")
    return int(length)


def sample_iid(dist, length, seed):
    p = np.asarray(dist, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
        raise InvalidDistributionError("invalid probability vector")
    length = _check_length(length)
    cum = np.cumsum(p)
    cum[-1] = np.inf
    u = make_rng(seed).random(length)
    return SymbolSequence(np.searchsorted(cum, u, side="right"), p.size)


def sample_markov(model, length, seed):
    """Stationary-start path: ``X_1 ~ mu``, then one transition per step."""
    if not isinstance(model, MarkovModel):
        model = MarkovModel.from_transition(model)
    length = _check_length(length)
    rng = make_rng(seed)
    S = model.n_states
    u = rng.random(length)

    mu_cum = np.cumsum(model.stationary)
    mu_cum[-1] = np.inf
    cum = np.cumsum(model.transition, axis=1)
    cum[:, -1] = np.inf
    rows = [row.tolist() for row in cum]

    out = np.empty(length, dtype=np.int64)
    s = int(np.searchsorted(mu_cum, u[0], side="right"))
    out[0] = s
    right = bisect.bisect_right
    for t, ut in enumerate(u[1:].tolist(), start=1):
        s = right(rows[s], ut)
        out[t] = s
    return SymbolSequence(out, S)


def sample_fgn(H, length, seed):
    """Exact-covariance FGN sample by circulant embedding.

    The covariance ``rho_0..rho_m`` (``m`` the next power of two at or above
    ``length``) is embedded in a circulant of size ``2m``; its FFT gives the
    eigenvalues. Negative eigenvalues below ``-1e-10`` abort, smaller ones
    are clamped to zero.
    """
    H = H.H if isinstance(H, HurstParam) else HurstParam(float(H)).H
    length = _check_length(length)
    m = 1 << max(0, (length - 1).bit_length())
    rho = fgn_autocovariance(H, np.arange(m + 1))
    row = np.concatenate([rho, rho[-2:0:-1]])
    eig = np.fft.fft(row).real
    if eig.min() < -EMBEDDING_NEG_TOL * max(eig.max(), 1.0):
        raise EmbeddingFailureError(f"circulant embedding has eigenvalue {eig.min():.3e}")
    neg = int(np.sum(eig < 0))
    if neg:
        log.info("clamped %d tiny negative embedding eigenvalues", neg)
        eig = np.clip(eig, 0.0, None)
    rng = make_rng(seed)
    M = row.size
    z = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    x = np.fft.fft(np.sqrt(eig / M) * z)
    return x.real[:length].copy()


def sample_ar1(phi, length, seed):
    """Stationary AR(1) with unit marginal variance."""
    phi = float(phi)
    if not abs(phi) < 1:
        raise InvalidModelError("AR(1) needs |phi| < 1")
    length = _check_length(length)
    rng = make_rng(seed)
    x_prev = rng.standard_normal()
    e = rng.standard_normal(length)
    y, _ = lfilter([math.sqrt(1 - phi * phi)], [1.0, -phi], e, zi=[phi * x_prev])
    return y


def quantize(x, levels=2, scheme="equal-probability"):
    """Map real samples to ``levels`` symbols.

    ``equal-probability`` cuts at the empirical ``j/levels`` quantiles,
    ``equal-width`` cuts ``[min, max]`` evenly. Values equal to a cut point
    go to the lower cell.
    """
    x = np.asarray(x, dtype=float)
    if levels < 2:
        raise ValueError("need at least two levels")
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise ValueError("quantize needs a nonempty, finite input")
    if scheme == "equal-probability":
        edges = np.quantile(x, np.arange(1, levels) / levels)
    elif scheme == "equal-width":
        edges = np.linspace(x.min(), x.max(), levels + 1)[1:-1]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return SymbolSequence(np.searchsorted(edges, x, side="left"), levels)


@dataclass(frozen=True)
class SimSpec:
    kind: str
    length: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SYMBOL_KINDS + REAL_KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        _check_length(self.length)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        try:
            kind, length, seed = d.pop("kind"), d.pop("length"), d.pop("seed")
        except KeyError as exc:
            raise ValueError(f"simulation spec is missing {exc.args[0]!r}") from None
        return cls(kind, length, seed, d)

    def to_dict(self):
        return {"kind": self.kind, **self.params, "length": self.length, "seed": self.seed}

    @property
    def symbolic(self):
        return self.kind in SYMBOL_KINDS


def simulate(spec: SimSpec):
    """Dispatch on ``spec.kind``; symbol kinds return a SymbolSequence, real kinds an ndarray."""
    p = spec.params
    try:
        if spec.kind == "iid":
            return sample_iid(p["p"], spec.length, spec.seed)
        if spec.kind == "markov":
            return sample_markov(MarkovModel.from_transition(p["P"]), spec.length, spec.seed)
        if spec.kind == "ar1":
            return sample_ar1(p["phi"], spec.length, spec.seed)
        return sample_fgn(p["H"], spec.length, spec.seed)
    except KeyError as exc:
        raise ValueError(f"{spec.kind} spec is missing parameter {exc.args[0]!r}") from None
