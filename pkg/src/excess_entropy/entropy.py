"""Block entropies, entropy gains and the three excess-entropy estimator series.

Everything is in nats. Three series approach the excess entropy from below:

* ``E_n   = H(n) - n h_mu``          (needs the entropy rate)
* ``Ipf_n = 2 H(n) - H(2n)``          (past-future mutual information)
* ``D_n   = n H(n-1) - (n-1) H(n)``

For an exact curve ``E_n >= Ipf_n >= D_n >= 0`` and all three are
nondecreasing with a common limit.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import (
    InsufficientDataError,
    InvalidBlockLengthError,
    InvalidDistributionError,
    InvalidTransformError,
    InvariantViolationError,
)

log = logging.getLogger(__name__)

__all__ = [
    "SymbolSequence",
    "EntropyCurve",
    "EstimatorSeries",
    "Estimate",
    "ConvergencePolicy",
    "block_entropy_exact",
    "block_entropy_empirical",
    "block_counts",
    "entropy_from_counts",
    "entropy_curve",
    "default_max_block",
    "estimator_series",
    "excess_entropy_estimate",
    "estimate_limit",
    "fit_log_growth",
    "relabel",
    "F_diagnostic",
    "chain_rule_entropy",
    "curve_violations",
]

DIST_TOL = 1e-12
EXACT_SLACK = 1e-10
# distinct blocks / total blocks above which a block length counts as undersampled
UNDERSAMPLING_RATIO = 0.1
_BINCOUNT_LIMIT = 1 << 22


def _xlogx(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log(p[nz])
    return out


@dataclass(frozen=True)
class SymbolSequence:
    """A finite realisation over the alphabet ``0..alphabet_size-1``."""

    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        arr = np.asarray(self.symbols)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a symbol sequence needs at least one symbol")
        if arr.dtype.kind not in "iu":
            if not np.all(arr == np.round(arr)):
                raise ValueError("symbols must be integers")
        arr = arr.astype(np.int64)
        A = int(self.alphabet_size)
        if A < 1:
            raise ValueError("alphabet_size must be positive")
        if arr.min() < 0 or arr.max() >= A:
            raise ValueError(f"symbols must lie in 0..{A - 1}")
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)
        object.__setattr__(self, "alphabet_size", A)

    @classmethod
    def from_iterable(cls, symbols, alphabet_size=None):
        arr = np.asarray(list(symbols) if not isinstance(symbols, np.ndarray) else symbols)
        if alphabet_size is None:
            alphabet_size = int(arr.max()) + 1 if arr.size else 1
        return cls(arr, alphabet_size)

    @classmethod
    def from_string(cls, text, alphabet=None):
        """Letters to indices, e.g. ``from_string("ABAB")``; alphabet defaults to sorted letters."""
        alphabet = alphabet or sorted(set(text))
        index = {c: i for i, c in enumerate(alphabet)}
        return cls(np.array([index[c] for c in text]), len(alphabet))

    def __len__(self):
        return int(self.symbols.size)


def block_entropy_exact(dist, tol=DIST_TOL):
    """Shannon entropy ``-sum p ln p`` of an explicit distribution (``0 ln 0 = 0``)."""
    p = np.asarray(dist, dtype=float).ravel()
    if p.size == 0 or np.any(~np.isfinite(p)):
        raise InvalidDistributionError("distribution must be a nonempty finite vector")
    if np.any(p < 0):
        raise InvalidDistributionError("negative probability")
    total = math.fsum(p)
    if abs(total - 1.0) > tol:
        raise InvalidDistributionError(f"probabilities sum to {total!r}, not 1")
    return float(-np.sum(np.sort(_xlogx(p))))


def entropy_from_counts(counts, miller_madow=False):
    """Plug-in entropy of a count vector.

    Counts are sorted before summation so that any permutation of the same
    multiset gives a bit-identical result.
    """
    c = np.sort(np.asarray(counts, dtype=np.int64))
    c = c[c > 0]
    total = int(c.sum())
    if total == 0:
        raise InvalidDistributionError("no counts")
    p = c / total
    h = float(-np.sum(p * np.log(p)))
    if miller_madow:
        h += (c.size - 1) / (2.0 * total)
    return h if h > 0 else 0.0


def _block_codes(symbols, n, A):
    # integer code of every overlapping n-block, or None if A^n overflows int64
    if n * math.log(max(A, 2)) >= 62 * math.log(2):
        return None
    L = symbols.size
    codes = symbols[: L - n + 1].copy()
    for j in range(1, n):
        codes = codes * A + symbols[j: L - n + 1 + j]
    return codes


def block_counts(seq: SymbolSequence, n: int):
    """Occurrence counts of every distinct overlapping ``n``-block (order unspecified)."""
    L = len(seq)
    if not (1 <= n <= L):
        raise InvalidBlockLengthError(f"block length {n} outside 1..{L}")
    A = seq.alphabet_size
    codes = _block_codes(seq.symbols, n, A)
    if codes is None:
        windows = np.lib.stride_tricks.sliding_window_view(seq.symbols, n)
        _, counts = np.unique(windows, axis=0, return_counts=True)
        return counts
    if A ** n <= _BINCOUNT_LIMIT:
        counts = np.bincount(codes, minlength=0)
        return counts[counts > 0]
    _, counts = np.unique(codes, return_counts=True)
    return counts


def block_entropy_empirical(seq: SymbolSequence, n: int, miller_madow=False):
    """Plug-in entropy of the empirical overlapping ``n``-block distribution.

    Raises
    ------
    InvalidBlockLengthError
        If ``n`` is not in ``1..len(seq)``.
    """
    return entropy_from_counts(block_counts(seq, n), miller_madow=miller_madow)


def default_max_block(length, alphabet_size):
    """``floor(ln L / ln A) + 2``, capped at the sequence length."""
    if alphabet_size <= 1:
        return max(1, min(length, 2))
    # integer floor(log_A L); the float ratio misses exact powers such as 10**3
    k, power = 0, alphabet_size
    while power <= length:
        k += 1
        power *= alphabet_size
    return max(1, min(length, k + 2))


@dataclass
class EntropyCurve:
    """``H(0), H(1), ..., H(N)`` in nats."""

    values: np.ndarray
    source: str
    unit: str = "nats"
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("an entropy curve needs H(0) and at least H(1)")
        if self.values[0] != 0.0:
            raise ValueError("H(0) must be 0")
        if self.source not in ("empirical", "exact"):
            raise ValueError(f"unknown source {self.source!r}")

    @property
    def max_block(self):
        return self.values.size - 1

    @property
    def gains(self):
        """Entropy gains ``h(n) = H(n) - H(n-1)`` for ``n = 1..N``."""
        return np.diff(self.values)

    def __len__(self):
        return self.values.size


def curve_violations(values, slack=EXACT_SLACK):
    """Violations of the structural properties of a block-entropy curve.

    Returns a dict with lists of ``(n, magnitude)`` for monotonicity,
    concavity and ``(n, m, magnitude)`` for subadditivity.
    """
    H = np.asarray(values, dtype=float)
    h = np.diff(H)
    out = {"monotonicity": [], "concavity": [], "subadditivity": []}
    for n in range(1, H.size):
        if h[n - 1] < -slack:
            out["monotonicity"].append((n, float(-h[n - 1])))
    for n in range(2, H.size):
        excess = h[n - 1] - h[n - 2]
        if excess > slack:
            out["concavity"].append((n, float(excess)))
    N = H.size - 1
    for n in range(1, N):
        m = np.arange(1, N - n + 1)
        excess = H[n + m] - H[n] - H[m]
        for mm, e in zip(m[excess > slack], excess[excess > slack]):
            out["subadditivity"].append((n, int(mm), float(e)))
    return out


def _empirical_curve(seq, N, miller_madow):
    L = len(seq)
    values = [0.0]
    undersampled = []
    for n in range(1, N + 1):
        counts = block_counts(seq, n)
        values.append(entropy_from_counts(counts, miller_madow=miller_madow))
        ratio = counts.size / (L - n + 1)
        if ratio > UNDERSAMPLING_RATIO and seq.alphabet_size > 1:
            undersampled.append(n)
    diag = curve_violations(values, slack=0.0)
    diag.pop("subadditivity")
    diag["undersampled"] = undersampled
    if undersampled:
        log.warning(
            "block lengths %s are undersampled (distinct blocks > %.0f%% of blocks)",
            undersampled, 100 * UNDERSAMPLING_RATIO,
        )
    if diag["concavity"]:
        log.info("empirical curve is not concave at n = %s", [n for n, _ in diag["concavity"]])
    diag["miller_madow"] = bool(miller_madow)
    diag["length"] = L
    return EntropyCurve(np.array(values), "empirical", diagnostics=diag)


def entropy_curve(
    source: Union[SymbolSequence, Callable[[int], np.ndarray]],
    max_block: Optional[int] = None,
    *,
    miller_madow: bool = False,
    check: bool = True,
):
    """Block-entropy curve ``H(0..N)`` from a sequence or an exact block distribution.

    Parameters
    ----------
    source : SymbolSequence or callable
        A symbol sequence (plug-in estimates over overlapping blocks) or a
        function returning the exact probability vector of ``n``-blocks.
    max_block : int, optional
        ``N``. Defaults to :func:`default_max_block` for sequences.
    miller_madow : bool
        Add the Miller-Madow correction to empirical block entropies.
    check : bool
        For exact sources, raise if monotonicity, concavity or subadditivity fail beyond 1e-10.
    """
    if isinstance(source, SymbolSequence):
        N = max_block if max_block is not None else default_max_block(len(source), source.alphabet_size)
        if N < 1:
            raise InvalidBlockLengthError("max_block must be at least 1")
        return _empirical_curve(source, N, miller_madow)

    if not callable(source):
        raise TypeError("source must be a SymbolSequence or a block-distribution callable")
    if max_block is None or max_block < 1:
        raise InvalidBlockLengthError("max_block must be at least 1 for exact sources")
    values = [0.0] + [block_entropy_exact(source(n)) for n in range(1, max_block + 1)]
    curve = EntropyCurve(np.array(values), "exact")
    if check:
        _assert_exact(curve.values)
    return curve


def _assert_exact(values, slack=EXACT_SLACK):
    bad = curve_violations(values, slack)
    if any(bad.values()):
        raise InvariantViolationError(f"exact entropy curve violates block-entropy invariants: {bad}")


@dataclass
class EstimatorSeries:
    """Aligned estimator series indexed by block length ``n = 1..N``.

    ``i_n`` covers ``n = 1..N//2`` only; ``e_n`` is ``None`` without ``h_mu``.
    """

    n: np.ndarray
    h_n: np.ndarray
    d_n: np.ndarray
    i_n: np.ndarray
    e_n: Optional[np.ndarray]
    h_mu: Optional[float]
    curve: EntropyCurve
    warnings: list = field(default_factory=list)
    lower_confidence: bool = False

    @property
    def redundancy(self):
        return None if self.h_mu is None else self.h_n - self.h_mu

    def get(self, name):
        key = {"D": "d_n", "Ipf": "i_n", "E": "e_n", "h": "h_n"}[name]
        values = getattr(self, key)
        if values is None:
            raise ValueError(f"series {name!r} is unavailable (no entropy rate supplied)")
        return values

    def to_dict(self):
        return {
            "unit": self.curve.unit,
            "H": self.curve.values.tolist(),
            "h": self.h_n.tolist(),
            "E": None if self.e_n is None else self.e_n.tolist(),
            "Ipf": self.i_n.tolist(),
            "D": self.d_n.tolist(),
            "h_mu": self.h_mu,
        }


def estimator_series(curve: EntropyCurve, h_mu: Optional[float] = None, *, check=True, slack=EXACT_SLACK):
    """Gains, ``D_n``, ``Ipf_n`` and (with ``h_mu``) ``E_n`` from a curve.

    For exact curves the ordering ``E_n >= Ipf_n >= D_n >= 0`` and the
    monotonicity of each series are verified to ``slack`` and a violation
    raises :class:`InvariantViolationError`. For empirical curves the
    same checks produce warning records ``(kind, n, magnitude)``.
    """
    H = curve.values
    N = curve.max_block
    n = np.arange(1, N + 1)
    h = np.diff(H)
    d = n * H[:-1] - (n - 1) * H[1:]
    half = np.arange(1, N // 2 + 1)
    ipf = 2.0 * H[half] - H[2 * half]
    e = None if h_mu is None else H[1:] - n * h_mu

    problems = []

    def flag(kind, idx, mag):
        for i, m in zip(idx, mag):
            problems.append((kind, int(i), float(m)))

    m = ipf.size
    flag("D<0", n[d < -slack], -d[d < -slack])
    gap = d[:m] - ipf
    flag("Ipf<D", half[gap > slack], gap[gap > slack])
    if e is not None:
        gap = ipf - e[:m]
        flag("E<Ipf", half[gap > slack], gap[gap > slack])
        de = np.diff(e)
        flag("E decreasing", n[1:][de < -slack], -de[de < -slack])
    for name, series, idx in (("D decreasing", d, n), ("Ipf decreasing", ipf, half)):
        ds = np.diff(series)
        flag(name, idx[1:][ds < -slack], -ds[ds < -slack])

    if problems and check and curve.source == "exact":
        raise InvariantViolationError(f"estimator ordering violated: {problems[:5]}")
    if problems:
        log.info("%d estimator-ordering violations on empirical curve", len(problems))

    return EstimatorSeries(n=n, h_n=h, d_n=d, i_n=ipf, e_n=e, h_mu=h_mu, curve=curve, warnings=problems)


def fit_log_growth(n, y):
    """Least-squares fit ``y ~ slope * ln n + intercept``; returns ``(slope, intercept, r2)``."""
    x = np.log(np.asarray(n, dtype=float))
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise InsufficientDataError("need at least two points for a growth fit")
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 0.0
    return float(slope), float(intercept), r2


@dataclass(frozen=True)
class ConvergencePolicy:
    """Finite-data decision rule for a nondecreasing series.

    ``mode="tail"`` requires the last ``window`` increments to be below
    ``tol`` and reports the last value (exact sources). ``mode="first"``
    reports the value at the end of the first qualifying window (empirical
    sources, whose tails drift once blocks become undersampled).
    """

    series: str = "D"
    tol: float = 1e-6
    window: int = 3
    mode: str = "tail"
    min_r2: float = 0.9


@dataclass
class Estimate:
    verdict: str  # "finite" | "diverging" | "undetermined"
    value: Optional[float]
    slope: Optional[float] = None
    r2: Optional[float] = None
    converged_at: Optional[int] = None
    last: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    def __str__(self):
        if self.verdict == "finite":
            return f"finite, {self.value:g}"
        if self.verdict == "diverging":
            return f"diverging (slope {self.slope:.4g} per ln n)"
        return "undetermined"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "value": self.value,
            "slope": self.slope,
            "r2": self.r2,
            "converged_at": self.converged_at,
            "last": self.last,
        }


def estimate_limit(values, n=None, policy: ConvergencePolicy = ConvergencePolicy()):
    """Apply a :class:`ConvergencePolicy` to a raw series indexed by ``n``."""
    y = np.asarray(values, dtype=float)
    n = np.arange(1, y.size + 1) if n is None else np.asarray(n)
    if y.size < policy.window + 1:
        raise InsufficientDataError(
            f"series of length {y.size} is shorter than the confirmation window + 1 ({policy.window + 1})"
        )
    small = np.abs(np.diff(y)) < policy.tol
    run = np.convolve(small.astype(int), np.ones(policy.window, dtype=int), mode="valid") == policy.window
    last = float(y[-1])

    if policy.mode == "tail":
        if run[-1]:
            k = int(np.flatnonzero(~small)[-1] + 1) if not small.all() else 0
            return Estimate("finite", last, converged_at=int(n[k]), last=last)
    elif policy.mode == "first":
        if run.any():
            i = int(np.argmax(run)) + policy.window
            return Estimate("finite", float(y[i]), converged_at=int(n[i]), last=last)
    else:
        raise ValueError(f"unknown mode {policy.mode!r}")

    tail = slice(y.size // 2, None)
    slope, _, r2 = fit_log_growth(n[tail], y[tail])
    verdict = "diverging" if slope > 0 and r2 >= policy.min_r2 else "undetermined"
    return Estimate(verdict, None, slope=slope, r2=r2, last=last)


def excess_entropy_estimate(series: EstimatorSeries, policy: Optional[ConvergencePolicy] = None):
    """Limit of one estimator series, or a divergence verdict with growth rate.

    Raises
    ------
    InsufficientDataError
        If the chosen series is shorter than the confirmation window + 1.
    """
    if policy is None:
        exact = series.curve.source == "exact"
        policy = ConvergencePolicy(tol=1e-6 if exact else 1e-2, mode="tail" if exact else "first")
    values = series.get(policy.series)
    if values.size == 0:
        raise InsufficientDataError("empty series")
    est = estimate_limit(values, series.n[: values.size], policy)
    est.diagnostics["series"] = policy.series
    if series.lower_confidence:
        est.diagnostics["lower_confidence"] = True
    return est


def relabel(seq: SymbolSequence, permutation: Sequence[int]):
    """Apply a bijection of the alphabet symbol-by-symbol."""
    perm = np.asarray(permutation)
    A = seq.alphabet_size
    if perm.shape != (A,) or sorted(perm.tolist()) != list(range(A)):
        raise InvalidTransformError(f"not a permutation of 0..{A - 1}: {list(permutation)!r}")
    return SymbolSequence(perm[seq.symbols], A)


def F_diagnostic(curve: EntropyCurve, h_mu: float):
    """Partial sums ``F_N = sum_{n<=N} (H(n)/n - h_mu)`` for ``N = 1..max_block``.

    Grows at least like ``(H(1) - h_mu)`` times the harmonic numbers, so it
    diverges for every non-i.i.d. process.
    """
    H = curve.values
    if h_mu > H[1] + EXACT_SLACK:
        raise ValueError("entropy rate cannot exceed H(1)")
    n = np.arange(1, H.size)
    return np.cumsum(H[1:] / n - h_mu)


def chain_rule_entropy(joint):
    """``H(X_1..X_n)`` as ``sum_i H(X_i | X_1..X_{i-1})`` from an n-way joint array."""
    p = np.asarray(joint, dtype=float)
    total = 0.0
    for i in range(1, p.ndim + 1):
        head = p.sum(axis=tuple(range(i, p.ndim))) if i < p.ndim else p
        prev = head.sum(axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = np.where(head > 0, head / prev, 0.0)
            total -= float(np.sum(np.where(head > 0, head * np.log(cond), 0.0)))
    return total
