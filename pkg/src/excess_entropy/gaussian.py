"""Stationary Gaussian processes: Toeplitz entropy curves, Kolmogorov rate, cepstrum.

Conventions: ``f(lam) = sum_n r(n) exp(i n lam)`` so that
``r(k) = (1/2pi) int_{-pi}^{pi} f(lam) cos(k lam) dlam``, and the cepstrum is
``b_k = (1/2pi) int log f(lam) exp(-i k lam) dlam`` (real, even in ``k``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import quadrature
from .entropy import ConvergencePolicy, Estimate, EntropyCurve, estimate_limit, fit_log_growth
from .errors import (
    InvalidDensityError,
    InvalidModelError,
    NotPositiveDefiniteError,
    PrecisionNotReachedError,
)

__all__ = [
    "GaussianModel",
    "white_noise",
    "ar1",
    "from_table",
    "levinson_durbin",
    "gaussian_entropy_curve",
    "kolmogorov_entropy_rate",
    "CepstrumSeries",
    "cepstrum_coefficients",
    "cepstrum_parity_residue",
    "MutualInfoResult",
    "mutual_info_cepstrum",
    "SummabilityReport",
    "covariance_summability_report",
]

HALF_LOG_2PIE = 0.5 * math.log(2 * math.pi * math.e)
DEFAULT_K = 1000
CONSISTENCY_TOL = 1e-6
# partial sums of a cepstral series are exact up to quadrature error, and a
# log-divergent sum has increments ~ c/K, so the exact 1e-6 rule is too loose
CEPSTRUM_TOL = 1e-10

_TAPERS = {
    "none": lambda k, K: np.ones_like(k, dtype=float),
    "bartlett": lambda k, K: 1.0 - k / (K + 1.0),
}


class GaussianModel:
    """A zero-mean stationary Gaussian process.

    Parameters
    ----------
    autocovariance : array-like or callable, optional
        ``r(0..K)`` as a sequence, or a vectorised function of integer lags.
    density, log_density : callable, optional
        Spectral density (or its log) on ``[-pi, pi]``.
    taper : {"none", "bartlett"}
        Lag window used when a density has to be synthesised from a finite
        autocovariance sequence.
    """

    def __init__(
        self,
        autocovariance=None,
        density: Optional[Callable] = None,
        log_density: Optional[Callable] = None,
        *,
        name: str = "gaussian",
        taper: str = "none",
    ):
        if autocovariance is None and density is None and log_density is None:
            raise InvalidModelError("need an autocovariance sequence or a spectral density")
        if taper not in _TAPERS:
            raise InvalidModelError(f"unknown taper {taper!r}")
        self.name = name
        self.taper = taper
        self._density = density
        self._log_density = log_density
        self._acvf_fn = None
        self._acvf = None
        if callable(autocovariance):
            self._acvf_fn = autocovariance
        elif autocovariance is not None:
            r = np.asarray(autocovariance, dtype=float)
            if r.ndim != 1 or r.size == 0:
                raise InvalidModelError("autocovariance must be a nonempty sequence")
            if not np.all(np.isfinite(r)):
                raise InvalidModelError("autocovariance must be finite")
            if r[0] <= 0:
                raise InvalidModelError("r(0) must be positive")
            if np.any(np.abs(r) > r[0] * (1 + 1e-12)):
                raise InvalidModelError("|r(k)| > r(0): not a valid autocovariance")
            r.setflags(write=False)
            self._acvf = r

    def __repr__(self):
        return f"GaussianModel({self.name!r}, {self.provenance})"

    @property
    def has_covariance(self):
        return self._acvf is not None or self._acvf_fn is not None

    @property
    def has_density(self):
        return self._density is not None or self._log_density is not None

    @property
    def provenance(self):
        if self.has_covariance and self.has_density:
            return "both"
        return "covariance-given" if self.has_covariance else "density-given"

    def acvf(self, n):
        """``r(0), ..., r(n-1)``; synthesised from the density by quadrature if needed."""
        if self._acvf_fn is not None:
            return np.asarray(self._acvf_fn(np.arange(n)), dtype=float)
        if self._acvf is not None and self._acvf.size >= n:
            return self._acvf[:n].copy()
        if self.has_density:
            vals, _ = quadrature.trig_moments(self.density, np.arange(n), target=1e-10)
            return vals / math.pi
        raise InvalidModelError(
            f"autocovariance needed to lag {n - 1} but only {self._acvf.size - 1} lags given and no density"
        )

    def log_f(self, lam):
        """Natural log of the spectral density at ``lam``."""
        lam = np.asarray(lam, dtype=float)
        if self._log_density is not None:
            return np.asarray(self._log_density(lam), dtype=float)
        f = self.density(lam)
        if np.any(~(f > 0)):
            raise InvalidDensityError(f"spectral density of {self.name} is not positive where evaluated")
        return np.log(f)

    def density(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self._density is not None:
            return np.asarray(self._density(lam), dtype=float)
        if self._log_density is not None:
            return np.exp(self._log_density(lam))
        return self._synthesised_density(lam)

    def _synthesised_density(self, lam):
        r = self._acvf if self._acvf is not None else self.acvf(DEFAULT_K + 1)
        K = r.size - 1
        k = np.arange(1, K + 1)
        w = _TAPERS[self.taper](k, K)
        f = r[0] + 2.0 * np.cos(np.multiply.outer(lam, k)) @ (w * r[1:])
        if np.any(f <= 0):
            raise InvalidDensityError(
                "truncated Fourier sum of the autocovariance is not positive; try taper='bartlett'"
            )
        return f

    def check_consistency(self, K=20, tol=CONSISTENCY_TOL):
        """Max ``|(1/2pi) int f cos(k lam) - r(k)|`` over ``k <= K``; raises above ``tol * r(0)``."""
        if self.provenance != "both":
            return 0.0
        vals, _ = quadrature.trig_moments(self.density, np.arange(K + 1), target=1e-10)
        r = self.acvf(K + 1)
        err = float(np.max(np.abs(vals / math.pi - r)))
        if err > tol * r[0]:
            raise InvalidModelError(f"density and autocovariance disagree by {err:.3e}")
        return err


def white_noise(variance=1.0):
    return GaussianModel(
        autocovariance=lambda lags: np.where(np.asarray(lags) == 0, float(variance), 0.0),
        density=lambda lam: np.full(np.shape(lam), float(variance)),
        name="white",
    )


def ar1(phi):
    """AR(1) scaled to unit marginal variance: ``r(k) = phi^|k|``."""
    phi = float(phi)
    if not abs(phi) < 1:
        raise InvalidModelError("AR(1) needs |phi| < 1")
    return GaussianModel(
        autocovariance=lambda lags: phi ** np.abs(np.asarray(lags, dtype=float)),
        density=lambda lam: (1 - phi ** 2) / (1 - 2 * phi * np.cos(lam) + phi ** 2),
        name=f"ar1(phi={phi:g})",
    )


def from_table(lam, f, name="table"):
    """Density from samples on ``[0, pi]``, interpolated linearly in ``log f``, extended evenly."""
    lam = np.abs(np.asarray(lam, dtype=float))
    f = np.asarray(f, dtype=float)
    if lam.shape != f.shape or lam.size < 2:
        raise InvalidModelError("table needs matching lam and f arrays with at least two points")
    if np.any(f <= 0):
        raise InvalidDensityError("tabulated density must be positive")
    order = np.argsort(lam)
    lam, logf = lam[order], np.log(f[order])
    return GaussianModel(log_density=lambda x: np.interp(np.abs(x), lam, logf), name=name)


def levinson_durbin(r, n=None):
    """Prediction-error variances ``sigma2[k-1] = |K^(k)| / |K^(k-1)|`` for ``k = 1..n``.

    Returns ``(sigma2, reflection)``. ``reflection[k-1]`` is the partial
    autocorrelation at lag ``k`` (``reflection[0]`` is unused and 0).

    Raises
    ------
    NotPositiveDefiniteError
        Naming the first order ``k`` whose prediction variance is not positive.
    """
    r = np.asarray(r, dtype=float)
    n = r.size if n is None else n
    if r.size < n:
        raise ValueError("not enough autocovariances")
    sigma2 = np.empty(n)
    refl = np.zeros(n)
    if not r[0] > 0:
        raise NotPositiveDefiniteError(1, r[0])
    sigma2[0] = r[0]
    a = np.zeros(0)
    for k in range(1, n):
        kappa = (r[k] - a @ r[k - 1:0:-1]) / sigma2[k - 1]
        s2 = sigma2[k - 1] * (1.0 - kappa * kappa)
        if not s2 > 0:
            raise NotPositiveDefiniteError(k + 1, s2)
        a = np.concatenate([a - kappa * a[::-1], [kappa]])
        sigma2[k] = s2
        refl[k] = kappa
    return sigma2, refl


def gaussian_entropy_curve(model: GaussianModel, N):
    """Exact differential block entropies ``H(0..N)`` via Levinson-Durbin.

    ``H(n) = (n/2) ln(2 pi e) + (1/2) sum_{k<=n} ln sigma2_k``; gains are
    ``h(n) = (1/2) ln(2 pi e sigma2_n)``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    r = model.acvf(N)
    sigma2, refl = levinson_durbin(r, N)
    H = np.concatenate([[0.0], np.cumsum(HALF_LOG_2PIE + 0.5 * np.log(sigma2))])
    return EntropyCurve(H, "exact", diagnostics={"prediction_variance": sigma2, "pacf": refl})


class RateEstimate(NamedTuple):
    value: float
    error: float


def _log_f_checked(model):
    def g(lam):
        v = model.log_f(lam)
        if not np.all(np.isfinite(v)):
            raise InvalidDensityError(f"log spectral density of {model.name} is not finite where evaluated")
        return v
    return g


def kolmogorov_entropy_rate(model: GaussianModel, target=1e-10):
    """``h = (1/2) ln(2 pi e) + (1/4pi) int_{-pi}^{pi} ln f`` with quadrature error estimate."""
    vals, errs = quadrature.trig_moments(_log_f_checked(model), [0], target=target)
    return RateEstimate(HALF_LOG_2PIE + 0.5 * vals[0] / math.pi, 0.5 * errs[0] / math.pi)


@dataclass
class CepstrumSeries:
    """Cepstrum ``b_1..b_K`` (``b[k-1] = b_k``) with ``b_0`` kept apart."""

    b: np.ndarray
    b0: float
    errors: np.ndarray
    b0_error: float = 0.0

    @property
    def K(self):
        return self.b.size

    @property
    def k(self):
        return np.arange(1, self.b.size + 1)


def cepstrum_coefficients(model: GaussianModel, K=DEFAULT_K, target=1e-10):
    """``b_k = (1/pi) int_0^pi ln f(lam) cos(k lam) dlam`` for ``k = 0..K``.

    Raises
    ------
    InvalidDensityError
        If ``ln f`` is not finite at a quadrature node.
    PrecisionNotReachedError
        If any coefficient misses ``target``; ``best`` carries the estimates.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    try:
        vals, errs = quadrature.trig_moments(_log_f_checked(model), np.arange(K + 1), target=target)
    except PrecisionNotReachedError as exc:
        best = None if exc.best is None else exc.best / math.pi
        raise PrecisionNotReachedError(str(exc), best, exc.error) from exc
    vals = vals / math.pi
    errs = errs / math.pi
    return CepstrumSeries(b=vals[1:], b0=float(vals[0]), errors=errs[1:], b0_error=float(errs[0]))


def cepstrum_parity_residue(model: GaussianModel, K=DEFAULT_K):
    """``max_k |(1/2pi) int_{-pi}^{pi} ln f sin(k lam)|``: zero for an even density."""
    vals, _ = quadrature.trig_moments(
        _log_f_checked(model), np.arange(1, K + 1), kind="sin", symmetric=True, target=1e-10
    )
    return float(np.max(np.abs(vals)) / (2 * math.pi))


@dataclass
class MutualInfoResult:
    partial_sums: np.ndarray
    estimate: Estimate

    @property
    def verdict(self):
        return self.estimate.verdict

    @property
    def value(self):
        return self.estimate.value


def mutual_info_cepstrum(ceps: CepstrumSeries, policy: Optional[ConvergencePolicy] = None):
    """Past-future mutual information ``(1/2) sum_{k>=1} k b_k^2`` as partial sums plus verdict."""
    if ceps.K == 0:
        raise ValueError("empty cepstrum series")
    policy = policy or ConvergencePolicy(series="S", tol=CEPSTRUM_TOL)
    k = ceps.k
    S = 0.5 * np.cumsum(k * ceps.b ** 2)
    return MutualInfoResult(S, estimate_limit(S, k, policy))


@dataclass
class SummabilityReport:
    lags: np.ndarray
    partial_sums: np.ndarray
    decay_exponent: Optional[float]
    growth_exponent: Optional[float]
    estimate: Estimate
    verdict: str = field(default="undetermined")


def covariance_summability_report(model: GaussianModel, K=10_000, fit_range=None, tol=1e-8):
    """Partial sums ``sum_{k=0}^{K} |r(k)|`` with power-law fits of the decay.

    ``decay_exponent`` is the log-log slope of ``|r(k)|`` and
    ``growth_exponent`` the log-log slope of the partial sums, both fitted
    over ``fit_range`` (default ``K/100 <= k <= K``).
    """
    r = model.acvf(K + 1)
    lags = np.arange(K + 1)
    S = np.cumsum(np.abs(r))
    lo, hi = fit_range if fit_range is not None else (max(1, K // 100), K)
    sel = (lags >= lo) & (lags <= hi) & (np.abs(r) > 1e-300)
    decay = growth = None
    if sel.sum() >= 2:
        decay, _, _ = fit_log_growth(lags[sel], np.log(np.abs(r[sel])))
        growth, _, _ = fit_log_growth(lags[sel], np.log(S[sel]))
    est = estimate_limit(S, lags + 1, ConvergencePolicy(series="r", tol=tol))
    if est.verdict == "finite" or (decay is not None and decay < -1):
        verdict = "summable"
    elif decay is not None:
        verdict = "not summable"
    else:
        verdict = "undetermined"
    return SummabilityReport(lags, S, decay, growth, est, verdict)
