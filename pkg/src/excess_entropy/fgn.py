"""Fractional Gaussian noise: autocovariance, Sinai spectral density, cepstrum.

All quantities are for the unit-variance increment process, with the
spectral density normalised so that ``r(k) = (1/2pi) int f(lam) cos(k lam)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import binom, gammaln

from . import quadrature
from .errors import InvalidModelError, SingularPointError

__all__ = [
    "HurstParam",
    "fgn_autocovariance",
    "fgn_acf_asymptotics_check",
    "sinai_spectral_density",
    "sinai_log_density",
    "tail_terms",
    "fgn_model",
    "fgn_gamma",
    "fgn_gamma_asymptotics",
    "fgn_divergence_demo",
    "DivergenceDemo",
]

# Above this lag the second difference is summed as a binomial series.
_SERIES_LAG = 64
_SERIES_TERMS = 8


@dataclass(frozen=True)
class HurstParam:
    H: float

    def __post_init__(self):
        if not (0.0 < self.H < 1.0) or not math.isfinite(self.H):
            raise InvalidModelError(f"Hurst parameter must lie in (0, 1), got {self.H}")

    @property
    def regime(self):
        if self.H > 0.5:
            return "long"
        if self.H < 0.5:
            return "anti"
        return "white"


def _hurst(H):
    return H.H if isinstance(H, HurstParam) else HurstParam(float(H)).H


def fgn_autocovariance(H, k):
    """Autocovariance ``rho_k`` of unit-variance FGN at integer lag(s) ``k``.

    Uses ``(|k-1|^2H - 2|k|^2H + |k+1|^2H) / 2`` for small lags and the
    equivalent series ``|k|^2H * sum_m binom(2H, 2m) k^-2m`` for large lags,
    where the direct second difference loses digits to cancellation.
    """
    H = _hurst(H)
    scalar = np.ndim(k) == 0
    k = np.abs(np.atleast_1d(np.asarray(k, dtype=float)))
    if np.any(k != np.round(k)):
        raise ValueError("lags must be integers")
    a = 2.0 * H
    out = np.empty_like(k)

    small = k < _SERIES_LAG
    ks = k[small]
    out[small] = 0.5 * (np.abs(ks - 1) ** a - 2.0 * ks ** a + (ks + 1) ** a)

    kl = k[~small]
    if kl.size:
        inv2 = kl ** -2.0
        acc = np.zeros_like(kl)
        power = np.ones_like(kl)
        for m in range(1, _SERIES_TERMS + 1):
            power = power * inv2
            acc += binom(a, 2 * m) * power
        out[~small] = kl ** a * acc
    return float(out[0]) if scalar else out


def fgn_acf_asymptotics_check(H, k_range):
    """Ratios ``rho_k / (H (2H-1) k^(2H-2))`` over ``k_range``."""
    H = _hurst(H)
    if H == 0.5:
        raise InvalidModelError("asymptotic ratio undefined at H = 1/2 (leading term vanishes)")
    k = np.asarray(k_range, dtype=float)
    return fgn_autocovariance(H, k) / (H * (2 * H - 1) * k ** (-2.0 * (1.0 - H)))


def _log_constant(H):
    # log(2 sin(pi H) Gamma(2H + 1))
    return math.log(2.0 * math.sin(math.pi * H)) + float(gammaln(2 * H + 1))


def _tail_cutoff(s, tolerance):
    # smallest J whose Euler-Maclaurin remainder bound sits below
    # tolerance * pi^-s (the smallest value of |lam|^-s on [-pi, pi])
    coeff = 2.0 * (2 * math.pi) ** 5 * math.prod(s + i for i in range(5)) / 30240.0
    floor = tolerance * math.pi ** -s
    J = 1
    while coeff * (2 * math.pi * J - math.pi) ** (-s - 5) > floor:
        J += 1
    return J


def tail_terms(H, lam, tolerance=1e-12):
    """Periodic tail series ``A_H(lam) = sum_j (2pi j + lam)^-s + (2pi j - lam)^-s``.

    The first ``J`` terms are summed explicitly; the remainder is replaced by
    its Euler-Maclaurin expansion (integral, half-term, first and third
    derivative corrections). ``J`` is chosen so the next expansion term is
    below ``tolerance`` relative to the singular term.
    """
    H = _hurst(H)
    s = 2.0 * H + 1.0
    lam = np.asarray(lam, dtype=float)
    J = _tail_cutoff(s, tolerance)
    two_pi = 2.0 * math.pi

    j = np.arange(1, J + 1, dtype=float)
    acc = np.zeros(lam.shape)
    for sign in (1.0, -1.0):
        base = two_pi * j[:, None] + sign * lam.reshape(1, -1)
        acc += (base ** -s).sum(axis=0).reshape(lam.shape)
        x = two_pi * J + sign * lam
        integral = x ** (1.0 - s) / (two_pi * (s - 1.0))
        g = x ** -s
        g1 = -s * two_pi * x ** (-s - 1.0)
        g3 = -s * (s + 1.0) * (s + 2.0) * two_pi ** 3 * x ** (-s - 3.0)
        acc += integral - g / 2.0 - g1 / 12.0 + g3 / 720.0
    return acc


def sinai_log_density(H, lam, tolerance=1e-12):
    """Natural log of the FGN spectral density, evaluated in log space.

    Stable for arbitrarily small ``|lam|`` where the density itself would
    overflow or underflow.
    """
    H = _hurst(H)
    lam = np.abs(np.asarray(lam, dtype=float))
    if np.any(lam > math.pi * (1 + 1e-12)):
        raise ValueError("frequencies must lie in [-pi, pi]")
    s = 2.0 * H + 1.0
    zero = lam == 0.0
    if np.any(zero) and H > 0.5:
        raise SingularPointError("FGN spectral density is infinite at lam = 0 for H > 1/2")
    with np.errstate(divide="ignore"):
        safe = np.where(zero, 1.0, lam)
        out = (
            _log_constant(H)
            + math.log(2.0)
            + 2.0 * np.log(np.sin(safe / 2.0))
            - s * np.log(safe)
            + np.log1p(safe ** s * tail_terms(H, safe, tolerance))
        )
    if np.any(zero):
        # H < 1/2: f(0) = 0; H = 1/2: f == 1
        out = np.where(zero, -np.inf if H < 0.5 else 0.0, out)
    return out


def sinai_spectral_density(H, lam, tolerance=1e-12):
    """FGN spectral density ``2 sin(pi H) Gamma(2H+1) (1 - cos lam) [|lam|^-s + A_H(lam)]``.

    Raises
    ------
    SingularPointError
        At ``lam = 0`` when ``H > 1/2``.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    return np.exp(sinai_log_density(H, lam, tolerance))


def fgn_model(H, tolerance=1e-12):
    """FGN as a :class:`~excess_entropy.gaussian.GaussianModel` with both representations."""
    from .gaussian import GaussianModel

    H = _hurst(H)
    return GaussianModel(
        autocovariance=lambda lags: fgn_autocovariance(H, lags),
        log_density=lambda lam: sinai_log_density(H, lam, tolerance),
        name=f"fgn(H={H:g})",
    )


def fgn_gamma(H, ns, target=1e-10):
    """Cepstrum coefficients ``gamma(n) = (1/pi) int_0^pi log f(lam) cos(n lam)``.

    Returns ``(values, errors)``.
    """
    H = _hurst(H)
    vals, errs = quadrature.trig_moments(
        lambda lam: sinai_log_density(H, lam), ns, target=target
    )
    return vals / math.pi, errs / math.pi


def fgn_gamma_asymptotics(H, n_range, target=1e-10):
    """``n |gamma(n)|`` over ``n_range``; plateaus at ``(2H - 1)/2`` for H > 1/2."""
    H = _hurst(H)
    n = np.asarray(n_range, dtype=int)
    vals, _ = fgn_gamma(H, n, target=target)
    return n * np.abs(vals)


@dataclass
class DivergenceDemo:
    K: np.ndarray
    gamma: np.ndarray
    partial_sums: np.ndarray
    slope: float
    r2: float
    verdict: str
    expected_slope: float
    estimate: object = None


def fgn_divergence_demo(H, K_max=5000, target=1e-10):
    """Partial sums ``S_K = (1/2) sum_{k<=K} k gamma(k)^2`` and their growth in ``ln K``.

    The slope is a least-squares fit of ``S_K`` against ``ln K`` over the last
    decade ``K_max/10 <= K <= K_max``.
    """
    H = _hurst(H)
    if K_max < 100:
        raise ValueError("K_max must be at least 100")
    if H < 0.5:
        raise InvalidModelError("divergence demo is defined for H >= 1/2")
    K = np.arange(1, K_max + 1)
    gamma, _ = fgn_gamma(H, K, target=target)
    # coefficients below the quadrature target are not resolved
    gamma = np.where(np.abs(gamma) <= target, 0.0, gamma)
    S = 0.5 * np.cumsum(K * gamma ** 2)

    from .entropy import ConvergencePolicy, estimate_limit, fit_log_growth
    from .gaussian import CEPSTRUM_TOL

    tail = K >= K_max // 10
    slope, _, r2 = fit_log_growth(K[tail], S[tail])
    est = estimate_limit(S, K, ConvergencePolicy(series="S", tol=CEPSTRUM_TOL))
    verdict = est.verdict
    return DivergenceDemo(
        K=K,
        gamma=gamma,
        partial_sums=S,
        slope=slope,
        r2=r2,
        verdict=verdict,
        expected_slope=(2 * H - 1) ** 2 / 8,
        estimate=est,
    )
