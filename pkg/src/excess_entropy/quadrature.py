"""Composite Gauss-Legendre rules for trigonometric moments on [0, pi].

The node set has two parts:

* a leading panel [0, lam_s] mapped through ``lam = lam_s * exp(-u)`` and
  split into equal panels in ``u``; this turns power and logarithmic
  singularities at the origin into smooth, decaying integrands;
* a graded-then-uniform panel chain on [lam_s, pi] whose widths are
  bounded so that ``k_max * width`` stays below a fixed phase budget.

One node set serves every frequency up to ``k_max``, so the integrand is
evaluated once and all moments come from a single matrix-vector product.
The error estimate for each moment is the difference between two rules of
different order on the same panels.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import PrecisionNotReachedError

__all__ = ["PanelRule", "build_rule", "trig_moments", "integrate"]

_CHUNK = 256


@lru_cache(maxsize=None)
def _gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _map_panels(edges, order):
    x, w = _gauss_legendre(order)
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


class PanelRule:
    """Nodes and weights of a composite rule on [0, pi]."""

    def __init__(self, nodes, weights, order, lam_s, max_width):
        self.nodes = nodes
        self.weights = weights
        self.order = order
        self.lam_s = lam_s
        self.max_width = max_width

    def __len__(self):
        return self.nodes.size


def _panel_edges(k_max, phase, u_max, u_width):
    lam_s = min(1.0 / max(k_max, 1), 0.1)
    max_width = min(0.05, phase / max(k_max, 1))

    u_edges = np.arange(0.0, u_max + u_width / 2, u_width)

    edges = [lam_s]
    x = lam_s
    while x < np.pi:
        x = min(x + min(x, max_width), np.pi)
        edges.append(x)
    return lam_s, max_width, u_edges, np.asarray(edges)


def build_rule(k_max, order=20, phase=8.0, u_max=400.0, u_width=2.0):
    """Composite rule on [0, pi] resolving ``cos(k lam)`` for ``k <= k_max``."""
    lam_s, max_width, u_edges, edges = _panel_edges(k_max, phase, u_max, u_width)

    u, wu = _map_panels(u_edges, order)
    lam_lead = lam_s * np.exp(-u)
    w_lead = wu * lam_lead

    lam_main, w_main = _map_panels(edges, order)

    nodes = np.concatenate([lam_lead[::-1], lam_main])
    weights = np.concatenate([w_lead[::-1], w_main])
    return PanelRule(nodes, weights, order, lam_s, max_width)


def _moments(values, rule, ks, kind):
    wv = rule.weights * values
    out = np.empty(len(ks))
    ks = np.asarray(ks, dtype=float)
    trig = np.cos if kind == "cos" else np.sin
    for start in range(0, len(ks), _CHUNK):
        block = ks[start:start + _CHUNK]
        out[start:start + _CHUNK] = trig(np.outer(block, rule.nodes)) @ wv
    return out


def trig_moments(
    func: Callable[[np.ndarray], np.ndarray],
    ks: Sequence[int],
    *,
    kind: str = "cos",
    symmetric: bool = False,
    target: float = 1e-10,
    order: int = 20,
    max_refine: int = 3,
    raise_on_failure: bool = True,
):
    """Integrals of ``func(lam) * trig(k lam)`` over [0, pi] (or [-pi, pi]).

    Parameters
    ----------
    func : callable
        Vectorised integrand evaluated at positive nodes (and at the
        mirrored negative nodes when ``symmetric`` is true).
    ks : sequence of int
        Frequencies; ``0`` gives the plain integral for ``kind="cos"``.
    kind : {"cos", "sin"}
    symmetric : bool
        Integrate over [-pi, pi] by evaluating ``func`` on both halves.
    target : float
        Absolute error target per moment.

    Returns
    -------
    values, errors : ndarray
        Moment estimates and per-moment error estimates.

    Raises
    ------
    PrecisionNotReachedError
        When the error estimate stays above ``target`` after
        ``max_refine`` refinements (only if ``raise_on_failure``).
    """
    if kind not in ("cos", "sin"):
        raise ValueError(f"unknown kind {kind!r}")
    ks = np.asarray(ks, dtype=int)
    k_max = int(np.max(np.abs(ks))) if ks.size else 1
    phase = 8.0
    best = errs = None
    for _ in range(max_refine + 1):
        estimates = []
        for q in (order, order + 6):
            rule = build_rule(k_max, order=q, phase=phase)
            vals = _moments(np.asarray(func(rule.nodes), dtype=float), rule, ks, kind)
            if symmetric:
                neg = _moments(np.asarray(func(-rule.nodes), dtype=float), rule, ks, kind)
                # trig(k * -lam): cos even, sin odd
                vals = vals + (neg if kind == "cos" else -neg)
            estimates.append(vals)
        best = estimates[1]
        errs = np.abs(estimates[1] - estimates[0])
        if not np.all(np.isfinite(best)):
            raise PrecisionNotReachedError("non-finite quadrature value", best, errs)
        if np.all(errs <= target):
            return best, errs
        phase /= 2.0
    if raise_on_failure:
        raise PrecisionNotReachedError(
            f"quadrature error {errs.max():.3e} above target {target:.1e}", best, errs
        )
    return best, errs


def integrate(func, target=1e-10, symmetric=False, **kwargs):
    """Integral of ``func`` over [0, pi] (or [-pi, pi]) with error estimate."""
    vals, errs = trig_moments(func, [0], symmetric=symmetric, target=target, **kwargs)
    return float(vals[0]), float(errs[0])
