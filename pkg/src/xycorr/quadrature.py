"""Adaptive composite Gauss-Legendre quadrature for vector-valued integrands.

Every panel is compared against the sum of its two halves; panels whose
disagreement exceeds their share of the absolute tolerance are bisected.
All panels of one refinement level are evaluated in a single integrand call,
so the integrand must accept a 1-D array of abscissae and return an array of
shape ``(m, len(phi))`` (``m`` integrals computed simultaneously) or, for a
single integral, of shape ``(len(phi),)``.
"""
from __future__ import annotations

import numpy as np

from .errors import QuadratureError

_ORDER = 20
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)
_ROUNDOFF = 50 * np.finfo(float).eps


def _panel_sums(f, a, b):
    """Gauss-Legendre estimate on each panel ``[a_k, b_k]``; returns ``(m, P)``."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    vals = np.atleast_2d(f(x))
    vals = vals.reshape(vals.shape[0], a.size, _ORDER)
    return vals @ _WEIGHTS * half[None, :]


def integrate(f, breakpoints, tol=1e-11, max_depth=48, max_panels=200_000):
    """Integrate ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand, ``f(phi) -> array (m, len(phi))`` or ``(len(phi),)``.
    breakpoints : sequence of float
        Strictly increasing panel boundaries used as the initial partition.
    tol : float
        Target absolute error for each of the ``m`` integrals, shared among
        panels in proportion to their length. Integrands must be bounded;
        kinks and square-root endpoints are fine.

    Returns
    -------
    value : ndarray, shape (m,), or float for a scalar integrand
    error : float
        Sum of the accepted panels' error estimates (max over components).
    """
    edges = np.asarray(breakpoints, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("breakpoints must be strictly increasing with at least two entries")
    length = edges[-1] - edges[0]
    scalar = np.ndim(f(np.array([0.5 * (edges[0] + edges[1])]))) == 1
    a, b = edges[:-1], edges[1:]
    est = _panel_sums(f, a, b)
    total = np.zeros(est.shape[0])
    err_total = 0.0
    panels = 0
    for _ in range(max_depth):
        mid = 0.5 * (a + b)
        halves = _panel_sums(f, np.concatenate([a, mid]), np.concatenate([mid, b]))
        n = a.size
        fine = halves[:, :n] + halves[:, n:]
        err = np.max(np.abs(fine - est), axis=0)
        # panels whose halves agree to round-off cannot be improved by bisection
        noise = _ROUNDOFF * np.max(np.abs(halves[:, :n]) + np.abs(halves[:, n:]), axis=0)
        ok = (err <= tol * (b - a) / length) | (err <= noise)
        total += fine[:, ok].sum(axis=1)
        err_total += float(err[ok].sum())
        if ok.all():
            return (float(total[0]) if scalar else total), err_total
        bad = ~ok
        panels += 2 * int(bad.sum())
        if panels > max_panels:
            break
        a = np.concatenate([a[bad], mid[bad]])
        b = np.concatenate([mid[bad], b[bad]])
        est = np.concatenate([halves[:, :n][:, bad], halves[:, n:][:, bad]], axis=1)
    pending = float(np.max(np.abs(est.sum(axis=1)))) if est.size else 0.0
    raise QuadratureError(
        f"adaptive quadrature did not reach tol={tol:.1e} ({a.size} panels unresolved)",
        estimate=total + est.sum(axis=1),
        error=err_total + pending,
    )
