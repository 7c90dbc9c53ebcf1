"""Deterministic all-roots search for smooth scalar functions on an interval."""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

DEDUP_TOL = 1e-7


def _newton(f, fprime, x, lo, hi, iters=50, tol=1e-14):
    for _ in range(iters):
        d = fprime(x)
        if d == 0 or not np.isfinite(d):
            return None
        step = f(x) / d
        x -= step
        if not lo <= x <= hi:
            return None
        if abs(step) <= tol * max(1.0, abs(x)):
            return x
    return x


def all_roots(f, fprime, lo, hi, n=4096, dedup_tol=DEDUP_TOL, touch_tol=1e-10):
    """Roots of the vectorized ``f`` on [lo, hi].

    The interval is sampled on ``n`` uniform points. Every sign change is
    bracketed with Brent's method and polished by Newton; local minima of |f|
    without a sign change are handed to Newton to catch tangential roots.
    """
    xs = np.linspace(lo, hi, n)
    ys = np.asarray(f(xs), dtype=float)
    roots = [float(x) for x, y in zip(xs, ys) if y == 0.0]
    change = np.nonzero(ys[:-1] * ys[1:] < 0)[0]
    for i in change:
        r = brentq(f, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        polished = _newton(f, fprime, r, xs[i], xs[i + 1], iters=3)
        roots.append(r if polished is None else polished)
    mag = np.abs(ys)
    interior = np.nonzero((mag[1:-1] <= mag[:-2]) & (mag[1:-1] <= mag[2:]))[0] + 1
    for i in interior:
        if ys[i - 1] * ys[i + 1] < 0 or ys[i - 1] * ys[i] < 0 or ys[i] * ys[i + 1] < 0:
            continue
        r = _newton(f, fprime, float(xs[i]), xs[i - 1], xs[i + 1])
        if r is not None and abs(f(r)) < touch_tol:
            roots.append(r)
    roots.sort()
    out = []
    for r in roots:
        if not out or r - out[-1] > dedup_tol:
            out.append(r)
    return out
