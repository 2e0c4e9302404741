"""Vectorised bracketed root finding for increasing functions."""

from __future__ import annotations

import numpy as np


def bracketed_newton(func, a, b, xtol=1e-13, maxiter=200, indexed=False, x0=None):
    """Find one root in each bracket [a_i, b_i] of an increasing function.

    Safeguarded Newton: a Newton step is accepted when it lands strictly
    inside the current bracket, otherwise the bracket is bisected.  Every
    fourth iteration is a forced bisection unless Newton has already
    resolved the root, so the bracket keeps shrinking when Newton creeps in
    from one side.

    Parameters
    ----------
    func : callable
        ``func(x) -> (f, fprime)`` on arrays, with ``f(a) < 0 < f(b)``.
    a, b : ndarray
        Bracket endpoints.
    xtol : float
        Relative step (or bracket width) at which a lane is converged.
    indexed : bool
        If true ``func`` is called as ``func(x, idx)`` with the lane indices
        of the entries of ``x``.
    x0 : ndarray, optional
        Starting points; entries outside ``(a, b)`` are replaced by midpoints.

    Returns
    -------
    x : ndarray
        Root estimates.
    width : ndarray
        Final bracket widths.
    """
    call = func if indexed else (lambda x, idx: func(x))
    a = np.array(a, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    lanes = np.arange(a.shape[0])
    x = 0.5 * (a + b)
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
        x = np.where((x0 > a) & (x0 < b), x0, x)
    fx, dx = call(x, lanes)
    fx = np.array(fx, dtype=float)
    dx = np.array(dx, dtype=float)
    active = np.ones(a.shape, dtype=bool)
    last_step = np.full(a.shape, np.inf)
    for it in range(maxiter):
        neg = fx < 0
        a = np.where(active & neg, x, a)
        b = np.where(active & ~neg, x, b)
        scale = xtol * np.maximum(1.0, np.abs(x))
        active &= ((b - a) > scale) & (last_step > scale) & (fx != 0)
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            break
        xi, fi, di, ai, bi = x[idx], fx[idx], dx[idx], a[idx], b[idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = xi - fi / di
        ok = (xn > ai) & (xn < bi) & np.isfinite(xn)
        if it % 4 == 3:
            ok &= np.abs(xn - xi) <= scale[idx]
        xn = np.where(ok, xn, 0.5 * (ai + bi))
        last_step[idx] = np.where(ok, np.abs(xn - xi), np.inf)
        x[idx] = xn
        fx[idx], dx[idx] = call(xn, idx)
    with np.errstate(divide="ignore", invalid="ignore"):
        xp = x - fx / dx
    inside = (xp >= a) & (xp <= b) & np.isfinite(xp)
    x = np.where(inside, xp, x)
    return x, b - a
