"""Real-argument special functions: digamma, trigamma, harmonic numbers and a
shifted Hurwitz zeta function.

Everything is binary64 and vectorised over numpy arrays.  Negative arguments
are moved to the asymptotic region by the upward recurrence only (no
reflection formula), so accuracy is uniform as long as the arguments stay
within a few hundred units of the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError

EULER_GAMMA = 0.57721566490153286060651209008240243

# B_2, B_4, ..., B_16
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)

_ASYMPTOTIC_START = 10.0
_POLE_TOL = 1e-13


@dataclass(frozen=True)
class SpecialValue:
    """A function value together with an absolute error estimate."""

    value: float
    abs_err_est: float

    def __post_init__(self):
        if not self.abs_err_est >= 0:
            raise ValueError("abs_err_est must be non-negative")


def _check_poles(x):
    near = (x <= 0.0) & (np.abs(x - np.round(x)) < _POLE_TOL)
    if np.any(near):
        bad = np.asarray(x)[near].ravel()[0]
        raise PoleError(f"argument {bad!r} is at a pole (non-positive integer)")


def _shift_up(x, power):
    """Recurrence shift of ``x`` to ``>= 10``; returns (y, correction).

    power=1 accumulates sum of 1/x (digamma), power=2 accumulates 1/x**2
    (trigamma).
    """
    y = np.array(x, dtype=float, copy=True)
    acc = np.zeros_like(y)
    mask = y < _ASYMPTOTIC_START
    while np.any(mask):
        ym = y[mask]
        acc[mask] += 1.0 / ym if power == 1 else 1.0 / (ym * ym)
        y[mask] = ym + 1.0
        mask = y < _ASYMPTOTIC_START
    return y, acc


def digamma(x):
    """Digamma function Psi(x) = Gamma'(x)/Gamma(x).

    Parameters
    ----------
    x : float or array_like
        Real argument(s), not a non-positive integer.

    Returns
    -------
    float or ndarray

    Raises
    ------
    PoleError
        If some argument lies within 1e-13 of a non-positive integer.
    """
    xa = np.asarray(x, dtype=float)
    _check_poles(xa)
    y, acc = _shift_up(xa, 1)
    inv2 = 1.0 / (y * y)
    # Horner in 1/y^2 for sum_k B_2k / (2k y^2k)
    series = np.zeros_like(y)
    for k in range(7, 0, -1):
        series = (series + _BERNOULLI[k - 1] / (2 * k)) * inv2
    out = np.log(y) - 0.5 / y - series - acc
    return float(out) if out.ndim == 0 else out


def trigamma(x):
    """Trigamma function Psi'(x), same domain conventions as :func:`digamma`."""
    xa = np.asarray(x, dtype=float)
    _check_poles(xa)
    y, acc = _shift_up(xa, 2)
    inv = 1.0 / y
    inv2 = inv * inv
    series = np.zeros_like(y)
    for k in range(8, 0, -1):
        series = (series + _BERNOULLI[k - 1]) * inv2
    out = inv + 0.5 * inv2 + series * inv + acc
    return float(out) if out.ndim == 0 else out


def harmonic(p):
    """Harmonic number H_p = 1 + 1/2 + ... + 1/p (correctly rounded sum)."""
    p = int(p)
    if p < 1:
        raise DomainError("harmonic numbers need p >= 1")
    return math.fsum(1.0 / k for k in range(1, p + 1))


def bernstein_uniform(z):
    """Bernstein transform of the uniform measure, Psi(z+1) + gamma."""
    return digamma(np.asarray(z, dtype=float) + 1.0) + EULER_GAMMA


def _hurwitz_parts(s, a):
    a = np.asarray(a, dtype=float)
    if s < 2 or int(s) != s:
        raise DomainError("s must be an integer >= 2")
    if np.any(a <= -1.0):
        raise DomainError("a must exceed -1")
    s = int(s)
    # direct part: n = 1..M with M + 1 + a >= 16 for every entry
    M = max(1, int(math.ceil(15.0 - float(np.min(a)))))
    direct = np.zeros_like(a)
    for n in range(M, 0, -1):  # small terms first
        direct += (n + a) ** (-s)
    x0 = M + 1 + a
    tail = x0 ** (1 - s) / (s - 1) + 0.5 * x0 ** (-s)
    rising = float(s)  # (s)_{2k-1}
    fact = 2.0  # (2k)!
    last = np.zeros_like(a)
    for k in range(1, 8):
        last = _BERNOULLI[k - 1] / fact * rising * x0 ** (-s - 2 * k + 1)
        tail += last
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
    err = np.abs(last) + 4 * np.finfo(float).eps * np.abs(direct + tail)
    return direct + tail, err


def hurwitz_zeta_shifted(s, a):
    """Shifted Hurwitz zeta  sum_{n>=1} (n + a)^(-s).

    Note the sum starts at n = 1, so ``hurwitz_zeta_shifted(s, 0)`` is the
    Riemann zeta value and the usual Hurwitz function is recovered as
    ``hurwitz_zeta_shifted(s, a - 1)``.

    Parameters
    ----------
    s : int
        Integer exponent, ``s >= 2``.
    a : float or array_like
        Shift, ``a > -1``.
    """
    val, _ = _hurwitz_parts(s, a)
    return float(val) if val.ndim == 0 else val


def hurwitz_zeta_shifted_est(s, a):
    """Like :func:`hurwitz_zeta_shifted` for a scalar, with an error estimate."""
    val, err = _hurwitz_parts(s, float(a))
    return SpecialValue(float(val), float(err))
