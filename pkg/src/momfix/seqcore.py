"""Scalar sequences attached to the fixed point of T.

The fixed point m = (m_n) of T(a)_n = 1/(a_0 + ... + a_n) satisfies
m_0 = 1 and m_{n+1}^2 + m_{n+1}/m_n - 1 = 0.  Its reciprocals
lambda_{n+1} = 1/m_n obey lambda_0 = 0 and the backward-orbit recursion
lambda_{n+1} = (lambda_n + sqrt(lambda_n^2 + 4)) / 2 of psi(z) = z - 1/z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """Finite prefix (a_0, ..., a_n) of a normalised moment sequence."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other):
        if not isinstance(other, MomentSequence):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    @property
    def n_max(self):
        return len(self.values) - 1


@dataclass(frozen=True, eq=False)
class LambdaSeed:
    """Seeded backward orbit lambda_0(s) = s, lambda_{n+1}(s) = root of z^2 - lambda_n z - 1."""

    seed: float
    values: np.ndarray

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class AsymptoticReport:
    """Large-n diagnostics of the fixed-point sequence."""

    n: int
    lambda_sq_minus_2n: float
    log_ratio: float
    m_scaled: float


def phi(x):
    """Positive root of y^2 + y/x - 1 = 0, i.e. (sqrt(4x^2+1) - 1)/(2x).

    Written as 2x/(sqrt(4x^2+1) + 1) to avoid cancellation for small x.
    """
    return 2.0 * x / (math.sqrt(4.0 * x * x + 1.0) + 1.0)


def _positive_root(y):
    # (y + sqrt(y^2+4))/2 without cancellation for y < 0
    r = math.sqrt(y * y + 4.0)
    return 0.5 * (y + r) if y >= 0 else 2.0 / (r - y)


def fixed_point_moments(n_max):
    """Fixed-point moments (m_0, ..., m_{n_max}).

    Parameters
    ----------
    n_max : int
        Last index, ``n_max >= 0``.

    Returns
    -------
    MomentSequence

    Examples
    --------
    >>> round(fixed_point_moments(1)[1], 12)
    0.618033988750
    """
    n_max = int(n_max)
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    out = [1.0] * (n_max + 1)
    m = 1.0
    sqrt = math.sqrt
    for n in range(1, n_max + 1):
        b = 1.0 / m
        m = 2.0 / (b + sqrt(b * b + 4.0))
        out[n] = m
    return MomentSequence(np.array(out))


def lambda_sequence(n_max):
    """Reciprocal sequence (lambda_0, ..., lambda_{n_max}) with lambda_0 = 0."""
    n_max = int(n_max)
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    out = [0.0] * (n_max + 1)
    lam = 0.0
    sqrt = math.sqrt
    for n in range(1, n_max + 1):
        lam = 0.5 * (lam + sqrt(lam * lam + 4.0))
        out[n] = lam
    return np.array(out)


def lambda_seeded(s, n):
    """Seeded sequence lambda_0(s), ..., lambda_n(s).

    Each term is the positive preimage of its predecessor under psi, so
    ``psi(values[k+1]) == values[k]`` up to rounding.
    """
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0")
    s = float(s)
    out = [s]
    lam = s
    for _ in range(n):
        lam = _positive_root(lam)
        out.append(lam)
    return LambdaSeed(seed=s, values=np.array(out))


def g_iterate(n):
    """h_n = G^n(pi/4) with G(x) = arctan(2 tan x)/2; tan(h_n) = m_n."""
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0")
    h = math.pi / 4
    for _ in range(n):
        h = 0.5 * math.atan(2.0 * math.tan(h))
    return h


def asymptotic_report(n):
    """Diagnostics of lambda_n^2 - 2n and m_n sqrt(2n) at index ``n >= 2``."""
    n = int(n)
    if n < 2:
        raise DomainError("asymptotic_report needs n >= 2")
    lam = lambda_sequence(n + 1)
    ln = lam[n]
    m_n = 1.0 / lam[n + 1]
    d = ln * ln - 2.0 * n
    return AsymptoticReport(
        n=n,
        lambda_sq_minus_2n=d,
        log_ratio=d / math.log(n),
        m_scaled=m_n * math.sqrt(2.0 * n),
    )
