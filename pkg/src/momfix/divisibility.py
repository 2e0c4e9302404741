"""Finite-difference certificates for complete monotonicity.

A sequence is a Hausdorff moment sequence iff (-1)^j (Delta^j a)_n >= 0 for
all j, n.  Only finitely many orders and terms can be checked, so a passing
report means "consistent with complete monotonicity up to order K" and
nothing more.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .seqcore import MomentSequence, fixed_point_moments
from .transform import t_inverse

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of a truncated complete-monotonicity check.

    Attributes
    ----------
    max_order_checked : int
    min_signed_difference : float
        Smallest (-1)^j (Delta^j a)_n over all checked j >= 0 and n.
    passed : bool
        ``min_signed_difference >= -tolerance`` (and any extra bound checks).
    first_violation : (n, order) or None
    tolerance : float
    """

    max_order_checked: int
    min_signed_difference: float
    passed: bool
    first_violation: Optional[tuple] = None
    tolerance: float = 0.0
    note: str = ""

    @property
    def pass_(self):
        return self.passed

    def __bool__(self):
        return self.passed

    def describe(self):
        if self.passed:
            return (f"consistent with complete monotonicity up to order "
                    f"{self.max_order_checked} (min {self.min_signed_difference:.3e})")
        n, j = self.first_violation
        return f"violation at n={n}, order={j} ({self.note or 'negative difference'})"


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def signed_differences(a, max_order):
    """Rows c_j = (-1)^j Delta^j a for j = 0..max_order.

    Each row is formed from the previous one by c_{j+1,n} = c_{j,n} - c_{j,n+1}
    in double-double arithmetic (TwoSum with carried low parts), so the
    subtraction of nearly equal neighbours adds no rounding of its own.
    Returns a list of arrays of decreasing length.
    """
    v = np.asarray(a.values if isinstance(a, MomentSequence) else a, dtype=float)
    max_order = int(max_order)
    if max_order < 0 or max_order >= len(v):
        raise DomainError("need 0 <= max_order < len(a)")
    hi, lo = v.copy(), np.zeros_like(v)
    rows = [hi.copy()]
    for _ in range(max_order):
        s, e = _two_sum(hi[:-1], -hi[1:])
        e = e + (lo[:-1] - lo[1:])
        hi = s + e
        lo = e - (hi - s)
        rows.append(hi.copy())
    return rows


def completely_monotone_check(a, max_order, tol):
    """Check (-1)^j (Delta^j a)_n >= -tol for j <= max_order and all valid n.

    Examples
    --------
    >>> completely_monotone_check([1 / (n + 1) for n in range(40)], 20, 1e-12).passed
    True
    """
    rows = signed_differences(a, max_order)
    tol = float(tol)
    mins = [float(r.min()) for r in rows]
    first = None
    for j, r in enumerate(rows):
        bad = np.nonzero(r < -tol)[0]
        if len(bad):
            first = (int(bad[0]), j)
            break
    m = min(mins)
    return MonotonicityReport(int(max_order), m, first is None, first, tol)


def noise_floor(a, max_order, trials=8, rel=None, seed=0):
    """Empirical noise floor of the difference triangle.

    Perturbs ``a`` by independent relative errors of size ``rel`` (default
    4 eps) and returns the largest change of any signed difference.  Inputs
    computed by a recursion carry errors of this size, so tolerances should
    sit well above the returned value.
    """
    v = np.asarray(a.values if isinstance(a, MomentSequence) else a, dtype=float)
    rel = 4 * EPS if rel is None else float(rel)
    rng = np.random.default_rng(seed)
    base = signed_differences(v, max_order)
    worst = 0.0
    for _ in range(trials):
        w = v * (1.0 + rel * rng.uniform(-1, 1, size=v.shape))
        rows = signed_differences(w, max_order)
        worst = max(worst, max(float(np.max(np.abs(x - y))) for x, y in zip(rows, base)))
    return worst


def infdiv_check(alpha, n_len=60, max_order=15, tol=1e-8):
    """Complete-monotonicity check of (m_n^alpha) for n < n_len."""
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    m = fixed_point_moments(int(n_len) - 1).values
    return completely_monotone_check(m**alpha, max_order, tol)


def in_image_of_t(b, max_order, tol):
    """Test whether ``b`` can be T(c) for a normalised Hausdorff sequence c.

    c = T^{-1}(b) must be completely monotone (up to ``max_order``) and lie
    in [0, 1]; an entry above 1 is reported as a violation at order 0.
    """
    v = np.asarray(b.values if isinstance(b, MomentSequence) else b, dtype=float)
    if np.any(v <= 0):
        raise DomainError("in_image_of_t needs strictly positive entries")
    c = t_inverse(v).values
    rep = completely_monotone_check(c, max_order, tol)
    over = np.nonzero(c > 1.0 + tol)[0]
    if len(over) and (rep.passed or rep.first_violation[1] > 0 or over[0] < rep.first_violation[0]):
        return MonotonicityReport(rep.max_order_checked, rep.min_signed_difference, False,
                                  (int(over[0]), 0), rep.tolerance,
                                  note=f"T^-1(b)_{int(over[0])} = {float(c[over[0]])!r} exceeds 1")
    return rep


def log_convexity_check(fvals, tol):
    """F(x_i)^2 <= F(x_{i-1}) F(x_{i+1}) (1 + tol) at every interior grid point.

    Parameters
    ----------
    fvals : sequence of (x, F(x))
        Uniform, strictly increasing grid with positive values.
    """
    arr = np.asarray(fvals, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 3:
        raise DomainError("fvals must be at least three (x, F(x)) pairs")
    x, y = arr[:, 0], arr[:, 1]
    h = np.diff(x)
    if np.any(h <= 0) or np.max(np.abs(h - h[0])) > 1e-9 * max(1.0, abs(h[0])):
        raise DomainError("x grid must be strictly increasing and uniform")
    if np.any(y <= 0):
        raise DomainError("values must be positive")
    return bool(np.all(y[1:-1] ** 2 <= y[:-2] * y[2:] * (1.0 + float(tol))))
