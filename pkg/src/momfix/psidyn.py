"""Dynamics of psi(z) = z - 1/z on the real line.

Level sets Y_n = (psi^n)^{-1}({0}) hold 2^n real points alpha_{n,1} < ... <
alpha_{n,2^n}; labels are 1-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, DomainError, PoleEncounteredError, PoleError

LEVEL_SET_CAP = 22
_POLE_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class LevelSet:
    """The sorted points of Y_n."""

    n: int
    points: np.ndarray

    def alpha(self, k):
        """alpha_{n,k} with 1-based ``k``."""
        return float(self.points[k - 1])

    def __len__(self):
        return len(self.points)


def psi(z):
    """psi(z) = z - 1/z; raises PoleError at z = 0."""
    za = np.asarray(z, dtype=float)
    if np.any(za == 0.0):
        raise PoleError("psi has a pole at 0")
    out = za - 1.0 / za
    return float(out) if out.ndim == 0 else out


def psi_prime(z):
    """psi'(z) = 1 + 1/z^2."""
    za = np.asarray(z, dtype=float)
    if np.any(za == 0.0):
        raise PoleError("psi' has a pole at 0")
    out = 1.0 + 1.0 / (za * za)
    return float(out) if out.ndim == 0 else out


def psi_iter(z, n):
    """n-fold composition of psi.

    Raises
    ------
    PoleEncounteredError
        If an intermediate iterate has modulus below 1e-14; ``step`` is the
        1-based application that would divide by it.
    """
    w = float(z)
    for step in range(1, int(n) + 1):
        if abs(w) < _POLE_TOL:
            raise PoleEncounteredError(step, w)
        w = w - 1.0 / w
    return w


def _lambda1(y):
    y = np.asarray(y, dtype=float)
    r = np.sqrt(y * y + 4.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(y >= 0, 0.5 * (y + r), 2.0 / (r - y))


def preimage_pair(y):
    """Both real preimages of ``y`` under psi, negative one first."""
    pos = float(_lambda1(float(y)))
    return (-1.0 / pos, pos)


def level_set(n, cap=LEVEL_SET_CAP):
    """Sorted level set Y_n.

    Built breadth-first: the positive preimages of a sorted set are sorted,
    and the negative half is the mirror image, so no sorting is needed and
    the symmetry alpha_{n,k} = -alpha_{n,2^n+1-k} is exact.
    """
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0")
    if n > cap:
        raise CapExceededError(f"level_set({n}) exceeds cap {cap}")
    pts = np.zeros(1)
    for _ in range(n):
        pos = _lambda1(pts)
        pts = np.concatenate([-pos[::-1], pos])
    pts.setflags(write=False)
    return LevelSet(n=n, points=pts)


def residue_index(k, l):
    """r(k, l): the representative of k modulo 2^l in {1, ..., 2^l}."""
    k, l = int(k), int(l)
    if k < 0 or l < 0:
        raise DomainError("k and l must be non-negative")
    m = 1 << l
    return (k - 1) % m + 1
