"""The transformation T on moment sequences and its lift to spectral measures.

Sequence level: T(a)_n = 1/(a_0 + ... + a_n).

Measure level: starting from delta_0, mu_1 = delta_1 and mu_2 is the uniform
measure; from then on every mu_n has a density

    rho0 + sum_{p,k} rho_{p,k} t^{-xi_{p,k}},   -p-1 < xi_{p,k} < -p,

and mu_{n+1} is read off from the zeros and derivatives of the Bernstein
transform f_n = B(mu_n): xi^{(n+1)} are the zeros of f_n and
rho^{(n+1)} = 1/f_n'(xi^{(n+1)}), rho0^{(n+1)} = 1/f_n'(0).

Exact evaluation along the orbit of delta_0
-------------------------------------------
A truncated set of atoms misses mass of order p_max^{-1/2}, so evaluating f_n
from truncated atoms shifts every zero.  For measures on the orbit of delta_0
the values f_k(i) = sum_{j<i} m_{k,j} at integers are known exactly from the
sequence iteration, and f_k(x) = f_k(x+1) - 1/f_{k-1}(x+1).  The class
:class:`OrbitBernstein` anchors each level at x = J + s by local polynomial
interpolation of these integer values and runs that recursion down the
lattice s + Z, which reaches every real point (including the meromorphic
continuation to x < -1) without using atoms at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    BracketError,
    DomainError,
    InvariantError,
    PoleError,
)
from .roots import bracketed_newton
from .seqcore import MomentSequence, fixed_point_moments
from .specfun import EULER_GAMMA, digamma, trigamma

EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Measure with density rho0 + sum rho t^{-xi} on (0, 1).

    Attributes
    ----------
    rho0 : float
    shells : tuple of (xi, rho) array pairs
        ``shells[p-1]`` holds the atoms in (-p-1, -p), xi increasing.
    p_max : int
        Truncation shell.
    level : int or None
        n when this is mu_n on the orbit of delta_0; enables exact evaluation
        of its Bernstein transform in :func:`that_step`.
    """

    rho0: float
    shells: tuple = ()
    p_max: int = 0
    level: Optional[int] = None
    counts: tuple = field(default=(), compare=False)

    def __post_init__(self):
        sh = []
        for xi, rho in self.shells:
            xi = np.array(xi, dtype=float)
            rho = np.array(rho, dtype=float)
            xi.setflags(write=False)
            rho.setflags(write=False)
            sh.append((xi, rho))
        object.__setattr__(self, "shells", tuple(sh))
        if self.p_max < len(sh):
            object.__setattr__(self, "p_max", len(sh))
        object.__setattr__(self, "counts", tuple(len(x) for x, _ in sh))

    def atom_arrays(self):
        """Flattened (p, xi, rho, err) arrays, shells in order."""
        if not self.shells:
            z = np.zeros(0)
            return np.zeros(0, dtype=int), z, z, z
        p = np.concatenate([np.full(len(x), i + 1) for i, (x, _) in enumerate(self.shells)])
        xi = np.concatenate([x for x, _ in self.shells])
        rho = np.concatenate([r for _, r in self.shells])
        return p, xi, rho, np.zeros_like(xi)

    @property
    def total_mass(self):
        _, xi, rho, _ = self.atom_arrays()
        return math.fsum([self.rho0, *(rho / (1.0 - xi))])

    @property
    def tail_deficit(self):
        """1 - total mass: the mass carried by the dropped shells p > p_max."""
        return 1.0 - self.total_mass

    def validate(self, tail_tol=1.0):
        """Check the structural invariants; raises InvariantError."""
        if not 0.0 < self.rho0 <= 1.0:
            raise InvariantError(f"rho0 = {self.rho0} outside (0, 1]")
        for p, (xi, rho) in enumerate(self.shells, start=1):
            if len(xi) > 2 ** (p - 1):
                raise InvariantError(f"shell {p} has {len(xi)} > 2^(p-1) atoms")
            if np.any(xi <= -p - 1) or np.any(xi >= -p):
                raise InvariantError(f"shell {p} atom outside (-p-1, -p)")
            if np.any(np.diff(xi) <= 0):
                raise InvariantError(f"shell {p} atoms not strictly increasing")
            if np.any(rho <= 0) or np.any(rho >= p + 2):
                raise InvariantError(f"shell {p} weight outside (0, p+2)")
        mass = self.total_mass
        if not (1.0 - tail_tol < mass <= 1.0 + 1e-9):
            raise InvariantError(f"total mass {mass} outside (1 - {tail_tol}, 1]")
        return True


def uniform_measure():
    """mu_2: Lebesgue measure on (0, 1)."""
    return SpectralMeasure(rho0=1.0, shells=(), p_max=0, level=2)


@dataclass(frozen=True)
class PoleList:
    """Poles of f_n on (-P-1, 0] with their origin.

    ``origins[i]`` is ``("integer", l)`` for the pole -l or
    ``("shift", q, k, l)`` for xi_{q,k} - l.
    """

    poles: np.ndarray
    origins: tuple


def pole_list(mu, p_max):
    """Enumerate the poles of B(mu) in (-p_max-1, 0].

    Shell p contains the integer pole -p and the shifted zeros xi_{q,k} - l
    with q + l = p.
    """
    vals = []
    origins = []
    for l in range(1, p_max + 1):
        vals.append(-float(l))
        origins.append(("integer", l))
    for q, (xi, _) in enumerate(mu.shells, start=1):
        for l in range(1, p_max - q + 1):
            for k, x in enumerate(xi, start=1):
                vals.append(float(x) - l)
                origins.append(("shift", q, k, l))
    vals = np.array(vals)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    if np.any(np.diff(vals) < 0):
        raise InvariantError("pole list is not sorted")
    return PoleList(vals, tuple(origins[i] for i in order))


# ---------------------------------------------------------------------------
# sequence level


class Trajectory(list):
    """List of MomentSequence iterates with convergence diagnostics.

    Attributes
    ----------
    distances : list of float
        Sup-norm distance of each iterate to the fixed point over the prefix.
    """

    def __init__(self, seqs, distances):
        super().__init__(seqs)
        self.distances = list(distances)


def t_map(a):
    """T(a)_n = 1/(a_0 + ... + a_n)."""
    v = np.asarray(a.values if isinstance(a, MomentSequence) else a, dtype=float)
    if v[0] != 1.0:
        raise DomainError("t_map needs a normalised sequence (a_0 = 1)")
    return MomentSequence(1.0 / np.cumsum(v))


def t_inverse(b):
    """T^{-1}(b)_n = 1/b_n - 1/b_{n-1}, with c_0 = 1."""
    v = np.asarray(b.values if isinstance(b, MomentSequence) else b, dtype=float)
    if np.any(v <= 0):
        raise DomainError("t_inverse needs strictly positive entries")
    inv = 1.0 / v
    c = np.empty_like(v)
    c[0] = 1.0
    c[1:] = np.diff(inv)
    return MomentSequence(c)


def iterate_t(a, steps):
    """Trajectory [T(a), T^2(a), ..., T^steps(a)]."""
    steps = int(steps)
    if steps < 1:
        raise DomainError("steps must be >= 1")
    cur = a if isinstance(a, MomentSequence) else MomentSequence(a)
    m = fixed_point_moments(len(cur) - 1).values
    seqs, dists = [], []
    for _ in range(steps):
        cur = t_map(cur)
        seqs.append(cur)
        dists.append(float(np.max(np.abs(cur.values - m))))
    return Trajectory(seqs, dists)


def orbit_moments(level, length):
    """Moment prefixes of mu_0 = delta_0, ..., mu_level; shape (level+1, length)."""
    out = np.zeros((level + 1, length))
    out[0, 0] = 1.0
    for k in range(1, level + 1):
        out[k] = 1.0 / np.cumsum(out[k - 1])
    return out


# ---------------------------------------------------------------------------
# Bernstein transforms


def _closed_form(mu, z, deriv=False):
    z = np.atleast_1d(np.asarray(z, dtype=float))
    _, xi, rho, _ = mu.atom_arrays()
    beta = 1.0 - xi
    fn = trigamma if deriv else digamma
    val = mu.rho0 * (fn(z + 1.0) + (0.0 if deriv else EULER_GAMMA))
    if len(xi):
        zz = z[:, None] + beta[None, :]
        if deriv:
            val = val + fn(zz) @ rho
        else:
            val = val + (fn(zz) - digamma(beta)[None, :]) @ rho
    return val


def bernstein_spectral(mu, z):
    """Digamma closed form of B(mu)(z) for the atoms stored in ``mu``.

    rho0 (Psi(z+1) + gamma) + sum rho (Psi(z+1-xi) - Psi(1-xi)).
    """
    out = _closed_form(mu, z)
    return float(out[0]) if np.ndim(z) == 0 else out


def bernstein_spectral_deriv(mu, z):
    """Derivative rho0 Psi'(z+1) + sum rho Psi'(z+1-xi)."""
    out = _closed_form(mu, z, deriv=True)
    return float(out[0]) if np.ndim(z) == 0 else out


class OrbitBernstein:
    """Exact Bernstein transform f_n of mu_n = T^n(delta_0) on the real line.

    Parameters
    ----------
    level : int
        n >= 0.
    J : int
        Anchor abscissa; each level is interpolated at J + s from its exact
        integer values.
    W : int
        Half-width of the interpolation stencil (2W nodes).
    """

    def __init__(self, level, J=40, W=5):
        if level < 0:
            raise DomainError("level must be >= 0")
        self.level = int(level)
        self.J = int(J)
        self.W = int(W)
        m = orbit_moments(self.level, self.J + self.W + 2)
        self._fint = np.concatenate([np.zeros((self.level + 1, 1)), np.cumsum(m, axis=1)], axis=1)
        self._nodes = np.arange(self.J - self.W + 1, self.J + self.W + 1)

    def _anchor(self, k, s):
        nodes = self._nodes
        vals = self._fint[k, nodes]
        x = self.J + s
        v = np.zeros_like(s)
        d = np.zeros_like(s)
        v_low = np.zeros_like(s)  # stencil with one node fewer on each side
        inner = set(range(1, len(nodes) - 1))
        for i, xi in enumerate(nodes):
            li = np.ones_like(s)
            dli = np.zeros_like(s)
            for j, xj in enumerate(nodes):
                if j == i:
                    continue
                dli = dli * (x - xj) / (xi - xj) + li / (xi - xj)
                li = li * (x - xj) / (xi - xj)
            v += vals[i] * li
            d += vals[i] * dli
        for i in inner:
            li = np.ones_like(s)
            for j in inner:
                if j != i:
                    li = li * (x - nodes[j]) / (nodes[i] - nodes[j])
            v_low += vals[i] * li
        return v, d, np.abs(v - v_low) * 1e-2 + EPS * np.abs(v)

    def evaluate(self, z):
        """Return (f_n(z), f_n'(z), err_est) as arrays.

        Entries at poles come out as +-inf or nan.
        """
        z = np.atleast_1d(np.asarray(z, dtype=float))
        n = self.level
        if n == 0:
            return np.ones_like(z), np.zeros_like(z), np.zeros_like(z)
        if n == 1:
            return z.copy(), np.ones_like(z), np.zeros_like(z)
        if n == 2:
            with np.errstate(divide="ignore", invalid="ignore"):
                try:
                    v = digamma(z + 1.0) + EULER_GAMMA
                    d = trigamma(z + 1.0)
                except PoleError:
                    v = np.full_like(z, np.nan)
                    d = np.full_like(z, np.nan)
            return v, d, 1e-13 * (1.0 + np.abs(v))
        c = np.ceil(z)
        s = z - c + 1.0
        j0 = (c - 1.0).astype(int)
        lo = int(j0.min())
        J = self.J
        if lo > J:
            raise DomainError("argument beyond the anchor; increase J")
        js = np.arange(lo, J + 1)
        X = s[None, :] + js[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            try:
                v = digamma(X + 1.0) + EULER_GAMMA
                d = trigamma(X + 1.0)
            except PoleError:
                v = np.full_like(X, np.nan)
                d = np.full_like(X, np.nan)
                ok = np.abs(X + 1.0 - np.round(X + 1.0)) >= 1e-13
                ok |= X + 1.0 > 0
                v[ok] = digamma(X[ok] + 1.0) + EULER_GAMMA
                d[ok] = trigamma(X[ok] + 1.0)
            e = 1e-13 * (1.0 + np.abs(v))
            for k in range(3, n + 1):
                vk = np.empty_like(X)
                dk = np.empty_like(X)
                ek = np.empty_like(X)
                vk[-1], dk[-1], ek[-1] = self._anchor(k, s)
                for i in range(len(js) - 2, -1, -1):
                    w = v[i + 1]
                    w2 = w * w
                    vk[i] = vk[i + 1] - 1.0 / w
                    dk[i] = dk[i + 1] + d[i + 1] / w2
                    ek[i] = ek[i + 1] + e[i + 1] / w2 + EPS * np.abs(vk[i])
                v, d, e = vk, dk, ek
        idx = j0 - lo
        cols = np.arange(len(z))
        return v[idx, cols], d[idx, cols], e[idx, cols]

    def __call__(self, z):
        v, _, _ = self.evaluate(z)
        return float(v[0]) if np.ndim(z) == 0 else v


def _evaluator(mu):
    if mu.level is not None:
        if mu.level <= 1:
            raise DomainError("delta_0 and delta_1 have no density; start from uniform_measure()")
        orb = OrbitBernstein(mu.level)
        return lambda z: orb.evaluate(z)[:2]

    def ev(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            try:
                return _closed_form(mu, z), _closed_form(mu, z, deriv=True)
            except PoleError:
                z = np.atleast_1d(z)
                v = np.empty_like(z)
                d = np.empty_like(z)
                for i, zi in enumerate(z):
                    try:
                        v[i] = _closed_form(mu, zi)[0]
                        d[i] = _closed_form(mu, zi, deriv=True)[0]
                    except PoleError:
                        v[i] = np.nan
                        d[i] = np.nan
                return v, d

    return ev


_OFFSETS = (1e-9, 1e-11, 1e-13)


def _gap_brackets(func, lo, hi):
    """Bracket the zero of an increasing function in each gap (lo_i, hi_i).

    Offsets from the poles shrink from 1e-9 down to a few ulp when a zero sits
    closer to a pole (tiny residues in newly created shells).
    """
    a = np.empty_like(lo)
    b = np.empty_like(hi)
    fa = np.full_like(lo, np.nan)
    fb = np.full_like(hi, np.nan)
    todo_a = np.ones(lo.shape, dtype=bool)
    todo_b = np.ones(hi.shape, dtype=bool)
    width = hi - lo
    for off in _OFFSETS + (None,):
        if off is None:
            ca = np.nextafter(np.nextafter(lo, np.inf), np.inf)
            cb = np.nextafter(np.nextafter(hi, -np.inf), -np.inf)
        else:
            da = np.minimum(off * np.maximum(1.0, np.abs(lo)), 0.25 * width)
            ca, cb = lo + da, hi - da
        if np.any(todo_a):
            a[todo_a] = ca[todo_a]
            fa[todo_a] = func(a[todo_a])[0]
            todo_a &= ~(fa < 0)
        if np.any(todo_b):
            b[todo_b] = cb[todo_b]
            fb[todo_b] = func(b[todo_b])[0]
            todo_b &= ~(fb > 0)
        if not (np.any(todo_a) or np.any(todo_b)):
            break
    return a, b, fa, fb


def _warm_start(mu, a, b):
    # atoms move little from one level to the next, so the old atom inside a
    # bracket is a good Newton start; brackets without exactly one get NaN
    x0 = np.full(a.shape, np.nan)
    if not mu.shells:
        return x0
    _, xi, _, _ = mu.atom_arrays()
    xi = np.sort(xi)
    i = np.searchsorted(xi, a, side="right")
    j = np.searchsorted(xi, b, side="left")
    one = (j - i) == 1
    x0[one] = xi[i[one]]
    return x0


def that_step(mu, p_max, tail_tol=1.0):
    """One step of the measure-level iteration, truncated at shell ``p_max``.

    Zeros of f = B(mu) are found in every gap between consecutive poles inside
    (-p_max-1, -1); the weights are 1/f' at the zeros and rho0 = 1/f'(0).

    Parameters
    ----------
    mu : SpectralMeasure
        Input measure.  When ``mu.level`` is set, f is evaluated exactly along
        the orbit of delta_0 (see :class:`OrbitBernstein`) and ``mu`` must
        contain all shells up to ``p_max - 1``; otherwise the digamma closed
        form over the stored atoms is used.
    p_max : int

    Returns
    -------
    SpectralMeasure
        With ``level = mu.level + 1`` when the input was on the orbit.

    Raises
    ------
    BracketError
        If a gap shows no sign change even at ulp distance from its poles.
    InvariantError
        If a weight falls outside (0, p+2).
    """
    p_max = int(p_max)
    if p_max < 1:
        raise DomainError("p_max must be >= 1")
    if mu.level is not None and mu.level > 2 and mu.p_max < p_max - 1:
        raise DomainError(f"measure truncated at {mu.p_max}; need shells up to {p_max - 1}")
    func = _evaluator(mu)
    poles = pole_list(mu, p_max).poles
    edges = np.concatenate([[-float(p_max + 1)], poles])
    lo, hi = edges[:-1], edges[1:]
    # the last gap is (-1, 0], whose zero is 0 itself
    keep = hi <= -1.0
    lo, hi = lo[keep], hi[keep]
    # gaps of a few ulp (two poles from different generations almost
    # coinciding) leave no room for brackets; the zero is then the float in
    # [lo, hi) with the smallest |f|, exact to within the gap width
    narrow = (hi - lo) <= 4.0 * np.spacing(np.abs(lo))
    a = 0.5 * (lo + hi)
    for i in np.nonzero(narrow)[0]:
        cand = [lo[i]]
        while np.nextafter(cand[-1], np.inf) < hi[i]:
            cand.append(np.nextafter(cand[-1], np.inf))
        v, d = func(np.array(cand))
        ok = np.isfinite(v) & np.isfinite(d) & (d > 0)
        if not np.any(ok):
            raise BracketError(f"no usable point in the gap ({lo[i]!r}, {hi[i]!r})")
        a[i] = np.array(cand)[ok][np.argmin(np.abs(v[ok]))]
    b = a.copy()
    left_stuck = np.zeros(lo.shape, dtype=bool)
    right_stuck = np.zeros(lo.shape, dtype=bool)
    wide = ~narrow
    if np.any(wide):
        a[wide], b[wide], fa, fb = _gap_brackets(func, lo[wide], hi[wide])
        left_stuck[wide] = ~(fa < 0)
        right_stuck[wide] = ~(fb > 0)
    both = left_stuck & right_stuck
    if np.any(both):
        i = int(np.nonzero(both)[0][0])
        raise BracketError(f"no sign change in gap ({lo[i]!r}, {hi[i]!r})")
    # a zero squeezed against a pole beyond ulp resolution sits at the stuck end
    x = np.where(left_stuck, a, np.where(right_stuck, b, 0.5 * (a + b)))
    reg = wide & ~(left_stuck | right_stuck)
    if np.any(reg):
        glo, ghi = lo[reg], hi[reg]

        def damped(z, idx):
            # multiplying by (z-lo)(hi-z) removes the two bounding poles, so
            # Newton steps are not thrown out of the gap
            v, d = func(z)
            u, w = z - glo[idx], ghi[idx] - z
            q = u * w
            return v * q, d * q + v * (w - u)

        xr, _ = bracketed_newton(
            damped, a[reg], b[reg], xtol=1e-15, indexed=True, x0=_warm_start(mu, a[reg], b[reg])
        )
        x[reg] = xr
    _, d = func(x)
    rho = 1.0 / d
    _, d0 = func(np.array([0.0]))
    rho0 = 1.0 / float(d0[0])
    p = np.floor(-x).astype(int)
    shells = []
    for q in range(1, p_max + 1):
        sel = p == q
        xs, rs = x[sel], rho[sel]
        order = np.argsort(xs)
        xs, rs = xs[order], rs[order]
        if np.any(~(rs > 0)) or np.any(rs >= q + 2):
            raise InvariantError(f"weight outside (0, {q + 2}) in shell {q}")
        shells.append((xs, rs))
    level = None if mu.level is None else mu.level + 1
    out = SpectralMeasure(rho0=rho0, shells=tuple(shells), p_max=p_max, level=level)
    return out


def moments_of_spectral(mu, n):
    """Truncated moment rho0/(n+1) + sum rho/(n+1-xi)."""
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0")
    _, xi, rho, _ = mu.atom_arrays()
    return math.fsum([mu.rho0 / (n + 1.0), *(rho / (n + 1.0 - xi))])


def moment_tail_bracket(mu, n):
    """Enclosure of the moment contribution of the dropped shells.

    Atoms beyond p_max have beta = 1 - xi >= p_max + 2 and total mass
    D = tail_deficit; each contributes (rho/beta) * beta/(n+beta), so the
    dropped part lies in [D (P+2)/(n+P+2), D].
    """
    D = max(mu.tail_deficit, 0.0)
    P = mu.p_max
    return D * (P + 2.0) / (n + P + 2.0), D
