"""Zero/residue ledger of f and the density of the fixed-point measure.

The zeros of f in shell p, the interval (-p-1, -p), are xi_{p,1} < ... <
xi_{p,2^{p-1}}, with weights rho_{p,k} = 1/f'(xi_{p,k}) and rho0 = 1/f'(0).
They give

    F(z) = rho0/(z+1) + sum rho/(z+1-xi),
    D(t) = rho0 + sum rho t^{-xi}.

Three independent constructions are provided:

* :func:`ledger_by_bisection` bisects the psi-orbit extension of f between
  the poles generated by the shallower shells,
* :func:`ledger_by_limit` evaluates the large-N limit formulas along the
  backward psi-orbits of the level-set points,
* :func:`ledger_by_iteration` runs the measure-level iteration from the
  uniform measure.
"""

from __future__ import annotations

import enum
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analytic import _f_ext_arrays
from .errors import (
    AccuracyWarning,
    CapExceededError,
    CountMismatchError,
    DomainError,
    InvariantError,
    PrecisionLossError,
)
from .psidyn import LEVEL_SET_CAP, level_set, residue_index
from .seqcore import lambda_sequence
from .transform import that_step, uniform_measure

SCHEMA = "momfix-ledger/1"
BISECTION_CAP = 10
DENSITY_TAIL_WARN = 1e-6


class LedgerMethod(str, enum.Enum):
    BISECT_F = "bisect_f"
    LIMIT_FORMULA = "limit_formula"
    THAT_ITERATION = "that_iteration"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LedgerEntry:
    """One zero of f with its weight."""

    p: int
    k: int
    xi: float
    rho: float
    err_est: float
    method: str


@dataclass(frozen=True, eq=False)
class SpectrumLedger:
    """Zeros and weights of f up to shell ``p_max``.

    Attributes
    ----------
    p_max : int
    rho0 : float
    shells : tuple
        ``shells[p-1] = (xi, rho, err, methods)`` with arrays sorted by xi and a
        tuple of method tags.
    rho0_err : float
    """

    p_max: int
    rho0: float
    shells: tuple
    rho0_err: float = 0.0

    def __post_init__(self):
        sh = []
        for xi, rho, err, meth in self.shells:
            arrs = []
            for a in (xi, rho, err):
                a = np.array(a, dtype=float)
                a.setflags(write=False)
                arrs.append(a)
            if isinstance(meth, str):
                meth = (meth,) * len(arrs[0])
            sh.append((*arrs, tuple(str(m) for m in meth)))
        object.__setattr__(self, "shells", tuple(sh))

    def entries(self, p):
        xi, rho, err, meth = self.shells[p - 1]
        return [LedgerEntry(p, k + 1, float(xi[k]), float(rho[k]), float(err[k]), meth[k])
                for k in range(len(xi))]

    def __iter__(self):
        for p in range(1, len(self.shells) + 1):
            yield from self.entries(p)

    def atom_arrays(self):
        """Flattened (p, xi, rho, err) arrays."""
        if not self.shells:
            z = np.zeros(0)
            return np.zeros(0, dtype=int), z, z, z
        p = np.concatenate([np.full(len(s[0]), i + 1) for i, s in enumerate(self.shells)])
        xi, rho, err = (np.concatenate([s[j] for s in self.shells]) for j in range(3))
        return p, xi, rho, err

    @property
    def counts(self):
        return tuple(len(s[0]) for s in self.shells)

    @property
    def total_mass(self):
        _, xi, rho, _ = self.atom_arrays()
        return math.fsum([self.rho0, *(rho / (1.0 - xi))])

    @property
    def tail_deficit(self):
        """1 - rho0 - sum rho/(1 - xi): mass attributed to shells beyond p_max."""
        return 1.0 - self.total_mass

    def validate(self, exact_counts=True):
        """Check the ledger invariants; raises InvariantError or CountMismatchError."""
        if not 0.0 < self.rho0 < 1.0:
            raise InvariantError(f"rho0 = {self.rho0} outside (0, 1)")
        if len(self.shells) != self.p_max:
            raise InvariantError("number of shells differs from p_max")
        for p, (xi, rho, _, _) in enumerate(self.shells, start=1):
            if exact_counts and len(xi) != 2 ** (p - 1):
                raise CountMismatchError(f"shell {p}: {len(xi)} zeros, expected {2 ** (p - 1)}")
            if np.any(xi <= -p - 1) or np.any(xi >= -p) or np.any(np.diff(xi) <= 0):
                raise InvariantError(f"shell {p} zeros not strictly inside (-{p + 1}, -{p})")
            if np.any(rho <= 0) or np.any(rho >= p + 2):
                raise InvariantError(f"shell {p} weight outside (0, {p + 2})")
        if self.total_mass > 1.0 + 1e-9:
            raise InvariantError(f"total mass {self.total_mass} exceeds 1")
        return True

    def truncated(self, p_max):
        """The same ledger restricted to shells p <= ``p_max``."""
        return SpectrumLedger(p_max, self.rho0, self.shells[:p_max], self.rho0_err)

    # -- serialisation ------------------------------------------------------
    def to_dict(self):
        shells = []
        for p, (xi, rho, err, meth) in enumerate(self.shells, start=1):
            atoms = [
                {"k": k + 1, "xi": float(xi[k]), "rho": float(rho[k]), "err": float(err[k]),
                 "method": meth[k]}
                for k in range(len(xi))
            ]
            shells.append({"p": p, "atoms": atoms})
        return {
            "schema": SCHEMA,
            "p_max": int(self.p_max),
            "rho0": float(self.rho0),
            "rho0_err": float(self.rho0_err),
            "tail_deficit": float(self.tail_deficit),
            "shells": shells,
        }

    def to_json(self):
        # json writes floats with repr, the shortest round-trip form
        return json.dumps(self.to_dict(), indent=1, allow_nan=False)

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != SCHEMA:
            raise DomainError(f"unknown ledger schema {d.get('schema')!r}")
        shells = []
        for s in sorted(d["shells"], key=lambda s: s["p"]):
            atoms = sorted(s["atoms"], key=lambda a: a["k"])
            shells.append((
                [a["xi"] for a in atoms],
                [a["rho"] for a in atoms],
                [a["err"] for a in atoms],
                tuple(a["method"] for a in atoms),
            ))
        return cls(int(d["p_max"]), float(d["rho0"]), tuple(shells), float(d.get("rho0_err", 0.0)))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


@dataclass(frozen=True)
class DensityProfile:
    """Samples of D(t) with the boundary ratio D(t) sqrt(2 pi (1-t))."""

    samples: list
    asymptotic_ratio: list
    tails: list = field(default_factory=list)


def _threads():
    try:
        return max(1, int(os.environ.get("MOMFIX_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# bisection of the psi-orbit extension


def _f_sign_eval(x):
    v, d, e, ok, de = _f_ext_arrays(x)
    if not np.all(ok):
        bad = x[~ok][0]
        raise PrecisionLossError(f"psi-orbit evaluation failed at {bad!r}")
    return v, d, e, de


def _bisect(lo, hi, width):
    """Vectorised bisection of the increasing f on open gaps (lo, hi).

    Returns the midpoints of the final brackets and flags telling whether the
    bracket ever saw both signs (a zero really lies in the gap).
    """
    a, b = lo.copy(), hi.copy()
    seen_neg = np.zeros(lo.shape, dtype=bool)
    seen_pos = np.zeros(lo.shape, dtype=bool)
    while True:
        act = (b - a) > width
        if not np.any(act):
            break
        m = 0.5 * (a[act] + b[act])
        v = _f_sign_eval(m)[0]
        neg = v < 0
        ai, bi = a[act], b[act]
        a[act] = np.where(neg, m, ai)
        b[act] = np.where(neg, bi, m)
        seen_neg[act] |= neg
        seen_pos[act] |= ~neg
    return 0.5 * (a + b), 0.5 * (b - a), seen_neg, seen_pos


def _fd_derivative(x, h):
    v = _f_sign_eval(np.concatenate([x - h, x + h, x - h / 2, x + h / 2]))[0]
    n = len(x)
    d1 = (v[n:2 * n] - v[:n]) / (2 * h)
    d2 = (v[3 * n:] - v[2 * n:3 * n]) / h
    # centred differences have an h^2 error; one Richardson step removes it
    return d2 + (d2 - d1) / 3.0, np.abs(d2 - d1) / 3.0


def ledger_by_bisection(p_max, width=1e-9, h=1e-5):
    """Zeros of f found by bisecting the psi-orbit extension between its poles.

    The poles of f in (-p-1, -p] are -p and xi_{q,k} - (p - q) for q < p; the
    gaps between them (and the pole -p-1) each hold exactly one zero.
    Weights are 1/f' with f' from Richardson-extrapolated centred
    differences.

    Parameters
    ----------
    p_max : int
        Deepest shell, at most 10: every unit step to the left costs the
        psi-orbit extension roughly a digit.
    width : float
        Final bracket width.
    h : float
        Finite-difference step (halved once for the extrapolation).

    Raises
    ------
    CapExceededError
        For ``p_max > 10``.
    CountMismatchError
        When a gap shows no sign change or the pole count is off, which
        signals that the extension has run out of precision.
    """
    p_max = int(p_max)
    if p_max < 1:
        raise DomainError("p_max must be >= 1")
    if p_max > BISECTION_CAP:
        raise CapExceededError(f"bisection ledger capped at p_max = {BISECTION_CAP}")
    d0 = _fd_derivative(np.array([0.0]), h)
    rho0 = 1.0 / float(d0[0][0])
    rho0_err = float(d0[1][0]) * rho0 * rho0
    zeros = []
    shells = []
    for p in range(1, p_max + 1):
        shifted = [x - (p - q) for q, x in enumerate(zeros, start=1)]
        shifted = np.sort(np.concatenate(shifted)) if shifted else np.zeros(0)
        poles = np.concatenate([[-float(p + 1)], shifted, [-float(p)]])
        if np.any(np.diff(poles) <= 0):
            raise CountMismatchError(f"shell {p}: generated poles are not distinct")
        if len(poles) - 1 != 2 ** (p - 1):
            raise CountMismatchError(f"shell {p}: {len(poles) - 1} gaps, expected {2 ** (p - 1)}")
        lo, hi = poles[:-1], poles[1:]
        # stay clear of the poles themselves
        pad = np.minimum(1e-12 * (p + 1), 0.25 * (hi - lo))
        x, half, sn, sp = _bisect(lo + pad, hi - pad, width)
        missing = ~(sn & sp)
        if np.any(missing):
            i = int(np.nonzero(missing)[0][0])
            raise CountMismatchError(
                f"shell {p}: no sign change in gap ({lo[i]!r}, {hi[i]!r}); "
                f"{int(np.sum(~missing))} of {2 ** (p - 1)} zeros found")
        v, d, e, de = _f_sign_eval(x)
        deriv, derr = _fd_derivative(x, h)
        rho = 1.0 / deriv
        # position error: bracket half-width plus what the evaluation error
        # can move the sign change by
        xerr = half + e / np.abs(d)
        rerr = rho * rho * (derr + de + np.abs(deriv - d))
        err = np.maximum(xerr, rerr)
        zeros.append(x)
        shells.append((x, rho, err, LedgerMethod.BISECT_F.value))
    return SpectrumLedger(p_max, rho0, tuple(shells), rho0_err)


# ---------------------------------------------------------------------------
# limit formulas


def _richardson(v1, v2, v4):
    """Extrapolate from values at N, N/2, N/4 with the observed order."""
    d12 = v1 - v2
    d24 = v2 - v4
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.log2(np.abs(d24) / np.abs(d12))
    ok = np.isfinite(q) & (q > 0.3) & (q < 4.0)
    qq = np.where(ok, q, 1.0)
    ext = np.where(ok, v1 + d12 / (2.0 ** qq - 1.0), v1)
    return ext, np.abs(d12)


def _orbit_kernel(alpha, p, lam, slam, N, marks, xi_out, lp_out):
    """Backward orbit of one level-set point, written as a scalar loop.

    Tracks u = lambda_l(alpha), the difference d = lambda_l(alpha) -
    lambda_{l+p} through its own recurrence (forming it by subtraction at
    l ~ N would lose about 4 digits), and the log of
    prod_l (1 + 1/u_l^2) = prod_l sqrt(u_{l-1}^2 + 4) / u_l.
    """
    u = alpha
    su = math.sqrt(u * u + 4.0)
    d = u - lam[p]
    prod = 1.0
    logp = 0.0
    j = 0
    for l in range(1, N + 1):
        if l <= N - p:
            v = lam[l - 1 + p]
            d = 0.5 * d * (1.0 + (u + v) / (su + slam[l - 1 + p]))
        un = 0.5 * (u + su) if u >= 0.0 else 2.0 / (su - u)
        prod *= su / un
        u = un
        su = math.sqrt(u * u + 4.0)
        if (l & 255) == 0:
            logp += math.log(prod)
            prod = 1.0
        for j in range(3):
            if l == marks[j] - p:
                xi_out[j] = math.sqrt(2.0 * marks[j]) * d
            if l == marks[j]:
                lp_out[j] = logp + math.log(prod)


try:  # pragma: no cover - exercised when numba is installed
    import numba

    _orbit_kernel_fast = numba.njit(cache=False)(_orbit_kernel)
except ImportError:  # pragma: no cover
    _orbit_kernel_fast = _orbit_kernel


def _limit_chunk(alpha, p, lam, slam, N, kernel=None):
    """xi and log-products at N/4, N/2, N for the points ``alpha``; shape (3, n)."""
    kernel = _orbit_kernel_fast if kernel is None else kernel
    marks = np.array([N // 4, N // 2, N], dtype=np.int64)
    xi_out = np.empty((3, len(alpha)))
    lp_out = np.empty((3, len(alpha)))
    xb = np.empty(3)
    lb = np.empty(3)
    for i, a in enumerate(alpha):
        kernel(float(a), int(p), lam, slam, int(N), marks, xb, lb)
        xi_out[:, i] = xb
        lp_out[:, i] = lb
    return xi_out, lp_out


def ledger_by_limit(p_max, N=10**6):
    """Zeros and weights from the large-N limit formulas.

    With 1/alpha_l = alpha_l - alpha_{l-1} along the psi-chain of a level-set
    point and 1/lambda_l(a) = lambda_l(a) - lambda_{l-1}(a), the sum formula
    for xi_{p,k} telescopes to sqrt(2N) (lambda_{N-p}(alpha_{p,k}) - lambda_N).
    The weights are

        rho_{p,k} = prod_{l<=p} (1 + alpha_{l,r(k,l)}^{-2})^{-1}
                    * sqrt(2N) prod_{l<=N} (1 + lambda_l(alpha_{p,k})^{-2})^{-1},
        rho0 = sqrt(2N) prod_{l<=N} (1 + lambda_l^{-2})^{-1},

    with the long products accumulated as sums of log1p.  Every quantity is
    taken at N/4, N/2 and N and extrapolated with the observed convergence
    order; ``err_est`` is |value(N) - value(N/2)|.
    """
    p_max = int(p_max)
    N = int(N)
    if p_max < 1:
        raise DomainError("p_max must be >= 1")
    if p_max > LEVEL_SET_CAP:
        raise CapExceededError(f"p_max {p_max} exceeds the level-set cap {LEVEL_SET_CAP}")
    if N < 1000:
        raise DomainError("N must be >= 1000")
    lam = lambda_sequence(N + p_max + 1)
    slam = np.sqrt(lam * lam + 4.0)
    # rho0
    logp0 = np.cumsum(np.log1p(1.0 / lam[1:N + 1] ** 2))
    r0 = np.array([math.sqrt(2.0 * M) * math.exp(-logp0[M - 1]) for M in (N, N // 2, N // 4)])
    rho0, rho0_err = _richardson(r0[0], r0[1], r0[2])
    sets = [level_set(l).points for l in range(p_max + 1)]
    alphas, pre, owners = [], [], []
    for p in range(1, p_max + 1):
        a = sets[p]
        # level-set points feeding shell p: every alpha_{p,k}, k = 1..2^{p-1}
        # is paired with zero xi_{p,k}; the r(k, l) chain supplies the prefactor
        ks = np.arange(1, 2 ** (p - 1) + 1)
        alphas.append(a[ks - 1])
        lp = np.zeros(len(ks))
        for l in range(1, p + 1):
            r = np.array([residue_index(int(k), l) for k in ks])
            al = sets[l][r - 1]
            lp += np.log1p(1.0 / al**2)
        pre.append(lp)
        owners.append(np.full(len(ks), p))
    alpha = np.concatenate(alphas)
    pre = np.concatenate(pre)
    owner = np.concatenate(owners)
    xi3 = np.empty((3, len(alpha)))
    lp3 = np.empty((3, len(alpha)))
    # the orbit length depends on p only through the xi snapshots
    jobs = []
    for p in range(1, p_max + 1):
        idx = np.nonzero(owner == p)[0]
        nchunk = min(_threads(), len(idx))
        for chunk in np.array_split(idx, nchunk):
            jobs.append((p, chunk))
    if _threads() > 1:
        with ThreadPoolExecutor(_threads()) as ex:
            res = list(ex.map(lambda j: _limit_chunk(alpha[j[1]], j[0], lam, slam, N), jobs))
    else:
        res = [_limit_chunk(alpha[c], p, lam, slam, N) for p, c in jobs]
    for (p, c), (x3, l3) in zip(jobs, res):
        xi3[:, c] = x3
        lp3[:, c] = l3
    xi, xerr = _richardson(xi3[2], xi3[1], xi3[0])
    rho3 = np.stack([math.sqrt(2.0 * M) * np.exp(-lp3[j] - pre)
                     for j, M in enumerate((N // 4, N // 2, N))])
    rho, rerr = _richardson(rho3[2], rho3[1], rho3[0])
    err = np.maximum(xerr, rerr)
    shells = []
    for p in range(1, p_max + 1):
        sel = owner == p
        order = np.argsort(xi[sel], kind="stable")
        shells.append((xi[sel][order], rho[sel][order], err[sel][order],
                       LedgerMethod.LIMIT_FORMULA.value))
    return SpectrumLedger(p_max, float(rho0), tuple(shells), float(rho0_err))


# ---------------------------------------------------------------------------
# measure iteration


def _moves(a, b):
    """Per-atom max(|dxi|, |drho|) between two measures, shell by shell."""
    out = []
    for (xa, ra), (xb, rb) in zip(a.shells, b.shells):
        if len(xa) != len(xb):
            out.append(None)
        else:
            out.append(np.maximum(np.abs(xa - xb), np.abs(ra - rb)))
    return out


def ledger_by_iteration(p_max, steps, return_history=False):
    """Ledger read off mu_{2+steps}, the iterate of the uniform measure.

    ``err_est`` of each atom is its largest movement (in xi or rho) over the
    last two iterations; odd and even iterates approach the fixed point from
    opposite sides, so a single movement already brackets the limit.  Atoms
    whose shell was still filling up two iterations earlier get the trivial
    bound p + 2.

    Raises
    ------
    CountMismatchError
        If the final measure does not hold exactly 2^{p-1} atoms in every shell.
    """
    p_max = int(p_max)
    steps = int(steps)
    if p_max < 1:
        raise DomainError("p_max must be >= 1")
    if steps < 4 or steps % 2:
        raise DomainError("steps must be even and >= 4")
    hist = [uniform_measure()]
    for _ in range(steps):
        hist.append(that_step(hist[-1], p_max))
    mu, m1, m2 = hist[-1], hist[-2], hist[-3]
    shells = []
    last = _moves(mu, m1)
    prev = _moves(m1, m2)
    for p, (xi, rho) in enumerate(mu.shells, start=1):
        if len(xi) != 2 ** (p - 1):
            raise CountMismatchError(
                f"shell {p}: {len(xi)} atoms after {steps} steps, expected {2 ** (p - 1)}")
        e1, e2 = last[p - 1], prev[p - 1]
        if e1 is None or e2 is None:
            err = np.full(len(xi), float(p + 2))
        else:
            err = np.maximum(e1, e2)
        shells.append((xi, rho, err, LedgerMethod.THAT_ITERATION.value))
    rho0_err = max(abs(mu.rho0 - m1.rho0), abs(m1.rho0 - m2.rho0))
    led = SpectrumLedger(p_max, mu.rho0, tuple(shells), rho0_err)
    return (led, hist) if return_history else led


def merged_ledger(p_max=12, steps=None, bisect_max=4):
    """Bisection for p <= ``bisect_max``, iteration for the deeper shells.

    The psi-orbit extension loses about a digit per unit step to the left,
    while the iteration keeps full precision at depth; rho0 comes from the
    iteration.
    """
    p_max = int(p_max)
    if steps is None:
        steps = p_max + 10 if p_max % 2 == 0 else p_max + 11
    it = ledger_by_iteration(p_max, steps)
    nb = min(bisect_max, p_max)
    bi = ledger_by_bisection(nb)
    shells = bi.shells[:nb] + it.shells[nb:]
    return SpectrumLedger(p_max, it.rho0, shells, it.rho0_err)


# ---------------------------------------------------------------------------
# density and moments


def density_tail(ledger, t):
    """Upper bound on the density contribution of the shells beyond p_max.

    Two bounds are combined.  Dropped atoms have exponent beta - 1 with
    beta = 1 - xi >= P + 2 and carry mass D = tail_deficit, so their sum
    sum (rho/beta) beta t^{beta-1} is at most D max_{beta >= P+2} beta t^{beta-1}.
    Independently rho_{p,k} < p + 2 and t^{-xi} < t^p give
    sum_{p>P} (p+2) 2^{p-1} t^p, finite for t < 1/2.
    """
    t = float(t)
    P = int(ledger.p_max)
    D = max(float(ledger.tail_deficit), 0.0)
    b0 = P + 2.0
    lt = math.log(t)
    bstar = -1.0 / lt
    beta = max(b0, bstar)
    mass_bound = D * beta * math.exp((beta - 1.0) * lt)
    if t < 0.5:
        # sum_{p>P} (p+2) 2^{p-1} t^p in closed form with x = 2t
        x = 2.0 * t
        q = P + 1
        s = x**q / (1 - x) * ((q + 2) + x / (1 - x))
        shell_bound = 0.5 * s
        return min(mass_bound, shell_bound)
    return mass_bound


def density(ledger, t, with_tail=False, warn=True):
    """D(t) = rho0 + sum rho t^{-xi} truncated at the ledger's p_max.

    The truncated sum is a lower bound; the exact density lies within
    ``density_tail`` above it.  An AccuracyWarning is issued when that bound
    exceeds 1e-6.
    """
    t = float(t)
    if not 0.0 < t < 1.0:
        raise DomainError("density needs 0 < t < 1")
    _, xi, rho, _ = ledger.atom_arrays()
    lt = math.log(t)
    val = math.fsum([ledger.rho0, *(rho * np.exp(-xi * lt))])
    tail = density_tail(ledger, t)
    if warn and tail > DENSITY_TAIL_WARN:
        warnings.warn(f"density tail bound {tail:.2e} at t={t} exceeds {DENSITY_TAIL_WARN}",
                      AccuracyWarning, stacklevel=2)
    return (val, tail) if with_tail else val


def density_profile(ledger, ts):
    """DensityProfile over the points ``ts`` (no accuracy warnings)."""
    samples, ratio, tails = [], [], []
    for t in ts:
        d, e = density(ledger, t, with_tail=True, warn=False)
        samples.append((float(t), d))
        ratio.append((float(t), d * math.sqrt(2.0 * math.pi * (1.0 - t))))
        tails.append(e)
    return DensityProfile(samples, ratio, tails)


def reconstruct_moment(ledger, n):
    """F(n) = rho0/(n+1) + sum rho/(n+1-xi) from the truncated ledger."""
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0")
    _, xi, rho, _ = ledger.atom_arrays()
    return math.fsum([ledger.rho0 / (n + 1.0), *(rho / (n + 1.0 - xi))])


def moment_tail(ledger, n):
    """Enclosure [lo, hi] of the dropped shells' share of the n-th moment.

    Each dropped atom contributes (rho/beta) * beta/(n + beta) with
    beta >= p_max + 2, and the masses rho/beta sum to the tail deficit.
    """
    D = max(float(ledger.tail_deficit), 0.0)
    P = int(ledger.p_max)
    return D * (P + 2.0) / (n + P + 2.0), D


def interleaving_check(ledger):
    """Merge-count test that the zeros of every shell separate its poles.

    In (-p-1, -p) the poles are xi_{q,k} - (p - q), q < p; merged with the
    zeros and the boundary poles -p-1, -p, the sorted sequence must alternate
    pole, zero, pole, ..., pole.  Returns the list of shells that fail.
    """
    bad = []
    for p in range(1, ledger.p_max + 1):
        poles = [ledger.shells[q - 1][0] - (p - q) for q in range(1, p)]
        poles = np.concatenate([[-float(p + 1), -float(p)], *poles]) if poles else \
            np.array([-float(p + 1), -float(p)])
        zeros = ledger.shells[p - 1][0]
        tags = np.concatenate([np.zeros(len(poles)), np.ones(len(zeros))])
        order = np.argsort(np.concatenate([poles, zeros]), kind="stable")
        seq = tags[order]
        if not (len(seq) % 2 == 1 and np.all(seq[0::2] == 0) and np.all(seq[1::2] == 1)):
            bad.append(p)
    return bad
