"""Evaluation of the Bernstein transform f and the Mellin transform F of the
fixed-point measure on the real line.

f solves f(x+1) - 1/f(x+1) = f(x), f(0) = 0, f(1) = 1, and F(x) = 1/f(x+1).

Main evaluator
--------------
For large x, g(x) = f(x)^2 obeys g(x+1) - g(x) = 2 - 1/g(x+1), which admits
the asymptotic expansion

    g(x) ~ 2x + K + sum_j P_j(K) / x^j,    K = C - log(x)/2,

with polynomials P_j computed once by matching powers of 1/x and a single
constant C fitted to the exactly known values g(n) = lambda_n^2.  The seed
sqrt(g(x + n)) is pulled back with n applications of psi, which is the
functional equation itself.  This gives f to near machine precision on
(0, 1]; the limit formula :func:`f_unit` converges like n^{-1/2}
and is kept as an independent cross-check.
"""

from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    AccuracyWarning,
    DomainError,
    NearPoleError,
    PoleEncounteredError,
    PrecisionLossError,
)
from .seqcore import lambda_sequence
from .specfun import EULER_GAMMA, digamma, hurwitz_zeta_shifted, trigamma

EPS = np.finfo(float).eps
SEED_X = 64.0
UNIT_STEP_CAP = 10**8

# P_j(K) coefficients, highest power of K first
_PC = (
    (-1 / 4, -1 / 8),
    (1 / 16, 1 / 8, 11 / 192),
    (-1 / 48, -5 / 64, -17 / 192, -65 / 2304),
    (1 / 128, 17 / 384, 11 / 128, 33 / 512, 1361 / 92160),
    (-1 / 320, -37 / 1536, -35 / 512, -11 / 128, -4207 / 92160, -14771 / 1843200),
    (1 / 768, 197 / 15360, 599 / 12288, 545 / 6144, 5791 / 73728, 4637 / 147456,
     1541417 / 309657600),
    (-1 / 1792, -69 / 10240, -997 / 30720, -3869 / 49152, -3713 / 36864, -9851 / 147456,
     -588223 / 25804800, -33729013 / 8670412800),
)
_PC_DER = tuple(tuple(c * (len(p) - 1 - i) for i, c in enumerate(p[:-1])) for p in _PC)


class Method(str, enum.Enum):
    """How a value of f or F was obtained."""

    ITERATE_FORMULA = "iterate_formula"
    FORWARD_RECURSION = "forward_recursion"
    PSI_EXTENSION = "psi_extension"
    SPECTRAL_PARTIAL_FRACTION = "spectral_partial_fraction"
    ASYMPTOTIC_SEED = "asymptotic_seed"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class EvalResult:
    """Value with an absolute error estimate and the method used.

    ``bracket`` optionally holds a rigorous enclosure (lo, hi).
    """

    value: float
    abs_err_est: float
    method: Method
    bracket: Optional[tuple] = None

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# asymptotic seed


def _g_asym(x, C):
    """g(x), dg/dx and a truncation-error estimate for x >= SEED_X."""
    x = np.asarray(x, dtype=float)
    lx = np.log(x)
    K = C - 0.5 * lx
    inv = 1.0 / x
    val = 2.0 * x + K
    der = 2.0 - 0.5 * inv
    xp = inv
    last = 0.0
    for j, (p, dp) in enumerate(zip(_PC, _PC_DER), start=1):
        pk = np.polyval(p, K)
        dpk = np.polyval(dp, K)
        last = pk * xp
        val = val + last
        der = der + (-0.5 * dpk - j * pk) * xp * inv
        xp = xp * inv
    # the dropped term is roughly |last| * (|K|+1) / x
    trunc = np.abs(last) * (np.abs(K) + 1.0) * inv
    return val, der, trunc


@functools.lru_cache(maxsize=None)
def seed_constant():
    """Constant C of the large-x expansion, fitted to lambda_n^2.

    The fit uses n = 48, where the truncated expansion is accurate to about
    1e-16 while the binary64 recursion for lambda_n has not yet drifted.

    Returns
    -------
    (C, err) : tuple of float
        err is the spread of the fits at n = 32, 48 and 96.
    """
    lam = lambda_sequence(96)

    def fit(n):
        c = 0.0
        for _ in range(60):
            g, _, _ = _g_asym(float(n), c)
            dc = lam[n] ** 2 - float(g)
            c += dc
            if abs(dc) < 1e-16:
                break
        return c

    c = fit(48)
    return c, max(abs(c - fit(32)), abs(c - fit(96))) + 4 * EPS * lam[48] ** 2


def _seed(y):
    """sqrt(g(y)) with derivative and error for y >= SEED_X."""
    C, dC = seed_constant()
    g, dg, tr = _g_asym(y, C)
    w = np.sqrt(g)
    return w, dg / (2 * w), (tr + dC) / (2 * w) + 2 * EPS * w


def _unit_seed(s):
    """f, f' and error on (0, 1] by pulling the seed at s + 64 back with psi."""
    s = np.asarray(s, dtype=float)
    n = int(SEED_X)
    w, d, e = _seed(s + n)
    for _ in range(n):
        fac = 1.0 + 1.0 / (w * w)
        w = w - 1.0 / w
        d = d * fac
        e = e * fac + EPS * (np.abs(w) + 1.0)
    return w, d, e


def _lambda1(y):
    r = np.sqrt(y * y + 4.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(y >= 0, 0.5 * (y + r), 2.0 / (r - y)), r


def _f_pos(x):
    """Vectorised f, f' and error for x > 0; returns (val, der, err, method_code).

    method_code: 0 seed on (0,1] or x >= SEED_X, 1 forward recursion.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    val = np.empty_like(x)
    der = np.empty_like(x)
    err = np.empty_like(x)
    code = np.zeros(x.shape, dtype=int)
    big = x >= SEED_X
    if np.any(big):
        val[big], der[big], err[big] = _seed(x[big])
    small = ~big
    if np.any(small):
        xs = x[small]
        j = np.ceil(xs) - 1.0
        s = xs - j
        v, d, e = _unit_seed(s)
        steps = j.astype(int)
        for k in range(int(steps.max(initial=0))):
            act = steps > k
            w1, r = _lambda1(v[act])
            # d lambda_1(y)/dy = lambda_1 / sqrt(y^2 + 4)
            fac = w1 / r
            d[act] = d[act] * fac
            e[act] = e[act] * fac + EPS * w1
            v[act] = w1
        val[small], der[small], err[small] = v, d, e
        code[small] = np.where(steps > 0, 1, 0)
    return val, der, err, code


def _f_ext_arrays(x):
    """Vectorised f on the whole real line off poles.

    Returns (val, der, err, ok, derr).  ``ok`` is False where the argument is
    an integer <= -1 or an intermediate iterate vanished; ``derr`` estimates
    the absolute error of the derivative.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    L = np.where(x > -1.0, 0, np.ceil(-x)).astype(int)
    # points in (-1, 0] also take one psi step from (0, 1]
    L = np.where((x > -1.0) & (x <= 0.0), 1, L)
    base = x + L
    ok = base > 0.0
    base_safe = np.where(ok, base, 0.5)
    v, d, e, _ = _f_pos(base_safe)
    de = np.abs(d) * (e / np.abs(v) + 1e-14)
    for k in range(int(L.max(initial=0))):
        act = L > k
        w = v[act]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            fac = 1.0 + 1.0 / (w * w)
            # perturbation of the factor caused by the error in w
            dfac = 2.0 * e[act] / np.abs(w) ** 3
            v[act] = w - 1.0 / w
            de[act] = de[act] * fac + np.abs(d[act]) * dfac + EPS * np.abs(d[act]) * fac
            d[act] = d[act] * fac
            e[act] = e[act] * fac + EPS * np.abs(v[act])
    ok &= np.isfinite(v) & np.isfinite(e)
    return v, d, e, ok, de


def _scalar_check(x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("argument must be finite")
    return x


# ---------------------------------------------------------------------------
# public evaluators


def f_unit(s, n, lam=None, bracket=True):
    """Limit-formula evaluation of f on (0, 1].

    Computes psi^n(lambda_n (lambda_{n+1}/lambda_n)^s).

    Parameters
    ----------
    s : float or array_like
        Points in (0, 1].
    n : int
        Number of psi steps, ``n >= 2``.
    lam : array_like, optional
        Precomputed lambda table with at least n + 2 entries.
    bracket : bool
        Also return the enclosure psi^n(b_n(s)) <= f(s) <= psi^n(a_n(s)).

    Returns
    -------
    EvalResult
        ``abs_err_est`` is the explicit truncation bound
        s (n+1)(lambda_n^2 - lambda_{n-1}^2) / (lambda_n lambda_{n-1}^2)
        plus an estimate of accumulated rounding (~ 2 eps n^1.5), which
        dominates the bracket width for small s at n ~ 10^6.
    """
    n = int(n)
    if n < 2:
        raise DomainError("f_unit needs n >= 2")
    sa = np.asarray(s, dtype=float)
    if np.any((sa <= 0) | (sa > 1)):
        raise DomainError("f_unit needs 0 < s <= 1")
    if lam is None:
        lam = lambda_sequence(n + 1)
    lm, ln, lp = float(lam[n - 1]), float(lam[n]), float(lam[n + 1])
    lo0 = ln * (lp / ln) ** sa
    hi0 = ln * (ln / lm) ** sa
    w = np.stack([np.atleast_1d(lo0), np.atleast_1d(hi0)]) if bracket else np.atleast_1d(lo0)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(n):
            w = w - 1.0 / w
    if not np.all(np.isfinite(w)):
        # locate the failing step on the first bad lane
        start = float(np.atleast_1d(lo0)[~np.isfinite(np.atleast_1d(w[0] if bracket else w))][0])
        from .psidyn import psi_iter

        psi_iter(start, n)
        raise PoleEncounteredError(-1)
    bound = sa * (n + 1) * (ln * ln - lm * lm) / (ln * lm * lm)
    # rounding: errors injected near step k are of size eps*sqrt(2k) and get
    # amplified by about f'(s)/f'(s+k) ~ sqrt(2k); a random-walk sum over the
    # n steps gives roughly eps * n^1.5
    rnd = 2.0 * EPS * (n + 1) ** 1.5
    bound = bound + rnd
    if bracket:
        val = w[0]
        enc = (w[0] - rnd, w[1] + rnd)
    else:
        val = w
        enc = None
    if np.ndim(sa) == 0:
        val = float(val[0])
        bound = float(bound)
        if enc is not None:
            enc = (float(enc[0][0]), float(enc[1][0]))
    return EvalResult(val, bound, Method.ITERATE_FORMULA, enc)


def f_unit_adaptive(s, tol, cap=UNIT_STEP_CAP):
    """f_unit with the smallest n whose proof bound is below ``tol`` (capped)."""
    s = float(s)
    # bound is about s / sqrt(2n)
    n = max(2, int(math.ceil(0.5 * (s / tol) ** 2)))
    if n > cap:
        warnings.warn(f"f_unit step count capped at {cap}; tolerance {tol} not reached",
                      AccuracyWarning, stacklevel=2)
        n = cap
    res = f_unit(s, n)
    while res.abs_err_est > tol and n < cap:
        n = min(cap, 2 * n)
        res = f_unit(s, n)
    return res


def f_real(x, unit_method="seed", tol=1e-6):
    """f(x) for real x > -1.

    On (0, 1] the value comes from the asymptotic seed (``unit_method="seed"``)
    or from the limit formula with adaptive n (``unit_method="iterate"``);
    larger x use the forward recursion f(x+1) = (f(x) + sqrt(f(x)^2+4))/2 from
    the fractional part (or the seed directly beyond x = 64); x in (-1, 0]
    uses f(x) = psi(f(x+1)).
    """
    x = _scalar_check(x)
    if x <= -1.0:
        raise DomainError("f_real needs x > -1; use f_extended")
    if unit_method == "iterate":
        j = max(0, math.ceil(x) - 1)
        if x <= 0:
            r = f_unit_adaptive(x + 1.0, tol)
            v = r.value - 1.0 / r.value
            return EvalResult(v, r.abs_err_est * (1 + 1 / r.value**2), Method.PSI_EXTENSION)
        r = f_unit_adaptive(x - j, tol)
        v, e = r.value, r.abs_err_est
        for _ in range(j):
            w1, rr = _lambda1(np.float64(v))
            e *= float(w1 / rr)
            v = float(w1)
        return EvalResult(v, e, Method.FORWARD_RECURSION if j else Method.ITERATE_FORMULA)
    if unit_method != "seed":
        raise DomainError(f"unknown unit_method {unit_method!r}")
    v, d, e, ok, _ = _f_ext_arrays(np.array([x]))
    if x <= 0.0:
        method = Method.PSI_EXTENSION
    elif 1.0 < x < SEED_X:
        method = Method.FORWARD_RECURSION
    else:
        method = Method.ASYMPTOTIC_SEED
    return EvalResult(float(v[0]), float(e[0]), method)


def f_prime(x):
    """Derivative f'(x) (chain rule through the same evaluation path)."""
    x = _scalar_check(x)
    v, d, e, ok, de = _f_ext_arrays(np.array([x]))
    if not ok[0]:
        raise NearPoleError(f"f' is not defined at the pole {x!r}")
    return EvalResult(float(d[0]), float(de[0]),
                      Method.PSI_EXTENSION if x <= 0 else Method.ASYMPTOTIC_SEED)


def f_extended(x, max_err=1e-3):
    """Meromorphic extension of f to the whole real line via f(x) = psi(f(x+1)).

    Parameters
    ----------
    x : float
        Any real point not within 1e-10 of a pole.
    max_err : float
        Raise PrecisionLossError when the propagated error exceeds this.

    Raises
    ------
    NearPoleError
        If ``x`` is (numerically) an integer <= -1 or an intermediate iterate
        vanishes within its own error estimate.
    """
    x = _scalar_check(x)
    if x > -1.0:
        return f_real(x)
    if abs(x - round(x)) < 1e-10:
        raise NearPoleError(f"{x!r} is within 1e-10 of the integer pole {round(x)}")
    L = math.ceil(-x)
    w0 = f_real(x + L)
    w, e = w0.value, w0.abs_err_est
    for step in range(1, L + 1):
        if abs(w) < 1e-10 or abs(w) <= 2 * e:
            raise NearPoleError(
                f"intermediate f({x + L - step + 1!r}) = {w!r} vanishes within its error {e:.2e}",
                intermediate=(x + L - step + 1, w))
        fac = 1.0 + 1.0 / (w * w)
        w = w - 1.0 / w
        e = e * fac + EPS * abs(w)
    if e > max_err:
        raise PrecisionLossError(f"error estimate {e:.3e} at x={x!r} exceeds {max_err}")
    return EvalResult(w, e, Method.PSI_EXTENSION)


def F_real(x):
    """Mellin transform F(x) = 1/f(x+1)."""
    x = _scalar_check(x)
    r = f_real(x + 1.0) if x > -2.0 else f_extended(x + 1.0)
    if r.value == 0.0:
        raise ZeroDivisionError(f"F has a pole at {x!r}")
    v = 1.0 / r.value
    return EvalResult(v, r.abs_err_est * v * v, r.method)


# ---------------------------------------------------------------------------
# spectral (partial fraction) evaluation


def _kappa(z, beta):
    """beta (Psi(beta + z) - Psi(beta)), real z, beta > 0 and beta + z > 0."""
    return beta * (digamma(beta + z) - digamma(beta))


def _ledger_arrays(ledger):
    p, xi, rho, err = ledger.atom_arrays()
    return p, xi, rho, err


def _em_sum(c, z, L):
    """sum_{l>=1} 1/((l+c)(l+c+z)) for complex z, Re z > -1, c >= 0 (arrays).

    Direct sum to L, Euler-Maclaurin tail with two derivative corrections.
    """
    l = np.arange(1, L + 1, dtype=float)
    c = np.asarray(c, dtype=float)[:, None]
    terms = 1.0 / ((l + c) * (l + c + z))
    direct = terms.sum(axis=1)
    a = L + 1 + c[:, 0]
    g = 1.0 / (a * (a + z))
    # g' and g''' of 1/((x)(x+z)) at x = a
    g1 = -(2 * a + z) / (a * a * (a + z) ** 2)
    h = 1.0 / a
    k = 1.0 / (a + z)
    g3 = -6.0 * (h**4 * k + h**3 * k**2 + h**2 * k**3 + h * k**4)
    integral = np.log((a + z) / a) / z if z != 0 else h
    tail = integral + 0.5 * g - g1 / 12.0 + g3 / 720.0
    return direct + tail


def f_spectral(z, ledger, L=256):
    """f from the partial-fraction spectrum stored in a ledger.

    Real ``z`` use the digamma closed form of the truncated double sum; complex
    ``z`` (``Re z > -1``) use the double sum itself, truncated at ``L`` with an
    Euler-Maclaurin remainder.  The missing shells p > p_max carry the mass
    D = ledger.tail_deficit; their contribution is added as z*D (real z: the
    centre of a rigorous enclosure), and the enclosure half-width, plus the
    propagated per-atom errors, goes into ``abs_err_est``.
    """
    p, xi, rho, aerr = _ledger_arrays(ledger)
    beta = 1.0 - xi
    D = max(float(ledger.tail_deficit), 0.0)
    P = int(ledger.p_max)
    rho0 = float(ledger.rho0)
    if isinstance(z, complex) or np.iscomplexobj(z):
        z = complex(z)
        if z.imag == 0.0:
            z = z.real
        else:
            if z.real <= -1.0:
                raise DomainError("complex evaluation needs Re z > -1")
            s0 = _em_sum(np.array([0.0]), z, L)[0]
            s1 = _em_sum(beta - 1.0, z, L)
            # ledger sum_l rho/((l-xi)(z+l-xi)); shift l-xi = l + (beta-1)
            val = z * (rho0 * s0 + np.dot(rho, s1)) + z * D
            err = abs(z) * abs(1 - z) * D / (2 * (P + 1)) + abs(z) * float(
                np.dot(aerr, np.abs(s1))) + 1e-13 * abs(val)
            return EvalResult(val, err, Method.SPECTRAL_PARTIAL_FRACTION)
    z = _scalar_check(z)
    if z <= -1.0 and np.any(np.abs((z + beta) - np.round(z + beta)) < 1e-10):
        raise NearPoleError(f"{z!r} is a pole of the truncated representation")
    try:
        core = rho0 * (digamma(z + 1.0) + EULER_GAMMA)
        dz = digamma(z + beta) - digamma(beta)
    except ZeroDivisionError as exc:
        raise NearPoleError(str(exc)) from exc
    val = core + float(np.dot(rho, dz))
    # err_est of an atom bounds both its weight and its position error
    dxi = trigamma(z + beta) - trigamma(beta)
    err_atoms = float(np.dot(aerr, np.abs(dz) + np.abs(rho * dxi)))
    err_atoms += abs(float(getattr(ledger, "rho0_err", 0.0)) * (core / rho0 if rho0 else 0.0))
    if z > -(P + 2):
        kP = float(_kappa(z, float(P + 2)))
        lo, hi = sorted((z * D, kP * D))
        tail = 0.5 * (lo + hi)
        terr = 0.5 * (hi - lo)
    else:
        tail, terr = z * D, abs(z) * D
    out = val + tail
    return EvalResult(out, terr + err_atoms + 1e-13 * (1 + abs(out)), Method.SPECTRAL_PARTIAL_FRACTION)


def power_coeffs(n_max, ledger):
    """Power-series coefficients of F and f about 0 from the spectrum.

    F(z) = sum_{n>=0} a_n z^n,  a_n = (-1)^n (rho0 + sum rho/(1-xi)^{n+1});
    f(z) = sum_{n>=1} b_n z^n,  b_n = (-1)^{n-1} (rho0 zeta(n+1, 0) + sum rho zeta(n+1, -xi)),
    with the shifted zeta of :mod:`momfix.specfun`.

    Returns
    -------
    a, b, a_tail, b_tail : ndarray
        ``a[n]`` for n = 0..n_max and ``b[n]`` for n = 0..n_max (``b[0] = 0``),
        plus bounds on the contribution of the dropped shells.  ``a[0]`` is
        1 - tail_deficit; the dropped mass is in ``a_tail[0]``.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    p, xi, rho, _ = _ledger_arrays(ledger)
    beta = 1.0 - xi
    rho0 = float(ledger.rho0)
    D = max(float(ledger.tail_deficit), 0.0)
    P = int(ledger.p_max)
    a = np.empty(n_max + 1)
    b = np.zeros(n_max + 1)
    a_tail = np.empty(n_max + 1)
    b_tail = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        a[n] = (-1) ** n * (rho0 + math.fsum(rho / beta ** (n + 1)))
        a_tail[n] = D / float(P + 2) ** n
        if n >= 1:
            zs = hurwitz_zeta_shifted(n + 1, -xi) if len(xi) else np.zeros(0)
            b[n] = (-1) ** (n - 1) * (rho0 * hurwitz_zeta_shifted(n + 1, 0.0) + math.fsum(rho * zs))
            b_tail[n] = D * float(P + 2) ** (-n) * (1.0 + (P + 2) / n)
    return a, b, a_tail, b_tail
