"""High-precision reference values computed independently with mpmath.

None of these use momfix code paths: they re-derive the quantities from
their definitions at 40 significant digits.
"""

import functools

import mpmath as mp

mp.mp.dps = 40


@functools.lru_cache(maxsize=None)
def moments(n_max):
    """m_0..m_n_max from m_{n+1}^2 + m_{n+1}/m_n - 1 = 0."""
    out = [mp.mpf(1)]
    for _ in range(n_max):
        b = 1 / out[-1]
        out.append((-b + mp.sqrt(b * b + 4)) / 2)
    return tuple(out)


def lam(n):
    """lambda_n = 1/m_{n-1}, lambda_0 = 0."""
    return mp.mpf(0) if n == 0 else 1 / moments(n - 1)[n - 1]


def lam_seeded(s, n):
    v = mp.mpf(s)
    for _ in range(n):
        v = (v + mp.sqrt(v * v + 4)) / 2
    return v


def digamma(x):
    return mp.digamma(mp.mpf(x))


def trigamma(x):
    return mp.polygamma(1, mp.mpf(x))


def hurwitz_shifted(s, a):
    """sum_{n>=1} (n + a)^{-s}."""
    return mp.zeta(s, mp.mpf(a) + 1)


def harmonic(p):
    return mp.fsum(mp.mpf(1) / k for k in range(1, p + 1))


def mu3_atom(p):
    """Zero of Psi(1+x) + gamma in (-p-1, -p) and its weight 1/Psi'(1+x)."""
    f = lambda x: mp.digamma(1 + x) + mp.euler
    a, b = mp.mpf(-p - 1) + mp.mpf("1e-30"), mp.mpf(-p) - mp.mpf("1e-30")
    for _ in range(140):
        m = (a + b) / 2
        if f(m) < 0:
            a = m
        else:
            b = m
    x = (a + b) / 2
    return x, 1 / mp.polygamma(1, 1 + x)


def level_set(n):
    pts = [mp.mpf(0)]
    for _ in range(n):
        pos = [(y + mp.sqrt(y * y + 4)) / 2 for y in pts]
        neg = [(y - mp.sqrt(y * y + 4)) / 2 for y in pts]
        pts = sorted(pos + neg)
    return pts


def t_map(a):
    out, s = [], mp.mpf(0)
    for v in a:
        s += v
        out.append(1 / s)
    return out


def signed_differences(a, order):
    rows = [[mp.mpf(v) for v in a]]
    for _ in range(order):
        r = rows[-1]
        rows.append([r[i] - r[i + 1] for i in range(len(r) - 1)])
    return rows
