"""Verification suites driven by ``momfix verify``.

Each suite returns a list of :class:`Check` records.  Informational checks
report a diagnostic value and do not affect the exit status.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytic, divisibility, spectrum
from .seqcore import asymptotic_report, fixed_point_moments
from .transform import t_map

SUITES = ("asymptotics", "functional", "spectrum", "divisibility")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str
    informational: bool = False

    def line(self):
        tag = "INFO" if self.informational else ("PASS" if self.passed else "FAIL")
        return f"{tag} {self.name}: {self.detail}"


def asymptotics():
    out = []
    m = fixed_point_moments(10**5).values
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    out.append(Check("m1-golden", abs(m[1] - golden) < 1e-12, f"m_1 - (sqrt5-1)/2 = {m[1] - golden:.3e}"))
    resid = float(np.max(np.abs(m * np.cumsum(m) - 1.0)))
    out.append(Check("fixed-point-identity", resid < 1e-12, f"max |m_n sum m_k - 1| = {resid:.3e}, n <= 1e5"))
    rep = asymptotic_report(10**6)
    dev = abs(rep.m_scaled - 1.0)
    out.append(Check("m-sqrt2n", dev < 0.01, f"|m_n sqrt(2n) - 1| = {dev:.3e} at n = 1e6"))
    out.append(Check("log-correction", True,
                     f"(lambda_n^2 - 2n)/ln n = {rep.log_ratio:.4f} at n = 1e6 "
                     "(limit -1/2 is approached only like 1/ln n)", informational=True))
    fr = analytic.f_real(1e6).value / math.sqrt(2e6)
    out.append(Check("f-sqrt2x", abs(fr - 1) < 1e-2, f"f(1e6)/sqrt(2e6) - 1 = {fr - 1:.3e}"))
    return out


def functional(n=1000, seed=0):
    out = []
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, 100.0, n)
    r7 = r8 = 0.0
    for x in xs:
        f0 = analytic.f_real(x).value
        f1 = analytic.f_real(x + 1.0).value
        r8 = max(r8, abs(f0 - (f1 - 1.0 / f1)))
        r7 = max(r7, abs(f1 * analytic.F_real(x).value - 1.0))
    out.append(Check("shift-equation", r8 < 1e-8, f"max |f(x) - f(x+1) + 1/f(x+1)| = {r8:.3e}"))
    out.append(Check("duality", r7 < 1e-10, f"max |f(x+1) F(x) - 1| = {r7:.3e}"))
    one = analytic.f_real(1.0).value
    out.append(Check("f(1)=1", abs(one - 1.0) < 1e-12, f"f(1) - 1 = {one - 1:.3e}"))
    grid = np.linspace(-0.9, 20.0, 400)
    Fv = [(x, analytic.F_real(x).value) for x in grid]
    out.append(Check("F-log-convex", divisibility.log_convexity_check(Fv, 1e-9), "grid (-0.9, 20), 400 points"))
    grid = np.linspace(0.05, 20.0, 400)
    gv = [(x, 1.0 / analytic.f_real(x).value) for x in grid]
    out.append(Check("1/f-log-convex", divisibility.log_convexity_check(gv, 1e-10), "grid (0.05, 20), 400 points"))
    led = spectrum.ledger_by_bisection(10)
    bad = 0
    for _ in range(100):
        z = complex(rng.uniform(-0.99, 5.0), rng.uniform(-5.0, 5.0))
        w = analytic.f_spectral(z, led).value
        bad += (w.imag * z.imag) <= 0
    out.append(Check("pick-property", bad == 0, f"{bad} sign flips of Im f over 100 random z"))
    return out


def spectrum_suite(with_iteration=True):
    out = []
    bis = spectrum.ledger_by_bisection(10)
    ok = all(c == 2 ** p for p, c in enumerate(bis.counts))
    out.append(Check("shell-counts-bisect", ok, f"counts {bis.counts}"))
    out.append(Check("interleaving", not spectrum.interleaving_check(bis), "zeros separate poles, p <= 10"))
    _, _, rho, _ = bis.atom_arrays()
    out.append(Check("positive-weights", bool(np.all(rho > 0)) and bis.rho0 > 0, f"min rho = {rho.min():.3e}"))
    lim = spectrum.ledger_by_limit(4, 10**6)
    ledgers = [bis.truncated(4), lim]
    if with_iteration:
        ledgers.append(spectrum.ledger_by_iteration(8, 12).truncated(4))
    worst = agreement(ledgers)
    out.append(Check("cross-method-agreement", worst <= 1.0,
                     f"max |difference| / combined err = {worst:.3f} over p <= 4 "
                     f"({len(ledgers)} methods)"))
    ts = np.linspace(0.001, 0.99, 1000)
    d = np.array([spectrum.density(bis, t, warn=False) for t in ts])
    d1, d2 = np.diff(d), np.diff(d, 2)
    out.append(Check("density-increasing-convex", bool(np.all(d1 > 0) and np.all(d2 > 0)),
                     f"min first difference {d1.min():.3e}, min second {d2.min():.3e}"))
    return out


def agreement(ledgers):
    """Largest pairwise |difference| / (err_a + err_b) over all entries and rho0."""
    worst = 0.0
    for i in range(len(ledgers)):
        for j in range(i + 1, len(ledgers)):
            a, b = ledgers[i], ledgers[j]
            _, xa, ra, ea = a.atom_arrays()
            _, xb, rb, eb = b.atom_arrays()
            tot = ea + eb
            worst = max(worst, float(np.max(np.abs(xa - xb) / tot)), float(np.max(np.abs(ra - rb) / tot)))
            worst = max(worst, abs(a.rho0 - b.rho0) / (a.rho0_err + b.rho0_err))
    return worst


def divisibility_suite():
    out = []
    m80 = fixed_point_moments(80).values
    floor = divisibility.noise_floor(m80[:80], 20)
    out.append(Check("noise-floor", floor < 1e-8, f"triangle noise floor {floor:.3e} (order 20, 80 terms)"))
    rep = divisibility.completely_monotone_check(m80, 20, 1e-9)
    out.append(Check("m-completely-monotone", rep.passed, rep.describe()))
    for alpha in (0.5, 1.0, 2.0, 3.0):
        rep = divisibility.infdiv_check(alpha, 60, 15, 1e-8)
        out.append(Check(f"infdiv-alpha={alpha:g}", rep.passed, rep.describe()))
    b = 1.0 / (np.arange(40) + 1.0) ** 2
    rep = divisibility.in_image_of_t(b, 10, 1e-9)
    out.append(Check("counterexample-rejected", not rep.passed, rep.describe()))
    rep = divisibility.in_image_of_t(m80[:40], 10, 1e-9)
    out.append(Check("m-in-image", rep.passed, rep.describe()))
    # 1/(n+1) <= 1/sqrt(n+1), both moment sequences
    a = 1.0 / (np.arange(40) + 1.0)
    ok = bool(np.all(t_map(a).values >= t_map(np.sqrt(a)).values))
    out.append(Check("T-decreasing", ok, "1/(n+1) <= 1/sqrt(n+1) and T reverses the order"))
    return out


def run(name):
    table = {
        "asymptotics": asymptotics,
        "functional": functional,
        "spectrum": spectrum_suite,
        "divisibility": divisibility_suite,
    }
    if name == "all":
        res = []
        for k in SUITES:
            res.extend(table[k]())
        return res
    return table[name]()
