"""Command-line front end: ``momfix <command> [options]``.

Commands emit CSV (header row first, ``#`` rows for annotations) or JSON.
Floats in CSV are written with 17 significant digits so that identical
inputs give byte-identical files.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 precision-cap violation.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .analytic import _f_ext_arrays
from .errors import (
    CapExceededError,
    CountMismatchError,
    DomainError,
    PrecisionLossError,
)
from .seqcore import fixed_point_moments, lambda_sequence

EXIT_OK, EXIT_FAIL, EXIT_ARGS, EXIT_CAP = 0, 1, 2, 3
PLOT_POLE_GAP = 1e-6
PLOT_MIN_X = -10.0


def fmt(x):
    """17 significant digits; integers stay integers."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


@dataclass
class RunConfig:
    """Parsed command line."""

    command: str
    params: dict = field(default_factory=dict)
    output_path: Optional[str] = None
    format: str = "csv"


class _ArgError(Exception):
    pass


@contextlib.contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _write_csv(out, header, rows, notes=()):
    out.write(",".join(header) + "\n")
    for note in notes:
        out.write("# " + note + "\n")
    for r in rows:
        out.write(",".join(fmt(v) if not isinstance(v, str) else v for v in r) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_moments(cfg):
    n_max = cfg.params["n"]
    if n_max < 0:
        raise _ArgError("--n must be >= 0")
    m = fixed_point_moments(n_max).values
    lam = lambda_sequence(n_max)
    n = np.arange(n_max + 1)
    scaled = m * np.sqrt(2.0 * n)
    corr = lam * lam - 2.0 * n
    with _sink(cfg.output_path) as out:
        if cfg.format == "json":
            rows = [{"n": int(i), "m": float(m[i]), "lambda": float(lam[i]),
                     "m_sqrt2n": float(scaled[i]), "lambda_sq_minus_2n": float(corr[i])}
                    for i in range(n_max + 1)]
            out.write(json.dumps(rows) + "\n")
        else:
            out.write("n,m_n,lambda_n,m_n_sqrt_2n,lambda_n_sq_minus_2n\n")
            out.writelines(
                f"{i},{fmt(m[i])},{fmt(lam[i])},{fmt(scaled[i])},{fmt(corr[i])}\n"
                for i in range(n_max + 1))
    return EXIT_OK


def _build_ledger(method, p_max, N, steps):
    from . import spectrum

    if method == "bisect":
        return spectrum.ledger_by_bisection(p_max)
    if method == "limit":
        return spectrum.ledger_by_limit(p_max, N)
    if method == "iterate":
        return spectrum.ledger_by_iteration(p_max, steps)
    if method == "merged":
        return spectrum.merged_ledger(p_max, steps)
    raise _ArgError(f"unknown method {method!r}")


def cmd_spectrum(cfg):
    p = cfg.params
    steps = p["steps"]
    if steps is None and p["method"] == "iterate":
        steps = p["p_max"] + 10 if p["p_max"] % 2 == 0 else p["p_max"] + 11
    led = _build_ledger(p["method"], p["p_max"], p["N"], steps)
    with _sink(cfg.output_path) as out:
        out.write(led.to_json() + "\n")
    return EXIT_OK


def _load_or_build(p):
    from .spectrum import SpectrumLedger

    if p.get("ledger"):
        return SpectrumLedger.load(p["ledger"])
    return _build_ledger("bisect", p["p_max"], None, None)


def cmd_density(cfg):
    from .spectrum import density

    p = cfg.params
    led = _load_or_build(p)
    if p["t"]:
        ts = [float(t) for t in p["t"]]
    else:
        ts = list(np.linspace(p["t_from"], p["t_to"], p["num"]))
    if any(not 0.0 < t < 1.0 for t in ts):
        raise _ArgError("t values must lie in (0, 1)")
    rows = []
    for t in ts:
        d = density(led, t, warn=False)
        rows.append((t, d, d * math.sqrt(2.0 * math.pi * (1.0 - t))))
    notes = [f"p_max={led.p_max} rho0={fmt(led.rho0)} tail_deficit={fmt(led.tail_deficit)}"]
    with _sink(cfg.output_path) as out:
        _write_csv(out, ["t", "D", "D_sqrt_2pi_1mt"], rows, notes)
    return EXIT_OK


def _start_sequence(p):
    length = p["length"]
    if p["start"] == "delta0":
        a = np.zeros(length)
        a[0] = 1.0
    elif p["start"] == "ones":
        a = np.ones(length)
    else:
        if not p["file"]:
            raise _ArgError("--start custom needs --file")
        with open(p["file"], encoding="utf-8") as fh:
            a = np.array(json.load(fh), dtype=float)
        if a.ndim != 1 or len(a) < 2 or a[0] != 1.0:
            raise _ArgError("custom start must be a JSON list with first entry 1")
    return a


def cmd_iterate(cfg):
    from .transform import t_map, that_step, uniform_measure

    p = cfg.params
    if p["steps"] < 1:
        raise _ArgError("--steps must be >= 1")
    a = _start_sequence(p)
    m = fixed_point_moments(len(a) - 1).values
    traj = [a]
    for _ in range(p["steps"]):
        traj.append(t_map(traj[-1]).values)
    notes = []
    for s in range(1, p["steps"] + 1):
        dist = float(np.max(np.abs(traj[s] - m)))
        # iterates on one side of m stay on that side every second step and
        # approach it monotonically
        below = bool(np.all(traj[s] <= m + 1e-15))
        above = bool(np.all(traj[s] >= m - 1e-15))
        side = "below" if below else ("above" if above else "mixed")
        if s >= 2 and side != "mixed":
            sgn = 1.0 if below else -1.0
            ok = bool(np.all(sgn * (traj[s] - traj[s - 2]) >= -1e-15))
            sandwich = "pass" if ok else "fail"
        else:
            sandwich = "n/a" if side != "mixed" else "fail"
        notes.append(f"step {s}: distance={fmt(dist)} side={side} sandwich={sandwich}")
    if p["p_max"] and p["start"] == "delta0":
        mu = uniform_measure()
        for _ in range(max(0, p["steps"] - 2)):
            mu = that_step(mu, p["p_max"])
            notes.append(f"measure level {mu.level}: rho0={fmt(mu.rho0)} counts={list(mu.counts)} "
                         f"tail_deficit={fmt(mu.tail_deficit)}")
    rows = [(s, k, traj[s][k]) for s in range(1, p["steps"] + 1) for k in range(len(a))]
    with _sink(cfg.output_path) as out:
        _write_csv(out, ["step", "k", "value"], rows, notes)
    return EXIT_OK


def cmd_plot_f(cfg):
    from .spectrum import ledger_by_bisection

    p = cfg.params
    x0, x1, h = p["x_from"], p["x_to"], p["step"]
    if not (h > 0 and x1 > x0):
        raise _ArgError("need --to > --from and --step > 0")
    if x0 < PLOT_MIN_X:
        raise CapExceededError(f"--from below {PLOT_MIN_X}: psi-orbit extension out of precision")
    n = int(math.floor((x1 - x0) / h + 1e-9)) + 1
    xs = np.round(x0 + h * np.arange(n), 12)
    depth = max(1, min(10, math.ceil(-x0)))
    led = ledger_by_bisection(depth)
    poles = [-float(l) for l in range(1, depth + 1)]
    for q in range(1, depth + 1):
        for l in range(1, depth + 1):
            poles.extend(led.shells[q - 1][0] - l)
    poles = np.array(sorted(x for x in poles if x0 - PLOT_POLE_GAP <= x <= x1 + PLOT_POLE_GAP))
    zeros = np.concatenate([[0.0], *[s[0] for s in led.shells]])
    zeros = np.sort(zeros[(zeros >= x0) & (zeros <= x1)])
    v, _, _, ok, _ = _f_ext_arrays(xs)
    near = np.zeros(n, dtype=bool)
    if len(poles):
        idx = np.searchsorted(poles, xs)
        for j in (idx - 1, idx):
            jj = np.clip(j, 0, len(poles) - 1)
            near |= np.abs(xs - poles[jj]) < PLOT_POLE_GAP
    vals = np.where(near, np.nan, v)
    # integer poles beyond the plotted depth never occur: depth covers x0
    notes = [f"pole,{fmt(x)}" for x in poles] + [f"zero,{fmt(x)}" for x in zeros]
    with _sink(cfg.output_path) as out:
        _write_csv(out, ["x", "f"], zip(xs, vals), notes)
    return EXIT_OK


def cmd_verify(cfg):
    from . import suites

    res = suites.run(cfg.params["suite"])
    failed = [c for c in res if not c.passed and not c.informational]
    with _sink(cfg.output_path) as out:
        for c in res:
            out.write(c.line() + "\n")
        out.write(f"{len(res) - len(failed)}/{len(res)} checks passed\n")
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "moments": cmd_moments,
    "spectrum": cmd_spectrum,
    "density": cmd_density,
    "iterate": cmd_iterate,
    "plot-f": cmd_plot_f,
    "verify": cmd_verify,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="momfix", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, formats=("csv",)):
        sp.add_argument("--out", "-o", dest="output_path", default=None, help="output file (default stdout)")
        sp.add_argument("--format", choices=formats, default=formats[0])

    sp = sub.add_parser("moments", help="fixed-point moments and asymptotic diagnostics")
    sp.add_argument("--n", type=int, required=True, help="last index")
    common(sp, ("csv", "json"))

    sp = sub.add_parser("spectrum", help="zero/residue ledger as JSON")
    sp.add_argument("--p-max", type=int, default=4)
    sp.add_argument("--method", choices=("bisect", "limit", "iterate", "merged"), default="bisect")
    sp.add_argument("--N", type=int, default=10**6, help="orbit length for --method limit")
    sp.add_argument("--steps", type=int, default=None, help="iterations for iterate/merged")
    common(sp, ("json",))

    sp = sub.add_parser("density", help="D(t) and the boundary ratio")
    sp.add_argument("--ledger", default=None, help="ledger JSON (default: bisection ledger)")
    sp.add_argument("--p-max", type=int, default=10)
    sp.add_argument("--t", nargs="*", default=None, help="explicit t values")
    sp.add_argument("--t-from", type=float, default=1e-6)
    sp.add_argument("--t-to", type=float, default=0.99)
    sp.add_argument("--num", type=int, default=100)
    common(sp)

    sp = sub.add_parser("iterate", help="trajectory of T from a starting sequence")
    sp.add_argument("--start", choices=("delta0", "ones", "custom"), default="delta0")
    sp.add_argument("--file", default=None, help="JSON list of moments for --start custom")
    sp.add_argument("--steps", type=int, default=6)
    sp.add_argument("--length", type=int, default=21, help="prefix length")
    sp.add_argument("--p-max", type=int, default=0, help="also run the measure iteration (delta0 only)")
    common(sp)

    sp = sub.add_parser("plot-f", help="samples of f with pole and zero annotations")
    sp.add_argument("--from", dest="x_from", type=float, default=-4.0)
    sp.add_argument("--to", dest="x_to", type=float, default=3.0)
    sp.add_argument("--step", type=float, default=0.01)
    common(sp)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", choices=("asymptotics", "functional", "spectrum", "divisibility", "all"),
                    default="all")
    common(sp, ("text",))
    return ap


def parse(argv=None):
    ns = build_parser().parse_args(argv)
    d = vars(ns).copy()
    cmd = d.pop("command")
    out = d.pop("output_path", None)
    fmt_ = d.pop("format", "csv")
    return RunConfig(cmd, d, out, fmt_)


def main(argv=None):
    try:
        cfg = parse(argv)
    except SystemExit as exc:  # argparse: 2 on errors, 0 on --help
        return int(exc.code or 0)
    try:
        return COMMANDS[cfg.command](cfg)
    except (_ArgError, DomainError) as exc:
        print(f"momfix: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (CapExceededError, PrecisionLossError, CountMismatchError) as exc:
        print(f"momfix: precision cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except OSError as exc:
        print(f"momfix: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
