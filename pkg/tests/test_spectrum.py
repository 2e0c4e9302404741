import json
import math
import warnings

import numpy as np
import pytest

from momfix import spectrum as S
from momfix.errors import AccuracyWarning, CapExceededError, CountMismatchError, DomainError
from momfix.seqcore import fixed_point_moments
from momfix.suites import agreement

import oracles


TABLE = {"rho0": 0.68, (1, 1): (-1.46, 0.14), (2, 1): (-2.61, 0.06), (2, 2): (-2.33, 0.05)}


def test_bisection_table(bis10):
    # the printed table mixes truncation (0.06 for 0.0653) and rounding
    # (-2.61 for -2.6078), so agreement to two decimals means within 0.01
    assert abs(bis10.rho0 - TABLE["rho0"]) < 0.01
    for p in (1, 2):
        for e in bis10.entries(p):
            xi, rho = TABLE[(p, e.k)]
            assert abs(e.xi - xi) < 0.01 and abs(e.rho - rho) < 0.01


def test_bisection_first_zero_against_mpmath(bis10):
    # xi_{1,1} = x_* - 1 with f(x_*) = -1; psi(f(x_*+1)) = -1 so f(x_*+1) = (-1+sqrt5)/2
    # and f(x_*+2) = lambda_1((sqrt5-1)/2) etc.  Check through the weight
    # identity rho = 1/f'(xi) using a high-precision chain instead.
    import mpmath as mp
    from momfix import analytic as A
    x = bis10.entries(1)[0].xi
    # f(x + 2) must equal the positive preimage of the positive preimage of 0
    target = oracles.level_set(2)[2]
    assert abs(A.f_real(x + 2).value - float(target)) < 1e-8
    assert abs(float(target) - float((-1 + mp.sqrt(5)) / 2)) < 1e-15


@pytest.mark.parametrize("name", ["bis10", "iter8", "merged12"])
def test_ledger_invariants(request, name):
    led = request.getfixturevalue(name)
    if name == "iter8":
        led = led[0]
    led.validate()
    assert led.counts == tuple(2 ** (p - 1) for p in range(1, led.p_max + 1))
    _, xi, rho, err = led.atom_arrays()
    assert np.all(rho > 0) and np.all(err >= 0)
    assert 0 < led.tail_deficit < 1
    assert S.interleaving_check(led) == []


def test_limit_ledger_examples(lim4):
    lim4.validate()
    assert abs(lim4.rho0 - 0.68) < 0.01
    assert abs(lim4.entries(1)[0].xi - (-1.46)) < 0.01
    assert all(e.method == "limit_formula" for e in lim4)


def test_three_way_agreement(bis10, lim4, iter8):
    leds = [bis10.truncated(4), lim4, iter8[0].truncated(4)]
    assert agreement(leds) <= 1.0
    for led in leds:
        _, _, _, err = led.atom_arrays()
        assert np.all(err <= 5e-3)


def test_iteration_atoms_match_digamma_at_level3(iter8):
    _, hist = iter8
    mu3 = hist[1]
    for p in range(1, 6):
        x, r = oracles.mu3_atom(p)
        assert abs(mu3.shells[p - 1][0][0] - float(x)) < 1e-11


@pytest.mark.xfail(strict=True, reason="moments of the truncated measure miss the mass beyond p_max (about 0.14)")
def test_iteration_moments_1e5(iter8):
    led, _ = iter8
    m = fixed_point_moments(20).values
    for k in range(21):
        assert abs(S.reconstruct_moment(led, k) - m[k]) < 1e-5


def test_iteration_moments_within_tail(iter8):
    led, _ = iter8
    m = fixed_point_moments(20).values
    for k in range(21):
        lo, hi = S.moment_tail(led, k)
        v = S.reconstruct_moment(led, k)
        assert v + lo - 1e-4 <= m[k] <= v + hi + 1e-4


@pytest.mark.xfail(strict=True, reason="the iteration contracts by about 0.3 per step; 12 vs 10 steps differ by ~1e-5")
def test_iteration_cauchy_1e6(iter8):
    _, hist = iter8
    a, b = hist[-1], hist[-3]
    for p in range(4):
        assert np.max(np.abs(np.asarray(a.shells[p][0]) - np.asarray(b.shells[p][0]))) < 1e-6


def test_iteration_cauchy_contracts(iter8):
    _, hist = iter8
    moves = []
    for s in range(len(hist) - 2, len(hist) - 8, -2):
        a, b = hist[s + 1], hist[s - 1]
        moves.append(max(np.max(np.abs(np.asarray(a.shells[p][0]) - np.asarray(b.shells[p][0])))
                         for p in range(4)))
    assert all(x < y for x, y in zip(moves, moves[1:]))


def test_iteration_count_mismatch():
    with pytest.raises(CountMismatchError):
        S.ledger_by_iteration(6, 4)


def test_argument_errors():
    with pytest.raises(CapExceededError):
        S.ledger_by_bisection(11)
    with pytest.raises(DomainError):
        S.ledger_by_limit(2, 500)
    with pytest.raises(DomainError):
        S.ledger_by_iteration(4, 5)
    with pytest.raises(DomainError):
        S.density(S.ledger_by_bisection(2), 1.0)


def test_json_round_trip_bit_identical(bis10, tmp_path):
    text = bis10.to_json()
    back = S.SpectrumLedger.from_json(text)
    assert back.to_json() == text
    for a, b in zip(bis10.atom_arrays(), back.atom_arrays()):
        assert np.array_equal(a, b)
    assert back.rho0 == bis10.rho0 and back.rho0_err == bis10.rho0_err
    path = tmp_path / "l.json"
    bis10.save(path)
    assert S.SpectrumLedger.load(path).to_json() == text
    d = json.loads(text)
    assert d["schema"] == S.SCHEMA
    assert len(d["shells"][2]["atoms"]) == 4
    d["schema"] = "other/0"
    with pytest.raises(DomainError):
        S.SpectrumLedger.from_dict(d)


def test_density_monotone_convex(bis10):
    ts = np.linspace(0.001, 0.99, 1000)
    d = np.array([S.density(bis10, t, warn=False) for t in ts])
    assert np.all(np.diff(d) > 0) and np.all(np.diff(d, 2) > 0)
    assert np.all(d >= bis10.rho0)


def test_density_at_zero(bis10):
    assert abs(S.density(bis10, 1e-9) - bis10.rho0) < 1e-8


def test_density_tail_warning(bis10):
    with pytest.warns(AccuracyWarning):
        S.density(bis10, 0.9)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        S.density(bis10, 0.1)


def test_density_tail_bound_is_honest(bis10, merged12):
    # the deeper ledger's value must sit inside the shallower one's enclosure
    for t in (0.1, 0.3, 0.5):
        v, e = S.density(bis10, t, with_tail=True, warn=False)
        w = S.density(merged12, t, warn=False)
        assert v - 1e-8 <= w <= v + e + 1e-8


@pytest.mark.xfail(strict=True, reason="the shells beyond 12 still contribute ~1e-4 at t = 0.5")
def test_density_half_stable_12_to_14(merged12):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        m14 = S.merged_ledger(14)
    assert abs(S.density(merged12, 0.5, warn=False) - S.density(m14, 0.5, warn=False)) < 1e-8


def test_density_profile(bis10):
    prof = S.density_profile(bis10, [0.1, 0.5, 0.9])
    assert [t for t, _ in prof.samples] == [0.1, 0.5, 0.9]
    t, r = prof.asymptotic_ratio[2]
    assert abs(r - prof.samples[2][1] * math.sqrt(2 * math.pi * 0.1)) < 1e-14
    assert len(prof.tails) == 3


def test_reconstruct_moment(merged12):
    assert S.reconstruct_moment(merged12, 0) == pytest.approx(1 - merged12.tail_deficit, abs=1e-15)
    m = fixed_point_moments(20).values
    for n in (1, 5, 20):
        lo, hi = S.moment_tail(merged12, n)
        v = S.reconstruct_moment(merged12, n)
        assert v + lo - 1e-6 <= m[n] <= v + hi + 1e-6


@pytest.mark.xfail(strict=True, reason="dropped shells carry mass ~0.12 at p_max = 12")
def test_reconstruct_moment_examples(merged12):
    m = fixed_point_moments(20).values
    assert abs(S.reconstruct_moment(merged12, 1) - m[1]) < 1e-4
    assert abs(S.reconstruct_moment(merged12, 20) - m[20]) < 1e-6


def test_merged_methods(merged12):
    assert merged12.entries(4)[0].method == "bisect_f"
    assert merged12.entries(5)[0].method == "that_iteration"


def test_numba_and_python_kernels_agree():
    import numpy as np
    from momfix.psidyn import level_set
    from momfix.seqcore import lambda_sequence
    N = 4000
    lam = lambda_sequence(N + 2)
    slam = np.sqrt(lam * lam + 4.0)
    alpha = level_set(3).points[:4]
    a = S._limit_chunk(alpha, 3, lam, slam, N, kernel=S._orbit_kernel)
    b = S._limit_chunk(alpha, 3, lam, slam, N)
    assert np.allclose(a[0], b[0], rtol=0, atol=1e-12)
    assert np.allclose(a[1], b[1], rtol=1e-13)


def test_threads_do_not_change_results(monkeypatch):
    monkeypatch.setenv("MOMFIX_THREADS", "1")
    a = S.ledger_by_limit(3, 4000)
    monkeypatch.setenv("MOMFIX_THREADS", "3")
    b = S.ledger_by_limit(3, 4000)
    assert a.to_json() == b.to_json()
