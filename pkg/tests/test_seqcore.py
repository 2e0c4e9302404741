import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momfix import seqcore
from momfix.errors import DomainError
from momfix.psidyn import psi

import oracles


def test_moments_prefix_values():
    assert seqcore.fixed_point_moments(0).values.tolist() == [1.0]
    m = seqcore.fixed_point_moments(2)
    ref = oracles.moments(2)
    assert abs(m[1] - float(ref[1])) < 1e-15
    assert abs(m[1] - (math.sqrt(5) - 1) / 2) < 1e-15
    closed = (math.sqrt(22 + 2 * math.sqrt(5)) - math.sqrt(5) - 1) / 4
    assert abs(m[2] - closed) < 1e-15


def test_moments_against_oracle():
    m = seqcore.fixed_point_moments(300).values
    ref = np.array([float(v) for v in oracles.moments(300)])
    assert np.max(np.abs(m - ref) / ref) < 1e-13


def test_partial_sum_identity():
    m = seqcore.fixed_point_moments(10**5).values
    assert np.max(np.abs(m * np.cumsum(m) - 1.0)) < 1e-12


def test_moment_sequence_is_immutable():
    m = seqcore.fixed_point_moments(5)
    with pytest.raises(ValueError):
        m.values[0] = 2.0
    assert m == seqcore.fixed_point_moments(5)
    assert m.n_max == 5 and len(m) == 6


def test_monotonicity_of_prefixes():
    m = seqcore.fixed_point_moments(10**5).values
    lam = seqcore.lambda_sequence(10**5)
    assert np.all(np.diff(m) < 0) and np.all(m > 0)
    assert np.all(np.diff(lam) > 0)
    ratio = lam[2:] / lam[1:-1]
    assert np.all(np.diff(ratio) < 0)


def test_lambda_sequence():
    lam = seqcore.lambda_sequence(1)
    assert lam.tolist() == [0.0, 1.0]
    lam = seqcore.lambda_sequence(2000)
    assert abs(lam[2] - (1 + math.sqrt(5)) / 2) < 1e-15
    m = seqcore.fixed_point_moments(1999).values
    assert np.max(np.abs(lam[1:] * m - 1.0)) < 1e-12
    n = np.arange(1, 2001)
    assert np.all(np.sqrt(n) <= lam[1:] * (1 + 1e-15))
    assert np.all(lam[1:] <= np.sqrt(2 * n))
    assert abs(lam[1500] - float(oracles.lam(1500))) < 1e-12 * lam[1500]


def test_lambda_square_increments():
    lam = seqcore.lambda_sequence(10**6 + 1)
    inc = lam[2:] ** 2 - lam[1:-1] ** 2
    assert np.all(inc > 1) and np.all(inc <= 2 + 1e-12)
    assert abs(inc[-1] - 2) < 1e-3


def test_lambda_seeded_examples():
    np.testing.assert_allclose(seqcore.lambda_seeded(0.0, 3).values, seqcore.lambda_sequence(3), rtol=0, atol=1e-15)
    assert abs(seqcore.lambda_seeded(-1.0, 1)[1] - 0.6180339887498949) < 1e-15
    a = seqcore.lambda_seeded(seqcore.lambda_seeded(0.5, 3)[3], 2)[2]
    assert abs(a - seqcore.lambda_seeded(0.5, 5)[5]) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.integers(1, 40))
def test_lambda_seeded_preimage_identity(s, n):
    v = seqcore.lambda_seeded(s, n).values
    assert np.all(v[1:] > 0)
    back = psi(v[1:])
    assert np.all(np.abs(back - v[:-1]) <= 1e-12 * np.maximum(1.0, np.abs(v[:-1])))


def test_lambda_seeded_oracle():
    v = seqcore.lambda_seeded(-3.25, 50)[50]
    assert abs(v - float(oracles.lam_seeded(-3.25, 50))) < 1e-13


def test_g_iterate():
    assert seqcore.g_iterate(0) == math.pi / 4
    assert abs(seqcore.g_iterate(1) - 0.5535743588970452) < 1e-15
    m = seqcore.fixed_point_moments(100).values
    for n in (10, 50, 100):
        assert abs(math.tan(seqcore.g_iterate(n)) - m[n]) < 1e-10


def test_phi_matches_recursion():
    m = seqcore.fixed_point_moments(20).values
    for k in range(20):
        assert abs(seqcore.phi(m[k]) - m[k + 1]) < 4e-16


def test_asymptotic_report_scaled():
    rep = seqcore.asymptotic_report(10**6)
    assert abs(rep.m_scaled - 1) < 0.01
    assert -10**6 < rep.lambda_sq_minus_2n < 0
    with pytest.raises(DomainError):
        seqcore.asymptotic_report(1)


def test_asymptotic_report_against_oracle():
    rep = seqcore.asymptotic_report(2000)
    l = oracles.lam(2000)
    assert abs(rep.lambda_sq_minus_2n - float(l * l - 4000)) < 1e-8


def test_domain_errors():
    with pytest.raises(DomainError):
        seqcore.fixed_point_moments(-1)
    with pytest.raises(DomainError):
        seqcore.lambda_sequence(-1)
    with pytest.raises(DomainError):
        seqcore.g_iterate(-1)
