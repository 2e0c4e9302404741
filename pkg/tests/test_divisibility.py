import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momfix import divisibility as dv
from momfix.errors import DomainError
from momfix.seqcore import fixed_point_moments

import oracles


def test_polynomial_differences_vanish():
    # Delta^{d+1} of a degree-d polynomial is identically zero
    n = np.arange(30, dtype=float)
    a = 3 * n**3 - n + 2
    rows = dv.signed_differences(a, 5)
    assert np.all(rows[4] == 0) and np.all(rows[5] == 0)
    assert np.all(rows[3] == -18)


def test_triangle_against_mpmath():
    m = fixed_point_moments(40).values
    ref = oracles.signed_differences(m, 15)
    rows = dv.signed_differences(m, 15)
    for j in range(16):
        exact = np.array([float(v) for v in ref[j]])  # already signed
        assert np.max(np.abs(rows[j] - exact)) < 1e-15


def test_noise_floor_is_small():
    m = fixed_point_moments(79)
    assert dv.noise_floor(m, 20) < 1e-8


def test_harmonic_reciprocals_pass():
    rep = dv.completely_monotone_check([1 / (n + 1) for n in range(40)], 20, 1e-12)
    assert rep.passed and bool(rep) and rep.pass_
    assert rep.first_violation is None
    assert "order 20" in rep.describe()


def test_alternating_sequence_fails_at_order_one():
    a = [1.0, 0.2, 0.5, 0.1, 0.3]
    rep = dv.completely_monotone_check(a, 3, 1e-12)
    assert not rep.passed
    assert rep.first_violation == (1, 1)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
def test_infinite_divisibility(alpha):
    rep = dv.infdiv_check(alpha, 60, 15, 1e-8)
    assert rep.passed
    assert rep.max_order_checked == 15


def test_infdiv_rejects_nonpositive_alpha():
    with pytest.raises(DomainError):
        dv.infdiv_check(0.0)


def test_counterexample_rejected():
    b = 1 / (np.arange(40) + 1.0) ** 2
    rep = dv.in_image_of_t(b, 10, 1e-9)
    assert not rep.passed
    assert rep.first_violation == (1, 0)
    assert "exceeds 1" in rep.describe()


def test_fixed_point_in_image():
    assert dv.in_image_of_t(fixed_point_moments(39), 10, 1e-9).passed


@st.composite
def hausdorff(draw, length=30):
    k = draw(st.integers(1, 4))
    t = np.array(draw(st.lists(st.floats(0.0, 0.95), min_size=k, max_size=k)))
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k)))
    w /= w.sum()
    n = np.arange(length)
    a = (w[None, :] * t[None, :] ** n[:, None]).sum(axis=1)
    a[0] = 1.0
    return a


@settings(max_examples=40, deadline=None)
@given(hausdorff())
def test_moment_sequences_pass(a):
    assert dv.completely_monotone_check(a, 8, 1e-12).passed


@settings(max_examples=40, deadline=None)
@given(hausdorff())
def test_image_of_moment_sequence_is_recognised(a):
    from momfix.transform import t_map
    assert dv.in_image_of_t(t_map(a), 6, 1e-9).passed


def test_log_convexity_examples():
    xs = np.linspace(0.1, 5, 50)
    assert dv.log_convexity_check(list(zip(xs, np.exp(xs**2))), 1e-12)
    assert not dv.log_convexity_check(list(zip(xs, np.exp(-xs**2))), 1e-12)
    with pytest.raises(DomainError):
        dv.log_convexity_check([(0, 1), (1, 1), (3, 1)], 1e-9)
    with pytest.raises(DomainError):
        dv.log_convexity_check([(0, 1), (1, -1), (2, 1)], 1e-9)


def test_bad_order():
    with pytest.raises(DomainError):
        dv.signed_differences([1.0, 0.5], 2)
