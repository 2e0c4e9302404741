import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momfix import psidyn
from momfix.errors import CapExceededError, DomainError, PoleEncounteredError, PoleError
from momfix.seqcore import lambda_sequence

import oracles

GOLD = (1 + math.sqrt(5)) / 2


def test_psi_examples():
    assert psidyn.psi(1.0) == 0.0
    assert psidyn.psi(-1.0) == 0.0
    assert abs(psidyn.psi(GOLD) - 1.0) < 1e-15
    with pytest.raises(PoleError):
        psidyn.psi(0.0)


def test_psi_prime():
    assert psidyn.psi_prime(1.0) == 2.0
    assert abs(psidyn.psi_prime(1e8) - 1.0) < 1e-15
    lam = lambda_sequence(50)
    for n in range(1, 51):
        assert psidyn.psi_prime(lam[n]) <= 1 + 1 / n + 1e-15
    with pytest.raises(PoleError):
        psidyn.psi_prime(0.0)


def test_psi_iter():
    lam = lambda_sequence(3)
    assert abs(psidyn.psi_iter(lam[3], 3)) < 1e-10
    assert psidyn.psi_iter(0.37, 0) == 0.37
    assert abs(psidyn.psi_iter((1 - math.sqrt(5)) / 2, 2)) < 1e-15


def test_psi_iter_reports_step():
    with pytest.raises(PoleEncounteredError) as exc:
        psidyn.psi_iter(1.0, 3)
    assert exc.value.step == 2


def test_preimage_pair():
    assert psidyn.preimage_pair(0.0) == (-1.0, 1.0)
    a, b = psidyn.preimage_pair(1.0)
    assert abs(a - (1 - math.sqrt(5)) / 2) < 1e-15 and abs(b - GOLD) < 1e-15


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e6, 1e6))
def test_preimage_pair_properties(y):
    a, b = psidyn.preimage_pair(y)
    assert a < 0 < b
    assert abs(a * b + 1) < 1e-12
    for z in (a, b):
        assert abs(psidyn.psi(z) - y) <= 1e-12 * max(1.0, abs(y))


def test_level_set_small():
    assert psidyn.level_set(0).points.tolist() == [0.0]
    assert psidyn.level_set(1).points.tolist() == [-1.0, 1.0]
    y2 = psidyn.level_set(2).points
    ref = sorted([(s1 + s2 * math.sqrt(5)) / 2 for s1 in (1, -1) for s2 in (1, -1)])
    assert np.max(np.abs(y2 - ref)) < 1e-12


def test_level_set_oracle():
    y = psidyn.level_set(6).points
    ref = np.array([float(v) for v in oracles.level_set(6)])
    assert np.max(np.abs(y - ref)) < 1e-13


@pytest.mark.parametrize("n", [1, 5, 9, 12])
def test_level_set_invariants(n):
    ls = psidyn.level_set(n)
    y = ls.points
    assert len(ls) == 2**n
    assert np.all(np.diff(y) > 0)
    assert np.array_equal(y, -y[::-1])
    lam = lambda_sequence(n)
    assert ls.alpha(2**n) == pytest.approx(lam[n], abs=1e-12)
    assert ls.alpha(1) == pytest.approx(-lam[n], abs=1e-12)
    prev = psidyn.level_set(n - 1).points
    img = psidyn.psi(y)
    idx = np.clip(np.searchsorted(prev, img), 0, len(prev) - 1)
    near = np.minimum(np.abs(prev[idx] - img), np.abs(prev[np.maximum(idx - 1, 0)] - img))
    assert np.max(near) < 1e-9


@pytest.mark.parametrize("n", [2, 7, 12])
def test_interlacing(n):
    union = np.sort(np.concatenate([psidyn.level_set(j).points for j in range(n)]))
    y = psidyn.level_set(n).points
    counts = np.diff(np.searchsorted(y, union))
    assert np.all(counts == 1)
    # and one point beyond each end
    assert y[0] < union[0] and y[-1] > union[-1]


def test_level_set_cap():
    with pytest.raises(CapExceededError):
        psidyn.level_set(23)
    with pytest.raises(DomainError):
        psidyn.level_set(-1)


def test_residue_index():
    assert psidyn.residue_index(3, 1) == 1
    assert psidyn.residue_index(4, 2) == 4
    assert psidyn.residue_index(17, 0) == 1
    for p in range(6):
        for k in range(1, 2**p + 1):
            assert psidyn.residue_index(k, p) == k


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10), st.data())
def test_step1_identity(p, data):
    k = data.draw(st.integers(1, 2**p))
    l = data.draw(st.integers(0, p))
    a = psidyn.level_set(p).alpha(k)
    if l == p:
        target = 0.0
    else:
        target = psidyn.level_set(p - l).alpha(psidyn.residue_index(k, p - l))
    assert abs(psidyn.psi_iter(a, l) - target) < 1e-8
