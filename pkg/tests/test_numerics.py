import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from modinv.numerics import (
    Tolerance,
    approx_eq,
    default_tolerance,
    frac_str,
    is_unitary_symmetric,
    mat_mul,
    mod1,
    parse_frac,
    permutation_from_matrix,
    phase,
)
from modinv.spectra import b_series_S, modular_data


def test_tolerance_bounds():
    assert Tolerance().eps == 1e-9
    for bad in (0.0, -1e-9, 1e-3, 1.0):
        with pytest.raises(ValueError):
            Tolerance(bad)


def test_tolerance_from_env(monkeypatch):
    monkeypatch.setenv("MIPF_TOL", "1e-7")
    assert default_tolerance().eps == 1e-7


def test_mat_mul_examples():
    a = np.arange(6).reshape(2, 3)
    assert np.array_equal(mat_mul(np.eye(2), a), a)
    assert np.array_equal(mat_mul(np.ones((2, 2)), np.ones((2, 2))), 2 * np.ones((2, 2)))
    with pytest.raises(ValueError, match="dimension mismatch"):
        mat_mul(np.ones((2, 3)), np.ones((2, 3)))


def test_s_times_s_dagger_is_identity():
    S = modular_data("D2:5").S
    ok, dev = approx_eq(mat_mul(S, S.conj().T), np.eye(12))
    assert ok and dev < 1e-12


def test_approx_eq_reports_deviation():
    a = np.eye(3)
    b = a.copy()
    b[0, 0] += 1e-6
    assert approx_eq(a, a) == (True, 0.0)
    ok, dev = approx_eq(a, b, Tolerance(1e-9))
    assert not ok and dev == pytest.approx(1e-6)
    with pytest.raises(ValueError, match="shape"):
        approx_eq(np.eye(2), np.eye(3))


def test_non_finite_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        approx_eq([[np.nan]], [[0.0]])


def test_unitary_symmetric():
    assert is_unitary_symmetric([[1.0]])
    assert is_unitary_symmetric(b_series_S(2))
    assert not is_unitary_symmetric(np.diag([1.0, 2.0]))
    with pytest.raises(ValueError, match="not square"):
        is_unitary_symmetric(np.ones((2, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_approx_eq_symmetric_reflexive(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = a + 1e-10 * rng.normal(size=(n, n))
    assert approx_eq(a, a)[0]
    assert approx_eq(a, b) == approx_eq(b, a)


def test_permutation_from_matrix():
    P = np.eye(4)[[2, 0, 3, 1]]
    perm, res = permutation_from_matrix(P)
    assert perm == [2, 0, 3, 1] and res == 0
    with pytest.raises(ValueError):
        permutation_from_matrix(np.full((2, 2), 0.5))


@given(st.fractions())
def test_mod1_range_and_roundtrip(x):
    y = mod1(x)
    assert 0 <= y < 1 and (x - y).denominator == 1
    assert parse_frac(frac_str(x)) == x


def test_phase_exact_reduction():
    assert phase(Fraction(1, 4)) == pytest.approx(1j)
    assert phase(Fraction(10**12 + 1, 2)) == pytest.approx(-1)
