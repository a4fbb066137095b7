import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qh.numerics import (DomainError, NumericalError, convergence_scan, eigenvalues, matrix_exp,
                         nearest_match, rel_err, sinhc, stable_arctanh_ratio, tanhc)

small = arrays(np.float64, (6, 6), elements=st.floats(-1, 1))


@settings(max_examples=30, deadline=None)
@given(small)
def test_expm_inverse_round_trip(A):
    assert np.allclose(matrix_exp(A) @ matrix_exp(-A), np.eye(6), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(small, arrays(np.float64, 6, elements=st.floats(-2, 2)))
def test_expm_of_similar_diagonal(Q, d):
    # exp(S D S^-1) = S exp(D) S^-1
    S = np.eye(6) + 0.3 * Q
    Si = np.linalg.inv(S)
    lhs = matrix_exp(S @ np.diag(d) @ Si)
    rhs = S @ np.diag(np.exp(d)) @ Si
    assert np.allclose(lhs, rhs, atol=1e-9 * np.linalg.cond(S) ** 2)


def test_expm_rejections():
    with pytest.raises(NumericalError):
        matrix_exp(60 * np.eye(3))
    assert matrix_exp(60 * np.eye(3), norm_cap=70)[0, 0] == pytest.approx(np.exp(60))
    with pytest.raises(NumericalError):
        matrix_exp(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        matrix_exp(np.ones((2, 3)))


def test_eigenvalues_sorted():
    w = eigenvalues(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(w, [-1, 2, 3])
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert np.allclose(eigenvalues(rot), [-1j, 1j])
    assert eigenvalues(np.array([[1.0, 2.0], [2.0, 1.0]]), hermitian_hint=True).dtype.kind == "f"


@pytest.mark.parametrize("x", [0.0, 1e-6, 1e-3, 0.5, 3.0, -2.0])
def test_sinhc_tanhc(x):
    ref_s = np.sinh(x) / x if x else 1.0
    ref_t = np.tanh(x) / x if x else 1.0
    assert sinhc(x) == pytest.approx(ref_s, rel=1e-14)
    assert tanhc(x) == pytest.approx(ref_t, rel=1e-14)
    assert sinhc(1j * 0.7) == pytest.approx(np.sin(0.7) / 0.7, rel=1e-14)


@given(st.floats(-0.49, 0.49), st.floats(-2.0, 2.0), st.sampled_from([1, 2]))
def test_arctanh_ratio_round_trip(lam, eps, k):
    th = eps * np.sqrt(1 - 4 * lam * lam)
    R = np.tanh(k * th) / np.sqrt(1 - 4 * lam * lam)
    assert stable_arctanh_ratio(R, lam, k) == pytest.approx(eps, rel=1e-9, abs=1e-12)


def test_arctanh_ratio_edges():
    assert stable_arctanh_ratio(0.8, 0.5, 2) == 0.4
    assert stable_arctanh_ratio(0.8, -0.5, 1) == 0.8
    with pytest.raises(DomainError):
        stable_arctanh_ratio(2.0, 0.0, 1)
    with pytest.raises(DomainError):
        stable_arctanh_ratio(0.1, 0.6, 1)
    with pytest.raises(DomainError):
        stable_arctanh_ratio(float("inf"), 0.0, 1)


def test_nearest_match():
    m = nearest_match([1.0, 2.0, 2.1], [5.0, 2.05, 0.9, 2.2])
    assert np.allclose(m, [0.9, 2.05, 2.2])
    with pytest.raises(ValueError):
        nearest_match([1, 2], [1])


def test_rel_err_floor():
    assert rel_err(1e-3, 0.0) == pytest.approx(1e-3)
    assert rel_err(11.0, 10.0) == pytest.approx(0.1)


def test_convergence_scan():
    exact = np.arange(10) + 0.5
    rep = convergence_scan(lambda d: np.concatenate([exact[:8], [d * 1.0, d + 1.0]]), (16, 24, 32),
                           n_levels=8)
    assert rep.converged_count == 8 and np.allclose(rep.levels, exact[:8])
    drifting = convergence_scan(lambda d: exact + 1.0 / d, (10, 20), n_levels=3, tol=1e-6)
    assert drifting.converged_count == 0
    with pytest.raises(ValueError):
        convergence_scan(lambda d: exact, (20, 10))
