from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qh.core import (BILINEAR_SLOTS, CASIMIR, KEYS, LINEAR_SLOTS, CoeffSet, GeneratorIndex,
                     add_casimir, gamma_to_mu, hermiticity_defect, is_exactly_solvable_sl2,
                     mu_to_gamma, normal_order, substitute, symmetrize)
from qh.reps import RepKind, assemble, build_rep

coef = st.floats(-3, 3, allow_nan=False)
coeff_sets = st.lists(coef, min_size=9, max_size=9).map(CoeffSet.from_array)

TB = build_rep(RepKind("TwoBoson"), 48)
BLOCK = 40


def test_normal_order_keeps_descending_pairs():
    P, Z, M = GeneratorIndex.PLUS, GeneratorIndex.ZERO, GeneratorIndex.MINUS
    assert normal_order(P, M) == (P, M)
    assert normal_order(Z, Z) == (Z, Z)
    assert normal_order(M, P) is None
    assert normal_order(Z, P) is None
    assert P.symbol == "+"


def test_coeffset_rejects_bad_values():
    with pytest.raises(ValueError):
        CoeffSet(mu_0=float("nan"))
    with pytest.raises(TypeError):
        CoeffSet(mu_0="x")
    with pytest.raises(KeyError):
        CoeffSet.from_dict({"mu_q": 1.0})


def test_casimir_is_scalar_in_two_boson_rep():
    # both parity sectors carry k(k-1) = -3/16
    C = assemble(CASIMIR, TB).matrix[:BLOCK, :BLOCK]
    assert np.allclose(C, -3 / 16 * np.eye(BLOCK), atol=1e-12)


@given(coeff_sets, st.floats(-5, 5))
def test_add_casimir_shifts_by_scalar(c, kappa):
    d = assemble(add_casimir(c, kappa), TB).matrix - assemble(c, TB).matrix
    assert np.allclose(d[:BLOCK, :BLOCK], -3 / 16 * kappa * np.eye(BLOCK), atol=1e-9)


def test_hermiticity_defect_and_matrix():
    c = CoeffSet(mu_0=1.0, mu_p=0.5, mu_m=0.5, mu_pp=0.2, mu_mm=0.2, mu_p0=0.3, mu_0m=0.3)
    assert hermiticity_defect(c).is_zero()
    H = assemble(c, TB).matrix
    assert np.allclose(H, H.conj().T)
    d = hermiticity_defect(c.replace(mu_m=0.7))
    assert d.d_lin == pytest.approx(-0.2) and not d.is_zero()


def test_exactly_solvable_flag():
    assert is_exactly_solvable_sl2(CoeffSet(mu_0=1, mu_m=2, mu_mm=1))
    assert not is_exactly_solvable_sl2(CoeffSet(mu_p0=1))


def test_substitute_identity_and_exact():
    c = CoeffSet(**{k: Fraction(i + 1, 3) for i, k in enumerate(KEYS)})
    I = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    assert substitute(c, I) == c.to_dict()
    assert all(isinstance(v, Fraction) for v in substitute(c, I).values())


def _primed_operator(c, T, gens):
    K = [sum(T[l][m] * gens[m] for m in range(3)) for l in range(3)]
    H = sum(getattr(c, k) * K[s] for k, s in LINEAR_SLOTS.items())
    return H + sum(getattr(c, k) * K[n] @ K[m] for k, (n, m) in BILINEAR_SLOTS.items())


@settings(max_examples=40, deadline=None)
@given(coeff_sets, st.lists(coef, min_size=9, max_size=9))
def test_substitute_matches_operator_substitution(c, t):
    T = np.array(t).reshape(3, 3)
    direct = _primed_operator(c, T, TB.gens)
    via = assemble(CoeffSet.from_dict(substitute(c, T)), TB).matrix
    scale = max(1.0, np.abs(direct[:BLOCK, :BLOCK]).max())
    assert np.abs(direct - via)[:BLOCK - 4, :BLOCK - 4].max() < 1e-10 * scale


@given(st.dictionaries(st.sampled_from(KEYS), coef))
def test_symmetrize_removes_defect(d):
    full = {k: d.get(k, 0.0) for k in KEYS}
    s = symmetrize(full)
    assert max(abs(x) for x in hermiticity_defect(s)) == 0
    assert s.mu_0 == full["mu_0"]


@given(coeff_sets)
def test_gamma_round_trip(c):
    assert np.allclose(gamma_to_mu(mu_to_gamma(c)).as_array(), c.as_array(), atol=1e-12)


def test_gamma_of_oscillator():
    # 2 K0 = (p^2 + x^2)/2
    g = mu_to_gamma(CoeffSet(mu_0=2.0))
    assert g.gamma_1 == pytest.approx(0.5) and g.gamma_2 == pytest.approx(0.5)
    assert g.gamma_0 == pytest.approx(0.0)
