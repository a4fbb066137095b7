import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qh.core import CASIMIR, CoeffSet
from qh.reps import (KINDS, RepError, RepKind, TwoParticleCoeffSet, assemble, assemble_multiparticle,
                     build_rep, build_tensor_product, commutator_residual,
                     hamiltonian_convergence, pt_rescale, x_p_operators)

KIND_SAMPLES = [RepKind("TwoBoson"), RepKind("TwoBoson", 2.5), RepKind("HolsteinPrimakoff"),
                RepKind("MultiBoson", 3), RepKind("DiscreteSeries", 0.75), RepKind("TwoMode"),
                RepKind("Sl2Polynomial", 6), RepKind("Sl2PolynomialPT", 6)]


@pytest.mark.parametrize("kind", KIND_SAMPLES, ids=str)
def test_commutators_hold_on_interior(kind):
    rep = build_rep(kind, 60)
    assert commutator_residual(rep) < 1e-12


def test_discrete_series_small():
    rep = build_rep(RepKind("DiscreteSeries", 0.25), 3)
    assert np.allclose(np.diag(rep.K0), [0.25, 1.25, 2.25])


@pytest.mark.parametrize("k", [0.25, 0.75, 1.0, 2.5])
def test_discrete_series_casimir(k):
    rep = build_rep(RepKind("DiscreteSeries", k), 30)
    C = assemble(CASIMIR, rep).matrix[:25, :25]
    assert np.allclose(C, k * (k - 1) * np.eye(25), atol=1e-10)


def test_pt_rescaled_sl2():
    rep = build_rep(RepKind("Sl2PolynomialPT", 1))
    assert rep.Km[0, 1] == pytest.approx(-1j)
    plain = build_rep(RepKind("Sl2Polynomial", 4))
    assert np.allclose(pt_rescale(plain).Kp, 1j * plain.Kp)
    with pytest.raises(RepError):
        pt_rescale(build_rep(RepKind("TwoBoson"), 8))


def test_sl2_dimension_is_fixed_by_degree():
    rep = build_rep(RepKind("Sl2Polynomial", 5), 100)
    assert rep.dim == 6 and rep.interior_dim == 6


@pytest.mark.parametrize("bad", [("Nope", None), ("TwoBoson", -1.0), ("DiscreteSeries", None),
                                 ("MultiBoson", 1.5), ("Sl2Polynomial", -1)])
def test_invalid_kinds(bad):
    with pytest.raises(RepError):
        RepKind(*bad)


def test_two_boson_matches_ladder():
    rep = build_rep(RepKind("TwoBoson"), 20)
    a, ad = rep.a, rep.adag
    assert np.allclose(rep.Kp, ad @ ad / 2)
    assert np.allclose(rep.K0[:19, :19], ((ad @ a + 0.5 * np.eye(20)) / 2)[:19, :19])
    x, p = x_p_operators(rep)
    comm = x @ p - p @ x
    assert np.allclose(comm[:19, :19], 1j * np.eye(19))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6))
def test_hermitian_coefficients_give_hermitian_matrix(v):
    c = CoeffSet(mu_0=v[0], mu_p=v[1], mu_m=v[1], mu_00=v[2], mu_pp=v[3], mu_mm=v[3],
                 mu_pm=v[4], mu_p0=v[5], mu_0m=v[5])
    for kind in (RepKind("TwoBoson"), RepKind("DiscreteSeries", 1.5)):
        H = assemble(c, build_rep(kind, 24)).matrix
        assert np.allclose(H, H.conj().T, atol=1e-12)


def test_tensor_product():
    r1 = build_rep(RepKind("TwoBoson"), 6)
    r2 = build_rep(RepKind("DiscreteSeries", 0.5), 5)
    tp = build_tensor_product(r1, r2)
    assert tp.dim == 30
    for A in tp.K1:
        for B in tp.K2:
            assert np.abs(A @ B - B @ A).max() == 0
    H = assemble_multiparticle(TwoParticleCoeffSet((1.0, 0.3, 0.2)), tp).matrix
    single = assemble(CoeffSet(mu_0=1.0, mu_p=0.3, mu_m=0.2), r1).matrix
    assert np.allclose(H, np.kron(single, np.eye(5)))
    with pytest.raises(RepError):
        build_tensor_product(build_rep(RepKind("TwoBoson"), 100), build_rep(RepKind("TwoBoson"), 100))
    with pytest.raises(KeyError):
        TwoParticleCoeffSet(cross={"x+": 1.0})


def test_offset_and_convergence():
    # 2 K0 = a^+ a + 1/2 is diagonal: exact levels n + 1/2
    c = CoeffSet(mu_0=2.0)
    rep = build_rep(RepKind("TwoBoson"), 16)
    H = assemble(c, rep, offset=1.0).matrix
    assert np.allclose(np.diag(H), np.arange(16) + 1.5)
    rep_ = hamiltonian_convergence(CoeffSet(mu_0=2.0, mu_p=0.2, mu_m=0.2), RepKind("TwoBoson"),
                                   (48, 64, 96), n_levels=8)
    assert rep_.converged_count == 8
    # Hermitian Swanson levels: sqrt(mu_0^2 - 4 mu_p mu_m) (n + 1/2) / 2
    w = np.sqrt(4 - 4 * 0.04)
    assert np.allclose(rep_.levels, w * (np.arange(8) + 0.5) / 2, atol=1e-9)


def test_kinds_constant():
    assert set(KINDS) >= {"TwoBoson", "TwoMode", "Sl2PolynomialPT"}
