import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import metric_instances
from qh import metric
from qh.core import CoeffSet, add_casimir, hermiticity_defect
from qh.errors import FamilyInapplicable, NoSolution
from qh.metric import EtaParams, FamilyId
from qh.reps import RepKind, TwoParticleCoeffSet, build_rep, build_tensor_product

TB = build_rep(RepKind("TwoBoson"), 96)

params = st.builds(EtaParams, st.floats(-0.3, 0.3), st.floats(-0.45, 0.45))


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6), st.floats(-0.5, 0.5))
def test_adjoint_one_parameter_group(e1, e2, lam):
    t1 = metric.adjoint_coeffs(EtaParams(e1, lam)).as_array()
    t2 = metric.adjoint_coeffs(EtaParams(e2, lam)).as_array()
    t12 = metric.adjoint_coeffs(EtaParams(e1 + e2, lam)).as_array()
    assert np.allclose(t1 @ t2, t12, atol=1e-12)
    assert np.allclose(t2 @ t1, t12, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(params)
def test_adjoint_matches_matrices(p):
    assert metric.verify_adjoint(p, TB) < 1e-9


def test_adjoint_identity_and_exact_half():
    assert np.allclose(metric.adjoint_coeffs(EtaParams(0.0, 0.3)).as_array(), np.eye(3))
    from fractions import Fraction
    t = metric.adjoint_coeffs(EtaParams(Fraction(-1, 4), Fraction(1, 2))).t
    assert all(isinstance(x, (int, Fraction)) for row in t for x in row)


def test_swanson_epsilon_closed_form():
    # omega a^+a + alpha a^2 + beta a^+2 as 2 omega K0 + 2 alpha K- + 2 beta K+
    om, al, be, lam = 1.0, 0.3, 0.25, 0.1
    c = CoeffSet(mu_0=2 * om, mu_p=2 * be, mu_m=2 * al)
    sol = metric.solve_family("HermBilinear", c, lam)
    s = math.sqrt(1 - 4 * lam ** 2)
    R = (2 * al - 2 * be) / (2 * al + 2 * be - 4 * lam * om)
    assert sol.eta.epsilon == pytest.approx(math.atanh(R * s) / (2 * s), rel=1e-12)
    assert max(abs(x) for x in hermiticity_defect(sol.counterpart)) == 0
    assert metric.verify_solution(sol, TB).passed(1e-8)


def test_casimir_shift_leaves_metric():
    c = CoeffSet(mu_0=0.5, mu_p=0.3, mu_m=0.35, mu_00=0.4, mu_pm=0.3)
    a = metric.solve_family("HermBilinear", c, 0.25)
    b = metric.solve_family("HermBilinear", add_casimir(c, 0.7), 0.25)
    assert b.eta.epsilon == pytest.approx(a.eta.epsilon, abs=1e-14)
    diff = b.counterpart.as_array() - a.counterpart.as_array()
    assert np.allclose(diff, add_casimir(CoeffSet(), 0.7).as_array(), atol=1e-12)


def test_classify_lambda_half_example():
    c = CoeffSet(mu_0=-1.0, mu_p=1.0, mu_m=-1.0, mu_00=1.0, mu_pm=1.0, mu_p0=1.0, mu_0m=-1.0,
                 mu_pp=5.5, mu_mm=0.5)
    rows = {r["family"]: r for r in metric.classify_metric(c)}
    assert rows["LambdaHalf(+)"]["applicable"]
    assert rows["LambdaHalf(+)"]["epsilon"] == pytest.approx(-0.25)
    assert not rows["LambdaHalf(-)"]["applicable"]
    herm = metric.classify_metric(CoeffSet(mu_0=1.0))
    assert herm[0]["family"] == "Trivial"


@pytest.mark.parametrize("name, closed", [("GenericReducible", metric.counterpart_reducible),
                                          ("GenericNonReducible", metric.counterpart_nonreducible)])
def test_closed_form_counterparts(name, closed):
    sols, _ = metric_instances(name, 5, seed=11)
    assert len(sols) == 5
    for sol in sols:
        cf = closed(sol.completed, sol.eta.lam).as_array()
        ref = sol.counterpart.as_array()
        assert np.abs(cf - ref).max() < 1e-8 * max(1.0, np.abs(ref).max())


def test_corrected_constraints_vanish_printed_do_not():
    sols, _ = metric_instances("GenericNonReducible", 5, seed=5)
    for sol in sols:
        assert max(abs(x) for x in sol.constraint_residuals) < 1e-9
    printed = [metric.constraint_residuals_cc(s.completed, s.eta.lam, s.eta.Y, printed=True)
               for s in sols]
    assert max(abs(x) for r in printed for x in r) > 1e-6


def test_verify_predicates_identity_metric():
    H = np.diag([1.0, 2.0, 3.0]) + 0.1 * np.ones((3, 3))
    r = metric.verify_predicates(H, np.eye(3))
    assert r.similarity_residual == 0 and r.quasi_hermiticity_residual == 0
    assert r.rho_min_eig == pytest.approx(1.0) and r.passed()
    bad = metric.verify_predicates(np.array([[1.0, 1.0], [0.0, 2.0]]), np.eye(2))
    assert not bad.passed()


def test_eta_spectrum_two_routes():
    rep = build_rep(RepKind("TwoBoson"), 96)
    for p in (EtaParams(0.25, 0.3), EtaParams(-0.3, -0.1), EtaParams(0.1, 0.0)):
        a = metric.eta_spectrum_closed_form(p, 8)
        b = metric.eta_spectrum_numeric(p, rep, 8)
        assert np.allclose(a, b, rtol=1e-9)


def test_family_errors():
    c = CoeffSet(mu_0=1.0, mu_p=0.2, mu_m=0.3)
    with pytest.raises(FamilyInapplicable):
        metric.solve_family("HermBilinear", c, None)
    with pytest.raises(NoSolution):
        metric.solve_family("HermBilinear", c, 0.7)
    with pytest.raises(FamilyInapplicable):
        metric.solve_family("HermBilinear", c, 0.0)
    with pytest.raises(FamilyInapplicable):
        metric.solve_family("LambdaHalf(+)", c, -0.5)
    with pytest.raises(ValueError):
        FamilyId("LambdaHalf")
    assert FamilyId.parse("LambdaHalf(minus)") == FamilyId("LambdaHalf", -1)
    assert str(FamilyId("LambdaHalf", 1)) == "LambdaHalf(+)"
    with pytest.raises(ValueError):
        EtaParams(0.1, 0.6)


def test_sl2_example_two_intertwines():
    sol = metric.solve_sl2_example(2, CoeffSet(mu_00=0.5), 0.3, n=6)
    assert sol.constraint_residuals[0] < 1e-12
    assert sol.counterpart.mu_0 == pytest.approx(3.5)


# Two commuting copies.

LIN1, LIN2, G, LAMS = (1.0, 0.4, 0.6), (1.2, 0.45, 0.65), 0.1, (0.2, -0.3)
TP = build_tensor_product(build_rep(RepKind("TwoBoson"), 32), build_rep(RepKind("TwoBoson"), 32))


def test_multiparticle_solution_is_hermitian():
    sol = metric.solve_multiparticle(TwoParticleCoeffSet(LIN1, LIN2, {"++": G}), *LAMS)
    assert metric.multiparticle_hermiticity(sol, TP) < 1e-10
    assert sol[2].get("00") == pytest.approx(G / (LAMS[0] * LAMS[1]))


def test_multiparticle_decoupled_matches_single():
    p1, p2, _ = metric.solve_multiparticle(TwoParticleCoeffSet(LIN1, LIN2, {"++": 0.0}), *LAMS)
    s1 = metric.solve_family("HermBilinear", CoeffSet(mu_0=LIN1[0], mu_p=LIN1[1], mu_m=LIN1[2]), LAMS[0])
    s2 = metric.solve_family("HermBilinear", CoeffSet(mu_0=LIN2[0], mu_p=LIN2[1], mu_m=LIN2[2]), LAMS[1])
    assert p1.epsilon == pytest.approx(s1.eta.epsilon, rel=1e-12)
    assert p2.epsilon == pytest.approx(s2.eta.epsilon, rel=1e-12)


def test_multiparticle_negative_control():
    p1, p2, c2 = metric.solve_multiparticle(TwoParticleCoeffSet(LIN1, LIN2, {"++": G}), *LAMS)
    cross = dict(c2.cross)
    cross["00"] += 0.3
    spoiled = TwoParticleCoeffSet(c2.lin1, c2.lin2, cross)
    assert metric.multiparticle_hermiticity((p1, p2, spoiled), TP) > 1e-3
