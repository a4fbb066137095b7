"""Metric operators of exponential form and the Hermitian counterparts they produce.

The metric ansatz is ``eta = exp(2 eps (K0 + lam K+ + lam K-))``.  Its adjoint
action is linear on the algebra, so conjugating a Hamiltonian in the nine
coefficient form gives another nine coefficient form.  Each solution family
below fixes some couplings in terms of the free ones so that the image is
Hermitian.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import numerics
from .core import (KEYS, M, P, Z, CoeffSet, hermiticity_defect, substitute,
                   symmetrize)
from .errors import (ComplexCounterpart, DegenerateFamily, FamilyInapplicable,
                     NoSolution, NumericalError)
from .reps import (TruncatedRep, TwoParticleCoeffSet, TwoParticleRep,
                   assemble, build_rep, RepKind)

log = logging.getLogger(__name__)

_EXACT = (int, Fraction)


# ---------------------------------------------------------------------------
# Metric parameters and adjoint action.

@dataclass(frozen=True)
class EtaParams:
    """Parameters of ``eta = exp(2 eps K0 + 2 nu (K+ + K-))`` with ``nu = lam eps``."""

    epsilon: float
    lam: float

    def __post_init__(self):
        if abs(self.lam) > 0.5:
            raise ValueError(f"|lambda| must not exceed 1/2, got {self.lam}")

    @property
    def nu(self):
        return self.lam * self.epsilon

    @property
    def theta(self) -> float:
        return float(self.epsilon) * math.sqrt(max(1.0 - 4.0 * float(self.lam) ** 2, 0.0))

    @property
    def Y(self) -> float:
        return float(self.epsilon) * numerics.tanhc(self.theta)

    def to_dict(self):
        return {"epsilon": float(self.epsilon), "lambda": float(self.lam),
                "nu": float(self.nu), "theta": self.theta, "Y": self.Y}


@dataclass(frozen=True, eq=False)
class AdjointCoeffs:
    """``eta K_l eta^-1 = sum_m t[l][m] K_m`` in slot order ``(0, +, -)``."""

    t: list

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.t])


def adjoint_coeffs(p: EtaParams) -> AdjointCoeffs:
    """Closed-form adjoint action of the metric on ``(K0, K+, K-)``.

    Exact rational input at ``|lam| = 1/2`` (where ``theta = 0``) yields an
    exact rational matrix.
    """
    eps, lam = p.epsilon, p.lam
    nu = lam * eps
    one = 1 - 4 * lam * lam
    if eps == 0 or one == 0:
        s, ch = 1, 1
    else:
        th = float(eps) * math.sqrt(float(one))
        s, ch = numerics.sinhc(th), math.cosh(th)
    up, dn = ch + eps * s, ch - eps * s
    ns = nu * s
    t = [[0] * 3 for _ in range(3)]
    t[Z][Z] = 1 - 8 * ns * ns
    t[P][P] = up * up
    t[M][M] = dn * dn
    t[P][M] = t[M][P] = 4 * ns * ns
    t[Z][P] = -2 * ns * up
    t[Z][M] = 2 * ns * dn
    t[P][Z] = 4 * ns * up
    t[M][Z] = -4 * ns * dn
    return AdjointCoeffs(t)


def conjugate(c: CoeffSet, p: EtaParams) -> Dict[str, float]:
    """Coefficients of ``eta H eta^-1`` (not symmetrized)."""
    return substitute(c, adjoint_coeffs(p).t)


def eta_exponent(p: EtaParams, rep: TruncatedRep) -> np.ndarray:
    K0, Kp, Km = rep.gens
    e, nu = float(p.epsilon), float(p.nu)
    return 2 * e * K0 + 2 * nu * (Kp + Km)


def eta_matrix(p: EtaParams, rep: TruncatedRep, inverse: bool = False,
               norm_cap: float = numerics.EXP_NORM_CAP) -> np.ndarray:
    A = eta_exponent(p, rep)
    return numerics.matrix_exp(-A if inverse else A, norm_cap)


def trusted_block(rep: TruncatedRep) -> int:
    """Leading block on which a truncated exponential reproduces the exact metric.

    Truncation errors of ``exp`` leak downward from the cut, so only a
    quarter of the space is used unless the representation is finite.
    """
    if rep.kind.is_sl2:
        return rep.dim
    return max(min(rep.interior_dim, rep.dim // 4), 1)


def verify_adjoint(p: EtaParams, rep: TruncatedRep, block: Optional[int] = None,
                   norm_cap: float = numerics.EXP_NORM_CAP) -> float:
    """Largest 2-norm deviation of ``eta K_l eta^-1`` from the closed form on the trusted block."""
    if rep.interior_dim < 8 and not rep.kind.is_sl2:
        raise ValueError("interior block too small for a meaningful check")
    I = trusted_block(rep) if block is None else block
    eta = eta_matrix(p, rep, norm_cap=norm_cap)
    inv = eta_matrix(p, rep, inverse=True, norm_cap=norm_cap)
    t = adjoint_coeffs(p).as_array()
    K = rep.gens
    res = 0.0
    for l in range(3):
        lhs = eta @ K[l] @ inv
        rhs = sum(t[l, m] * K[m] for m in range(3))
        res = max(res, float(np.linalg.norm((lhs - rhs)[:I, :I], 2)))
    return res


# ---------------------------------------------------------------------------
# Quartic constraint polynomials in Y.

def constraint_residuals_cc(c: CoeffSet, lam: float, Y: float, printed: bool = False):
    """Residuals of the three quartic constraints in ``Y``.

    Parameters
    ----------
    printed : bool
        Use the cubic-term signs as originally typeset.  The default uses the
        corrected signs, under which the three polynomials are exact linear
        combinations of the counterpart's Hermiticity defect.
    """
    m0, mp, mm, m00, mpp, mmm, mpm, mp0, m0m = (float(getattr(c, k)) for k in KEYS)
    L = float(lam)
    Y = float(Y)
    g = -1.0 if printed else 1.0
    r1 = (mp - mm + 2 * Y * (mp + mm + 2 * L * (mpp + mmm - m0 - m00))
          + 12 * Y ** 2 * L * (mpp - mmm + L * (m0m - mp0))
          - 2 * Y ** 3 * (mp + mm - 2 * L * (m0 + m00 + 3 * (mmm + mpp))
                          + g * L ** 2 * (8 * m0m - 4 * (mm + mp - 2 * mp0))
                          + 8 * L ** 3 * (mpp + mmm + m0 - m00 - 2 * mpm))
          + Y ** 4 * (1 - 4 * L ** 2) * (mm - mp + 4 * L * (mpp - mmm + L * (m0m - mm + mp - mp0))))
    r2 = (mpp - mmm - 2 * Y * (L * (m0m + mp0) - 2 * (mmm + mpp))
          + 6 * Y ** 2 * (mpp - mmm + L * (m0m - mp0))
          - 2 * Y ** 3 * (3 * L * (mp0 + m0m) + 4 * L ** 3 * (mp0 + m0m)
                          - 8 * L ** 2 * (m00 + mpm) - 2 * (mpp + mmm))
          + Y ** 4 * (1 - 4 * L ** 2) * (mpp - mmm - 2 * L * (mp0 - m0m + 2 * L * (mmm - mpp))))
    r3 = (mp0 - m0m + 2 * Y * (m0m + mp0 + 4 * L * (mpp + mmm - m00 - mpm))
          + 24 * Y ** 2 * (L * (mpp - mmm) + L ** 2 * (m0m - mp0))
          - 2 * Y ** 3 * (mp0 + m0m - 4 * L * (m00 + mpm + 3 * (mpp + mmm))
                          + g * 12 * L ** 2 * (m0m + mp0)
                          + 16 * L ** 3 * (mpp + mmm - m00 - mpm))
          + Y ** 4 * (1 - 4 * L ** 2) * (m0m - mp0 + 4 * L * (L * (m0m - mp0) + 2 * (mpp - mmm))))
    return (r1, r2, r3)


# ---------------------------------------------------------------------------
# Family taxonomy.

FAMILY_NAMES = (
    "Sl2Example1", "Sl2Example2", "HermBilinear", "HermLinear", "GenericReducible",
    "GenericNonReducible", "LambdaZero", "LambdaHalf", "Reduced1Minus", "Reduced1Plus",
    "Reduced2Minus", "Reduced2Plus", "MultiParticle",
)


@dataclass(frozen=True)
class FamilyId:
    name: str
    sign: int = 0   # only used by LambdaHalf

    def __post_init__(self):
        if self.name not in FAMILY_NAMES:
            raise ValueError(f"unknown family {self.name!r}")
        if self.name == "LambdaHalf" and self.sign not in (1, -1):
            raise ValueError("LambdaHalf needs sign +1 or -1")
        if self.name != "LambdaHalf" and self.sign:
            raise ValueError("only LambdaHalf carries a sign")

    def __str__(self):
        if self.name == "LambdaHalf":
            return f"LambdaHalf({'+' if self.sign > 0 else '-'})"
        return self.name

    @classmethod
    def parse(cls, s) -> "FamilyId":
        if isinstance(s, FamilyId):
            return s
        t = str(s).strip().replace(" ", "")
        for pre in ("LambdaHalf(", "LambdaHalf"):
            if t.startswith(pre) and t != "LambdaHalf":
                rest = t[len(pre):].rstrip(")").lower()
                sign = {"+": 1, "plus": 1, "-": -1, "minus": -1}.get(rest)
                if sign is None:
                    break
                return cls("LambdaHalf", sign)
        return cls(t)


# Families handled by the generic solver, in classification order.
METRIC_FAMILIES = (
    FamilyId("HermBilinear"), FamilyId("HermLinear"), FamilyId("GenericReducible"),
    FamilyId("GenericNonReducible"), FamilyId("LambdaZero"), FamilyId("LambdaHalf", 1),
    FamilyId("LambdaHalf", -1), FamilyId("Reduced1Minus"), FamilyId("Reduced1Plus"),
    FamilyId("Reduced2Minus"), FamilyId("Reduced2Plus"),
)

FREE_KEYS = {
    "HermBilinear": ("mu_0", "mu_p", "mu_m", "mu_00", "mu_pm"),
    "HermLinear": ("mu_0", "mu_00", "mu_pp", "mu_mm", "mu_pm"),
    "GenericReducible": ("mu_0", "mu_00", "mu_pm", "mu_p", "mu_pp", "mu_mm"),
    "GenericNonReducible": ("mu_0", "mu_pm", "mu_pp", "mu_mm", "mu_p"),
    "LambdaZero": ("mu_0", "mu_p", "mu_00", "mu_pp", "mu_mm", "mu_pm", "mu_p0"),
    "LambdaHalf": ("mu_0", "mu_p", "mu_m", "mu_00", "mu_pm", "mu_p0", "mu_0m"),
    "Reduced1Minus": ("mu_0", "mu_p", "mu_p0"),
    "Reduced1Plus": ("mu_0", "mu_m", "mu_0m"),
    "Reduced2Minus": ("mu_0", "mu_p"),
    "Reduced2Plus": ("mu_0", "mu_m"),
}


@dataclass(frozen=True, eq=False)
class MetricSolution:
    family: FamilyId
    completed: CoeffSet
    eta: EtaParams
    counterpart: CoeffSet
    constraint_residuals: Tuple[float, ...]
    counterpart_raw_defect: float = 0.0
    extra: Dict[str, object] = field(default_factory=dict)


def _div(a, b, what):
    if b == 0 or (not isinstance(b, _EXACT) and abs(b) < 1e-14 * max(1.0, abs(a))):
        raise DegenerateFamily(f"vanishing denominator in {what}")
    return a / b


def _need_lambda(lam, allow_zero=False, allow_half=False):
    if lam is None:
        raise FamilyInapplicable("lambda is required for this family")
    if abs(lam) > 0.5 or (abs(lam) == 0.5 and not allow_half):
        raise NoSolution(f"lambda={lam} outside (-1/2, 1/2)")
    if lam == 0 and not allow_zero:
        raise FamilyInapplicable("lambda = 0 belongs to the LambdaZero family")


def _eps(R, lam, k):
    try:
        return numerics.stable_arctanh_ratio(float(R), float(lam), k)
    except numerics.DomainError as exc:
        raise NoSolution(str(exc)) from exc


def _g(c, keys):
    return [getattr(c, k) for k in keys]


def _herm_bilinear(c, lam):
    _need_lambda(lam)
    m0, mp, mm, m00, mpm = _g(c, FREE_KEYS["HermBilinear"])
    q = (m00 + mpm) / (1 + 2 * lam ** 2)
    mpp = lam ** 2 * q
    out = dict(mu_0=m0, mu_p=mp, mu_m=mm, mu_00=m00, mu_pm=mpm,
               mu_pp=mpp, mu_mm=mpp, mu_p0=2 * lam * q, mu_0m=2 * lam * q)
    R = _div(lam * (mm - mp), lam * (mm + mp) + 2 * lam ** 2 * (mpm - m0) - 2 * mpp, "HermBilinear ratio")
    return out, _eps(R, lam, 2)


def _herm_linear(c, lam):
    _need_lambda(lam)
    m0, m00, mpp, mmm, mpm = _g(c, FREE_KEYS["HermLinear"])
    mp = lam * (m0 + m00 - mpp - mmm)
    mp0 = (lam ** 2 * (mpm - m0) + mpp) / lam + mp
    m0m = (lam ** 2 * (mpm - m0) + mmm) / lam + mp
    out = dict(mu_0=m0, mu_p=mp, mu_m=mp, mu_00=m00, mu_pp=mpp, mu_mm=mmm,
               mu_pm=mpm, mu_p0=mp0, mu_0m=m0m)
    R = _div(mpp - mmm, 2 * lam * mp + 2 * lam ** 2 * (mpm - m0) - (mpp + mmm), "HermLinear ratio")
    return out, _eps(R, lam, 2)


def _generic_reducible(c, lam):
    _need_lambda(lam)
    m0, m00, mpm, mp, mpp, mmm = _g(c, FREE_KEYS["GenericReducible"])
    S, D = mpp + mmm, mpp - mmm
    m0m = (mmm - lam ** 2 * (S - mpm - m00)) / lam
    mp0 = m0m + D / lam
    mm = _div(lam * D * (S - m0 - m00) + lam * m0m * mp - 2 * mp * mmm, lam * m0m - S,
              "GenericReducible completion")
    out = dict(mu_0=m0, mu_p=mp, mu_m=mm, mu_00=m00, mu_pp=mpp, mu_mm=mmm,
               mu_pm=mpm, mu_p0=mp0, mu_0m=m0m)
    R = _div(lam * (mm - mp) + D, lam * (mm + mp) + 2 * lam ** 2 * (mpm - m0) - S,
             "GenericReducible ratio")
    return out, _eps(R, lam, 2)


def _generic_nonreducible(c, lam):
    _need_lambda(lam)
    m0, mpm, mpp, mmm, mp = _g(c, FREE_KEYS["GenericNonReducible"])
    if mpp == mmm:
        raise DegenerateFamily("mu_pp = mu_mm forces mu_p = mu_m; the Hermitian limit "
                               "is unreachable in this family")
    mm = mp - 2 * lam * (mpp - mmm)
    mp0 = 2 * mp + 2 * (mpm - m0) * lam
    m0m = mp0 - 2 * (mp - mm)
    m00 = (mp + 2 * lam ** 2 * (mm - mp + mp0)) / lam - m0 - 2 * mpp
    out = dict(mu_0=m0, mu_p=mp, mu_m=mm, mu_00=m00, mu_pp=mpp, mu_mm=mmm,
               mu_pm=mpm, mu_p0=mp0, mu_0m=m0m)
    R = _div(mmm - mpp, mmm + mpp + lam * (mp - mm - mp0), "GenericNonReducible ratio")
    return out, _eps(R, lam, 4)


def _lambda_zero(c, lam):
    m0, mp, m00, mpp, mmm, mpm, mp0 = _g(c, FREE_KEYS["LambdaZero"])
    if mpp == 0 or mmm / mpp <= 0:
        raise NoSolution("mu_mm / mu_pp must be positive")
    eps = math.log(mmm / mpp) / 8
    r = math.sqrt(mmm / mpp)   # exp(4 eps)
    out = dict(mu_0=m0, mu_p=mp, mu_m=mp * r, mu_00=m00, mu_pp=mpp, mu_mm=mmm,
               mu_pm=mpm, mu_p0=mp0, mu_0m=mp0 * r)
    return out, eps


def _half_upper(v):
    m0, mp, mm, m00, mpm, mp0, m0m = v
    Dn = m0m - mp0 - 2 * (mm - mp)
    q1 = _div((mm - mp) * mpm, -Dn, "LambdaHalf completion")
    mpp = ((mp - 2 * mm) + q1 + _div((mm - mp) * (m0m - 2 * mm + m0), Dn, "LambdaHalf completion")
           + (m0 + m00) / 2
           + _div(Dn * (mp0 - 2 * (m0 + m00 - 2 * mm)), 4 * (m0m - 2 * mm + (m0 - mpm)),
                  "LambdaHalf completion"))
    mmm = (-mp + q1 + _div((mm - mp) * (m0 + m0m - 2 * mm), Dn, "LambdaHalf completion")
           + (m0 + m00) / 2
           + _div((2 * (m0 + m00) - (m0m + 4 * mp)) * (m0m - mp0 + 2 * (mp - mm)),
                  4 * (mp0 - 2 * mp + (m0 - mpm)), "LambdaHalf completion"))
    eps = _div(Dn, 2 * (m0m + mp0 - 2 * (mp + mm) + 2 * (m0 - mpm)), "LambdaHalf epsilon")
    return mpp, mmm, eps


def _lambda_half(c, sign):
    v = _g(c, FREE_KEYS["LambdaHalf"])
    if sign < 0:
        # lam = -1/2 is the image of lam = +1/2 under K+- -> -K+-.
        m0, mp, mm, m00, mpm, mp0, m0m = v
        v = [m0, -mp, -mm, m00, mpm, -mp0, -m0m]
    mpp, mmm, eps = _half_upper(v)
    out = {k: getattr(c, k) for k in FREE_KEYS["LambdaHalf"]}
    out.update(mu_pp=mpp, mu_mm=mmm)
    half = Fraction(1, 2) if all(isinstance(x, _EXACT) for x in v) else 0.5
    return out, eps, sign * half


def _atanh_over(x, s):
    """``arctanh(x) / s`` with ``x = s q`` and the ``s -> 0`` limit ``q``."""
    if s == 0:
        return 0.0
    if abs(x) >= 1:
        raise NoSolution(f"arctanh argument {x:.6g} outside (-1, 1)")
    return math.atanh(x) / s


def _reduced(c, lam, which):
    _need_lambda(lam, allow_half=True)
    s = math.sqrt(max(1 - 4 * lam ** 2, 0.0))
    one = 1 - 2 * lam ** 2
    z = dict(mu_p=0, mu_m=0, mu_pp=0, mu_mm=0, mu_p0=0, mu_0m=0)
    if which == "Reduced1Minus":
        m0, mp, mp0 = _g(c, FREE_KEYS[which])
        mpp = lam * mp0
        out = dict(z, mu_0=m0, mu_p=mp, mu_p0=mp0, mu_pp=mpp, mu_00=mpp - m0, mu_pm=m0)
        eps = -(_atanh_over(s, s) if s else 1.0) / 2
    elif which == "Reduced1Plus":
        m0, mm, m0m = _g(c, FREE_KEYS[which])
        mmm = lam * m0m
        out = dict(z, mu_0=m0, mu_m=mm, mu_0m=m0m, mu_mm=mmm, mu_00=mmm - m0, mu_pm=m0)
        eps = (_atanh_over(s, s) if s else 1.0) / 2
    elif which == "Reduced2Minus":
        m0, mp = _g(c, FREE_KEYS[which])
        out = dict(z, mu_0=m0, mu_p=mp, mu_pp=mp / (2 * lam), mu_p0=2 * mp,
                   mu_00=2 * lam * mp - m0, mu_pm=m0)
        eps = -(_atanh_over(s / one, s) if s else 1 / one) / 4
    else:
        m0, mm = _g(c, FREE_KEYS[which])
        out = dict(z, mu_0=m0, mu_m=mm, mu_mm=mm / (2 * lam), mu_0m=2 * mm,
                   mu_00=2 * lam * mm - m0, mu_pm=m0)
        eps = (_atanh_over(s / one, s) if s else 1 / one) / 4
    return out, eps


def complete_family(family, partial: CoeffSet, lam=None):
    """Complete ``partial`` in ``family``; returns ``(CoeffSet, eps, lam)``.

    Only the family's free couplings are read from ``partial``.
    """
    fam = FamilyId.parse(family)
    n = fam.name
    if n == "HermBilinear":
        d, eps = _herm_bilinear(partial, lam)
    elif n == "HermLinear":
        d, eps = _herm_linear(partial, lam)
    elif n == "GenericReducible":
        d, eps = _generic_reducible(partial, lam)
    elif n == "GenericNonReducible":
        d, eps = _generic_nonreducible(partial, lam)
    elif n == "LambdaZero":
        if lam not in (None, 0):
            raise FamilyInapplicable("LambdaZero requires lambda = 0")
        d, eps = _lambda_zero(partial, 0)
        lam = 0.0
    elif n == "LambdaHalf":
        if lam is not None and lam != fam.sign * 0.5:
            raise FamilyInapplicable(f"{fam} requires lambda = {fam.sign * 0.5:+}")
        d, eps, lam = _lambda_half(partial, fam.sign)
    elif n.startswith("Reduced"):
        d, eps = _reduced(partial, lam, n)
    else:
        raise FamilyInapplicable(f"{fam} is not solved by complete_family")
    return CoeffSet.from_dict(d), eps, lam


def _scale(d):
    return max([1.0] + [abs(float(v.real if isinstance(v, complex) else v)) for v in d.values()])


def solve_family(family, partial: CoeffSet, lam=None, *, defect_tol: float = 1e-8,
                 **kw) -> MetricSolution:
    """Complete the couplings of ``family`` and build the Hermitian counterpart.

    Parameters
    ----------
    family : FamilyId or str
    partial : CoeffSet
        Supplies the free couplings; the dependent ones are overwritten.
    lam : float, optional
        Metric parameter.  Fixed automatically for LambdaZero and LambdaHalf.
    defect_tol : float
        Relative tolerance on the Hermiticity defect of the exact conjugate
        before it is symmetrized.

    Raises
    ------
    FamilyInapplicable
        Including its subclasses for domain and degeneracy failures.
    """
    fam = FamilyId.parse(family)
    if fam.name.startswith("Sl2"):
        return solve_sl2_example(1 if fam.name == "Sl2Example1" else 2, partial, lam, **kw)
    if fam.name == "MultiParticle":
        raise FamilyInapplicable("use solve_multiparticle for two-copy systems")
    completed, eps, lam = complete_family(fam, partial, lam)
    if isinstance(eps, float) and not math.isfinite(eps):
        raise NoSolution("epsilon is not finite")
    p = EtaParams(eps, lam)
    raw = conjugate(completed, p)
    raw_def = max(abs(x) for x in hermiticity_defect(CoeffSet.from_dict(
        {k: (v.real if isinstance(v, complex) else v) for k, v in raw.items()})))
    raw_def = float(raw_def) / _scale(raw)
    if raw_def > defect_tol:
        raise NumericalError(f"counterpart defect {raw_def:.3g} exceeds {defect_tol:g}")
    cc = constraint_residuals_cc(completed, lam, p.Y)
    return MetricSolution(fam, completed, p, symmetrize(raw), tuple(float(x) for x in cc), raw_def)


# ---------------------------------------------------------------------------
# Closed-form counterparts for the two generic families.

def _ratio_reducible(c, L):
    S, D = c.mu_pp + c.mu_mm, c.mu_pp - c.mu_mm
    return _div(L * (c.mu_m - c.mu_p) + D,
                L * (c.mu_m + c.mu_p) + 2 * L ** 2 * (c.mu_pm - c.mu_0) - S, "ratio")


def counterpart_reducible(c: CoeffSet, lam: float) -> CoeffSet:
    """Closed-form counterpart for a completed GenericReducible set.

    The square-root branch is chosen so that ``B0`` carries the sign of ``eps``.
    """
    m0, mp, mm, m00, mpp, mmm, mpm, mp0, m0m = (float(getattr(c, k)) for k in KEYS)
    L = float(lam)
    if not 0 < abs(L) < 0.5:
        raise NoSolution("need 0 < |lambda| < 1/2")
    d = mmm - mpp
    if d == 0 or d - L * (mm - mp) == 0:
        raise DegenerateFamily("mu_mm - mu_pp or mu_mm - mu_pp - lam (mu_m - mu_p) vanishes")
    one = 1 - 4 * L ** 2
    A0 = m0 - 2 * L / one * (mm - mp) * (mmm + 3 * mpp - 2 * L * mp0) / d
    den = one * (d - L * (mm - mp))
    A00 = (2 * (mmm * mp - mpp * mm) - 2 * L * d * (m0 + mpp + mmm)
           + 2 * L ** 2 * (mm - mp) * (mmm + mpp + mpm) - 8 * L ** 3 * d * (mmm + mpp - mpm)
           + 8 * L ** 4 * (mm - mp) * (mmm + mpp - mpm)) / den
    Apm = ((mpp - mmm) * (mmm + mpp - mpm) - L * (mpm * (mm - mp) - (mm + mp) * d)
           - 2 * L ** 2 * d * (mpm + m0) + 4 * L ** 3 * (mm - mp) * mpm) / den
    Ap = (-L * (mmm ** 2 - (mm - mp) * mp0 + 2 * mmm * mpp - 3 * mpp ** 2)
          + mp * (mmm + mpp) - 2 * mm * mpp
          - 2 * L ** 2 * d * (mm + mp - mp0)) / (one * L * d)
    App = (L * mp0 - mpp - 2 * L ** 2 * (mmm + mpp)) / (one * L)
    rad = 2 * mpp * (mmm + mpp) - L * (mmm + 3 * mpp) * mp0 + L ** 2 * (mp0 ** 2 + d ** 2)
    if rad < 0:
        raise ComplexCounterpart(f"negative radicand {rad:.3g}")
    sgn = np.sign(_ratio_reducible(c, L) * d)
    B0 = sgn * 2 * math.sqrt(rad) / (one * d)
    lin = L * Ap + 0.5 * (mm - mp + 2 * d * L) * B0
    quad = L * App + 0.5 * d * B0
    mix = 2 * App + (1 + 4 * L ** 2) / (2 * L) * d * B0
    return CoeffSet(mu_0=A0 + 2 * (mm - mp) * L * B0, mu_p=lin, mu_m=lin,
                    mu_00=A00 / (2 * L) + 2 * d * B0, mu_pp=quad, mu_mm=quad,
                    mu_pm=Apm + d * B0, mu_p0=mix, mu_0m=mix)


def counterpart_nonreducible(c: CoeffSet, lam: float) -> CoeffSet:
    """Closed-form counterpart for a completed GenericNonReducible set."""
    m0, mp, mm, m00, mpp, mmm, mpm, mp0, m0m = (float(getattr(c, k)) for k in KEYS)
    L = float(lam)
    if not 0 < abs(L) < 0.5:
        raise NoSolution("need 0 < |lambda| < 1/2")
    if mmm == mpp:
        raise DegenerateFamily("mu_mm = mu_pp")
    one = 1 - 4 * L ** 2
    C0 = (m0 - L * (mm - mp) - 4 * L ** 2 * (mpp + m0) + 2 * L ** 3 * (mm + mp)
          + 4 * L ** 4 * (mpm - m0)) / one
    C00 = m00 / 2 - 2 * L ** 2 * (mmm + mpp - L * mp0 - 2 * L ** 2 * (mmm - mpp)) / one
    Cpm = C0 + mpm - m0
    Cp = (mp - 2 * L * mpp - L ** 2 * (mm + mp) + 2 * L ** 3 * (mpm - m0)) / one
    Cpp = (mp0 - 4 * L * mpp - 2 * L ** 2 * mp0 - 4 * L ** 3 * (mmm - mpp)) / (2 * one)
    rad = (4 * mmm * mpp + L ** 2 * (mp0 ** 2 + 8 * mpp * (mpp - mmm)) - 2 * L * mp0 * (mmm + mpp)
           + 4 * L ** 3 * mp0 * (mmm - mpp) + 4 * L ** 4 * (mmm - mpp) ** 2)
    if rad < 0:
        raise ComplexCounterpart(f"negative radicand {rad:.3g}")
    R = _div(mmm - mpp, mmm + mpp + L * (mp - mm - mp0), "ratio")
    sgn = -np.sign(R * (mmm - mpp))
    D0 = sgn * math.sqrt(rad) / (2 * (4 * L ** 2 - 1))
    lin = Cp + 2 * L * D0
    quad = L * Cpp + (1 - 2 * L ** 2) * D0
    mix = 2 * (Cpp + 2 * L * D0)
    return CoeffSet(mu_0=C0 + 4 * L ** 2 * D0, mu_p=lin, mu_m=lin, mu_00=2 * (C00 + 4 * L ** 2 * D0),
                    mu_pp=quad, mu_mm=quad, mu_pm=Cpm + 4 * L ** 2 * D0, mu_p0=mix, mu_0m=mix)


# ---------------------------------------------------------------------------
# Classification of a complete coefficient set.

def _lambda_candidates(c: CoeffSet, fam: FamilyId):
    n = fam.name
    pairs = {
        "HermBilinear": (2 * c.mu_pp, c.mu_p0),
        "HermLinear": (c.mu_p, c.mu_0 + c.mu_00 - c.mu_pp - c.mu_mm),
        "GenericReducible": (c.mu_pp - c.mu_mm, c.mu_p0 - c.mu_0m),
        "GenericNonReducible": (c.mu_p - c.mu_m, 2 * (c.mu_pp - c.mu_mm)),
        "Reduced1Minus": (c.mu_pp, c.mu_p0),
        "Reduced1Plus": (c.mu_mm, c.mu_0m),
        "Reduced2Minus": (c.mu_p, 2 * c.mu_pp),
        "Reduced2Plus": (c.mu_m, 2 * c.mu_mm),
    }
    if n == "LambdaZero":
        return [0.0]
    if n == "LambdaHalf":
        return [fam.sign * 0.5]
    a, b = pairs[n]
    return [a / b] if b != 0 else []


def membership(c: CoeffSet, fam: FamilyId, lam) -> float:
    """Relative mismatch between ``c`` and its own completion in ``fam``."""
    d, _, _ = complete_family(fam, c, lam)
    a, b = c.as_array(), d.as_array()
    return float(np.abs(a - b).max() / max(1.0, np.abs(a).max()))


def classify_metric(c: CoeffSet, lam_hint: Optional[float] = None, tol: float = 1e-9):
    """Try every metric family on a complete coefficient set.

    Returns
    -------
    list of dict
        One entry per family with ``applicable``, ``lambda``, ``epsilon`` and
        either ``membership`` residual or the obstruction message.
    """
    out = []
    hermitian = max(abs(x) for x in hermiticity_defect(c)) == 0
    for fam in METRIC_FAMILIES:
        cands = _lambda_candidates(c, fam)
        if lam_hint is not None and lam_hint not in cands and fam.name not in ("LambdaZero", "LambdaHalf"):
            cands = cands + [lam_hint]
        entry = {"family": str(fam), "applicable": False}
        best = None
        for lam in cands:
            try:
                r = membership(c, fam, lam)
                if r > tol:
                    best = best or f"not in family (mismatch {r:.2e} at lambda={lam:.6g})"
                    continue
                sol = solve_family(fam, c, lam)
                entry.update(applicable=True, **{"lambda": float(sol.eta.lam)},
                             epsilon=float(sol.eta.epsilon), membership=r)
                break
            except (FamilyInapplicable, NumericalError, ValueError, ZeroDivisionError) as exc:
                best = f"{type(exc).__name__}: {exc}"
        if not entry["applicable"]:
            entry["reason"] = best or "lambda could not be inferred; supply solver.lambda"
        out.append(entry)
    if hermitian:
        out.insert(0, {"family": "Trivial", "applicable": True, "lambda": 0.0, "epsilon": 0.0,
                       "reason": "already Hermitian, eta = I"})
    return out


# ---------------------------------------------------------------------------
# sl2 worked examples on the PT-rescaled polynomial representation.

def solve_sl2_example(which: int, params: CoeffSet, lam: float, branch: int = 1, n: int = 8):
    """Closed-form metric for the two sl2 examples.

    Parameters
    ----------
    which : {1, 2}
        1: ``H = k0 J0 + k+ J+ + k- J-`` (PT-rescaled generators), inputs
        ``mu_p = k+ > 0`` and ``mu_m = k- > 0``.  The branch flag fixes the
        sign of ``k0 = 2 branch sqrt(k+ k-)``.
        2: input ``mu_00 = k00``; the remaining couplings follow.
    lam : float
        ``0 < |lam| < 1/2``.
    n : int
        Polynomial degree; only example 2 depends on it.

    Returns
    -------
    MetricSolution
        ``constraint_residuals`` holds the relative intertwining residual
        ``||eta H - h eta|| / (||eta|| max(1, ||H||, ||h||))`` on the finite
        representation.
    """
    _need_lambda(lam)
    s = math.sqrt(1 - 4 * lam * lam)
    if which == 1:
        kp, km = float(params.mu_p), float(params.mu_m)
        if kp <= 0 or km <= 0:
            raise FamilyInapplicable("example 1 needs positive k+ and k-")
        sg = 1 if branch >= 0 else -1
        k0 = 2 * sg * math.sqrt(kp * km)
        R = -math.sqrt(kp) / (math.sqrt(kp) - 2 * sg * lam * math.sqrt(km))
        eps = _eps(R, lam, 1)
        completed = CoeffSet(mu_0=k0, mu_p=kp, mu_m=km)
        counterpart = CoeffSet(mu_m=kp + km - k0 / (2 * lam))
        fam = FamilyId("Sl2Example1")
    elif which == 2:
        k00 = float(params.mu_00)
        k0 = -(n + 1) * k00
        completed = CoeffSet(mu_00=k00, mu_0=k0, mu_m=-n / lam * k00,
                             mu_mm=k00 / lam ** 2, mu_0m=2 * k00 / lam)
        eps = math.atanh(s) / s
        counterpart = CoeffSet(mu_00=k00, mu_0=-k0)
        fam = FamilyId("Sl2Example2")
    else:
        raise ValueError("which must be 1 or 2")
    p = EtaParams(eps, lam)
    rep = build_rep(RepKind("Sl2PolynomialPT", n))
    H = assemble(completed, rep).matrix
    eta = eta_matrix(p, rep)
    hc = assemble(counterpart, rep).matrix
    # eta H = h eta avoids inverting an eta whose condition grows like exp(|eps| n)
    nrm = lambda A: float(np.linalg.norm(A, 2))
    dev = nrm(eta @ H - hc @ eta) / (nrm(eta) * max(1.0, nrm(H), nrm(hc)))
    return MetricSolution(fam, completed, p, counterpart, (dev,), 0.0, {"n": n})


# ---------------------------------------------------------------------------
# Verification predicates.

@dataclass(frozen=True)
class VerificationReport:
    similarity_residual: float      # ||h - h^+|| / max(1, ||h||), h = eta H eta^-1
    quasi_hermiticity_residual: float   # ||H^+ rho - rho H|| / max(1, ||rho|| ||H||)
    rho_min_eig: float
    eta_condition: float
    block: int

    def passed(self, tol: float = 1e-8) -> bool:
        return (self.similarity_residual < tol and self.quasi_hermiticity_residual < tol
                and self.rho_min_eig > 0)

    def to_dict(self):
        return {k: (float(v) if not isinstance(v, int) else v) for k, v in self.__dict__.items()}


def verify_predicates(H, eta: np.ndarray, block: Optional[int] = None,
                      eta_inv: Optional[np.ndarray] = None) -> VerificationReport:
    """Check similarity to a Hermitian matrix, quasi-Hermiticity and positivity.

    Norms are 2-norms of the leading ``block`` x ``block`` sub-matrix.
    """
    Hm = H.matrix if hasattr(H, "matrix") else np.asarray(H)
    I = Hm.shape[0] if block is None else block
    cond = float(np.linalg.cond(eta))
    if not np.isfinite(cond) or cond > 1e300:
        raise NumericalError("singular metric")
    inv = np.linalg.inv(eta) if eta_inv is None else eta_inv
    h = (eta @ Hm @ inv)[:I, :I]
    nrm = lambda A: float(np.linalg.norm(A, 2))
    r1 = nrm(h - h.conj().T) / max(1.0, nrm(h))
    rho = eta.conj().T @ eta
    Hb, rb = Hm, rho
    r2 = nrm((Hb.conj().T @ rb - rb @ Hb)[:I, :I]) / max(1.0, nrm(rb[:I, :I]) * nrm(Hb[:I, :I]))
    mn = float(np.linalg.eigvalsh(rho[:I, :I]).min())
    return VerificationReport(r1, r2, mn, cond, I)


def verify_solution(sol: MetricSolution, rep: TruncatedRep, block: Optional[int] = None,
                    norm_cap: float = numerics.EXP_NORM_CAP):
    """Run :func:`verify_predicates` for a solved instance on ``rep``."""
    H = assemble(sol.completed, rep)
    eta = eta_matrix(sol.eta, rep, norm_cap=norm_cap)
    inv = eta_matrix(sol.eta, rep, inverse=True, norm_cap=norm_cap)
    return verify_predicates(H, eta, block or trusted_block(rep), inv)


def eta_spectrum_closed_form(p: EtaParams, count: int) -> np.ndarray:
    """Leading eigenvalues ``exp((m + 1/2) theta)``, ``m = 0 .. count-1``, in the two-boson rep.

    ``theta`` carries the sign of ``eps``, so the values decrease with ``m``
    when ``eps < 0``.
    """
    return np.exp((np.arange(count) + 0.5) * p.theta)


def eta_spectrum_numeric(p: EtaParams, rep: TruncatedRep, count: int,
                         norm_cap: float = numerics.EXP_NORM_CAP) -> np.ndarray:
    """Same levels from the truncated metric, ordered like :func:`eta_spectrum_closed_form`.

    Small eigenvalues of an expanding exponential drown in roundoff of order
    ``1e-16 ||eta||``, so the contracting one of ``eta`` and ``eta^-1`` is
    diagonalized and its dominant eigenvalues are used.
    """
    expand = p.theta > 0
    E = eta_matrix(p, rep, inverse=expand, norm_cap=norm_cap)
    ev = np.sort(np.linalg.eigvals(E).real)[::-1][:count]
    return 1.0 / ev if expand else ev


# ---------------------------------------------------------------------------
# Two commuting copies.

def solve_multiparticle(partial: TwoParticleCoeffSet, lam1: float, lam2: float):
    """Complete the cross couplings and compute both metric parameters.

    Only ``lin1``, ``lin2`` and ``cross['++']`` are read from ``partial``.

    Returns
    -------
    (EtaParams, EtaParams, TwoParticleCoeffSet)
    """
    for lam in (lam1, lam2):
        _need_lambda(lam)
    g = partial.get("++")
    cross = {"00": g / (lam1 * lam2), "+-": g, "-+": g, "--": g, "++": g,
             "0+": g / lam1, "0-": g / lam1, "+0": g / lam2, "-0": g / lam2}
    completed = TwoParticleCoeffSet(tuple(partial.lin1), tuple(partial.lin2), cross)
    out = []
    for (m0, mp, mm), lam in ((partial.lin1, lam1), (partial.lin2, lam2)):
        R = _div(mm - mp, mm + mp - 2 * lam * m0, "linear ratio")
        out.append(EtaParams(_eps(R, lam, 2), lam))
    return out[0], out[1], completed


def multiparticle_eta(p1: EtaParams, p2: EtaParams, tp: TwoParticleRep, inverse=False):
    e1 = eta_matrix(p1, tp.rep1, inverse)
    e2 = eta_matrix(p2, tp.rep2, inverse)
    return np.kron(e1, e2)


def multiparticle_hermiticity(partial_solution, tp: TwoParticleRep) -> float:
    """Relative Hermiticity residual of ``eta H_m eta^-1`` on the trusted product block."""
    from .reps import assemble_multiparticle
    p1, p2, c2 = partial_solution
    H = assemble_multiparticle(c2, tp).matrix
    eta = multiparticle_eta(p1, p2, tp)
    inv = multiparticle_eta(p1, p2, tp, inverse=True)
    h = eta @ H @ inv
    b1, b2 = trusted_block(tp.rep1), trusted_block(tp.rep2)
    idx = (np.arange(b1)[:, None] * tp.rep2.dim + np.arange(b2)[None, :]).ravel()
    hb = h[np.ix_(idx, idx)]
    return float(np.linalg.norm(hb - hb.conj().T, 2) / max(1.0, np.linalg.norm(hb, 2)))
