"""Generalized Bogoliubov maps onto a harmonic oscillator plus Casimir.

With ``d = beta a - delta a^+`` and ``c = -alpha a + gamma a^+`` and
``beta gamma - alpha delta = 1`` the operators ``Kc0 = (cd + 1/2)/2``,
``Kc+ = c^2/2`` and ``Kc- = d^2/2`` obey the same algebra as ``K``.  If the
Hamiltonian expressed in ``Kc`` has no ladder terms, its spectrum is a
quadratic polynomial in the number ``n`` of ``cd``.  Only ``y = alpha/gamma``
and ``z = delta/beta`` matter for the reduction.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .core import KEYS, CoeffSet, substitute
from .errors import ConfigError, DegenerateFamily, FamilyInapplicable, NoSolution

log = logging.getLogger(__name__)

BOG_FAMILIES = ("Generic", "HermLinear", "HermBilinear", "AsymDeltaZero", "AsymAlphaZero")


class YZSingular(FamilyInapplicable):
    """``yz = 1`` makes the map singular; ``yz = -1`` is excluded as unphysical."""


@dataclass(frozen=True)
class BogParams:
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        if self.beta == 0 or self.gamma == 0:
            raise ConfigError("beta and gamma must be nonzero")
        det = self.beta * self.gamma - self.alpha * self.delta
        if abs(det - 1) > 1e-12:
            raise ConfigError(f"beta*gamma - alpha*delta = {det} != 1")

    @property
    def y(self):
        return self.alpha / self.gamma

    @property
    def z(self):
        return self.delta / self.beta

    @property
    def pt_mode(self) -> bool:
        """True when all four parameters are purely imaginary."""
        vals = (self.alpha, self.beta, self.gamma, self.delta)
        return all(abs(complex(v).real) < 1e-14 for v in vals)

    @classmethod
    def from_yz(cls, y, z, beta=1.0) -> "BogParams":
        """Representative with the given ``y, z``; ``beta`` fixes the free scale."""
        _check_yz(y, z)
        gamma = 1.0 / (beta * (1 - y * z))
        return cls(y * gamma, beta, gamma, z * beta)


def _check_yz(y, z):
    yz = y * z
    if abs(yz - 1) < 1e-14:
        raise YZSingular("yz = 1 makes the transformation singular")
    if abs(yz + 1) < 1e-14:
        raise YZSingular("yz = -1 is excluded")


def mixing_matrix(p: BogParams) -> Tuple[np.ndarray, np.ndarray]:
    """Matrices with ``K = M Kc`` and ``Kc = Minv K``; rows and columns ordered (0, +, -)."""
    a, b, g, d = (complex(x) for x in (p.alpha, p.beta, p.gamma, p.delta))
    M = np.array([[g * b + d * a, b * d, a * g],
                  [2 * a * b, b * b, a * a],
                  [2 * g * d, d * d, g * g]])
    Minv = np.array([[g * b + d * a, -g * d, -a * b],
                     [-2 * g * a, g * g, a * a],
                     [-2 * d * b, d * d, b * b]])
    return M, Minv


def c_d_matrices(p: BogParams, a: np.ndarray, adag: np.ndarray):
    """Truncated ``c`` and ``d`` built from boson ladder matrices."""
    c = -p.alpha * a + p.gamma * adag
    d = p.beta * a - p.delta * adag
    return c, d


# ---------------------------------------------------------------------------
# Reduction equations.

def residuals_cong(c: CoeffSet, y, z):
    """Six polynomial conditions for the ladder terms in ``Kc`` to vanish."""
    m0, mp, mm, m00, mpp, mmm, mpm, mp0, m0m = (getattr(c, k) for k in KEYS)
    S = mpm + m00
    return (
        mpp * y ** 4 + mp0 * y ** 3 + S * y ** 2 + m0m * y + mmm,
        mmm * z ** 4 + m0m * z ** 3 + S * z ** 2 + mp0 * z + mpp,
        mp0 * y ** 3 * z + 4 * mpp * y ** 3 + 2 * S * y ** 2 * z + 3 * mp0 * y ** 2
        + 3 * m0m * y * z + 2 * S * y + 4 * mmm * z + m0m,
        m0m * y * z ** 3 + 4 * mmm * z ** 3 + 2 * S * y * z ** 2 + 3 * m0m * z ** 2
        + 3 * mp0 * y * z + 2 * S * z + 4 * mpp * y + mp0,
        (m0m - mm) * y * z ** 3 + (2 * mpm + m00 - m0) * y * z ** 2 + 2 * mmm * z ** 3
        + (2 * mp0 - mp) * y * z + (mm + m0m) * z ** 2 + (m0 + m00) * z + 2 * mpp * y + mp,
        (mp0 - mp) * y ** 3 * z + (2 * mpm + m00 - m0) * y ** 2 * z + 2 * mpp * y ** 3
        + (2 * m0m - mm) * y * z + (mp + mp0) * y ** 2 + (m0 + m00) * y + 2 * mmm * z + mm,
    )


def residuals_s16(c: CoeffSet, y, z, printed: bool = False):
    """Reduced six equations, valid when ``alpha, delta != 0``.

    ``printed=True`` swaps ``mu_p`` and ``mu_m`` in the second equation as
    originally typeset; that form is not satisfied by genuine solutions.
    """
    m0, mp, mm, m00, mpp, mmm, mpm, mp0, m0m = (getattr(c, k) for k in KEYS)
    a, b = (mm, mp) if printed else (mp, mm)
    return (
        z ** 2 * (m00 + mpm) - mpp * (1 + 4 * y * z + y ** 2 * z ** 2),
        z ** 2 * (mpm - m0) - mpp * (1 + y * z) ** 2 - a * z - b * z ** 3,
        mmm * z ** 2 - mpp * y ** 2,
        mp0 * z + 2 * mpp * (1 + y * z),
        mm * z - mp * y,
        m0m * z - mp0 * y,
    )


# ---------------------------------------------------------------------------
# Oscillator form.

@dataclass(frozen=True)
class OscillatorForm:
    """``E_n = quad n^2 + lin n + const`` with ``n`` the eigenvalue of ``cd``."""

    quad: complex
    lin: complex
    const: complex
    branch: int = 1

    def energy(self, n):
        n = np.asarray(n)
        return self.quad * n * n + self.lin * n + self.const

    def to_dict(self):
        f = lambda v: complex(v).real if abs(complex(v).imag) < 1e-300 else [complex(v).real, complex(v).imag]
        return {"quad": f(self.quad), "lin": f(self.lin), "const": f(self.const), "branch": self.branch}


def spectrum(form: OscillatorForm, n_max: int) -> np.ndarray:
    """Closed-form levels ``E_0 .. E_{n_max}``."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    e = form.energy(np.arange(n_max + 1))
    return e.real if np.all(np.abs(np.imag(e)) == 0) else e


def oscillator_abc(c: CoeffSet, y, z):
    """Coefficients ``(A, B, C)`` of ``E_n = A n(n-1) + B n + C`` for a reduced set.

    Valid when :func:`residuals_cong` vanishes at ``(y, z)``.
    """
    _check_yz(y, z)
    m0, mp, mm, m00, mpp, mmm, mpm, mp0, m0m = (getattr(c, k) for k in KEYS)
    D = (y * z - 1) ** 2
    y2, z2, yz = y * y, z * z, y * z
    A = (m00 * y2 * z2 + 4 * m00 * yz + m00 + 3 * m0m * y * z2 + 3 * m0m * z + 6 * mmm * z2
         + 3 * mp0 * y2 * z + 3 * mp0 * y + mpm * y2 * z2 + 4 * mpm * yz + mpm + 6 * mpp * y2) / (4 * D)
    B = (-m0 * y2 * z2 + m0 + m00 * y2 * z2 + 4 * m00 * yz + m00 + 4 * m0m * y * z2 + 2 * m0m * z
         - 2 * mm * y * z2 + 2 * mm * z + 6 * mmm * z2 - 2 * mp * y2 * z + 2 * mp * y
         + 4 * mp0 * y2 * z + 2 * mp0 * y + 2 * mpm * y2 * z2 + 4 * mpm * yz + 6 * mpp * y2) / (2 * D)
    C = (-4 * m0 * y2 * z2 + 4 * m0 + m00 * y2 * z2 + 10 * m00 * yz + m00 + 10 * m0m * y * z2
         + 2 * m0m * z - 8 * mm * y * z2 + 8 * mm * z + 12 * mmm * z2 - 8 * mp * y2 * z + 8 * mp * y
         + 10 * mp0 * y2 * z + 2 * mp0 * y + 8 * mpm * y2 * z2 + 4 * mpm * yz + 12 * mpp * y2) / (16 * D)
    return A, B, C


def form_from_abc(A, B, C, branch=1) -> OscillatorForm:
    return OscillatorForm(A, B - A, C, branch)


def transformed_coeffs(c: CoeffSet, p: BogParams) -> Dict[str, complex]:
    """Coefficients of ``H`` in the ordered ``Kc`` basis via the mixing matrix."""
    M, _ = mixing_matrix(p)
    return substitute(c, M.tolist())


def oscillator_via_mixing(c: CoeffSet, p: BogParams, tol: float = 1e-9) -> OscillatorForm:
    """Independent route: substitute ``K = M Kc`` and read off the diagonal part.

    Uses ``Kc+ Kc- = Kc0^2 - Kc0 + 3/16`` and ``Kc0 = n/2 + 1/4``.
    """
    t = transformed_coeffs(c, p)
    scale = max(1.0, max(abs(v) for v in t.values()))
    ladder = max(abs(t[k]) for k in ("mu_p", "mu_m", "mu_pp", "mu_mm", "mu_p0", "mu_0m"))
    if ladder > tol * scale:
        raise FamilyInapplicable(f"ladder terms survive the map (size {ladder:.3g})")
    a0, a00, apm = t["mu_0"], t["mu_00"], t["mu_pm"]
    # E = a0 k + a00 k^2 + apm (k^2 - k + 3/16), k = n/2 + 1/4
    q = a00 + apm
    l = a0 - apm
    quad = q / 4
    lin = q / 4 + l / 2
    const = q / 16 + l / 4 + 3 * apm / 16
    return OscillatorForm(quad, lin, const)


# ---------------------------------------------------------------------------
# Solution families.

@dataclass(frozen=True, eq=False)
class BogSolution:
    family: str
    completed: CoeffSet
    y: complex
    z: complex
    form: OscillatorForm
    reality_ok: bool
    params: Optional[BogParams] = None
    residuals: Tuple[complex, ...] = ()
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def trusted(self) -> bool:
        """Vacuum of ``d`` normalizable, so truncated diagonalization is meaningful."""
        return abs(self.y) < 1 and abs(self.z) < 1

    def levels(self, n_max: int):
        return spectrum(self.form, n_max)


def _real_or_complex(x):
    return x.real if isinstance(x, complex) and x.imag == 0 else x


def _finish(family, d, y, z, form, reality, **extra):
    c = CoeffSet.from_dict({k: float(np.real(v)) for k, v in d.items()})
    y, z = _real_or_complex(y), _real_or_complex(z)
    try:
        params = BogParams.from_yz(y, z)
    except FamilyInapplicable:
        raise
    res = residuals_cong(c, y, z)
    return BogSolution(family, c, y, z, form, bool(reality), params, tuple(res), dict(extra))


def _nz(x, what):
    if x == 0:
        raise DegenerateFamily(f"{what} must be nonzero")


def solve_generic(partial: CoeffSet, branch: int = 1) -> BogSolution:
    """Generic family; free couplings ``mu_p, mu_m, mu_pp, mu_p0, mu_0``.

    ``theta^2 = mu_p0^2/16 - mu_pp^2 mu_m / mu_p``.  The linear term of the
    spectrum carries the sign opposite to the branch used for ``y``.
    """
    mp, mm, mpp, mp0, m0 = (float(getattr(partial, k)) for k in ("mu_p", "mu_m", "mu_pp", "mu_p0", "mu_0"))
    for v, w in ((mp, "mu_p"), (mm, "mu_m"), (mpp, "mu_pp"), (mp0, "mu_p0")):
        _nz(v, w)
    sg = 1 if branch >= 0 else -1
    th2 = mp0 ** 2 / 16 - mpp ** 2 * mm / mp
    th = cmath.sqrt(th2) if th2 < 0 else math.sqrt(th2)
    y = (sg * th - mp0 / 4) / mpp
    z = y * mp / mm
    r = mm / mp
    d = dict(mu_0=m0, mu_p=mp, mu_m=mm, mu_pp=mpp, mu_mm=r * r * mpp, mu_p0=mp0, mu_0m=r * mp0,
             mu_pm=m0 - mp * mp0 / (2 * mpp) + mp0 ** 2 / (4 * mpp),
             mu_00=-m0 + mp * mp0 / (2 * mpp) + 2 * mm * mpp / mp)
    quad = th2 / mpp
    lin_half = -sg * th * (mp0 - 2 * mp) / (2 * mpp)
    const = 3 * m0 / 16 - 3 * mp * mp0 / (32 * mpp) + mp0 ** 2 / (16 * mpp) - 5 * mm * mpp / (8 * mp)
    form = OscillatorForm(quad, quad + lin_half, lin_half / 2 + const, sg)
    reality = mpp > 0 and th2 > 0
    return _finish("Generic", d, y, z, form, reality, theta2=th2)


def solve_herm_linear(partial: CoeffSet, branch: int = 1) -> BogSolution:
    """``mu_p = mu_m = 0``; free couplings ``mu_pp, mu_p0, mu_0, mu_00``."""
    if partial.mu_p != 0 or partial.mu_m != 0:
        raise FamilyInapplicable("HermLinear needs mu_p = mu_m = 0")
    mpp, mp0, m0, m00 = (float(getattr(partial, k)) for k in ("mu_pp", "mu_p0", "mu_0", "mu_00"))
    _nz(mpp, "mu_pp")
    _nz(mp0, "mu_p0")
    S = m0 + m00
    _nz(S, "mu_0 + mu_00")
    sg = 1 if branch >= 0 else -1
    tb2 = mp0 ** 2 / 16 - mpp * S / 2
    tb = cmath.sqrt(tb2) if tb2 < 0 else math.sqrt(tb2)
    y = (sg * tb - mp0 / 4) / mpp
    z = y * 2 * mpp / S
    d = dict(mu_0=m0, mu_p=0.0, mu_m=0.0, mu_00=m00, mu_pp=mpp, mu_mm=S * S / (4 * mpp),
             mu_0m=mp0 * S / (2 * mpp), mu_p0=mp0, mu_pm=m0 + mp0 ** 2 / (4 * mpp))
    quad = tb2 / mpp
    lin_half = -sg * tb * mp0 / (2 * mpp)
    const = mp0 ** 2 / (16 * mpp) - 5 * m00 / 16 - m0 / 8
    form = OscillatorForm(quad, quad + lin_half, lin_half / 2 + const, sg)
    reality = mpp > 0 and mp0 ** 2 > 8 * mpp * S
    return _finish("HermLinear", d, y, z, form, reality, theta2=tb2)


def solve_herm_bilinear(partial: CoeffSet, branch: int = 1) -> BogSolution:
    """No bilinear ladder terms; ``mu_pm = -mu_00``; free ``mu_p, mu_m, mu_0, mu_00``."""
    if any(getattr(partial, k) != 0 for k in ("mu_pp", "mu_mm", "mu_p0", "mu_0m")):
        raise FamilyInapplicable("HermBilinear needs mu_pp = mu_mm = mu_p0 = mu_0m = 0")
    mp, mm, m0, m00 = (float(getattr(partial, k)) for k in ("mu_p", "mu_m", "mu_0", "mu_00"))
    _nz(mp, "mu_p")
    _nz(mm, "mu_m")
    S = m0 + m00
    sg = 1 if branch >= 0 else -1
    tt2 = S * S / 4 - mp * mm
    tt = cmath.sqrt(tt2) if tt2 < 0 else math.sqrt(tt2)
    y = (sg * tt - S / 2) / mp
    z = y * mp / mm
    d = dict(mu_0=m0, mu_p=mp, mu_m=mm, mu_00=m00, mu_pm=-m00,
             mu_pp=0.0, mu_mm=0.0, mu_p0=0.0, mu_0m=0.0)
    form = OscillatorForm(0.0, sg * tt, sg * tt / 2 - 3 * m00 / 16, sg)
    reality = tt2 > 0
    return _finish("HermBilinear", d, y, z, form, reality, theta2=tt2)


def solve_asymmetric(which: str, partial: CoeffSet, param: float) -> BogSolution:
    """One-sided families.

    Parameters
    ----------
    which : {"DeltaZero", "AlphaZero"}
        DeltaZero has ``z = 0`` and free ``mu_m, mu_mm, mu_0`` with parameter
        ``y``.  AlphaZero is its mirror with ``y = 0``, free ``mu_p, mu_pp,
        mu_0`` and parameter ``z``.
    param : float
        The nonzero ``y`` (resp. ``z``).
    """
    w = which.replace("Asym", "")
    if param == 0:
        raise DegenerateFamily("the transformation parameter must be nonzero")
    m0 = float(partial.mu_0)
    if w == "DeltaZero":
        y, z = float(param), 0.0
        mm, mmm = float(partial.mu_m), float(partial.mu_mm)
        _nz(mmm, "mu_mm")
        m0m = -2 * mmm / y
        m00 = -m0 - mm / y
        d = dict(mu_0=m0, mu_m=mm, mu_mm=mmm, mu_0m=m0m, mu_00=m00, mu_pm=mmm / y ** 2 - m00,
                 mu_p=0.0, mu_pp=0.0, mu_p0=0.0)
        lead, lin1 = m0m, mm
        quad2 = lead ** 2 / (16 * mmm)
        lin = lead * lin1 / (4 * mmm)
    elif w == "AlphaZero":
        y, z = 0.0, float(param)
        mp, mpp = float(partial.mu_p), float(partial.mu_pp)
        _nz(mpp, "mu_pp")
        mp0 = -2 * mpp / z
        m00 = -m0 - mp / z
        d = dict(mu_0=m0, mu_p=mp, mu_pp=mpp, mu_p0=mp0, mu_00=m00, mu_pm=mpp / z ** 2 - m00,
                 mu_m=0.0, mu_mm=0.0, mu_0m=0.0)
        quad2 = mp0 ** 2 / (16 * mpp)
        lin = mp0 * mp / (4 * mpp)
    else:
        raise ValueError("which must be DeltaZero or AlphaZero")
    # quad2 (n^2 - n) + lin (n + 1/8) + 3 mu_0 / 16
    form = OscillatorForm(quad2, lin - quad2, lin / 8 + 3 * m0 / 16)
    return _finish("Asym" + w, d, y, z, form, True)


def solve_bog(family: str, partial: CoeffSet, branch: int = 1, param: Optional[float] = None):
    f = family.replace("Bog", "")
    if f == "Generic":
        return solve_generic(partial, branch)
    if f == "HermLinear":
        return solve_herm_linear(partial, branch)
    if f == "HermBilinear":
        return solve_herm_bilinear(partial, branch)
    if f in ("AsymDeltaZero", "DeltaZero", "AsymAlphaZero", "AlphaZero"):
        if param is None:
            raise ConfigError(f"{family} needs the transformation parameter (y or z)")
        return solve_asymmetric(f, partial, param)
    raise ConfigError(f"unknown Bogoliubov family {family!r}")


# ---------------------------------------------------------------------------
# Bridges to the metric construction.

def generic_bridge_lambda(c: CoeffSet) -> float:
    """``lam = mu_p^2 / (2 (mu_p + mu_m) mu_pp)``; requires ``mu_p0 = 2 mu_p``."""
    if c.mu_p + c.mu_m == 0 or c.mu_pp == 0:
        raise FamilyInapplicable("bridge undefined for mu_p + mu_m = 0 or mu_pp = 0")
    if abs(c.mu_p0 - 2 * c.mu_p) > 1e-12 * max(1.0, abs(c.mu_p0)):
        raise FamilyInapplicable("bridge needs mu_p0 = 2 mu_p")
    lam = c.mu_p ** 2 / (2 * (c.mu_p + c.mu_m) * c.mu_pp)
    if abs(lam) >= 0.5:
        raise NoSolution(f"bridge lambda {lam:.6g} outside (-1/2, 1/2)")
    return lam


def generic_bridge_ratio(c: CoeffSet) -> float:
    """Right-hand side of the ``tanh 4 theta`` relation on the bridge."""
    mp, mm, mpp = c.mu_p, c.mu_m, c.mu_pp
    return 2 * (mm ** 2 - mp ** 2) * mpp ** 2 / (2 * (mm ** 2 + mp ** 2) * mpp ** 2 - mp ** 4)


def asymmetric_bridge(sol: BogSolution):
    """Metric family and ``lam`` shared with a one-sided Bogoliubov solution.

    Requires ``mu_pm = mu_0``.  DeltaZero maps onto Reduced2Plus with
    ``lam = -1/(2y)``, AlphaZero onto Reduced2Minus with ``lam = -1/(2z)``;
    ``|lam| <= 1/2`` needs ``|y| >= 1`` (resp. ``|z| >= 1``).
    """
    c = sol.completed
    if abs(c.mu_pm - c.mu_0) > 1e-12 * max(1.0, abs(c.mu_0)):
        raise FamilyInapplicable("bridge needs mu_pm = mu_0")
    if sol.family == "AsymDeltaZero":
        fam, lam = "Reduced2Plus", -1 / (2 * sol.y)
    elif sol.family == "AsymAlphaZero":
        fam, lam = "Reduced2Minus", -1 / (2 * sol.z)
    else:
        raise FamilyInapplicable("not a one-sided solution")
    if abs(lam) > 0.5:
        raise NoSolution(f"bridge lambda {lam:.6g} outside [-1/2, 1/2]")
    return fam, lam
