"""Representation-independent coefficient algebra.

A Lie-algebraic Hamiltonian is fixed by nine real couplings multiplying the
generators ``K0, K+, K-`` and the six ordered bilinears ``K_n K_m`` with
``n >= m`` under the order ``+ > 0 > -``.  Everything in this module is a pure
function of those nine numbers.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, fields, replace
from typing import Dict, Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy as np


class GeneratorIndex(enum.IntEnum):
    """Generator labels.  The integer value encodes the ordering rank."""

    MINUS = 0
    ZERO = 1
    PLUS = 2

    @property
    def symbol(self) -> str:
        return {0: "-", 1: "0", 2: "+"}[int(self)]


# Array slot used for each generator in 3-vectors and 3x3 coefficient tables.
SLOT = {GeneratorIndex.ZERO: 0, GeneratorIndex.PLUS: 1, GeneratorIndex.MINUS: 2}
Z, P, M = 0, 1, 2

KEYS: Tuple[str, ...] = (
    "mu_0", "mu_p", "mu_m",
    "mu_00", "mu_pp", "mu_mm", "mu_pm", "mu_p0", "mu_0m",
)
LINEAR_SLOTS = {"mu_0": Z, "mu_p": P, "mu_m": M}
BILINEAR_SLOTS = {
    "mu_00": (Z, Z), "mu_pp": (P, P), "mu_mm": (M, M),
    "mu_pm": (P, M), "mu_p0": (P, Z), "mu_0m": (Z, M),
}


def normal_order(n: GeneratorIndex, m: GeneratorIndex) -> Optional[Tuple[GeneratorIndex, GeneratorIndex]]:
    """Return the pair if it survives the ordering convention, else ``None``.

    Parameters
    ----------
    n, m : GeneratorIndex
        Left and right factor of the product ``K_n K_m``.
    """
    n, m = GeneratorIndex(n), GeneratorIndex(m)
    return (n, m) if n >= m else None


@dataclass(frozen=True)
class CoeffSet:
    """The nine real couplings of a Lie-algebraic Hamiltonian.

    ``H = mu_0 K0 + mu_p K+ + mu_m K- + mu_00 K0 K0 + mu_pp K+ K+ + mu_mm K- K-
    + mu_pm K+ K- + mu_p0 K+ K0 + mu_0m K0 K-``.
    """

    mu_0: float = 0.0
    mu_p: float = 0.0
    mu_m: float = 0.0
    mu_00: float = 0.0
    mu_pp: float = 0.0
    mu_mm: float = 0.0
    mu_pm: float = 0.0
    mu_p0: float = 0.0
    mu_0m: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            try:
                ok = np.isfinite(float(v))
            except (TypeError, ValueError):
                raise TypeError(f"{f.name} must be a real number, got {v!r}")
            if not ok:
                raise ValueError(f"{f.name} is not finite")

    @classmethod
    def from_dict(cls, d: Dict[str, float]) -> "CoeffSet":
        unknown = set(d) - set(KEYS)
        if unknown:
            raise KeyError(f"unknown coefficient keys: {sorted(unknown)}")
        return cls(**{k: d[k] for k in KEYS if k in d})

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "CoeffSet":
        a = list(a)
        if len(a) != 9:
            raise ValueError("expected nine coefficients")
        return cls(*a)

    def to_dict(self) -> Dict[str, float]:
        return {k: getattr(self, k) for k in KEYS}

    def as_array(self) -> np.ndarray:
        return np.array([float(getattr(self, k)) for k in KEYS])

    def replace(self, **kw) -> "CoeffSet":
        return replace(self, **kw)

    def linear(self):
        """Coefficients of ``K0, K+, K-`` as a 3-vector in slot order."""
        out = [0, 0, 0]
        for k, s in LINEAR_SLOTS.items():
            out[s] = getattr(self, k)
        return out

    def bilinear(self):
        """3x3 nested list ``B`` with ``H_bil = sum B[n][m] K_n K_m``."""
        out = [[0, 0, 0] for _ in range(3)]
        for k, (n, m) in BILINEAR_SLOTS.items():
            out[n][m] = getattr(self, k)
        return out


class HermiticityDefect(NamedTuple):
    d_lin: float
    d_quad: float
    d_mixed: float

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(x) <= tol for x in self)


def hermiticity_defect(c: CoeffSet) -> HermiticityDefect:
    """Componentwise Hermiticity defect under ``K0^+ = K0, K+^+ = K-``."""
    return HermiticityDefect(c.mu_p - c.mu_m, c.mu_pp - c.mu_mm, c.mu_p0 - c.mu_0m)


def add_casimir(c: CoeffSet, kappa: float) -> CoeffSet:
    """Add ``kappa`` times the Casimir ``K0^2 - {K+, K-}/2``.

    In the ordered basis the Casimir reads ``K0^2 - K0 - K+K-``.
    """
    return c.replace(mu_0=c.mu_0 - kappa, mu_00=c.mu_00 + kappa, mu_pm=c.mu_pm - kappa)


CASIMIR = CoeffSet(mu_0=-1.0, mu_00=1.0, mu_pm=-1.0)


def is_exactly_solvable_sl2(c: CoeffSet) -> bool:
    """True when no raising generator appears (``kappa_+ = kappa_++ = kappa_+0 = 0``)."""
    return c.mu_p == 0 and c.mu_pp == 0 and c.mu_p0 == 0


# ---------------------------------------------------------------------------
# Substitution K_l -> sum_m T[l][m] K'_m followed by re-ordering.

def reorder(lin, bil):
    """Bring generic products ``K_a K_b`` into the ordered basis.

    Parameters
    ----------
    lin : list of 3 numbers
        Linear coefficients (modified copy returned).
    bil : 3x3 nested list
        Coefficients of arbitrary products ``K_a K_b``.

    Returns
    -------
    lin, bil
        Same content with the three suppressed products rewritten via
        ``K0K+ = K+K0 + K+``, ``K-K+ = K+K- + 2K0`` and ``K-K0 = K0K- + K-``.
    """
    lin = list(lin)
    bil = [list(r) for r in bil]
    x = bil[Z][P]; bil[Z][P] = 0 * x; bil[P][Z] += x; lin[P] += x
    x = bil[M][P]; bil[M][P] = 0 * x; bil[P][M] += x; lin[Z] += 2 * x
    x = bil[M][Z]; bil[M][Z] = 0 * x; bil[Z][M] += x; lin[M] += x
    return lin, bil


def substitute(c, T):
    """Coefficients of ``H`` after ``K_l -> sum_m T[l][m] K_m``.

    Works with any scalar type supporting ``+`` and ``*`` (floats, complex,
    ``fractions.Fraction``), so exact rational evaluation is possible.

    Parameters
    ----------
    c : CoeffSet or mapping
        Input couplings.
    T : 3x3 array-like
        Row ``l`` expresses the image of ``K_l``; slot order ``(0, +, -)``.

    Returns
    -------
    dict
        Ordered-basis coefficients keyed like :data:`KEYS`.
    """
    get = (lambda k: getattr(c, k)) if isinstance(c, CoeffSet) else (lambda k: c[k])
    T = [[T[i][j] for j in range(3)] for i in range(3)]
    zero = 0 * T[0][0]
    lin = [zero, zero, zero]
    bil = [[zero] * 3 for _ in range(3)]
    for k, l in LINEAR_SLOTS.items():
        mu = get(k)
        for m in range(3):
            lin[m] = lin[m] + mu * T[l][m]
    for k, (n, m) in BILINEAR_SLOTS.items():
        mu = get(k)
        for a in range(3):
            for b in range(3):
                bil[a][b] = bil[a][b] + mu * T[n][a] * T[m][b]
    lin, bil = reorder(lin, bil)
    out = {k: lin[s] for k, s in LINEAR_SLOTS.items()}
    out.update({k: bil[a][b] for k, (a, b) in BILINEAR_SLOTS.items()})
    return out


def symmetrize(d: Dict[str, float]) -> CoeffSet:
    """Average Hermitian-conjugate pairs so the defect is exactly zero.

    Exact scalar types (``Fraction``) pass through unchanged.
    """
    d = {k: (v.real if isinstance(v, complex) else v) for k, v in d.items()}
    for a, b in (("mu_p", "mu_m"), ("mu_pp", "mu_mm"), ("mu_p0", "mu_0m")):
        if d[a] != d[b]:
            d[a] = d[b] = (d[a] + d[b]) / 2
    return CoeffSet.from_dict(d)


# ---------------------------------------------------------------------------
# Position-momentum realization (two-boson rep, unit frequency).

GAMMA_MATRIX = np.array([
    [0, -4, 4, -2, 3, 3, 1, 2, -2],
    [4, 4, 4, 0, -6, 6, -4, -5, 1],
    [4, -4, -4, 0, 6, -6, -4, -1, 5],
    [0, 0, 0, 1, 1, 1, 1, 1, 1],
    [0, 0, 0, 1, 1, 1, 1, -1, -1],
    [0, -8, 8, -4, 12, 12, -4, 4, -4],
    [0, 0, 0, 2, -6, -6, 2, 0, 0],
    [0, 0, 0, 0, 4, -4, 0, -2, 2],
    [0, 0, 0, 0, -4, 4, 0, -2, 2],
], dtype=float) / 16.0
_GAMMA_INV = np.linalg.inv(GAMMA_MATRIX)

GAMMA_TERMS = ("1", "x^2", "p^2", "x^4", "p^4", "i x p", "x^2 p^2", "i x p^3", "i x^3 p")


class GammaSet(NamedTuple):
    """Coefficients of ``g0 + g1 x^2 + g2 p^2 + g3 x^4 + g4 p^4 + i g5 x p
    + g6 x^2 p^2 + i g7 x p^3 + i g8 x^3 p``."""

    gamma_0: float
    gamma_1: float
    gamma_2: float
    gamma_3: float
    gamma_4: float
    gamma_5: float
    gamma_6: float
    gamma_7: float
    gamma_8: float


def mu_to_gamma(c: CoeffSet) -> GammaSet:
    return GammaSet(*(GAMMA_MATRIX @ c.as_array()))


def gamma_to_mu(g: Iterable[float]) -> CoeffSet:
    return CoeffSet.from_array(_GAMMA_INV @ np.asarray(tuple(g), dtype=float))
