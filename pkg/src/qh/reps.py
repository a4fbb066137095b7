"""Truncated matrix representations and Hamiltonian assembly."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .core import BILINEAR_SLOTS, LINEAR_SLOTS, CoeffSet, M, P, Z

log = logging.getLogger(__name__)

MAX_TENSOR_DIM = 4096

KINDS = ("TwoBoson", "HolsteinPrimakoff", "MultiBoson", "DiscreteSeries",
         "TwoMode", "Sl2Polynomial", "Sl2PolynomialPT")


class RepError(ValueError):
    """Invalid representation request."""


@dataclass(frozen=True)
class RepKind:
    """Tagged representation kind.

    ``param`` is ``omega`` for TwoBoson, ``n`` for MultiBoson and the sl2
    polynomial kinds, the Bargmann index ``k`` for DiscreteSeries, and unused
    otherwise.
    """

    variant: str
    param: Optional[float] = None

    def __post_init__(self):
        if self.variant not in KINDS:
            raise RepError(f"unknown representation kind {self.variant!r}")
        p = self.param
        if self.variant == "TwoBoson":
            object.__setattr__(self, "param", 1.0 if p is None else float(p))
            if not self.param > 0:
                raise RepError("omega must be positive")
        elif self.variant == "DiscreteSeries":
            if p is None or not float(p) > 0:
                raise RepError("Bargmann index k must be positive")
        elif self.variant == "MultiBoson":
            if p is None or int(p) != p or int(p) < 1:
                raise RepError("MultiBoson needs an integer n >= 1")
            object.__setattr__(self, "param", int(p))
        elif self.variant in ("Sl2Polynomial", "Sl2PolynomialPT"):
            if p is None or int(p) != p or int(p) < 0:
                raise RepError("sl2 polynomial rep needs an integer n >= 0")
            object.__setattr__(self, "param", int(p))

    @classmethod
    def two_boson(cls, omega=1.0):
        return cls("TwoBoson", omega)

    @property
    def step(self) -> int:
        """Largest number of basis states a single generator moves."""
        if self.variant == "TwoBoson":
            return 2
        if self.variant == "MultiBoson":
            return int(self.param)
        return 1

    @property
    def is_sl2(self) -> bool:
        return self.variant.startswith("Sl2")


@dataclass(frozen=True, eq=False)
class TruncatedRep:
    kind: RepKind
    dim: int
    K0: np.ndarray
    Kp: np.ndarray
    Km: np.ndarray
    interior_dim: int
    a: Optional[np.ndarray] = None
    adag: Optional[np.ndarray] = None

    @property
    def gens(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Generators in slot order ``(K0, K+, K-)``."""
        return (self.K0, self.Kp, self.Km)


@dataclass(frozen=True, eq=False)
class HamMatrix:
    matrix: np.ndarray
    source: object
    rep: object


def _ladder(dim):
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T


def _raise_matrix(dim, shift, amp):
    """Matrix with ``amp[j]`` on entry ``(j + shift, j)``."""
    K = np.zeros((dim, dim), complex)
    j = np.arange(dim - shift)
    K[j + shift, j] = amp[: dim - shift]
    return K


def build_rep(kind: RepKind, dim: int = 0, interior_dim: Optional[int] = None) -> TruncatedRep:
    """Truncated matrices for the requested representation.

    Parameters
    ----------
    kind : RepKind
    dim : int
        Number of basis states kept.  Ignored for the sl2 polynomial kinds,
        whose representation is finite with dimension ``n + 1``.
    interior_dim : int, optional
        Size of the leading block treated as free of truncation artifacts.
        Defaults to ``dim - 2 * step``.
    """
    if isinstance(kind, str):
        kind = RepKind(kind)
    v = kind.variant
    a = adag = None
    if kind.is_sl2:
        n = int(kind.param)
        dim = n + 1
        k = np.arange(dim, dtype=float)
        J0 = np.diag(k - n / 2).astype(complex)
        Jm = np.zeros((dim, dim), complex)
        Jm[k[1:].astype(int) - 1, k[1:].astype(int)] = k[1:]
        Jp = _raise_matrix(dim, 1, k - n)
        rep = TruncatedRep(kind, dim, J0, Jp, Jm, dim)
        if v == "Sl2PolynomialPT":
            rep = _rescale(rep, kind)
        return rep

    if dim < 2:
        raise RepError("dim must be at least 2")
    step = kind.step
    if v == "TwoMode":
        return _two_mode(kind, dim, interior_dim)
    N = np.arange(dim, dtype=float)
    if v == "TwoBoson":
        a, adag = _ladder(dim)
        K0 = np.diag(N / 2 + 0.25).astype(complex)
        Kp = _raise_matrix(dim, 2, np.sqrt((N + 1) * (N + 2)) / 2)
    elif v == "DiscreteSeries":
        k = float(kind.param)
        K0 = np.diag(N + k).astype(complex)
        Kp = _raise_matrix(dim, 1, np.sqrt((N + 1) * (N + 2 * k)))
    else:
        # HolsteinPrimakoff is the n = 1 member of the multi-boson family.
        n = 1 if v == "HolsteinPrimakoff" else int(kind.param)
        a, adag = _ladder(dim)
        r = N % n
        m = (N - r) / n
        kr = (r + 0.5) / n
        K0 = np.diag((N + 0.5) / n).astype(complex)
        Kp = _raise_matrix(dim, n, np.sqrt((m + 1) * (m + 2 * kr)))
    Km = Kp.conj().T.copy()
    if interior_dim is None:
        interior_dim = max(dim - 2 * step, 1)
    return TruncatedRep(kind, dim, K0, Kp, Km, int(interior_dim), a, adag)


def _two_mode(kind, dim, interior_dim):
    # Basis (n1, n2) ordered by total occupation then n1.
    states = []
    t = 0
    while len(states) < dim:
        states.extend((n1, t - n1) for n1 in range(t + 1))
        t += 1
    full_total = t - 1 if len(states) == dim else t - 2
    states = states[:dim]
    index = {s: i for i, s in enumerate(states)}
    K0 = np.zeros((dim, dim), complex)
    Kp = np.zeros((dim, dim), complex)
    for i, (n1, n2) in enumerate(states):
        K0[i, i] = (n1 + n2 + 1) / 2
        j = index.get((n1 + 1, n2 + 1))
        if j is not None:
            Kp[j, i] = np.sqrt((n1 + 1) * (n2 + 1))
    if interior_dim is None:
        keep = full_total - 2
        interior_dim = sum(1 for s in states if sum(s) <= keep)
    return TruncatedRep(kind, dim, K0, Kp, Kp.conj().T.copy(), max(int(interior_dim), 1))


def _rescale(rep, kind=None):
    return TruncatedRep(kind or rep.kind, rep.dim, rep.K0, 1j * rep.Kp, -1j * rep.Km,
                        rep.interior_dim)


def pt_rescale(rep: TruncatedRep) -> TruncatedRep:
    """Apply ``J+ -> i J+`` and ``J- -> -i J-``; the algebra is unchanged."""
    if not rep.kind.is_sl2:
        raise RepError("pt_rescale applies only to sl2 polynomial representations")
    return _rescale(rep)


def x_p_operators(rep: TruncatedRep):
    """Position and momentum matrices built from the boson ladder.

    ``x = (a + a^+)/sqrt(2 omega)`` and ``p = i sqrt(omega/2) (a^+ - a)``.
    """
    if rep.a is None:
        raise RepError("representation carries no boson ladder")
    w = rep.kind.param if rep.kind.variant == "TwoBoson" else 1.0
    x = (rep.a + rep.adag) / np.sqrt(2 * w)
    p = 1j * np.sqrt(w / 2) * (rep.adag - rep.a)
    return x, p


def _norm2(A):
    return float(np.linalg.norm(A, 2)) if A.size else 0.0


def commutator_residual(rep: TruncatedRep, block: Optional[int] = None) -> float:
    """Largest interior-block 2-norm among the three commutator defects."""
    K0, Kp, Km = rep.gens
    I = rep.interior_dim if block is None else block
    r1 = K0 @ Kp - Kp @ K0 - Kp
    r2 = K0 @ Km - Km @ K0 + Km
    r3 = Kp @ Km - Km @ Kp + 2 * K0
    return max(_norm2(r[:I, :I]) for r in (r1, r2, r3))


def assemble(c: CoeffSet, rep: TruncatedRep, offset: float = 0.0) -> HamMatrix:
    """Matrix of the ordered Hamiltonian in ``rep``.

    Ordered products keep the raising factor on the left, so the result is
    the exact compression of the infinite operator onto the kept states.
    """
    K = rep.gens
    H = np.zeros((rep.dim, rep.dim), complex)
    for key, l in LINEAR_SLOTS.items():
        mu = float(getattr(c, key))
        if mu:
            H += mu * K[l]
    for key, (n, m) in BILINEAR_SLOTS.items():
        mu = float(getattr(c, key))
        if mu:
            H += mu * (K[n] @ K[m])
    if offset:
        H += offset * np.eye(rep.dim)
    return HamMatrix(H, c, rep)


# ---------------------------------------------------------------------------
# Two commuting copies.

CROSS_KEYS = ("00", "+-", "-+", "++", "--", "+0", "0-", "0+", "-0")
_SYM = {"0": Z, "+": P, "-": M}


@dataclass(frozen=True)
class TwoParticleCoeffSet:
    """Linear couplings of each copy plus the nine cross couplings.

    ``cross["nm"]`` multiplies ``K_n^(1) K_m^(2)``.
    """

    lin1: Tuple[float, float, float] = (0.0, 0.0, 0.0)   # (mu_0, mu_p, mu_m)
    lin2: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    cross: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        bad = set(self.cross) - set(CROSS_KEYS)
        if bad:
            raise KeyError(f"unknown cross keys {sorted(bad)}")

    def get(self, key):
        return float(self.cross.get(key, 0.0))


@dataclass(frozen=True, eq=False)
class TwoParticleRep:
    rep1: TruncatedRep
    rep2: TruncatedRep
    K1: Tuple[np.ndarray, np.ndarray, np.ndarray]
    K2: Tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def dim(self):
        return self.rep1.dim * self.rep2.dim

    def interior_index(self) -> np.ndarray:
        """Flat indices whose factor states both lie in the factor interiors."""
        i1 = np.arange(self.rep1.dim)[:, None]
        i2 = np.arange(self.rep2.dim)[None, :]
        mask = (i1 < self.rep1.interior_dim) & (i2 < self.rep2.interior_dim)
        return np.flatnonzero(mask.ravel())


def build_tensor_product(rep1: TruncatedRep, rep2: TruncatedRep,
                         max_dim: int = MAX_TENSOR_DIM) -> TwoParticleRep:
    """Generators ``K_l (x) I`` and ``I (x) K_l`` on the product space."""
    d = rep1.dim * rep2.dim
    if d > max_dim:
        raise RepError(f"tensor dimension {d} exceeds cap {max_dim}")
    I1, I2 = np.eye(rep1.dim), np.eye(rep2.dim)
    K1 = tuple(np.kron(K, I2) for K in rep1.gens)
    K2 = tuple(np.kron(I1, K) for K in rep2.gens)
    return TwoParticleRep(rep1, rep2, K1, K2)


def assemble_multiparticle(c2: TwoParticleCoeffSet, tp: TwoParticleRep) -> HamMatrix:
    """Two-copy Hamiltonian; cross products need no ordering."""
    H = np.zeros((tp.dim, tp.dim), complex)
    for l in range(3):
        H += c2.lin1[l] * tp.K1[l] + c2.lin2[l] * tp.K2[l]
    for key in CROSS_KEYS:
        mu = c2.get(key)
        if mu:
            H += mu * (tp.K1[_SYM[key[0]]] @ tp.K2[_SYM[key[1]]])
    return HamMatrix(H, c2, tp)


def hamiltonian_convergence(c: CoeffSet, kind: RepKind, dims, n_levels=None, tol: float = 1e-6):
    """Drift of the lowest levels of ``c`` across truncation sizes ``dims``.

    Thin wrapper over :func:`qh.numerics.convergence_scan`.
    """
    from .numerics import convergence_scan, eigenvalues

    def spec(d):
        return eigenvalues(assemble(c, build_rep(kind, d)).matrix)

    return convergence_scan(spec, dims, n_levels, tol)
