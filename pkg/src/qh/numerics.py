"""Dense numerical kernels shared by the solvers and the verification layer."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

log = logging.getLogger(__name__)

EXP_NORM_CAP = 50.0
SERIES_CUTOFF = 1e-4


class NumericalError(RuntimeError):
    """Raised when a kernel cannot return a trustworthy result."""


class DomainError(ValueError):
    """Raised when an input lies outside the closed-form domain."""


def matrix_exp(A, norm_cap: float = EXP_NORM_CAP) -> np.ndarray:
    """Matrix exponential by Pade scaling and squaring.

    Parameters
    ----------
    A : array_like, shape (n, n)
    norm_cap : float
        Inputs whose 2-norm exceeds this bound are rejected instead of
        silently losing precision.

    Raises
    ------
    NumericalError
        If ``||A||_2 > norm_cap`` or the input has non-finite entries.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix_exp expects a square matrix")
    if not np.all(np.isfinite(A)):
        raise NumericalError("non-finite entries in exponent")
    nrm = np.linalg.norm(A, 2) if A.size else 0.0
    if nrm > norm_cap:
        raise NumericalError(f"exponent norm {nrm:.3g} exceeds cap {norm_cap:g}")
    return scipy.linalg.expm(A)


def eigenvalues(A, hermitian_hint: bool = False) -> np.ndarray:
    """Full spectrum sorted by real part (ties broken by imaginary part).

    The Hermitian path symmetrizes the input first and returns real values.
    """
    A = np.asarray(A)
    try:
        if hermitian_hint:
            w = scipy.linalg.eigvalsh(0.5 * (A + A.conj().T))
            return np.sort(w)
        w = scipy.linalg.eigvals(A)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise NumericalError("eigensolver returned non-finite values")
    return w[np.lexsort((w.imag, w.real))]


def sinhc(x):
    """``sinh(x)/x`` with the removable point handled; complex arguments allowed."""
    x = complex(x) if np.iscomplexobj(x) else x
    if abs(x) < SERIES_CUTOFF:
        x2 = x * x
        return 1 + x2 / 6 + x2 * x2 / 120
    return np.sinh(x) / x


def tanhc(x):
    """``tanh(x)/x`` with the removable point handled."""
    if abs(x) < SERIES_CUTOFF:
        x2 = x * x
        return 1 - x2 / 3 + 2 * x2 * x2 / 15
    return np.tanh(x) / x


def stable_arctanh_ratio(R: float, lam: float, k: int) -> float:
    """Solve ``tanh(k theta) / (theta / eps) = R`` for ``eps``.

    Here ``theta = eps * sqrt(1 - 4 lam^2)``.  At ``|lam| = 1/2`` the limit
    ``R / k`` is returned.

    Raises
    ------
    DomainError
        If ``|lam| > 1/2`` or ``|R sqrt(1 - 4 lam^2)| >= 1``.
    """
    if abs(lam) > 0.5 or not np.isfinite(R):
        raise DomainError(f"lambda={lam!r} or R={R!r} outside the domain")
    s = np.sqrt(max(1.0 - 4.0 * lam * lam, 0.0))
    x = R * s
    if abs(x) >= 1.0:
        raise DomainError(f"arctanh argument {x:.6g} outside (-1, 1)")
    if abs(x) < SERIES_CUTOFF:
        # arctanh(x)/s = R (1 + x^2/3 + x^4/5)
        x2 = x * x
        return R * (1 + x2 / 3 + x2 * x2 / 5) / k
    return float(np.arctanh(x) / (k * s))


def nearest_match(targets, pool):
    """For each target pick the closest unused element of ``pool``.

    Greedy in order of increasing best distance, so well separated pairs are
    fixed first.  Returns the matched values aligned with ``targets``.
    """
    targets = np.asarray(targets, dtype=complex)
    pool = np.asarray(pool, dtype=complex)
    if len(pool) < len(targets):
        raise ValueError("pool smaller than target list")
    dist = np.abs(targets[:, None] - pool[None, :])
    out = np.empty(len(targets), dtype=complex)
    used = np.zeros(len(pool), bool)
    done = np.zeros(len(targets), bool)
    for _ in range(len(targets)):
        d = np.where(used[None, :] | done[:, None], np.inf, dist)
        i, j = np.unravel_index(np.argmin(d), d.shape)
        out[i] = pool[j]
        used[j] = done[i] = True
    return out


def rel_err(a, b, floor: float = 1.0) -> np.ndarray:
    """Elementwise ``|a-b| / max(|b|, floor)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    return np.abs(a - b) / np.maximum(np.abs(b), floor)


@dataclass(frozen=True)
class ConvergenceReport:
    dims: tuple
    levels: np.ndarray     # lowest levels at the largest dim
    drift: np.ndarray      # max relative drift per level across consecutive dims
    converged_count: int
    tol: float


def convergence_scan(spectrum_at: Callable[[int], np.ndarray], dims: Sequence[int],
                     n_levels=None, tol: float = 1e-6) -> ConvergenceReport:
    """Relative drift of the lowest eigenvalues as the truncation grows.

    Parameters
    ----------
    spectrum_at : callable
        ``spectrum_at(d)`` returns eigenvalues of the truncated problem at
        dimension ``d``.  Low levels are picked by real part.
    dims : sequence of int
        Strictly increasing truncation sizes.
    n_levels : int, optional
        Number of levels to track.  Defaults to ``min(dims) // 4``.
    """
    dims = tuple(int(d) for d in dims)
    if any(b <= a for a, b in zip(dims, dims[1:])) or not dims:
        raise ValueError("dims must be strictly increasing")
    n = n_levels if n_levels is not None else max(1, dims[0] // 4)
    spectra = [np.asarray(spectrum_at(d)) for d in dims]
    low = [s[np.argsort(s.real, kind="stable")][:n] for s in spectra]
    drift = np.zeros(n)
    for a, b in zip(low, low[1:]):
        # match levels of the coarse run inside the fine run
        m = nearest_match(a, b)
        drift = np.maximum(drift, rel_err(a, m))
    return ConvergenceReport(dims, low[-1], drift, int(np.sum(drift < tol)), tol)
