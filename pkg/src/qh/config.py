"""Run configuration: sectioned key-value files parsed with :mod:`configparser`."""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .core import KEYS, CoeffSet
from .errors import ConfigError
from .reps import KINDS, RepKind

SECTIONS = ("hamiltonian", "solver", "rep", "tolerances", "sweep")

DEFAULT_TOL = {"residual": 1e-8, "spectral": 1e-6, "imag": 1e-8, "defect": 1e-8,
               "exp_norm_cap": 50.0}


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class RunConfig:
    coeffs: CoeffSet
    offset: float = 0.0
    family: Optional[str] = None
    lam: Optional[float] = None
    branch: int = 1
    bog_param: Optional[float] = None
    sl2_n: int = 8
    rep_kind: str = "TwoBoson"
    rep_param: Optional[float] = None
    dim: int = 128
    tol: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOL))
    sweep: Tuple[SweepAxis, ...] = ()
    seed: Optional[int] = None
    workers: int = 1

    def rep(self) -> RepKind:
        return RepKind(self.rep_kind, self.rep_param)

    def echo(self) -> dict:
        return {
            "hamiltonian": {**self.coeffs.to_dict(), "offset": self.offset},
            "solver": {"family": self.family, "lambda": self.lam, "branch": "+" if self.branch > 0 else "-",
                       "bog_param": self.bog_param, "n": self.sl2_n},
            "rep": {"kind": self.rep_kind, "param": self.rep_param, "dim": self.dim},
            "tolerances": dict(self.tol),
            "sweep": {a.name: [a.values[0], a.values[-1], len(a.values)] if a.values else [] for a in self.sweep},
            "seed": self.seed,
            "workers": self.workers,
        }


def _float(section, key, raw):
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}")
    if not np.isfinite(v):
        raise ConfigError(f"[{section}] {key}: must be finite")
    return v


def _branch(raw) -> int:
    s = str(raw).strip()
    if s in ("+", "+1", "1", "plus"):
        return 1
    if s in ("-", "-1", "minus"):
        return -1
    raise ConfigError(f"branch must be + or -, got {raw!r}")


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    unknown = set(cp.sections()) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    if not cp.has_section("hamiltonian"):
        raise ConfigError("missing [hamiltonian] section")

    ham = dict(cp["hamiltonian"])
    offset = _float("hamiltonian", "offset", ham.pop("offset", "0"))
    bad = set(ham) - set(KEYS)
    if bad:
        raise ConfigError(f"unknown hamiltonian keys: {sorted(bad)}")
    coeffs = CoeffSet(**{k: _float("hamiltonian", k, v) for k, v in ham.items()})

    kw = {}
    if cp.has_section("solver"):
        s = dict(cp["solver"])
        if "family" in s:
            kw["family"] = s.pop("family").strip()
        if "lambda" in s:
            lam = _float("solver", "lambda", s.pop("lambda"))
            if abs(lam) > 0.5:
                raise ConfigError("|lambda| must not exceed 1/2")
            kw["lam"] = lam
        if "branch" in s:
            kw["branch"] = _branch(s.pop("branch"))
        for key in ("y", "z", "bog_param"):
            if key in s:
                kw["bog_param"] = _float("solver", key, s.pop(key))
        if "n" in s:
            kw["sl2_n"] = int(_float("solver", "n", s.pop("n")))
        if s:
            raise ConfigError(f"unknown solver keys: {sorted(s)}")
    if cp.has_section("rep"):
        r = dict(cp["rep"])
        if "kind" in r:
            kind = r.pop("kind").strip()
            if kind not in KINDS:
                raise ConfigError(f"unknown rep kind {kind!r}")
            kw["rep_kind"] = kind
        for key in ("omega", "k", "n", "param"):
            if key in r:
                kw["rep_param"] = _float("rep", key, r.pop(key))
        if "dim" in r:
            kw["dim"] = int(_float("rep", "dim", r.pop("dim")))
        if r:
            raise ConfigError(f"unknown rep keys: {sorted(r)}")
    tol = dict(DEFAULT_TOL)
    if cp.has_section("tolerances"):
        for k, v in cp["tolerances"].items():
            if k not in DEFAULT_TOL:
                raise ConfigError(f"unknown tolerance {k!r}")
            tol[k] = _float("tolerances", k, v)
            if tol[k] <= 0:
                raise ConfigError(f"tolerance {k} must be positive")
    axes = []
    if cp.has_section("sweep"):
        for k, v in cp["sweep"].items():
            if k not in KEYS and k != "lambda":
                raise ConfigError(f"cannot sweep {k!r}")
            parts = [p.strip() for p in v.replace(":", ",").split(",")]
            if len(parts) != 3:
                raise ConfigError(f"[sweep] {k} must be 'start, stop, num'")
            a, b = _float("sweep", k, parts[0]), _float("sweep", k, parts[1])
            n = int(_float("sweep", k, parts[2]))
            if n < 0:
                raise ConfigError("sweep count must be non-negative")
            grid = np.linspace(a, b, n)
            # snap rounding noise at zero so exact-zero parameters stay exact
            grid[np.abs(grid) < 1e-12 * max(abs(a), abs(b), 1e-300)] = 0.0
            axes.append(SweepAxis(k, tuple(float(x) for x in grid)))
    cfg = RunConfig(coeffs, offset, tol=tol, sweep=tuple(axes), **kw)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig):
    try:
        cfg.rep()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.dim < 8 and not cfg.rep_kind.startswith("Sl2"):
        raise ConfigError("dim must be at least 8")
    if cfg.workers < 1:
        raise ConfigError("workers must be positive")


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def override(cfg: RunConfig, *, dim=None, tol=None, branch=None, family=None, seed=None,
             workers=None) -> RunConfig:
    kw = {}
    if dim is not None:
        kw["dim"] = dim
    if tol is not None:
        t = dict(cfg.tol)
        t["residual"] = tol
        kw["tol"] = t
    if branch is not None:
        kw["branch"] = _branch(branch)
    if family is not None:
        kw["family"] = family
    if seed is not None:
        kw["seed"] = seed
    if workers is not None:
        kw["workers"] = workers
    out = replace(cfg, **kw)
    validate(out)
    return out
