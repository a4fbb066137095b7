"""Command line front end.

``qh classify|solve|verify|spectrum|sweep --config FILE [options]``

Reports are JSON on stdout.  A short human-readable table goes to stderr
when stderr is a terminal.  Exit codes: 0 success, 2 configuration error,
3 family inapplicable, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from . import bogoliubov as bog
from . import metric
from .config import RunConfig, load_config, override
from .core import KEYS, hermiticity_defect, is_exactly_solvable_sl2
from .errors import ConfigError, FamilyInapplicable, NumericalError, DomainError
from .numerics import eigenvalues, nearest_match, rel_err
from .reps import RepKind, assemble, build_rep

log = logging.getLogger("qh")

EXIT_OK, EXIT_CONFIG, EXIT_INAPPLICABLE, EXIT_NUMERIC = 0, 2, 3, 4
COMMANDS = ("classify", "solve", "verify", "spectrum", "sweep")
SWEEP_HEADER = "# qh-sweep v1"
BOG_PREFIX = "Bog"
BOG_ROWS = 8       # rows printed by spectrum
BOG_LEVELS = 9     # levels n = 0..8 checked by verify
BOG_NAMES = ("Generic", "HermLinear", "HermBilinear", "DeltaZero", "AlphaZero")


# ---------------------------------------------------------------------------
# JSON helpers

def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    z = complex(x)
    if z.imag != 0:
        return {"re": _num(z.real), "im": _num(z.imag)}
    v = float(z.real)
    return v if math.isfinite(v) else None


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return _num(obj)


def check(value, tol, *, below=True) -> dict:
    """A numeric field together with the tolerance it was judged against."""
    v = float(value)
    ok = (v < tol) if below else (v > tol)
    return {"value": v, "tol": tol, "pass": bool(ok and math.isfinite(v))}


# ---------------------------------------------------------------------------
# Family dispatch

def is_bog_family(name: Optional[str]) -> bool:
    return bool(name) and name.startswith(BOG_PREFIX)


def bog_name(name: str) -> str:
    f = name[len(BOG_PREFIX):].lstrip(":")
    if f not in BOG_NAMES:
        raise ConfigError(f"unknown Bogoliubov family {name!r}; expected one of "
                          + ", ".join(BOG_PREFIX + n for n in BOG_NAMES))
    return f


def parse_metric_family(name: str) -> metric.FamilyId:
    try:
        return metric.FamilyId.parse(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _mismatch(a, b) -> float:
    x, y = a.as_array(), b.as_array()
    return float(np.abs(x - y).max() / max(1.0, np.abs(x).max()))


def solve_metric(cfg: RunConfig) -> metric.MetricSolution:
    fam = parse_metric_family(cfg.family)
    kw = {}
    if fam.name.startswith("Sl2"):
        if cfg.lam is None:
            raise ConfigError(f"{fam} needs solver.lambda")
        kw = {"branch": cfg.branch, "n": cfg.sl2_n}
    try:
        return metric.solve_family(fam, cfg.coeffs, cfg.lam, defect_tol=cfg.tol["defect"], **kw)
    except DomainError as exc:
        raise FamilyInapplicable(str(exc)) from exc
    except ValueError as exc:
        if isinstance(exc, (FamilyInapplicable, ConfigError)):
            raise
        raise ConfigError(str(exc)) from exc


def solve_bogoliubov(cfg: RunConfig) -> bog.BogSolution:
    return bog.solve_bog(bog_name(cfg.family), cfg.coeffs, cfg.branch, cfg.bog_param)


def metric_report(sol: metric.MetricSolution, cfg: RunConfig) -> dict:
    tol = cfg.tol["residual"]
    return {
        "kind": "metric",
        "family": str(sol.family),
        "eta": sol.eta.to_dict(),
        "completed": sol.completed.to_dict(),
        "input_mismatch": _mismatch(cfg.coeffs, sol.completed),
        "counterpart": sol.counterpart.to_dict(),
        "constraint_residuals": [check(abs(r), tol) for r in sol.constraint_residuals],
        "counterpart_raw_defect": check(sol.counterpart_raw_defect, cfg.tol["defect"]),
    }


def bog_report(sol: bog.BogSolution, cfg: RunConfig, n_max: int = 8) -> dict:
    tol = cfg.tol["residual"]
    scale = max(1.0, float(np.abs(sol.completed.as_array()).max()))
    out = {
        "kind": "bogoliubov",
        "family": BOG_PREFIX + sol.family.replace("Asym", ""),
        "y": sol.y, "z": sol.z,
        "trusted": sol.trusted,
        "completed": sol.completed.to_dict(),
        "input_mismatch": _mismatch(cfg.coeffs, sol.completed),
        "oscillator": sol.form.to_dict(),
        "reality_ok": sol.reality_ok,
        "levels": sol.levels(n_max),
        "residuals": [check(abs(r) / scale, tol) for r in sol.residuals],
    }
    if sol.family.startswith("Asym"):
        try:
            fam, lam = bog.asymmetric_bridge(sol)
            out["metric_bridge"] = {"family": fam, "lambda": lam}
        except FamilyInapplicable as exc:
            out["metric_bridge"] = {"reason": str(exc)}
    elif sol.family == "Generic":
        try:
            out["metric_bridge"] = {"lambda": bog.generic_bridge_lambda(sol.completed)}
        except FamilyInapplicable as exc:
            out["metric_bridge"] = {"reason": str(exc)}
    return out


# ---------------------------------------------------------------------------
# Classification

def classify_bog(c, param=None, tol=1e-9) -> List[dict]:
    out = []
    for name in BOG_NAMES:
        for branch in ((1, -1) if name in ("Generic", "HermLinear", "HermBilinear") else (1,)):
            label = BOG_PREFIX + name
            if name not in ("DeltaZero", "AlphaZero"):
                label += "(+)" if branch > 0 else "(-)"
            entry = {"family": label, "applicable": False}
            try:
                sol = bog.solve_bog(name, c, branch, param)
                r = _mismatch(c, sol.completed)
                if r > tol:
                    entry["reason"] = f"not in family (mismatch {r:.2e})"
                else:
                    entry.update(applicable=True, y=sol.y, z=sol.z, reality_ok=sol.reality_ok,
                                 trusted=sol.trusted, membership=r)
            except (FamilyInapplicable, ConfigError, ValueError, ZeroDivisionError) as exc:
                entry["reason"] = f"{type(exc).__name__}: {exc}"
            out.append(entry)
    return out


def cmd_classify(cfg: RunConfig) -> dict:
    c = cfg.coeffs
    tol = cfg.tol["residual"]
    mfam = metric.classify_metric(c, cfg.lam, tol=tol)
    return {
        "hermiticity_defect": hermiticity_defect(c)._asdict(),
        "exactly_solvable_sl2": is_exactly_solvable_sl2(c),
        "metric_families": mfam,
        "bogoliubov_families": classify_bog(c, cfg.bog_param, tol),
    }


# ---------------------------------------------------------------------------
# Commands

def _need_family(cfg):
    if not cfg.family:
        raise ConfigError("no family given (use --family or solver.family)")


def cmd_solve(cfg: RunConfig) -> dict:
    _need_family(cfg)
    if is_bog_family(cfg.family):
        return bog_report(solve_bogoliubov(cfg), cfg)
    return metric_report(solve_metric(cfg), cfg)


def _levels(cfg):
    return max(1, cfg.dim // 8)


def _low(vals, n):
    vals = np.asarray(vals)
    return vals[np.argsort(vals.real, kind="stable")][:n]


def cmd_verify(cfg: RunConfig):
    _need_family(cfg)
    tol = cfg.tol
    if is_bog_family(cfg.family):
        sol = solve_bogoliubov(cfg)
        rep = build_rep(RepKind("TwoBoson"), cfg.dim)
        E = eigenvalues(assemble(sol.completed, rep, cfg.offset).matrix)
        n = BOG_LEVELS
        closed = sol.levels(n - 1) + cfg.offset
        num = nearest_match(closed, E)
        out = bog_report(sol, cfg)
        out["dim"] = cfg.dim
        out["closed_form_vs_numeric"] = check(rel_err(num, closed).max(), tol["spectral"])
        out["max_abs_imag"] = check(np.abs(np.imag(num)).max(), tol["imag"])
        checks = [out["closed_form_vs_numeric"]] + out["residuals"]
        if sol.reality_ok:
            checks.append(out["max_abs_imag"])
        out["verdict"] = bool(sol.trusted and all(x["pass"] for x in checks))
        if not sol.trusted:
            out["note"] = "|y| or |z| >= 1: truncated diagonalization is not meaningful"
        return out, (EXIT_OK if out["verdict"] else EXIT_NUMERIC)

    sol = solve_metric(cfg)
    if sol.family.name.startswith("Sl2"):
        rep = build_rep(RepKind("Sl2PolynomialPT", cfg.sl2_n))
        block = rep.dim
    else:
        rep = build_rep(cfg.rep(), cfg.dim)
        block = metric.trusted_block(rep)
    cap = tol["exp_norm_cap"]
    vr = metric.verify_solution(sol, rep, block, cap)
    r = tol["residual"]
    out = metric_report(sol, cfg)
    out.update({
        "rep": {"kind": rep.kind.variant, "param": rep.kind.param, "dim": rep.dim, "block": block},
        "adjoint_residual": check(metric.verify_adjoint(sol.eta, rep, block, cap), r),
        "similarity_residual": check(vr.similarity_residual, r),
        "quasi_hermiticity_residual": check(vr.quasi_hermiticity_residual, r),
        "rho_min_eig": check(vr.rho_min_eig, 0.0, below=False),
        "eta_condition": vr.eta_condition,
    })
    keys = ["adjoint_residual", "similarity_residual", "quasi_hermiticity_residual", "rho_min_eig"]
    out["verdict"] = all(out[k]["pass"] for k in keys) and all(
        x["pass"] for x in out["constraint_residuals"])
    return out, (EXIT_OK if out["verdict"] else EXIT_NUMERIC)


def cmd_spectrum(cfg: RunConfig) -> dict:
    n = _levels(cfg)
    out = {"dim": cfg.dim, "levels": n}
    if is_bog_family(cfg.family):
        sol = solve_bogoliubov(cfg)
        rep = build_rep(RepKind("TwoBoson"), cfg.dim)
        E = eigenvalues(assemble(sol.completed, rep, cfg.offset).matrix)
        n = BOG_ROWS
        out["levels"] = n
        closed = sol.levels(n - 1) + cfg.offset
        out.update(family=BOG_PREFIX + sol.family.replace("Asym", ""), trusted=sol.trusted,
                   closed_form=closed, numeric=nearest_match(closed, E))
        return out
    if cfg.family:
        sol = solve_metric(cfg)
        c, h = sol.completed, sol.counterpart
        out["family"] = str(sol.family)
    else:
        c, h = cfg.coeffs, None
    if cfg.family and sol.family.name.startswith("Sl2"):
        rep = build_rep(RepKind("Sl2PolynomialPT", cfg.sl2_n))
    else:
        rep = build_rep(cfg.rep(), cfg.dim)
    E = _low(eigenvalues(assemble(c, rep, cfg.offset).matrix), n)
    out["numeric"] = E
    out["max_abs_imag"] = check(np.abs(E.imag).max(), cfg.tol["imag"])
    if h is not None:
        hm = assemble(h, rep, cfg.offset).matrix
        Eh = np.linalg.eigvalsh((hm + hm.conj().T) / 2)[:n]
        out["counterpart"] = Eh
        out["isospectrality"] = check(rel_err(nearest_match(Eh, E), Eh).max(), cfg.tol["spectral"])
    return out


# ---------------------------------------------------------------------------
# Sweep

def sweep_points(cfg: RunConfig):
    axes = cfg.sweep
    if not axes:
        raise ConfigError("sweep needs a [sweep] section with at least one axis")
    return list(itertools.product(*[a.values for a in axes]))


def sweep_columns(cfg: RunConfig) -> List[str]:
    cols = ["index"] + [a.name for a in cfg.sweep]
    cols += ["m_" + str(f).replace("(", "").replace(")", "") for f in metric.METRIC_FAMILIES]
    cols += ["b_" + e["family"].replace("(", "").replace(")", "")
             for e in classify_bog(cfg.coeffs, cfg.bog_param)]
    cols += ["family_epsilon", "real", "min_abs_im", "max_abs_im", "level_drift", "max_residual"]
    return cols


def _point_cfg(cfg, point):
    lam = cfg.lam
    upd = {}
    for axis, v in zip(cfg.sweep, point):
        if axis.name == "lambda":
            lam = v
        else:
            upd[axis.name] = v
    return replace(cfg, coeffs=cfg.coeffs.replace(**upd), lam=lam)


def level_stability(cfg: RunConfig):
    """Drift of the lowest levels from ``dim`` to ``3 dim / 2`` and their imaginary parts.

    A real truncated matrix can have a real spectrum even when the operator
    has none, so reality needs both small imaginary parts and convergence.
    """
    # few levels: convergence slows near a reality boundary
    n = max(1, cfg.dim // 24)
    kind = cfg.rep()
    lo = _low(eigenvalues(assemble(cfg.coeffs, build_rep(kind, cfg.dim), cfg.offset).matrix), n)
    hi = eigenvalues(assemble(cfg.coeffs, build_rep(kind, cfg.dim + cfg.dim // 2), cfg.offset).matrix)
    drift = float(rel_err(nearest_match(lo, hi), lo).max())
    return drift, np.abs(lo.imag)


def sweep_row(args):
    cfg, index, point = args
    pc = _point_cfg(cfg, point)
    tol = pc.tol
    row = [index] + list(point)
    mres = [0.0]
    for e in metric.classify_metric(pc.coeffs, pc.lam, tol=tol["residual"]):
        if e["family"] == "Trivial":
            continue
        row.append(int(e["applicable"]))
        if e["applicable"]:
            mres.append(e["membership"])
    for e in classify_bog(pc.coeffs, pc.bog_param, tol["residual"]):
        row.append(int(e["applicable"]))
        if e["applicable"]:
            mres.append(e["membership"])
    eps = ""
    if pc.family:
        try:
            if is_bog_family(pc.family):
                eps = ""
            else:
                sol = solve_metric(pc)
                eps = float(sol.eta.epsilon)
                mres.extend(abs(r) for r in sol.constraint_residuals)
        except (FamilyInapplicable, NumericalError):
            eps = ""
    try:
        drift, im = level_stability(pc)
        ok = im.max() < tol["imag"] and drift < tol["spectral"]
        row += [eps, int(ok), float(im.min()), float(im.max()), drift]
    except NumericalError:
        row += [eps, "", "", "", ""]
    row.append(float(max(mres)))
    return row


def cmd_sweep(cfg: RunConfig) -> str:
    points = sweep_points(cfg)
    jobs = [(cfg, i, p) for i, p in enumerate(points)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            rows = list(ex.map(sweep_row, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        rows = [sweep_row(j) for j in jobs]
    buf = io.StringIO()
    buf.write(SWEEP_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(sweep_columns(cfg))
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Entry point

def _setup_logging():
    level = os.environ.get("QH_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _table(report: dict, prefix="") -> List[str]:
    lines = []
    for k, v in report.items():
        if isinstance(v, dict) and not {"value", "tol"} <= set(v):
            lines += _table(v, prefix + k + ".")
        elif isinstance(v, dict):
            lines.append(f"{prefix + k:<40} {v['value']:<14.6g} tol {v['tol']:<8g} "
                         f"{'ok' if v['pass'] else 'FAIL'}")
        elif not isinstance(v, list):
            lines.append(f"{prefix + k:<40} {v}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qh", description="Quasi-Hermitian Lie-algebraic Hamiltonians")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="sectioned key-value file")
    p.add_argument("--dim", type=int)
    p.add_argument("--tol", type=float, help="residual tolerance")
    p.add_argument("--branch", choices=("+", "-"))
    p.add_argument("--family")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--version", action="version", version=f"qh {__version__}")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    code = EXIT_OK
    try:
        cfg = override(load_config(args.config), dim=args.dim, tol=args.tol, branch=args.branch,
                       family=args.family, seed=args.seed, workers=args.workers)
        log.info("command %s family %s", args.command, cfg.family)
        if args.command == "sweep":
            stdout.write(cmd_sweep(cfg))
            return EXIT_OK
        if args.command == "classify":
            body = cmd_classify(cfg)
        elif args.command == "solve":
            body = cmd_solve(cfg)
        elif args.command == "verify":
            body, code = cmd_verify(cfg)
        else:
            body = cmd_spectrum(cfg)
        report = {"qh_version": __version__, "command": args.command, "config": cfg.echo(),
                  "result": body, "exit_code": code}
    except ConfigError as exc:
        return _fail(stdout, args.command, EXIT_CONFIG, exc)
    except FamilyInapplicable as exc:
        return _fail(stdout, args.command, EXIT_INAPPLICABLE, exc)
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return _fail(stdout, args.command, EXIT_NUMERIC, exc)
    report = jsonable(report)
    json.dump(report, stdout, indent=2, allow_nan=False)
    stdout.write("\n")
    if stderr.isatty():
        stderr.write("\n".join(_table(report["result"])) + "\n")
    return code


def _fail(stdout, command, code, exc) -> int:
    log.debug("failure", exc_info=exc)
    json.dump({"qh_version": __version__, "command": command, "error": type(exc).__name__,
               "message": str(exc), "exit_code": code}, stdout, indent=2)
    stdout.write("\n")
    return code


def main(argv=None) -> int:
    _setup_logging()
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
