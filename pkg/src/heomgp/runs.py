"""Run modes behind the command line, and CSV/JSON emission."""
from __future__ import annotations

import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .algebra import eig_hermitian, hermitize
from .config import RunConfig
from .errors import (
    DegeneracyEncountered,
    Divergence,
    HeomGpError,
    NotConverged,
    OverlapTooSmall,
    PartialSweepFailure,
)
from .gp import gp_accumulate, unitary_gp
from .heom import convergence_scan
from .integrate import Trajectory, evolve
from .model import ModelParams
from .observables import bloch, revival_count
from .oracle import pseudomode_evolve, trace_distance

log = logging.getLogger(__name__)

SINGLE_COLUMNS = ("tau", "cycle", "x", "y", "z", "R", "rho11", "re_rho12", "im_rho12",
                  "eps1", "eps2", "phi_unwrapped", "phi_unitary", "ratio", "trace_drift",
                  "min_eig")
SWEEP_COLUMNS = ("axis1", "axis2", "N", "phi_unwrapped", "phi_unitary", "ratio", "revivals",
                 "min_eig", "status")
THETA_COLUMNS = ("theta0_deg", "N", "tau", "R", "R_min", "phi_unwrapped", "phi_unitary",
                 "ratio", "status")
ORACLE_COLUMNS = ("tau", "cycle", "trace_distance", "R_heom", "R_oracle", "rho11_heom",
                  "rho11_oracle")
CONVERGENCE_COLUMNS = ("N1", "N2", "distance", "min_eig")


@dataclass
class RunRecord:
    config: RunConfig
    columns: tuple
    rows: list
    diagnostics: dict = field(default_factory=dict)
    events: list = field(default_factory=list)
    status: str = "ok"
    exit_code: int = 0
    wall_clock: float = 0.0
    version: str = __version__


def _status_of(exc: Exception) -> str:
    if isinstance(exc, DegeneracyEncountered):
        return "degeneracy"
    if isinstance(exc, Divergence):
        return "divergence"
    if isinstance(exc, OverlapTooSmall):
        return "overlap"
    return "error:" + type(exc).__name__


def _truncate(traj: Trajectory, n_samples: int) -> Trajectory:
    return Trajectory(traj.taus[:n_samples], traj.rhos[:n_samples], traj.drhos[:n_samples],
                      traj.params, traj.dt, None, traj.meta)


def gp_until_failure(traj: Trajectory):
    """GP over the longest prefix that avoids a degeneracy; returns (result, event)."""
    try:
        return gp_accumulate(traj), None
    except DegeneracyEncountered as exc:
        n = int(np.searchsorted(traj.taus, exc.tau))
        if n < 3:
            return None, exc
        return gp_accumulate(_truncate(traj, n)), exc


# -- single -----------------------------------------------------------------

def run_single(cfg: RunConfig, traj: Trajectory | None = None) -> RunRecord:
    start = time.perf_counter()
    p = cfg.params
    traj = traj or evolve(p)
    res, event = gp_until_failure(traj)
    n = len(traj.taus)
    phi = np.full(n, np.nan)
    events = []
    if res is not None:
        phi[: len(res.phi)] = res.phi
    if event is not None:
        events.append({"type": "degeneracy", "tau": event.tau})

    rhos = hermitize(traj.rhos)
    eps = eig_hermitian(rhos).values
    xyz = bloch(rhos)
    R = np.linalg.norm(xyz, axis=-1)
    cyc = traj.cycles
    phi_u = cyc * unitary_gp(p.theta0, 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(cyc > 0, phi / phi_u, np.nan)
    drift = np.abs(np.trace(traj.rhos, axis1=1, axis2=2) - 1)
    cols = [traj.taus, cyc, xyz[:, 0], xyz[:, 1], xyz[:, 2], R, traj.rho11,
            traj.rho12.real, traj.rho12.imag, eps[:, 0], eps[:, 1], phi, phi_u, ratio,
            drift, eps[:, 1]]
    rows = [tuple(float(c[i]) for c in cols) for i in range(n)]

    spc = p.samples_per_cycle
    per_cycle = {}
    for k in range(1, p.cycles + 1):
        v = phi[k * spc]
        per_cycle[k] = {"phi": float(v), "phi_unitary": unitary_gp(p.theta0, k),
                        "ratio": float(v / unitary_gp(p.theta0, k))}
    herm = float(np.max(np.abs(traj.rhos - np.conj(np.swapaxes(traj.rhos, 1, 2)))))
    diag = {
        "dt": traj.dt,
        "period": p.period,
        "max_trace_drift": float(drift.max()),
        "max_hermiticity_error": herm,
        "min_eig": float(eps[:, 1].min()),
        "revivals": revival_count(R, cfg.prominence),
        "per_cycle": per_cycle,
        "gp_route_mismatch": None if res is None else res.route_mismatch,
    }
    rec = RunRecord(cfg, SINGLE_COLUMNS, rows, diag, events)
    if event is not None:
        rec.status, rec.exit_code = "degeneracy", DegeneracyEncountered.exit_code
    rec.wall_clock = time.perf_counter() - start
    return rec


# -- sweeps -----------------------------------------------------------------

def evaluate_point(p: ModelParams, n_list, prominence=1e-3):
    """Summary rows (phi, phi_u, ratio, revivals, min_eig, status) for each N."""
    try:
        traj = evolve(p)
    except HeomGpError as exc:
        return [(math.nan, unitary_gp(p.theta0, n), math.nan, -1, math.nan, _status_of(exc))
                for n in n_list]
    try:
        res, event = gp_until_failure(traj)
    except HeomGpError as exc:
        res, event = None, exc
    eps2 = eig_hermitian(hermitize(traj.rhos)).values[:, 1]
    R = traj.R
    spc = p.samples_per_cycle
    out = []
    for n in n_list:
        k = n * spc
        phi_u = unitary_gp(p.theta0, n)
        revivals = revival_count(R[: k + 1], prominence)
        min_eig = float(eps2[: k + 1].min())
        if res is not None and k < len(res.phi):
            phi = float(res.phi[k])
            out.append((phi, phi_u, phi / phi_u, revivals, min_eig, "ok"))
        else:
            out.append((math.nan, phi_u, math.nan, revivals, min_eig, _status_of(event)))
    return out


def _sweep_task(args):
    p, n_list, prominence = args
    return evaluate_point(p, n_list, prominence)


def grid_points(cfg: RunConfig):
    """Row-major grid over the configured axes as (axis1, axis2, params)."""
    axes = list(cfg.axes)
    first = axes[0].values() if axes else [math.nan]
    second = axes[1].values() if len(axes) > 1 else [math.nan]
    for a in first:
        for b in second:
            changes = {}
            if axes:
                changes[axes[0].name] = a
            if len(axes) > 1:
                changes[axes[1].name] = b
            yield a, b, cfg.params.replace(**changes)


def _map(func, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks, chunksize=1))


def run_sweep(cfg: RunConfig) -> RunRecord:
    start = time.perf_counter()
    points = list(grid_points(cfg))
    n_list = cfg.report_cycles
    tasks = [(p, n_list, cfg.prominence) for _, _, p in points]
    log.info("sweep: %d points x %d cycle counts, %d worker(s)", len(points), len(n_list), cfg.workers)
    results = _map(_sweep_task, tasks, cfg.workers)
    rows, failed = [], 0
    for (a, b, _), summary in zip(points, results):
        for n, (phi, phi_u, ratio, rev, mine, status) in zip(n_list, summary):
            rows.append((a, b, n, phi, phi_u, ratio, rev, mine, status))
            failed += status != "ok"
    rec = RunRecord(cfg, SWEEP_COLUMNS, rows, {"points": len(points), "failed_rows": failed})
    if failed:
        rec.status, rec.exit_code = "partial", PartialSweepFailure.exit_code
    rec.wall_clock = time.perf_counter() - start
    return rec


def _theta_task(args):
    p, prominence = args
    try:
        traj = evolve(p)
    except HeomGpError as exc:
        return None, _status_of(exc)
    res, event = gp_until_failure(traj)
    return (traj.taus, traj.R, None if res is None else res.phi), (
        "ok" if event is None else _status_of(event))


def run_theta_scan(cfg: RunConfig) -> RunRecord:
    start = time.perf_counter()
    thetas = cfg.thetas_deg or (math.degrees(cfg.params.theta0),)
    for t in thetas:
        if not 0 < t < 180:
            raise ValueError(f"theta0 {t} deg outside (0, 180)")
    tasks = [(cfg.params.replace(theta0=math.radians(t)), cfg.prominence) for t in thetas]
    results = _map(_theta_task, tasks, cfg.workers)
    spc = cfg.params.samples_per_cycle
    rows, diag, failed = [], {}, 0
    for deg, (data, status) in zip(thetas, results):
        th = math.radians(deg)
        if data is None:
            rows.append((deg, 0, 0.0, math.nan, math.nan, math.nan, 0.0, math.nan, status))
            failed += 1
            continue
        taus, R, phi = data
        run = 0
        counting = True
        for n in range(cfg.params.cycles + 1):
            k = n * spc
            phi_n = float(phi[k]) if phi is not None and k < len(phi) else math.nan
            phi_u = unitary_gp(th, n)
            ratio = phi_n / phi_u if n else math.nan
            row_status = "ok" if math.isfinite(phi_n) else status
            rows.append((deg, n, float(taus[k]), float(R[k]), float(R[: k + 1].min()),
                         phi_n, phi_u, ratio, row_status))
            if n and counting:
                if abs(ratio - 1) < 0.05:
                    run += 1
                else:
                    counting = False
        diag[str(deg)] = {"cycles_within_5pct": run, "R_min": float(R.min()), "status": status}
        failed += status != "ok"
    rec = RunRecord(cfg, THETA_COLUMNS, rows, {"per_theta": diag})
    if failed:
        rec.status, rec.exit_code = "partial", PartialSweepFailure.exit_code
    rec.wall_clock = time.perf_counter() - start
    return rec


def run_oracle_compare(cfg: RunConfig) -> RunRecord:
    start = time.perf_counter()
    p = cfg.params
    h = evolve(p)
    o = pseudomode_evolve(p)
    td = trace_distance(h.rhos, o.rhos)
    rows = [(float(h.taus[i]), float(h.cycles[i]), float(td[i]), float(h.R[i]), float(o.R[i]),
             float(h.rho11[i]), float(o.rho11[i])) for i in range(len(h.taus))]
    diag = {"max_trace_distance": float(td.max()), "oracle": dict(o.meta), "dt_heom": h.dt,
            "dt_oracle": o.dt}
    rec = RunRecord(cfg, ORACLE_COLUMNS, rows, diag)
    rec.wall_clock = time.perf_counter() - start
    return rec


def run_convergence(cfg: RunConfig) -> RunRecord:
    start = time.perf_counter()
    rep = convergence_scan(cfg.params, sorted(cfg.depths), raise_on_failure=False)
    rows = [(r["N1"], r["N2"], math.nan if r["distance"] is None else r["distance"], r["min_eig"])
            for r in rep.rows()]
    rec = RunRecord(cfg, CONVERGENCE_COLUMNS, rows,
                    {"converged": rep.converged, "threshold": rep.threshold, **rep.extra})
    if not rep.converged:
        rec.status, rec.exit_code = "not-converged", NotConverged.exit_code
    rec.wall_clock = time.perf_counter() - start
    return rec


RUNNERS = {
    "single": run_single,
    "sweep": run_sweep,
    "theta-scan": run_theta_scan,
    "oracle-compare": run_oracle_compare,
    "convergence-scan": run_convergence,
}


def run(cfg: RunConfig) -> RunRecord:
    return RUNNERS[cfg.mode](cfg)


# -- emission ---------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return _jsonable(v.item())
    return v


def render(rec: RunRecord, fmt: str | None = None) -> str:
    """Serialise a record. Wall-clock time is left out so reruns are byte-identical."""
    fmt = fmt or rec.config.format
    if fmt == "json":
        doc = {"tool": "heomgp", "version": rec.version, "config": rec.config.to_flat(include_out=False),
               "status": rec.status, "columns": list(rec.columns),
               "rows": _jsonable([list(r) for r in rec.rows]),
               "diagnostics": _jsonable(rec.diagnostics), "events": _jsonable(rec.events)}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# heomgp {rec.version}\n")
    for line in rec.config.dumps(include_out=False).splitlines():
        buf.write(f"# {line}\n")
    buf.write(",".join(rec.columns) + "\n")
    for row in rec.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write(rec: RunRecord, out: str | None = None, fmt: str | None = None) -> str:
    text = render(rec, fmt)
    out = out or rec.config.out
    if out == "-":
        import sys

        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text
