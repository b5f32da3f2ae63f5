"""Run orchestration: config in, time series + snapshots + report out."""

from __future__ import annotations

import logging
import time as _time
from pathlib import Path

import numpy as np

from .config import RunConfig, initial_eta, initial_nu
from .errors import (DegenerateMapError, EvapFrontError, MarginViolation, ValidationError,
                     WellposednessHalt)
from .runio import (CSV_COLUMNS, SeriesWriter, read_series, read_snapshot, validate_report,
                    write_json, write_snapshot)
from .simulate import SimState, Simulator, StepControls, StepInfo

logger = logging.getLogger(__name__)

TIME_UNITS = {
    "t": "rescaled time: humidity diffuses with coefficient 1, front mobility mu*gamma_diff",
    "t_nondim": "t / gamma_diff, the unit before the final time rescaling",
}
CONVENTIONS = {
    "params.alpha, params.beta": "physical (not divided by mu)",
    "margin": "sign(mu) * d_n(beta nu + alpha P), physical alpha, beta",
    "omega1": "alpha, beta divided by mu * gamma_diff",
}


def make_simulator(cfg: RunConfig) -> Simulator:
    grid = cfg.grid.build(cfg.params.H)
    controls = StepControls(delta_j=cfg.monitor.delta_j, gamma_margin=cfg.monitor.gamma_margin,
                            tol_ell=cfg.solver.tol_ell, halt_on_illposed=cfg.monitor.halt_on_illposed)
    return Simulator(grid, cfg.params, cfg.dt, controls)


def initial_state(cfg: RunConfig, sim: Simulator) -> SimState:
    try:
        return sim.initial_state(initial_eta(cfg, sim.grid), initial_nu(cfg, sim.grid))
    except (MarginViolation, DegenerateMapError) as exc:
        raise ValidationError(f"initial interface rejected: {exc}") from exc


def _row(state: SimState, info: StepInfo, gamma_diff: float) -> dict:
    e = info.fields.extrema()
    return {"step": state.step, "t": state.time, "t_nondim": state.time / gamma_diff,
            "eta_inf": float(np.abs(state.eta).max()),
            "eta_l2": float(np.sqrt(np.mean(state.eta**2))),
            "margin_worst": info.report.worst, "wellposed": info.report.satisfied, **e}


def _trim_series(path: Path, before_step: int) -> None:
    """Drop rows at or after ``before_step`` so a restart can append cleanly."""
    if not path.exists():
        return
    data = read_series(path)
    keep = data["step"] < before_step
    with SeriesWriter(path) as w:
        for i in np.flatnonzero(keep):
            w.write({c: (int(data[c][i]) if c in ("step", "wellposed") else data[c][i])
                     for c in CSV_COLUMNS})


def run_simulation(cfg: RunConfig, outdir, *, restart_from=None) -> dict:
    """Run to ``cfg.t_end`` writing ``timeseries.csv``, snapshots and ``report.json``.

    Module errors are re-raised after a post-mortem snapshot of the last good
    state and a report with ``status`` set accordingly.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    sim = make_simulator(cfg)
    chash = cfg.physics_hash()
    if restart_from is not None:
        state, _ = read_snapshot(restart_from, chash)
        if state.eta.shape != sim.grid.transverse_shape:
            raise ValidationError("snapshot grid does not match the config")
        _trim_series(outdir / "timeseries.csv", state.step)
    else:
        state = initial_state(cfg, sim)

    n_total = cfg.n_steps
    worst_max, all_ok, bounds_ok = -np.inf, True, True
    status, err = "ok", None
    files = {"timeseries": "timeseries.csv", "final_snapshot": "final.json"}
    t0 = _time.perf_counter()
    series = SeriesWriter(outdir / "timeseries.csv", append=restart_from is not None)
    try:
        while state.step < n_total:
            new, info = sim.step(state)
            if state.step % cfg.output.cadence == 0:
                series.write(_row(state, info, cfg.params.gamma_diff))
            worst_max = max(worst_max, info.report.worst)
            all_ok &= info.report.satisfied
            bounds_ok &= info.fields.within_bounds(cfg.solver.tol_mp)
            state = new
            if cfg.output.snapshot_every and state.step % cfg.output.snapshot_every == 0:
                write_snapshot(outdir / f"snap_{state.step:07d}.json", state, chash)
        final = sim.diagnose(state)
        series.write(_row(state, final, cfg.params.gamma_diff))
        worst_max = max(worst_max, final.report.worst)
        all_ok &= final.report.satisfied
        bounds_ok &= final.fields.within_bounds(cfg.solver.tol_mp)
        write_snapshot(outdir / "final.json", state, chash, final.fields.pressure)
    except EvapFrontError as exc:
        status = "halted" if isinstance(exc, (MarginViolation, WellposednessHalt)) else "failed"
        err = f"step {state.step}: {type(exc).__name__}: {exc}"
        files["postmortem_snapshot"] = f"postmortem_{state.step:07d}.json"
        write_snapshot(outdir / files["postmortem_snapshot"], state, chash)
        logger.error(err)
        raise
    except Exception as exc:
        status, err = "failed", f"step {state.step}: {type(exc).__name__}: {exc}"
        raise
    finally:
        series.close()
        report = {
            "status": status, "steps": state.step, "t_final": state.time, "config_hash": chash,
            "time_units": TIME_UNITS, "conventions": CONVENTIONS,
            "eta_inf_final": float(np.abs(state.eta).max()),
            "margin": {"worst_max": float(worst_max) if np.isfinite(worst_max) else 0.0,
                       "satisfied_all": bool(all_ok), "omega0": cfg.params.omega0},
            "bounds_ok": bool(bounds_ok), "error": err, "files": files,
            "wall_seconds": _time.perf_counter() - t0,
        }
        validate_report(report)
        write_json(outdir / "report.json", report)
    logger.info("run finished: %d steps, |eta|_inf = %.3e", state.step, report["eta_inf_final"])
    return report
