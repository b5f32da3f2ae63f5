"""Command line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 margin or
well-posedness halt.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import logging
import math
import sys

import numpy as np

from .config import load_config
from .errors import EvapFrontError, ValidationError
from .fields import Params
from .modelproblem import flat_front_growth_rate, solve_halfspace_mode
from .nondim import PhysicalParams, nondimensionalize, solve_equilibrium
from .runio import _json_default, write_json
from .symbol import (SectorSpec, SymbolParams, dispersion_root, layered_dispersion_root,
                     n_parabolicity_scan)

logger = logging.getLogger("evapfront")


def _floats(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in s.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from exc


def _emit(doc: dict, out: str | None) -> None:
    if out:
        write_json(out, doc)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True, default=_json_default)
        sys.stdout.write("\n")


def cmd_simulate(a) -> int:
    from .runner import run_simulation

    cfg = load_config(a.config)
    if a.seed is not None:
        cfg = dataclasses.replace(cfg, initial=dataclasses.replace(cfg.initial, seed=a.seed))
    if a.halt_on_illposed:
        cfg = dataclasses.replace(cfg, monitor=dataclasses.replace(cfg.monitor, halt_on_illposed=True))
    report = run_simulation(cfg, a.out, restart_from=a.restart)
    print(json.dumps({k: report[k] for k in ("status", "steps", "t_final", "eta_inf_final")}))
    return 0


def cmd_nondim(a) -> int:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys like P_a are case sensitive
    if not cp.read(a.physical):
        raise ValidationError(f"cannot read {a.physical}")
    if "physical" not in cp:
        raise ValidationError("file needs a [physical] section")
    known = {f.name for f in dataclasses.fields(PhysicalParams)}
    sec = cp["physical"]
    missing = known - set(sec)
    if missing:
        raise ValidationError(f"missing keys: {sorted(missing)}")
    try:
        phys = PhysicalParams(**{k: float(sec[k]) for k in known})
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    p = nondimensionalize(phys)
    doc = dataclasses.asdict(p)
    doc["equilibrium_residual"] = p.alpha / p.H + p.beta / (1 - p.H) - 1.0
    doc["wellposed_flat"] = math.copysign(1.0, p.mu) * (p.alpha / p.H - p.beta / (1 - p.H))
    _emit(doc, a.out)
    return 0


def cmd_equilibrium(a) -> int:
    sols = solve_equilibrium(H=a.H, alpha=a.alpha, beta=a.beta)
    if not sols:
        raise ValidationError("no flat equilibrium with H in (0, 1) for these numbers")
    for s in sols:
        s["margin_flat"] = s["alpha"] / s["H"] - s["beta"] / (1 - s["H"])
    _emit({"solutions": sols}, a.out)
    return 0


def cmd_symbol_scan(a) -> int:
    p = SymbolParams(a.alpha, a.beta, a.c)
    spec = SectorSpec(kappa=math.pi / 2 + a.eta_sector, delta_s=a.delta,
                      n_samples_radial=a.radial, n_samples_angular=a.angular)
    rep = n_parabolicity_scan(p, spec, a.eta_sector)
    doc = rep.as_dict()
    doc["params"] = {"alpha_s": p.alpha_s, "beta_s": p.beta_s, "c": list(p.c)}
    _emit(doc, a.out)
    return 0


def cmd_dispersion(a) -> int:
    p = SymbolParams(a.alpha, a.beta, a.c)
    roots = []
    for k in a.k:
        kv = np.full(len(p.c), 0.0)
        kv[0] = k
        r = layered_dispersion_root(p, kv, a.layered) if a.layered else dispersion_root(p, kv)
        roots.append(r.as_dict())
    _emit({"params": {"alpha_s": p.alpha_s, "beta_s": p.beta_s, "c": list(p.c)},
           "layered_H": a.layered, "roots": roots}, a.out)
    return 0


def cmd_model_oracle(a) -> int:
    if a.kind == "flat":
        params = Params(a.alpha, a.beta, gamma_diff=a.gamma_diff, mu=a.mu, H=a.H)
        roots = [flat_front_growth_rate(params, [k]).as_dict() for k in a.k]
        _emit({"kind": "flat", "roots": roots}, a.out)
        return 0
    forcing = {
        "ramp": lambda t: 1.0 - math.exp(-t),
        "pulse": lambda t: t * math.exp(-20.0 * t),
    }[a.forcing]
    out = []
    for k in a.k:
        sol = solve_halfspace_mode(a.alpha, a.beta, [a.c], [k], forcing, a.T, a.dt,
                                   check_depth=a.check_depth)
        out.append({"k": k, "t": sol.t[:: a.stride], "phi_re": sol.phi_hat.real[:: a.stride],
                    "phi_im": sol.phi_hat.imag[:: a.stride], "depth": sol.depth,
                    "log_slope_second_half": sol.log_slope(a.T / 2),
                    "depth_sensitivity": sol.depth_sensitivity})
    _emit({"kind": "halfspace", "forcing": a.forcing, "modes": out}, a.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="evapfront", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run the nonlinear front simulation")
    s.add_argument("config")
    s.add_argument("--out", default="run")
    s.add_argument("--seed", type=int)
    s.add_argument("--restart", help="snapshot to continue from")
    s.add_argument("--halt-on-illposed", action="store_true")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("nondim", help="dimensionless numbers from physical constants")
    s.add_argument("physical", help="INI file with a [physical] section")
    s.add_argument("--out")
    s.set_defaults(func=cmd_nondim)

    s = sub.add_parser("equilibrium", help="complete alpha/H + beta/(1-H) = 1")
    s.add_argument("--H", type=float)
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_equilibrium)

    def symbol_args(s):
        s.add_argument("--alpha", type=float, required=True)
        s.add_argument("--beta", type=float, required=True)
        s.add_argument("--c", type=_floats, default=(0.0,))
        s.add_argument("--out")

    s = sub.add_parser("symbol-scan", help="sampled N-parabolicity check")
    symbol_args(s)
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--eta-sector", type=float, default=0.05)
    s.add_argument("--radial", type=int, default=32)
    s.add_argument("--angular", type=int, default=64)
    s.set_defaults(func=cmd_symbol_scan)

    s = sub.add_parser("dispersion", help="roots of the boundary symbol")
    symbol_args(s)
    s.add_argument("--k", type=_floats, default=(1.0,))
    s.add_argument("--layered", type=float, metavar="H", help="finite layer with level H")
    s.set_defaults(func=cmd_dispersion)

    s = sub.add_parser("model-oracle", help="single-mode reference solutions")
    s.add_argument("--kind", choices=("halfspace", "flat"), default="halfspace")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--c", type=float, default=0.0)
    s.add_argument("--k", type=_floats, default=(1.0,))
    s.add_argument("--H", type=float, default=0.5)
    s.add_argument("--mu", type=float, default=1.0)
    s.add_argument("--gamma-diff", type=float, default=1.0)
    s.add_argument("--forcing", choices=("ramp", "pulse"), default="ramp")
    s.add_argument("--T", type=float, default=5.0)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--stride", type=int, default=10)
    s.add_argument("--check-depth", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_model_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(a.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except EvapFrontError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
