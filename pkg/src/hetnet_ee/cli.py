"""Command-line entry point: one reproducible CSV per experiment.

Usage::

    hetnet-ee COMMAND [--config FILE] [--preset NAME ...] [--set KEY=VALUE ...]
                      [--out PATH] [--seed N] [--replicates N] [--grid SPEC] [--tol X]

Every output starts with ``#`` comment lines carrying the package version,
the command line arguments that matter and the fully resolved configuration,
so the file alone is enough to rerun the experiment.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import asdict, fields
from typing import Optional

import numpy as np

from . import __version__
from .config import PRESETS, build, resolve
from .csvio import emit_csv
from .energy import (AllocationScheme, FlatObjective, energy_efficiency,
                     link_powers, optimize_zeta, sweep)
from .errors import HetNetError
from .montecarlo import Link, estimate_spectral_efficiency
from .network import cell_load_pmf, derive, macro_load_mean, underload_probability
from .quadrature import QuadConfig
from .rates import compute_rates, unit_rate

COMMANDS = ("derive", "rates", "power", "ee", "sweep-zeta", "sweep-power", "sweep-saps",
            "optimize-zeta", "mc-validate", "load-pmf")

# exit status per error category; 1 is anything unexpected
EXIT_CODES = {
    "config": 2,
    "invalid_params": 3,
    "domain": 4,
    "degenerate_model": 5,
    "non_convergence": 6,
    "rank_deficient": 7,
    "empty_tier": 8,
}

RATE_COLUMNS = ("R_m_DL", "R_m_UL", "R_s_DL", "R_s_UL", "R_b_DL", "R_b_UL")
EE_COLUMNS = ("zeta_b", "eta", "area_rate", "area_power") + RATE_COLUMNS
MC_TOLERANCE = 0.05


class UsageError(HetNetError, ValueError):
    category = "config"


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hetnet-ee", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="INI config file")
    ap.add_argument("--preset", action="append", default=[],
                    help=f"preset name, repeatable or comma separated ({', '.join(PRESETS)})")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                    help="override one config key (highest precedence)")
    ap.add_argument("--out", help="output CSV path (default: stdout)")
    ap.add_argument("--seed", type=int, help="Monte Carlo seed")
    ap.add_argument("--replicates", type=int, help="Monte Carlo replicates per link")
    ap.add_argument("--grid", help="sweep grid: N points, a:b:N, a:b (integers) or a,b,c")
    ap.add_argument("--tol", type=float, help="zeta refinement tolerance / rate quadrature rel_tol")
    ap.add_argument("--scheme", default="optimal", choices=[s.value for s in AllocationScheme],
                    help="bandwidth allocation scheme for power/SAP sweeps")
    ap.add_argument("--uncoupled", action="store_true",
                    help="sweep-power: vary P_mt only, keep P_mb fixed")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def parse_grid(spec: Optional[str], default: list[float]) -> list[float]:
    if spec is None:
        return list(default)
    s = spec.strip()
    try:
        if "," in s:
            return [float(x) for x in s.split(",") if x.strip()]
        parts = s.split(":")
        if len(parts) == 3:
            return list(np.linspace(float(parts[0]), float(parts[1]), int(parts[2])))
        if len(parts) == 2:
            return [float(k) for k in range(int(parts[0]), int(parts[1]) + 1)]
        return [float(s)]
    except ValueError as exc:
        raise UsageError(f"cannot parse --grid {spec!r}: {exc}") from None


def _grid_count(spec: Optional[str], default: int) -> int:
    if spec is None:
        return default
    try:
        n = int(spec)
    except ValueError:
        raise UsageError(f"--grid for this command is a point count, got {spec!r}") from None
    if n < 3:
        raise UsageError("--grid must be >= 3")
    return n


def _ee_row(zeta, result) -> dict:
    row = {"zeta_b": zeta, "eta": result.eta, "area_rate": result.area_rate,
           "area_power": result.area_power}
    row.update(result.rates.as_dict())
    return row


def _header(args, resolved) -> list[str]:
    lines = [f"hetnet-ee {__version__}", f"command: {args.command}",
             f"presets: {', '.join(resolved.presets)}"]
    for name in ("grid", "tol", "scheme", "uncoupled"):
        val = getattr(args, name)
        if val is not None and val is not False:
            lines.append(f"{name}: {val}")
    lines.append("resolved config:")
    lines.extend(f"  {k} = {v}" for k, v in resolved.items())
    return lines


def run(argv: Optional[list[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rows, schema, resolved = _execute(args)
    except HetNetError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 1
    try:
        emit_csv(rows, schema, args.out, comments=_header(args, resolved))
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 1
    return 0


def _execute(args):
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.replicates is not None:
        overrides.append(f"replicates={args.replicates}")
    presets = [p for item in args.preset for p in item.split(",") if p.strip()]
    resolved = resolve(args.config, presets or None, overrides)
    params, powers, sim = build(resolved)
    cmd = args.command
    # --tol is the rate quadrature tolerance except for optimize-zeta
    if args.tol is None or cmd == "optimize-zeta":
        rate_cfg = QuadConfig()
    else:
        rate_cfg = QuadConfig(rel_tol=args.tol)

    if cmd == "derive":
        model = derive(params, powers)
        skip = {"params", "powers"}
        schema = [f.name for f in fields(model) if f.name not in skip]
        schema += ["macro_load_mean"]
        row = {k: getattr(model, k) for k in schema[:-1]}
        row["macro_load_mean"] = macro_load_mean(params, powers)
        return [row], schema, resolved

    if cmd == "rates":
        rates = compute_rates(derive(params, powers), rate_cfg)
        return [rates.as_dict()], list(RATE_COLUMNS), resolved

    if cmd == "power":
        rates = compute_rates(derive(params, powers), rate_cfg)
        br = link_powers(params, powers, rates)
        return [asdict(br)], list(asdict(br)), resolved

    if cmd == "ee":
        return [_ee_row(params.zeta_b, energy_efficiency(params, powers))], list(EE_COLUMNS), resolved

    if cmd == "sweep-zeta":
        n = _grid_count(args.grid, 33)
        grid = list(np.linspace(0.0, 1.0, n))
        scheme = AllocationScheme(args.scheme)
        res = sweep(params, powers, "zeta_b", grid, scheme=scheme, workers=sim.workers)
        rows = [_sweep_row("row", r) for r in res]
        ok = [r for r in res if r.result is not None]
        if ok:
            best = max(ok, key=lambda r: r.result.eta)
            rows.append(_sweep_row("argmax", best))
        return rows, ["kind", "value", "error"] + list(EE_COLUMNS), resolved

    if cmd in ("sweep-power", "sweep-saps"):
        if cmd == "sweep-power":
            grid_dbm = parse_grid(args.grid, list(np.linspace(30.0, 50.0, 11)))
            grid = [10.0 ** ((x - 30.0) / 10.0) for x in grid_dbm]
            var = "P_mt_coupled"
        else:
            grid = parse_grid(args.grid, [float(k) for k in range(1, 9)])
            var = "saps_per_mbs"
        res = sweep(params, powers, var, grid, scheme=AllocationScheme(args.scheme),
                    coupled=not args.uncoupled, workers=sim.workers)
        rows = [_sweep_row("row", r) for r in res]
        return rows, ["kind", "value", "error"] + list(EE_COLUMNS), resolved

    if cmd == "optimize-zeta":
        n = _grid_count(args.grid, 33)
        tol = 1e-3 if args.tol is None else args.tol
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", FlatObjective)
            z, res = optimize_zeta(params, powers, grid_resolution=n, refine_tol=tol)
        row = _ee_row(z, res)
        row["flat"] = any(issubclass(w.category, FlatObjective) for w in caught)
        return [row], list(EE_COLUMNS) + ["flat"], resolved

    if cmd == "mc-validate":
        model = derive(params, powers)
        rows = []
        for link in Link:
            analytic = unit_rate(link.value, model, rate_cfg)
            est = estimate_spectral_efficiency(link, params, powers, sim)
            gap = (est.mean - analytic) / analytic if analytic > 0 else 0.0
            lo, hi = est.interval
            ok = abs(gap) <= MC_TOLERANCE or lo <= analytic <= hi
            rows.append({"link": link.value, "analytic": analytic, "mc_mean": est.mean,
                         "ci95_halfwidth": est.ci95_halfwidth, "rel_gap": gap,
                         "replicates": est.replicates, "rejected_draws": est.rejections,
                         "status": "PASS" if ok else "FAIL"})
        schema = ["link", "analytic", "mc_mean", "ci95_halfwidth", "rel_gap", "replicates",
                  "rejected_draws", "status"]
        return rows, schema, resolved

    if cmd == "load-pmf":
        mu = macro_load_mean(params, powers)
        n_max = int(parse_grid(args.grid, [max(3 * mu, params.K_m + 10)])[-1])
        n = np.arange(n_max + 1)
        pmf = cell_load_pmf(n, mu)
        cdf = np.cumsum(pmf)
        rows = [{"n": int(k), "pmf": float(p), "cdf": float(c)} for k, p, c in zip(n, pmf, cdf)]
        exact, bound = underload_probability(params.K_m, params, powers)
        rows.append({"n": params.K_m, "underload_exact": exact, "underload_bound": bound})
        return rows, ["n", "pmf", "cdf", "underload_exact", "underload_bound"], resolved

    raise UsageError(f"unknown command {cmd!r}")


def _sweep_row(kind, r) -> dict:
    row = {"kind": kind, "value": r.value, "error": r.error}
    if r.result is not None:
        row.update(_ee_row(r.zeta_b, r.result))
    return row


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
