"""Command-line interface: ``spheroidal-eq <command> [options]``."""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import energetics, io, particle_flow
from . import potentials as pot
from .exceptions import BracketError, DomainError, QuadratureError
from .kernel import EnergyParams
from .equilibrium_solver import (
    EquilibriumSolution,
    limit_convergence_table,
    limiting_equilibrium,
    solve_equilibrium,
)
from .special_functions import QUAD_TOL, h

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

log = logging.getLogger("spheroidal_eq")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default; keep that but route through ConfigError
    def error(self, message):
        raise ConfigError(message)


def _common(p, out_default="-"):
    p.add_argument("--n", type=int, default=3, help="dimension (default 3)")
    p.add_argument("--out", default=out_default, help="output file, '-' for stdout")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--quad-tol", type=float, default=QUAD_TOL, help="quadrature tolerance (recorded)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="spheroidal-eq", description="Equilibrium spheroids of the anisotropic Coulomb energy.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve for the equilibrium spheroid (JSON)")
    _common(p)
    p.add_argument("--alpha", type=float, default=0.0)

    p = sub.add_parser("sweep", help="equilibria over an alpha grid (CSV)")
    _common(p)
    p.add_argument("--alpha-min", type=float, default=-0.9)
    p.add_argument("--alpha-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=30)

    p = sub.add_parser("potential-map", help="potentials on a (x1, r) grid (CSV)")
    _common(p)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--extent", type=float, default=2.0, help="grid half-width in units of max(a, b)")
    p.add_argument("--grid", type=int, default=41)

    p = sub.add_parser("verify", help="Euler-Lagrange verification (JSON)")
    _common(p)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--solution", help="solution JSON from 'solve'; skips re-solving")
    p.add_argument("--el-tol", type=float, default=1e-6)
    p.add_argument("--points", type=int, default=1024)
    p.add_argument("--z-points", type=int, default=400)

    p = sub.add_parser("simulate", help="particle gradient flow (CSV snapshot + JSON metadata)")
    _common(p, out_default="simulate_out")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--particles", type=int, default=500)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--tol", type=float, default=particle_flow.CONV_TOL)
    p.add_argument("--mode", choices=["reproducible", "fast"], default="reproducible")

    p = sub.add_parser("limit", help="limiting shape as alpha -> -1 (JSON)")
    _common(p)
    p.add_argument("--eps", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3, 1e-4, 1e-5])

    p = sub.add_parser("parseval", help="real-space vs Fourier interaction energy of a bump (JSON)")
    _common(p)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--modulation", type=float, default=0.0)
    return ap


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("verbose",)}
    return cfg


def _params(args) -> EnergyParams:
    p = EnergyParams(args.n, args.alpha)
    p.require_solvable()
    return p


def cmd_solve(args):
    p = _params(args)
    sol = solve_equilibrium(p.alpha, p.n)
    data = sol.to_dict()
    data["relations"] = energetics.constant_relations(sol)
    io.write_json(args.out, "equilibrium_solution", _config(args), data)


def cmd_sweep(args):
    if args.steps < 2:
        raise DomainError("--steps must be at least 2")
    if not args.alpha_min < args.alpha_max:
        raise DomainError("--alpha-min must be below --alpha-max")
    grid = np.linspace(args.alpha_min, args.alpha_max, args.steps)
    rows = []
    for al in grid:
        EnergyParams(args.n, float(al)).require_solvable()
    for al in grid:
        sol = solve_equilibrium(float(al), args.n)
        rows.append(
            {
                "alpha": float(al),
                "t": sol.t,
                "a": sol.a,
                "b": sol.b,
                "c_alpha": sol.c_alpha,
                "energy": energetics.spheroid_energy(sol.spheroid, float(al)),
                "residual": sol.residual,
            }
        )
    ts = [r["t"] for r in rows]
    signed = [r for r in rows if abs(r["alpha"]) > 1e-12]
    summary = {
        "strictly_decreasing_t": bool(all(x > y for x, y in zip(ts, ts[1:]))),
        "oblate_for_positive_alpha": bool(all(r["t"] < 1 for r in signed if r["alpha"] > 0)),
        "prolate_for_negative_alpha": bool(all(r["t"] > 1 for r in signed if r["alpha"] < 0)),
    }
    io.write_csv(args.out, "alpha_sweep", _config(args), rows, summary)


def cmd_potential_map(args):
    p = _params(args)
    if args.grid < 2 or args.extent <= 0:
        raise DomainError("--grid must be >= 2 and --extent positive")
    sol = solve_equilibrium(p.alpha, p.n)
    s = sol.spheroid
    half = args.extent * max(s.a, s.b)
    x1 = np.linspace(-half, half, args.grid)
    r = np.linspace(0.0, half, args.grid)
    X1, R = np.meshgrid(x1, r, indexing="ij")
    pts = np.zeros((X1.size, p.n))
    pts[:, 0] = X1.ravel()
    pts[:, 1] = R.ravel()
    phi0, psi = pot.components(pts, s)
    phi = np.asarray(pot.phi_alpha(pts, s, p.alpha), dtype=float)
    inside = s.contains(pts)
    eff = phi + 0.5 * np.sum(pts**2, axis=1)
    rows = [
        {
            "x1": float(a),
            "r": float(b),
            "inside": int(c),
            "phi0": float(d),
            "psi": float(e),
            "phi_alpha": float(f),
            "effective": float(g),
            "slack": float(g - sol.c_alpha),
        }
        for a, b, c, d, e, f, g in zip(pts[:, 0], pts[:, 1], inside, np.atleast_1d(phi0), np.atleast_1d(psi), phi, eff)
    ]
    cfg = _config(args)
    cfg["solution"] = {"t": sol.t, "a": sol.a, "b": sol.b, "c_alpha": sol.c_alpha}
    io.write_csv(args.out, "potential_map", cfg, rows)


def cmd_verify(args):
    if args.solution:
        doc = io.read_json(args.solution)
        if doc.get("kind") != "equilibrium_solution":
            raise DomainError(f"{args.solution} is not a solution artifact")
        sol = EquilibriumSolution.from_dict(doc["data"])
        sol.params.require_solvable()
    else:
        p = _params(args)
        sol = solve_equilibrium(p.alpha, p.n)
    rep = energetics.el_report(sol, n_points=args.points, n_z=args.z_points, seed=args.seed)
    data = rep.to_dict()
    data["passed"] = rep.passed(tol=args.el_tol)
    data["relations"] = energetics.constant_relations(sol)
    cfg = _config(args)
    cfg["n"], cfg["alpha"] = sol.params.n, sol.params.alpha
    io.write_json(args.out, "el_report", cfg, data)


def cmd_simulate(args):
    EnergyParams(args.n, args.alpha)
    if args.particles < 1 or args.max_iter < 0:
        raise DomainError("--particles must be positive and --max-iter non-negative")
    cfg0 = particle_flow.ParticleConfig.initial(
        args.particles, EnergyParams(args.n, args.alpha), args.seed, args.step, args.mode
    )
    res = particle_flow.run_flow(cfg0, max_iter=args.max_iter, tol=args.tol)
    out = Path(args.out)
    cfg = _config(args)
    io.write_csv(out / "snapshot.csv", "particle_snapshot", cfg, particle_flow.snapshot_rows(res.config))
    meta = particle_flow.run_metadata(res) if res.config.n_particles > args.n else {"steps": res.steps}
    if args.alpha > -1 and args.alpha <= args.n - 2:
        sol = solve_equilibrium(args.alpha, args.n)
        meta["reference"] = {"t": sol.t, "b": sol.b}
    io.write_json(out / "metadata.json", "particle_run", cfg, meta)
    np.savetxt(out / "energies.txt", res.energies)


def cmd_limit(args):
    if args.n < 3:
        raise DomainError("n must be >= 3")
    t_star, b_star = limiting_equilibrium(args.n)
    table = limit_convergence_table(args.n, tuple(args.eps))
    data = {"t_star": t_star, "b_star": b_star, "h_t_star": h(t_star, args.n), "table": table}
    io.write_json(args.out, "limit", _config(args), data)


def cmd_parseval(args):
    EnergyParams(args.n, args.alpha)
    if args.size < 4:
        raise DomainError("--size must be at least 4")
    m, hh = energetics.smooth_bump(args.size, args.n, modulation=args.modulation)
    res = energetics.parseval_check(m, hh, args.alpha)
    data = {
        "real_side": res.real_side,
        "fourier_side": res.fourier_side,
        "rel_diff": res.rel_diff,
        "grid": list(res.grid),
        "box": res.box,
    }
    io.write_json(args.out, "parseval", _config(args), data)


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "potential-map": cmd_potential_map,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "limit": cmd_limit,
    "parseval": cmd_parseval,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"spheroidal-eq: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        particle_flow.configure_threads()
        if args.quad_tol <= 0 or not math.isfinite(args.quad_tol):
            raise DomainError("--quad-tol must be positive")
        COMMANDS[args.command](args)
    except (DomainError, FileNotFoundError, KeyError) as exc:
        print(f"spheroidal-eq: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BracketError, QuadratureError, ArithmeticError) as exc:
        print(f"spheroidal-eq: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
