"""Command-line entry point: ``relscott <subcommand> ...``.

Exit codes: 0 success, 1 regression baseline exceeded (``ltcheck``),
2 validation failure, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import NumericalError, ValidationError

log = logging.getLogger("relscott")


# output helpers -------------------------------------------------------------------


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_default(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (tuple, set)):
        return list(x)
    raise TypeError(f"not serializable: {type(x)}")


def _clean(x):
    # JSON has no inf/nan; encode them as strings
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


def dumps(obj) -> str:
    return json.dumps(_clean(json.loads(json.dumps(obj, default=_json_default, allow_nan=True))), indent=2, sort_keys=True) + "\n"


def write_json(out: Path, name: str, obj) -> str:
    text = dumps(obj)
    atomic_write(out / name, text)
    return text


def write_csv(out: Path, name: str, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    atomic_write(out / name, buf.getvalue())


def _config(args) -> dict:
    from .params import read_keyvalue

    return read_keyvalue(args.config) if args.config else {}


def _pick(value, cfg, key, default=None):
    return value if value is not None else cfg.get(key, default)


# subcommands -------------------------------------------------------------------------


def cmd_validate(args) -> int:
    from .params import system_from_mapping, validate_system

    sc = system_from_mapping(_config(args))
    rep = validate_system(sc.system, sc.eps, sc.kappa_star)
    text = write_json(args.out_dir, "validation.json", rep.to_dict())
    print(text, end="")
    return 0 if rep.passed else 2


def cmd_phase_space(args) -> int:
    from . import phase_space as ps

    law = ps.PressureLaw(args.law, args.gamma if args.law == ps.REL else 0.0, args.q)
    w = np.geomspace(args.wmin, args.wmax, args.n)
    rows = zip(w, ps.weyl_density(w, law), ps.weyl_pressure(w, law))
    write_csv(args.out_dir, "phase_space.csv", ["w", "density", "pressure"], rows)
    print(f"wrote {args.n} rows to {args.out_dir / 'phase_space.csv'}")
    return 0


def cmd_tf(args) -> int:
    from . import phase_space as ps
    from .tf_atom import RadialGrid, SCFOptions, solve_tf_atom, tf_energy

    cfg = _config(args)
    Z = float(_pick(args.Z, cfg, "Z"))
    N = float(_pick(args.N, cfg, "N", Z))
    law = ps.PressureLaw(args.law, args.gamma if args.law == ps.REL else 0.0, int(cfg.get("q", 2)))
    sol = solve_tf_atom(Z, N, law, RadialGrid.for_atom(Z, n=args.points), SCFOptions(tol=args.tol))
    en = tf_energy(sol)
    write_csv(args.out_dir, "tf_solution.csv", ["r", "W", "rho"], zip(sol.r, sol.W, sol.rho))
    summary = {
        "Z": Z, "N": N, "law": args.law, "gamma": law.gamma, "nu": sol.nu,
        "iterations": sol.iterations, "residual": sol.residual, "electrons": sol.electron_count(),
        "energy": en.total, "dual": en.dual, "kinetic": en.kinetic, "attraction": en.attraction,
        "repulsion": en.repulsion, "primal_dual_gap": en.primal_dual_gap,
    }
    print(write_json(args.out_dir, "tf_energy.json", summary), end="")
    return 0


def cmd_scott(args) -> int:
    from .spectral.channels import ChannelGrid
    from .spectral.scott import ScottProtocol, scott_estimate

    cfg = _config(args)
    Z = float(_pick(args.Z, cfg, "Z", 1.0))
    beta = float(_pick(args.beta, cfg, "beta", 0.0))
    radii = tuple(args.rmax / 2**k for k in range(args.nradii - 1, -1, -1))
    proto = ScottProtocol(
        radii=radii, L_max=args.Lmax, grid=ChannelGrid(args.box, args.nodes, 1.0),
        fit_exponent=args.fit_exponent, threads=args.threads,
    )
    est = scott_estimate(Z, beta, proto, strict=not args.no_strict)
    write_csv(args.out_dir, "scott_traces.csv", ["r", "localized_trace", "weyl"], zip(est.radii, est.traces, est.weyl))
    print(write_json(args.out_dir, "scott_estimate.json", est.to_dict()), end="")
    return 0 if est.converged else 3


def _read_potential(path, lat):
    from .spectral.lattice import GaugeLattice  # noqa: F401

    data = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=1)
    if data.shape[1] == 4:
        V = np.zeros(lat.shape)
        for i, j, k, v in data:
            V[int(i), int(j), int(k)] = v
        return V
    return data[:, -1].reshape(lat.shape)


def cmd_sgf(args) -> int:
    from .sgf import FieldConfiguration, MinimizeOptions, gaussian_bump, minimize, random_smooth_field
    from .spectral.lattice import GaugeLattice

    periodic = (args.periodic,) * 3
    lat = GaugeLattice.cube(args.lattice, args.spacing, periodic=periodic)
    V = _read_potential(args.potential, lat) if args.potential else gaussian_bump(lat, args.amplitude, args.width)
    rng = np.random.default_rng(args.seed)
    A0 = random_smooth_field(lat, rng, args.init_amplitude) if args.init_amplitude > 0 else None
    cfg = FieldConfiguration(lat.with_fields(A=A0), args.kappa)
    res = minimize(cfg, V, args.gamma, MinimizeOptions(tol=args.tol, max_iter=args.max_iter, seed=args.seed))
    write_csv(args.out_dir, "sgf_log.csv", ["step", "E", "residual", "field_energy"], res.history)
    idx = np.indices(lat.shape).reshape(3, -1).T
    Af = res.A.reshape(3, -1).T
    write_csv(args.out_dir, "sgf_A.csv", ["i", "j", "k", "Ax", "Ay", "Az"], (list(map(int, i)) + list(a) for i, a in zip(idx, Af)))
    summary = {"energy": res.energy, "residual": res.residual, "converged": res.converged,
               "steps": len(res.history) - 1, "restarts": res.restarts, "field_energy": cfg.field_energy(res.A),
               "kappa": args.kappa, "gamma": args.gamma, "lattice": args.lattice, "spacing": args.spacing}
    print(write_json(args.out_dir, "sgf_summary.json", summary), end="")
    return 0 if res.converged else 3


def cmd_ltcheck(args) -> int:
    from .ltlab import check_against_baseline, load_baseline, run_ensemble

    summ = run_ensemble(args.variant, args.samples, args.seed, args.threads)
    rows = [r.to_row() for r in summ.reports]
    keys = list(rows[0].keys())
    write_csv(args.out_dir, f"ltcheck_{args.variant}.csv", keys, ([r[k] if r[k] is not None else "" for k in keys] for r in rows))
    out = {k: v for k, v in summ.to_dict().items() if k != "reports"}
    code = 0
    if args.baseline:
        ok = check_against_baseline(summ, load_baseline(args.baseline))
        out["baseline_ok"] = ok
        code = 0 if ok else 1
    print(write_json(args.out_dir, f"ltcheck_{args.variant}.json", out), end="")
    return code


def _scott_table(path):
    from .assemble import ScottEntry, ScottTable

    if path:
        return ScottTable.read_csv(path)
    return ScottTable([ScottEntry(0.0, 0.0, 0.25, 0.0)])


def cmd_assemble(args) -> int:
    from .assemble import Coefficients, assemble_energy, solve_atoms
    from .params import system_from_mapping

    cfg = _config(args)
    sc = system_from_mapping(cfg)
    c = Coefficients(
        c_dirac=_pick(args.c_dirac, cfg, "c_dirac", Coefficients.c_dirac),
        c_schwinger=_pick(args.c_schwinger, cfg, "c_schwinger", Coefficients.c_schwinger),
        dirac=not args.no_dirac, schwinger=not args.no_schwinger, rct=not args.no_rct,
    )
    tf = solve_atoms(sc.system, grid_n=args.points)
    br = assemble_energy(sc.system, tf, _scott_table(args.scott_table), c,
                         E_TF_override=_pick(args.E_tf, cfg, "E_TF_override"),
                         molecular_correction=float(cfg.get("molecular_correction", 0.0)))
    out = br.to_dict()
    out["coefficients"] = {"c_dirac": c.c_dirac, "c_schwinger": c.c_schwinger, "dirac": c.dirac,
                           "schwinger": c.schwinger, "rct": c.rct, "rct_scheme": c.rct_scheme}
    print(write_json(args.out_dir, "energy_breakdown.json", out), end="")
    return 0


def cmd_bounds(args) -> int:
    import warnings

    from .assemble import BoundConstants, bounds_report
    from .params import system_from_mapping

    cfg = _config(args)
    sc = system_from_mapping(cfg)
    k = BoundConstants(
        C=float(cfg.get("C", args.C)), delta=float(cfg.get("delta", args.delta)),
        delta_prime=float(cfg.get("delta_prime", args.delta_prime)),
        C0=float(cfg.get("C0", args.C0)), C1=float(cfg.get("C1", args.C1)), b=_pick(args.b, cfg, "b"),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = bounds_report(sc.system, k)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(write_json(args.out_dir, "bounds.json", rep.to_dict()), end="")
    return 0


# parser ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relscott", description=__doc__.splitlines()[0])
    p.add_argument("--config", type=Path, help="key = value system/config file")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="directory for output files")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="regime checks for the configured system")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("phase-space", help="dump (w, density, pressure) tables")
    s.add_argument("action", choices=["dump"])
    s.add_argument("--law", choices=["nonrel", "rel"], default="nonrel")
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--q", type=int, default=2)
    s.add_argument("--wmin", type=float, default=1e-3)
    s.add_argument("--wmax", type=float, default=1e3)
    s.add_argument("--n", type=int, default=60)
    s.set_defaults(func=cmd_phase_space)

    s = sub.add_parser("tf", help="Thomas-Fermi atom")
    s.add_argument("--Z", type=float)
    s.add_argument("--N", type=float)
    s.add_argument("--law", choices=["nonrel", "rel"], default="nonrel")
    s.add_argument("--gamma", type=float, default=0.0)
    s.add_argument("--points", type=int, default=2001)
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_tf)

    s = sub.add_parser("scott", help="Scott coefficient from localized traces")
    s.add_argument("--Z", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--rmax", type=float, default=64.0, help="largest cutoff radius, units of 1/Z")
    s.add_argument("--nradii", type=int, default=4)
    s.add_argument("--Lmax", type=int, default=12)
    s.add_argument("--box", type=float, default=300.0, help="channel box, units of 1/Z")
    s.add_argument("--nodes", type=int, default=2000)
    s.add_argument("--fit-exponent", type=float, default=0.5)
    s.add_argument("--no-strict", action="store_true", help="emit the estimate even if not converged")
    s.set_defaults(func=cmd_scott)

    s = sub.add_parser("sgf", help="self-generated field minimization")
    s.add_argument("--lattice", type=int, default=6)
    s.add_argument("--spacing", type=float, default=0.5)
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--gamma", type=float, default=0.0)
    s.add_argument("--potential", type=Path, help="CSV of site values (i,j,k,V or V)")
    s.add_argument("--amplitude", type=float, default=8.0, help="Gaussian bump height if no potential file")
    s.add_argument("--width", type=float, default=0.6)
    s.add_argument("--init-amplitude", type=float, default=0.0, help="random initial field size (0: A0 = 0)")
    s.add_argument("--periodic", action="store_true")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=500)
    s.set_defaults(func=cmd_sgf)

    s = sub.add_parser("ltcheck", help="Daubechies-type inequality ensembles")
    s.add_argument("--variant", choices=["plain", "coulomb"], default="plain")
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--baseline", type=Path, help="JSON with frozen max ratios")
    s.set_defaults(func=cmd_ltcheck)

    s = sub.add_parser("assemble", help="energy breakdown for the configured system")
    s.add_argument("--scott-table", type=Path, help="CSV kappa_arg,beta_arg,S,err")
    s.add_argument("--c-dirac", type=float)
    s.add_argument("--c-schwinger", type=float)
    s.add_argument("--no-dirac", action="store_true")
    s.add_argument("--no-schwinger", action="store_true")
    s.add_argument("--no-rct", action="store_true")
    s.add_argument("--E-tf", type=float, help="override the superposition E_TF")
    s.add_argument("--points", type=int, default=2001)
    s.set_defaults(func=cmd_assemble)

    s = sub.add_parser("bounds", help="excess charge, ionization and distance bounds")
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--delta-prime", type=float, default=0.1)
    s.add_argument("--C0", type=float, default=1.0)
    s.add_argument("--C1", type=float, default=1.0)
    s.add_argument("--b", type=float)
    s.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return exc.exit_code
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
