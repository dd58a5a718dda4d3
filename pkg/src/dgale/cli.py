"""Command-line front end: run, convergence, compare.

Exit codes: 0 on success, 2 when a run fails numerically, 3 for
configuration problems.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import ConfigError, _parse_n, load_config
from .driver import NumericalFailure, compare_modes, convergence_study, run


def _build_parser():
    p = argparse.ArgumentParser(
        prog="dgale",
        description="moving-mesh DG solver for compressible two-component flow")
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="advance one configured problem and write artifacts")
    runp.add_argument("config")
    runp.add_argument("--no-figures", action="store_true",
                      help="skip PNG rendering next to the delimited output")

    convp = sub.add_parser("convergence", help="error table over a resolution sweep")
    convp.add_argument("config")
    convp.add_argument("--n-list", required=True,
                       help="comma-separated resolutions, e.g. 40,80,160 or 4x4,8x8")

    cmpp = sub.add_parser("compare", help="run the same problem across mesh modes")
    cmpp.add_argument("config")
    cmpp.add_argument("--modes", default="eulerian,lagrangian,ale-mm")
    return p


def _cmd_run(args):
    cfg = load_config(args.config)
    art = run(cfg, figures=not args.no_figures)
    steps = len(art.log)
    print(f"completed {art.config.problem} [{art.config.mesh_mode}] "
          f"t={art.t:.6g} in {steps} steps -> {art.config.directory}")
    for f in art.files:
        print(" ", f)
    return 0


def _cmd_convergence(args):
    cfg = load_config(args.config).resolve()
    n_list = [_parse_n(s) for s in args.n_list.split(",") if s.strip()]
    table = convergence_study(cfg.problem, cfg.degree, n_list,
                              mesh_mode=cfg.mesh_mode, cfl=cfg.cfl,
                              t_final=cfg.t_final)
    rows, orders = table["rows"], table["orders"]
    hdr = f"{'N':>10} {'L1':>12} {'ord':>6} {'L2':>12} {'ord':>6} {'Linf':>12} {'ord':>6}"
    print(hdr)
    for i, (n, e1, e2, ei) in enumerate(rows):
        o = orders[i - 1] if i > 0 else ("", "", "")
        fo = [f"{x:.2f}" if x != "" else "" for x in o]
        label = n if np.isscalar(n) else f"{n[0]}x{n[1]}"
        print(f"{label:>10} {e1:12.4e} {fo[0]:>6} {e2:12.4e} {fo[1]:>6} "
              f"{ei:12.4e} {fo[2]:>6}")
    if not table["monotone"]:
        print("warning: L1 errors are not monotone over this sweep", file=sys.stderr)
    os.makedirs(cfg.directory, exist_ok=True)
    out = os.path.join(cfg.directory, "convergence.csv")
    with open(out, "w") as f:
        f.write("n,l1,l1_order,l2,l2_order,linf,linf_order\n")
        for i, (n, e1, e2, ei) in enumerate(rows):
            o = orders[i - 1] if i > 0 else (np.nan, np.nan, np.nan)
            label = n if np.isscalar(n) else f"{n[0]}x{n[1]}"
            f.write(f"{label},{e1:.17g},{o[0]:.4g},{e2:.17g},{o[1]:.4g},"
                    f"{ei:.17g},{o[2]:.4g}\n")
    print("table ->", out)
    return 0


def _cmd_compare(args):
    cfg = load_config(args.config).resolve()
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    report = compare_modes(cfg.problem, cfg.n, cfg.degree, modes=modes,
                           t_final=cfg.t_final)
    for mode, entry in report.items():
        if not entry["completed"]:
            print(f"{mode:>12}: FAILED  {entry['failure']}")
            continue
        bits = [f"steps={entry['steps']}"]
        for key in ("l1_density", "tv_pressure", "max_dP", "max_du"):
            if key in entry:
                bits.append(f"{key}={entry[key]:.4e}")
        print(f"{mode:>12}: " + "  ".join(bits))
    os.makedirs(cfg.directory, exist_ok=True)
    out = os.path.join(cfg.directory, "compare.json")
    with open(out, "w") as f:
        json.dump(report, f, indent=2)
    print("report ->", out)
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "convergence":
            return _cmd_convergence(args)
        return _cmd_compare(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        print(json.dumps(exc.record), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
