"""Command-line front end.

Exit status: 0 on success, 1 when a verification misses its tolerance,
2 on invalid input (the failing predicate is printed to stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import propagator as prop
from .catalog import describe, list_families
from .errors import NLSError
from .residual import DEFAULT_BOX, SamplingConfig, reports_to_csv, verify_instance
from .serialization import default_spec, from_spec, suite_entries
from .symmetry import SymmetryOp, TransformedSolution, apply_all, residual_certify


class UsageError(NLSError):
    """Malformed command-line input."""


def _parse_box(text):
    try:
        v = [float(s) for s in text.split(":")]
    except ValueError:
        raise UsageError(f"--box needs six numbers, got {text!r}") from None
    if len(v) != 6:
        raise UsageError("--box must be tmin:tmax:xmin:xmax:ymin:ymax")
    return ((v[0], v[1]), (v[2], v[3]), (v[4], v[5]))


def _parse_point(text):
    try:
        v = [float(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"--point needs t,x,y, got {text!r}") from None
    if len(v) != 3:
        raise UsageError("--point must be t,x,y")
    return v


def _parse_op(text):
    """``T2:d1=0.3,d3=0`` or ``Swap`` or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return SymmetryOp.from_dict(json.loads(text))
    kind, _, rest = text.partition(":")
    kw = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        kw[key.strip()] = val.strip() if key.strip() == "variant" else float(val)
    return SymmetryOp(kind.strip(), **kw)


def _load(args):
    """Solution and default box from ``--spec`` or the suite default of ``--family``."""
    box = DEFAULT_BOX
    if args.spec:
        try:
            spec = json.loads(Path(args.spec).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read spec: {exc}") from None
    elif getattr(args, "family", None):
        spec, box = default_spec(args.family)
    else:
        raise UsageError("give --spec or --family")
    return from_spec(spec), box


def _config(args, box):
    if args.box:
        box = _parse_box(args.box)
    return SamplingConfig(n_points=args.points, box=box, fd_order=args.order, seed=args.seed)


def _fmt_complex(z):
    re, im = float(z.real) + 0.0, float(z.imag) + 0.0
    return f"{re:.15g}{im:+.15g}i"


def _write(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(sol, cfg, label):
    if isinstance(sol, TransformedSolution):
        return residual_certify(sol, cfg, label=label)
    return verify_instance(sol, cfg, label=label)


# --------------------------------------------------------------------------
# subcommands


def cmd_list(args):
    for d in list_families(args.kind):
        params = ",".join(d.params) or "-"
        print(f"{d.id:4s} {d.kind:8s} params={params:22s} {d.condition:45s} {d.description}")
    return 0


def cmd_describe(args):
    print(json.dumps(describe(args.family_id).to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_eval(args):
    sol, _ = _load(args)
    t, x, y = _parse_point(args.point)
    val = sol.evaluate(t, x, y)
    vals = val if isinstance(val, tuple) else (val,)
    print(" ".join(_fmt_complex(v) for v in vals))
    return 0


def cmd_verify(args):
    if args.suite:
        return _verify_suite(args)
    sol, box = _load(args)
    cfg = _config(args, box)
    label = getattr(sol, "family", None) or sol.root.family
    rep = _report(sol, cfg, label)
    ok = rep.passed(args.tol)
    if args.out and args.out.endswith(".csv"):
        _write(reports_to_csv([rep]), args.out)
    else:
        _write(rep.to_json() + "\n", args.out)
    status = "PASS" if ok else "FAIL"
    print(f"{status} {label} max_rel={rep.max_rel:.3e} tol={args.tol:g}", file=sys.stderr)
    return 0 if ok else 1


def _verify_suite(args):
    reports = []
    for name, spec, box in suite_entries(args.kind):
        cfg = _config(args, box)
        reports.append(verify_instance(from_spec(spec), cfg, label=name))
    _write(reports_to_csv(reports), args.out)
    bad = [r.label for r in reports if not r.passed(args.tol)]
    for label in bad:
        print(f"FAIL {label}", file=sys.stderr)
    return 1 if bad else 0


def cmd_transform(args):
    sol, box = _load(args)
    ops = [_parse_op(s) for s in args.op]
    if not ops and not isinstance(sol, TransformedSolution):
        raise UsageError("no transforms given (use --op or a spec with 'transforms')")
    sol = apply_all(ops, sol)
    cfg = _config(args, box)
    rep = residual_certify(sol, cfg, label=sol.root.family)
    ok = rep.passed(args.tol)
    doc = {"spec": sol.to_spec(), "report": rep.to_dict()}
    _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    status = "PASS" if ok else "FAIL"
    print(f"{status} {sol.root.family} + {len(sol.ops)} ops max_rel={rep.max_rel:.3e}",
          file=sys.stderr)
    return 0 if ok else 1


def cmd_propagate(args):
    sol, _ = _load(args)
    if isinstance(sol, TransformedSolution):
        raise UsageError("propagate needs an untransformed catalog instance")
    t1 = args.t0 + args.steps * args.dt
    table = prop.cross_validate(
        sol, t0=args.t0, t1=t1,
        nx_ladder=(args.nx // 4, args.nx // 2, args.nx),
        dt_ladder=(args.dt, args.dt / 2, args.dt / 4), ny=args.ny)
    _write(table.to_csv(), args.out)
    print(f"{sol.family} dt_slope={table.dt_slope:.3f}", file=sys.stderr)
    return 0


def cmd_export(args):
    sol, _ = _load(args)
    if isinstance(sol, TransformedSolution):
        raise UsageError("export needs an untransformed catalog instance")
    if not args.out:
        raise UsageError("export needs --out")
    grids = prop.seed_grid(sol, args.nx, args.ny, t=args.t0)
    if args.steps:
        grids = prop.split_step_evolve(grids, sol.phys, args.dt, args.steps)
    grids = grids if isinstance(grids, tuple) else (grids,)
    out = Path(args.out)
    for k, g in enumerate(grids, 1):
        path = out if len(grids) == 1 else out.with_name(f"{out.stem}_{k}{out.suffix}")
        if out.suffix == ".csv":
            prop.write_csv(g, path)
        else:
            prop.write_binary(g, path)
    return 0


# --------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="nls-exact", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sampling=False, grid=False):
        sp.add_argument("--spec", help="solution spec JSON file")
        sp.add_argument("--family", help="use the bundled default spec of this family")
        sp.add_argument("--out", help="output file (stdout when omitted)")
        if sampling:
            sp.add_argument("--tol", type=float, default=1e-6)
            sp.add_argument("--points", type=int, default=200)
            sp.add_argument("--order", type=int, default=8, choices=(4, 6, 8))
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--box", help="tmin:tmax:xmin:xmax:ymin:ymax")
        if grid:
            sp.add_argument("--nx", type=int, default=512)
            sp.add_argument("--ny", type=int, default=8)
            sp.add_argument("--dt", type=float, default=1e-3)
            sp.add_argument("--steps", type=int, default=100)
            sp.add_argument("--t0", type=float, default=0.0)

    sp = sub.add_parser("list", help="list solution families")
    sp.add_argument("--kind", choices=("single", "coupled"))
    sp.set_defaults(func=cmd_list)

    sp = sub.add_parser("describe", help="describe one family")
    sp.add_argument("family_id")
    sp.set_defaults(func=cmd_describe)

    sp = sub.add_parser("eval", help="evaluate a solution at a point")
    common(sp)
    sp.add_argument("--point", required=True, help="t,x,y")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("verify", help="finite-difference residual certification")
    common(sp, sampling=True)
    sp.add_argument("--suite", action="store_true", help="run the bundled suite (CSV)")
    sp.add_argument("--kind", choices=("single", "coupled"))
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("transform", help="apply symmetry ops and re-verify")
    common(sp, sampling=True)
    sp.add_argument("--op", action="append", default=[],
                    help="e.g. T1:d=2,d1=0.3 or T2:d1=0.3 or Swap (repeatable)")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("propagate", help="split-step cross-validation ladder")
    common(sp, grid=True)
    sp.set_defaults(func=cmd_propagate)

    sp = sub.add_parser("export", help="write a (possibly evolved) grid snapshot")
    common(sp, grid=True)
    sp.set_defaults(func=cmd_export, steps=0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NLSError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
