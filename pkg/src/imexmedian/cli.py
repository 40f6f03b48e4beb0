"""Command-line front end: ``imexmedian run|sweep|compare|spectral``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ImexMedianError, ParseError, ValidationError
from .scenario import BUNDLED, load_scenario, parse_graph_spec, run_scenario
from .spectral import contraction_constants, verify_decay_bound

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3


def _floats(text, name):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ValidationError(name, f"expected comma-separated numbers, got {text!r}") from None


def _add_run_flags(p):
    p.add_argument("--out", type=Path, help="output directory (default: runs/<scenario name>)")
    p.add_argument("--seed", type=int, help="seed for a uniform-random initial state")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--tol", type=float, help="convergence tolerance on ||X[n+1] - X[n]||_inf")
    p.add_argument("--tail-fraction", type=float)
    p.add_argument("--band", type=float, help="band around the median set for iterations-to-band")
    p.add_argument("--plot", action="store_true", help="also write a PNG chart per trajectory")
    p.add_argument("--strict", action="store_true", help="exit 1 when a theorem check fails")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imexmedian",
        description="Distributed median solver: IMEX network vs explicit baseline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file or bundled scenario")
    p.add_argument("scenario", help=f"path or bundled name ({', '.join(BUNDLED)})")
    p.add_argument("--method", choices=("imex", "explicit", "both"))
    p.add_argument("--k", type=float)
    p.add_argument("--t-s", type=float)
    _add_run_flags(p)

    p = sub.add_parser("sweep", help="sweep k and/or t_s, e.g. 'sweep k=5,10,20 fig1'")
    p.add_argument("items", nargs="+", metavar="ITEM", help="k=..., t_s=... assignments and one scenario")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    _add_run_flags(p)

    p = sub.add_parser("compare", help="run IMEX and explicit on identical inputs")
    p.add_argument("scenario")
    p.add_argument("--t-s", type=float, help="explicit time step (default: scenario t_s or 0.05)")
    _add_run_flags(p)

    p = sub.add_parser("spectral", help="print the spectral report of a graph at gain k")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="complete:N[:w] | ring:N | star:N | path:N | edges:N:1-2,2-3:0.5")
    src.add_argument("--scenario", help="take the graph from a scenario")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--n-max", type=int, default=50, help="largest power checked against the decay bound")
    p.add_argument("--json", type=Path, help="also write the full report as JSON")
    return parser


def _apply_overrides(s, args):
    if getattr(args, "seed", None) is not None:
        s = s.with_seed(args.seed)
    changes = {}
    for attr, key in (("max_iters", "max_iters"), ("tol", "convergence_tol"),
                      ("tail_fraction", "tail_fraction"), ("band", "band"),
                      ("method", "method"), ("k", "k"), ("t_s", "t_s")):
        value = getattr(args, attr, None)
        if value is not None:
            changes[key] = value
    if args.plot:
        changes["plot"] = True
    if changes:
        s = replace(s, **changes)
    if s.method in ("explicit", "both") and s.t_s is None and not s.sweep_t_s:
        raise ValidationError("t_s", f"required for method {s.method!r}")
    return s


def _out_dir(s, args):
    return args.out if args.out is not None else Path(s.output_dir or Path("runs") / s.name)


def _cmd_run(args):
    s = _apply_overrides(load_scenario(args.scenario), args)
    return run_scenario(s, out_dir=_out_dir(s, args), strict=args.strict)


def _cmd_sweep(args):
    ref, sweep = None, {}
    for item in args.items:
        key, eq, value = item.partition("=")
        if eq and key in ("k", "t_s", "ts"):
            sweep["t_s" if key == "ts" else key] = _floats(value, f"sweep.{key}")
        elif ref is None:
            ref = item
        else:
            raise ValidationError("sweep", f"unexpected argument {item!r}")
    if ref is None:
        raise ValidationError("sweep", "no scenario given")
    s = _apply_overrides(load_scenario(ref), args)
    if "k" in sweep:
        s = replace(s, sweep_k=sweep["k"])
    if "t_s" in sweep:
        s = replace(s, sweep_t_s=sweep["t_s"])
    if not s.sweep_k and not s.sweep_t_s:
        raise ValidationError("sweep", "no k=... or t_s=... values and none in the scenario")
    return run_scenario(s, out_dir=_out_dir(s, args), sweep=True, jobs=args.jobs, strict=args.strict)


def _cmd_compare(args):
    s = load_scenario(args.scenario)
    t_s = args.t_s if args.t_s is not None else (s.t_s if s.t_s is not None else 0.05)
    args.t_s = t_s
    args.method = "both"
    s = _apply_overrides(s, args)
    return run_scenario(s, out_dir=_out_dir(s, args), strict=args.strict)


def _cmd_spectral(args, out):
    g = load_scenario(args.scenario).graph if args.scenario else parse_graph_spec(args.graph)
    rep = contraction_constants(g, args.k)
    check = verify_decay_bound(g, args.k, args.n_max)
    lines = [f"{name} = {value:.17g}" for name, value in rep.scalars().items()]
    lines.append("L_k eigenvalues = " + ", ".join(f"{v:.12g}" for v in rep.l_k_eigs))
    lines.append("w_k = " + ", ".join(f"{v:.12g}" for v in rep.w_k))
    lines.append(f"decay bound n = 0..{args.n_max}: max ratio {check.max_ratio:.12g} "
                 f"({'PASS' if check.passed else 'FAIL'})")
    print("\n".join(lines), file=out)
    if args.json is not None:
        payload = rep.to_dict()
        payload["decay_max_ratio"] = check.max_ratio
        args.json.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "spectral":
            return _cmd_spectral(args, out)
        handler = {"run": _cmd_run, "sweep": _cmd_sweep, "compare": _cmd_compare}[args.command]
        result = handler(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ImexMedianError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(result.summary, end="", file=out)
    print(f"outputs written to {result.output_dir}", file=out)
    return result.exit_status


if __name__ == "__main__":
    sys.exit(main())
