"""Command-line front end.

Exit codes: 0 success, 1 validation or contract failure, 2 unparsable input.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from pathlib import Path

from . import fileio
from .errors import OscError, ParseError
from .fixtures import fold_instance, fold_map
from .mapbuild import build_map, monotone_map, piece_bound, verify_map
from .measure import support_domain, to_rat
from .osceval import osc_map, osc_plan
from .plotting import plot_map, plot_strip, write_map_csv, write_strip_csv
from .solver import MODES, SolveConfig, oracle_solve, solve
from .stepcalc import Direction, conjugate_closure, down_transform, max_floors, monotone_decomposition, up_transform
from .strip import enlarge

# search counters depend on how probes were scheduled, so they stay off the file
VOLATILE_STATS = ("probes", "nodes", "memo_hits")


def _rat_arg(text: str):
    try:
        return to_rat(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _emit(record, out) -> None:
    if out:
        fileio.write_json(out, record)
    else:
        sys.stdout.write(fileio.dumps(record))


def cmd_solve(args) -> int:
    inst = fileio.read_instance(args.input)
    cfg = SolveConfig(n=args.quantize, mode=args.mode, threads=args.threads)
    res = solve(inst, **asdict(cfg))
    counters = {k: res.stats.pop(k) for k in VOLATILE_STATS if k in res.stats}
    if args.oracle:
        ok = oracle_solve(inst)
        res.stats["oracle_K"] = ok
        if ok != res.K:
            print(f"oracle disagrees: solver {res.K}, oracle {ok}", file=sys.stderr)
            return 1
    fileio.write_json(args.output, fileio.result_to_json(res))
    print(f"K = {res.K}")
    print(" ".join(f"{k}={v}" for k, v in counters.items()), file=sys.stderr)
    return 0


def cmd_build_map(args) -> int:
    inst = fileio.read_instance(args.input)
    res = fileio.read_result(args.result)
    T = build_map(inst, res)
    strip = enlarge(res.strip, inst.delta, res.K)
    slack = max(c.length for c in res.y_cells)
    rep = verify_map(inst, T, res.K + slack, strip)
    record = fileio.map_to_json(T)
    fileio.write_json(args.output, record)
    summary = {"pushforward": rep.pushforward_ok, "graph_in_strip": rep.graph_ok,
               "osc": str(rep.osc), "K": str(res.K), "cell_slack": str(slack),
               "pieces": rep.pieces, "piece_bound": piece_bound(support_domain(inst.mu).diameter, inst.delta)}
    sys.stdout.write(fileio.dumps(summary))
    return 0 if rep.passed else 1


def cmd_eval_map(args) -> int:
    inst = fileio.read_instance(args.input)
    T = fileio.read_map(args.map)
    print(osc_map(T, support_domain(inst.mu), inst.delta))
    return 0


def cmd_eval_plan(args) -> int:
    res = fileio.read_result(args.result)
    print(osc_plan(res.support(), args.delta))
    return 0


def cmd_transform(args) -> int:
    fn = fileio.read_stepfn(args.fn)
    if args.op == "up":
        out = up_transform(fn, args.delta)
    elif args.op == "down":
        out = down_transform(fn, args.delta)
    else:
        out = conjugate_closure(fn, args.delta).phi
    _emit(fileio.stepfn_to_json(out), args.output)
    return 0


def cmd_decompose(args) -> int:
    pair = fileio.read_pair(args.pair, args.delta)
    dec = monotone_decomposition(pair)
    dom = pair.psi.domain
    record = {"kind": "decomposition", "delta": str(dec.delta),
              "floors": [str(I) for I in dec.floors],
              "split_points": [str(p) for p in dec.split_points],
              "merged": [[str(I), d.value] for I, d in dec.merged],
              "floor_bound": max_floors(dom, dec.delta),
              "piece_bound": piece_bound(dom.diameter, dec.delta)}
    _emit(record, args.output)
    return 0


def cmd_counterexample(args) -> int:
    inst = fold_instance(args.delta)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_json(out / "instance.json", fileio.instance_to_json(inst))
    fileio.write_json(out / "U.json", fileio.map_to_json(fold_map()))
    fileio.write_json(out / "T_monotone.json",
                      fileio.map_to_json(monotone_map(inst.mu, inst.nu, Direction.INC)))
    print(f"wrote {out / 'instance.json'}, {out / 'U.json'}, {out / 'T_monotone.json'}")
    return 0


def cmd_plot(args) -> int:
    rec = fileio.read_json(args.map)
    kind = rec.get("kind") if isinstance(rec, dict) else None
    if kind == "map":
        T = fileio.map_from_json(rec)
        plot_map(T, args.output, args.delta)
        if args.csv:
            write_map_csv(T, args.csv)
    elif kind == "result":
        res = fileio.result_from_json(rec)
        plot_strip(res.strip, args.output, res.delta, res.K)
        if args.csv:
            write_strip_csv(res.strip, args.csv)
    else:
        raise ParseError("plot needs a map or result file")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="osctransport", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="optimal K with a certified witness")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--quantize", type=int, help="quantile cells per density")
    s.add_argument("--mode", choices=MODES, default="atoms",
                   help="atoms: quantized point masses; cells: whole quantile cells (needed by build-map)")
    s.add_argument("--oracle", action="store_true", help="cross-check with brute force (small atomic inputs)")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("build-map", help="piecewise-monotone map from a cells-mode result")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-r", "--result", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_build_map)

    s = sub.add_parser("eval-map", help="oscillation of a map on the source support")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-m", "--map", required=True)
    s.set_defaults(func=cmd_eval_map)

    s = sub.add_parser("eval-plan", help="oscillation of a result's plan support")
    s.add_argument("-r", "--result", required=True)
    s.add_argument("--delta", type=_rat_arg, required=True)
    s.set_defaults(func=cmd_eval_plan)

    s = sub.add_parser("transform", help="window inf / sup transforms of a step function")
    s.add_argument("--fn", required=True)
    s.add_argument("--delta", type=_rat_arg, required=True)
    s.add_argument("--op", choices=("up", "down", "closure"), required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("decompose", help="monotone decomposition of a conjugate pair")
    s.add_argument("--pair", required=True)
    s.add_argument("--delta", type=_rat_arg, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("counterexample", help="write the fold instance and its two maps")
    s.add_argument("--delta", type=_rat_arg, required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("plot", help="SVG and CSV of a map or of a result's strip")
    s.add_argument("-m", "--map", required=True)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--csv")
    s.add_argument("--delta", type=_rat_arg)
    s.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except OscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
