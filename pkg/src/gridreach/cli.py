"""Command-line interface: gen, reach, psep-check, bench, selftest."""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys

from .aux import AuxContext, AuxSubgraph, Decomposition, OracleBackend, decomposition_side
from .engine import EngineConfig, grid_reach
from .grid import GridError, GridView, generate_random, read_grid, serialize_grid
from .instrument import FitError, Metrics, fit_scaling
from .pseudosep import build_pseudoseparator, component_bound, verify_pseudoseparator

CSV_FIELDS = ["m", "n", "p", "seed", "mode", "alpha", "beta", "answer",
              "peak_core", "peak_conn", "queries", "depth", "ms"]


class CliError(Exception):
    pass


def _point(text: str) -> tuple[int, int]:
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    return x, y


def _unit(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1)")
    return v


def _config(args, mode: str | None = None) -> EngineConfig:
    return EngineConfig(
        alpha=args.alpha,
        beta=args.beta,
        base_exponent=args.base_exponent,
        base_floor_h=args.floor_h,
        base_floor_side=args.floor_side,
        backend=args.backend,
        mode=mode or args.mode,
        early_exit=not args.no_early_exit,
    )


def record(m: int, p, seed, mode: str, cfg: EngineConfig, answer: bool, met: Metrics) -> dict:
    return {
        "m": m,
        "n": (m + 1) ** 2,
        "p": p,
        "seed": seed,
        "mode": mode,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "answer": answer,
        "peak_core": met.peak_core,
        "peak_conn": met.peak_conn,
        "queries": met.queries,
        "depth": met.depth,
        "ms": round(met.ms, 3),
    }


# --- commands -----------------------------------------------------------------

def cmd_gen(args) -> int:
    g = generate_random(args.m, args.p, args.seed)
    text = serialize_grid(g)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


def cmd_reach(args) -> int:
    g = read_grid(args.input)
    for name, (x, y) in (("s", args.s), ("t", args.t)):
        if not (0 <= x <= g.m and 0 <= y <= g.m):
            raise CliError(f"{name}=({x},{y}) outside the grid 0..{g.m}")
    cfg = _config(args)
    met = Metrics()
    ans = grid_reach(g, args.s, args.t, cfg, met)
    rec = record(g.m, None, None, cfg.mode, cfg, ans, met)
    if args.json:
        print(json.dumps(rec))
    else:
        print("true" if ans else "false")
        print(f"peak_core={met.peak_core} peak_conn={met.peak_conn} "
              f"queries={met.queries} depth={met.depth} ms={met.ms:.1f}")
    return 0 if ans else 1


def _sample_views(g, samples: int, seed: int):
    yield g.view()
    rng = random.Random(seed)
    for _ in range(samples - 1):
        side = rng.randint(min(4, g.m), g.m)
        x0 = rng.randint(0, g.m - side)
        y0 = rng.randint(0, g.m - side)
        yield GridView(g, x0, y0, x0 + side, y0 + side)


def psep_reports(g, alpha: float, beta: float, samples: int, seed: int = 0) -> list[dict]:
    out = []
    for view in _sample_views(g, samples, seed):
        side = max(view.width, view.height)
        if side < 1:
            out.append({"h": view.n, "beta": beta, "sep_size": 0, "n_shadows": 0,
                        "max_component": view.n, "bound": component_bound(view.n, beta),
                        "pass": True})
            continue
        dec = Decomposition.uniform(view, decomposition_side(side, alpha))
        H = AuxSubgraph(AuxContext(dec, OracleBackend(g)))
        bound = component_bound(H.h, beta)
        C = build_pseudoseparator(H, beta, verify=False)
        rep = verify_pseudoseparator(H, C, bound)
        out.append({"h": H.h, "beta": beta, "sep_size": C.size, "n_shadows": C.n_shadows,
                     "max_component": rep.max_component, "bound": bound, "pass": rep.ok,
                     "repairs": len(C.repairs)})
    return out


def cmd_psep_check(args) -> int:
    g = read_grid(args.input)
    reps = psep_reports(g, args.alpha, args.beta, args.samples, args.seed)
    expo = 0.5 + args.beta / 2
    ratios = [r["sep_size"] / r["h"] ** expo for r in reps if r["h"] > 1]
    summary = {
        "samples": len(reps),
        "pass_rate": sum(r["pass"] for r in reps) / len(reps),
        "max_component": max(r["max_component"] for r in reps),
        "max_sep_size": max(r["sep_size"] for r in reps),
        "c": max(ratios, default=0.0),
        "reports": reps,
    }
    print(json.dumps(summary, indent=None if args.compact else 2))
    return 0 if summary["pass_rate"] == 1.0 else 1


def bench_rows(sizes, p: float, seeds, cfg: EngineConfig, modes=("dfs", "aux"), log=None):
    for m in sizes:
        for seed in seeds:
            g = generate_random(m, p, seed)
            rng = random.Random(seed)
            s = (rng.randint(0, m), rng.randint(0, m))
            t = s
            while t == s:
                t = (rng.randint(0, m), rng.randint(0, m))
            for mode in modes:
                c = cfg.with_(mode=mode)
                met = Metrics()
                ans = grid_reach(g, s, t, c, met)
                row = record(m, p, seed, mode, c, ans, met)
                if log is not None:
                    log(row)
                yield row


def fit_rows(rows, mode: str, min_points: int = 4, min_decades: float = 2.0):
    series = [(r["n"], r["peak_core"]) for r in rows if r["mode"] == mode]
    return fit_scaling(series, min_points=min_points, min_decades=min_decades)


def cmd_bench(args) -> int:
    cfg = _config(args, mode="aux")
    seeds = list(range(args.seeds))
    rows = []
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        w.writeheader()
        for row in bench_rows(args.sizes, args.p, seeds, cfg):
            w.writerow(row)
            fh.flush()
            rows.append(row)
            print(f"m={row['m']} seed={row['seed']} mode={row['mode']} "
                  f"peak_core={row['peak_core']} ms={row['ms']:.0f}", file=sys.stderr)
    for mode in ("dfs", "aux"):
        try:
            fit = fit_rows(rows, mode)
            print(f"{mode}: slope={fit.slope:.3f} r2={fit.r2:.3f}")
        except FitError as exc:
            print(f"{mode}: no fit ({exc})")
    return 0


def _faulty_crosses(p: int, q: int, r: int, s: int) -> bool:
    # ignores where the second edge ends
    a, b = sorted((p, q))
    return a < min(r, s) < b


def cmd_selftest(args) -> int:
    from .checks import position_crosses, run_selftest

    crosses = position_crosses if args.inject_fault is None else _faulty_crosses
    ok = run_selftest(crosses=crosses, n_grids=args.grids)
    print("selftest: " + ("pass" if ok else "FAIL"))
    return 0 if ok else 1


# --- parser -----------------------------------------------------------------------

def _engine_flags(sp, modes=True) -> None:
    sp.add_argument("--alpha", type=_unit, default=0.2)
    sp.add_argument("--beta", type=_unit, default=0.2)
    sp.add_argument("--base-exponent", type=float, default=1 / 8)
    sp.add_argument("--floor-h", type=int, default=EngineConfig.base_floor_h)
    sp.add_argument("--floor-side", type=int, default=EngineConfig.base_floor_side)
    sp.add_argument("--backend", choices=("recursive", "oracle"), default="recursive")
    sp.add_argument("--no-early-exit", action="store_true",
                    help="run every marking iteration even after a fixpoint")
    if modes:
        sp.add_argument("--mode", choices=("auto", "aux", "dfs"), default="auto")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gridreach", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("gen", help="write a random grid")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("reach", help="decide s -> t reachability")
    sp.add_argument("input")
    sp.add_argument("--s", type=_point, required=True)
    sp.add_argument("--t", type=_point, required=True)
    sp.add_argument("--json", action="store_true")
    _engine_flags(sp)
    sp.set_defaults(func=cmd_reach)

    sp = sub.add_parser("psep-check", help="build and verify pseudoseparators")
    sp.add_argument("input")
    sp.add_argument("--alpha", type=_unit, default=0.2)
    sp.add_argument("--beta", type=_unit, default=0.2)
    sp.add_argument("--samples", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--compact", action="store_true")
    sp.set_defaults(func=cmd_psep_check)

    sp = sub.add_parser("bench", help="space benchmark of dfs and aux modes")
    sp.add_argument("--sizes", type=int, nargs="+", required=True, help="grid sides m")
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--seeds", type=int, default=5)
    sp.add_argument("--out", required=True)
    _engine_flags(sp, modes=False)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("selftest", help="run the embedded property suites")
    sp.add_argument("--grids", type=int, default=40)
    sp.add_argument("--inject-fault", choices=("crossing",), default=None,
                    help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (CliError, GridError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
