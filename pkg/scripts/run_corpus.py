"""Run the fuzz corpus against the oracle, appending one JSON line per
instance.  Re-running resumes after the last recorded index."""

import argparse
import json
import os
import time

from gridreach import EngineConfig, Metrics, grid_reach, oracle_reach
from gridreach.corpus import instance


def done_indices(path):
    if not os.path.exists(path):
        return set()
    with open(path) as fh:
        return {json.loads(line)["index"] for line in fh if line.strip()}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--m-min", type=int, default=8)
    ap.add_argument("--m-max", type=int, default=64)
    ap.add_argument("--out", default="corpus_results.jsonl")
    ap.add_argument("--swap", action="store_true",
                    help="also run the oracle backend and early exit off")
    args = ap.parse_args()
    done = done_indices(args.out)
    base = EngineConfig(mode="aux", backend="recursive")
    with open(args.out, "a") as fh:
        for i in range(args.n):
            if i in done:
                continue
            inst = instance(i, (args.m_min, args.m_max))
            g = inst.grid()
            met = Metrics()
            ans = grid_reach(g, inst.s, inst.t, base, met)
            row = {"index": i, "m": inst.m, "p": inst.p, "s": inst.s, "t": inst.t,
                   "answer": ans, "oracle": oracle_reach(g, inst.s, inst.t),
                   "depth": met.depth, "peak_core": met.peak_core, "ms": round(met.ms, 1)}
            if args.swap:
                t0 = time.perf_counter()
                row["oracle_backend"] = grid_reach(g, inst.s, inst.t, base.with_(backend="oracle"))
                row["no_early_exit"] = grid_reach(g, inst.s, inst.t, base.with_(early_exit=False))
                row["swap_ms"] = round((time.perf_counter() - t0) * 1000, 1)
            fh.write(json.dumps(row) + "\n")
            fh.flush()
            flag = "" if row["answer"] == row["oracle"] else "  MISMATCH"
            print(f"{i} m={inst.m} p={inst.p} {ans} {row['ms']:.0f}ms{flag}", flush=True)


if __name__ == "__main__":
    main()
