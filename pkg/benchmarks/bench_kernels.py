"""Compare the compiled kernels with the pure-Python fallback.

Each backend runs in its own interpreter because the choice is made at import
time (``SWARMCOVER_PURE=1`` forces the fallback).

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
import swarmcover
from swarmcover._backend import kernels
from swarmcover.harness import run_scenario
from swarmcover.scenario import load_scenario

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
arena = np.array([(1, 0), (6, 0), (8, 5), (5, 8), (0, 4)], dtype=float)
gens = np.array([(2.2, 1.4), (2.3, 4.2), (5.3, 2.1), (5.5, 5.5), (3.5, 3.0), (4.5, 1.0), (6.5, 4.5), (1.5, 3.0)])
pos = np.vstack((gens, gens + 0.45))
radii = np.full(len(pos), 0.2)
est = rng.normal(size=pos.shape)
rows = kernels.orca_rows(pos, radii, est, 3, 0.5, -0.2, 0.1, 0.1)

def lp():
    kernels.solve_lp(rows, 0, 3.0, 0.5, -0.2)

cases = {
    "cell_stats (8 generators)": lambda: kernels.cell_stats(gens, arena),
    "orca_rows (16 agents)": lambda: kernels.orca_rows(pos, radii, est, 3, 0.5, -0.2, 0.1, 0.1),
    "solve_lp (15 half-planes)": lp,
    "pair_clearance (16 agents)": lambda: kernels.pair_clearance(pos, pos + 0.01, radii),
}
out = {"backend": swarmcover.BACKEND}
for name, fn in cases.items():
    n = 200
    out[name] = min(timeit.repeat(fn, number=n, repeat=repeat)) / n
s = load_scenario("example2")
out["example2 full run"] = min(timeit.repeat(lambda: run_scenario(s), number=1, repeat=max(1, repeat // 2)))
print(json.dumps(out))
"""


def measure(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("SWARMCOVER_PURE", None)
    if pure:
        env["SWARMCOVER_PURE"] = "1"
    res = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(res.stdout)


def _fmt(seconds: float) -> str:
    if seconds >= 0.1:
        return f"{seconds:8.3f} s "
    return f"{seconds * 1e6:8.1f} us"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    fast = measure(False, args.repeat)
    slow = measure(True, args.repeat)
    if fast["backend"] != "compiled":
        print("compiled kernels are not built; only the fallback is available", file=sys.stderr)
    print(f"{'case':30s} {'compiled':>11s} {'python':>11s} {'speedup':>8s}")
    for key in fast:
        if key == "backend":
            continue
        print(f"{key:30s} {_fmt(fast[key])} {_fmt(slow[key])} {slow[key] / fast[key]:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
