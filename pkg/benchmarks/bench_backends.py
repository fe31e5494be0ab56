"""Compare the numba and pure-numpy kernel backends on the same workloads.

Each backend runs in its own interpreter because the backend is fixed at
import time by BOUNDEDWFA_BACKEND. Reports wall time per workload and checks
that both backends produce the same total cost.

    python benchmarks/bench_backends.py [--n 5000] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from boundedwfa import BACKEND, kernels
from boundedwfa.harness import GenSpec, generate, load_instance, run_experiment
from boundedwfa.phases import PhaseParams

cases = json.loads(sys.argv[1])
repeat = int(sys.argv[2])
kernels.warmup()
out = []
for case in cases:
    alg = case.pop("alg")
    inst = load_instance(json.dumps(generate(GenSpec(**case))))
    best, cost = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        _, s = run_experiment(inst, alg, PhaseParams(), with_opt=False)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
        cost = s["total_cost"]
    out.append({"backend": BACKEND, "alg": alg, "best_s": best, "cost": cost})
print(json.dumps(out))
"""


def workloads(n):
    return [
        {"alg": "wfa-bounded", "kind": "kserver-grid", "n": n, "rows": 6, "cols": 6, "k": 2, "seed": 1},
        {"alg": "wfa-bounded", "kind": "kserver-grid", "n": n, "rows": 5, "cols": 5, "k": 3, "seed": 2},
        {"alg": "wfa-full", "kind": "kserver-grid", "n": n // 5, "rows": 8, "cols": 8, "k": 2, "seed": 3},
        {"alg": "wfa-bounded", "kind": "mts-random", "n": n, "states": 32, "seed": 4},
    ]


def run_backend(backend, cases, repeat):
    env = dict(os.environ, BOUNDEDWFA_BACKEND=backend)
    res = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(cases), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    cases = workloads(args.n)
    numba_rows = run_backend("numba", [dict(c) for c in cases], args.repeat)
    numpy_rows = run_backend("numpy", [dict(c) for c in cases], args.repeat)
    if numba_rows[0]["backend"] != "numba":
        print("numba unavailable; both runs used numpy", file=sys.stderr)

    print(f"{'workload':<44} {'numba s':>9} {'numpy s':>9} {'speedup':>8}")
    for case, a, b in zip(cases, numba_rows, numpy_rows):
        label = f"{case['alg']} {case['kind']} n={case['n']}"
        if case["kind"] != "mts-random":
            label += f" {case['rows']}x{case['cols']} k={case['k']}"
        if a["cost"] != b["cost"]:
            print(f"cost mismatch on {label}: {a['cost']} vs {b['cost']}", file=sys.stderr)
            return 1
        print(f"{label:<44} {a['best_s']:>9.3f} {b['best_s']:>9.3f} {b['best_s'] / a['best_s']:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
