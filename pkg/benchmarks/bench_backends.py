"""Time the boosting loop under the numba kernels and the numpy fallback.

Each backend runs in its own interpreter because the choice is made at
import time from GAMLSSBOOST_NUMBA. Usage::

    python benchmarks/bench_backends.py [--mstop 1000] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = """
import json, sys, time
import gamlssboost
from gamlssboost import SimDesign, StepPolicy, boost_noncyclical, generate

mstop, repeat = int(sys.argv[1]), int(sys.argv[2])
data = generate(SimDesign(seed=0)).data
t0 = time.perf_counter()
boost_noncyclical(data, StepPolicy.named("saasl"), 5)
warmup = time.perf_counter() - t0
res = {"backend": gamlssboost.BACKEND, "warmup_s": warmup}
for name in ("fsl", "asl", "saasl", "saasl05"):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        boost_noncyclical(data, StepPolicy.named(name), mstop)
        best = min(best, time.perf_counter() - t0)
    res[name] = best
json.dump(res, sys.stdout)
"""


def run(flag, mstop, repeat):
    env = dict(os.environ, GAMLSSBOOST_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", CHILD, str(mstop), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--mstop", type=int, default=1000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    results = [run("1", args.mstop, args.repeat), run("0", args.mstop, args.repeat)]
    print(f"balanced design, n=500, J=6, m_stop={args.mstop}, best of {args.repeat}")
    print(f"{'policy':<10}" + "".join(f"{r['backend']:>12}" for r in results) + f"{'speed-up':>12}")
    for name in ("fsl", "asl", "saasl", "saasl05"):
        a, b = results[0][name], results[1][name]
        print(f"{name:<10}{a:>11.3f}s{b:>11.3f}s{b / a:>11.1f}x")
    print(f"{'warm-up':<10}" + "".join(f"{r['warmup_s']:>11.3f}s" for r in results))


if __name__ == "__main__":
    main()
