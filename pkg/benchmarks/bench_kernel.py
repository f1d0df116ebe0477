"""Compare the compiled and pure-Python simplex kernels.

Workload: the brute-force (unpruned, whole state space) LPs of random finite
chains, which are the largest LPs the toolkit builds.

    python benchmarks/bench_kernel.py --states 12 --repeat 3
"""

import argparse
import random
import time
from fractions import Fraction

from lmcapart.kantorovich import DistanceTable, nonexpansive_lp
from lmcapart.lp import available_kernels, solve
from lmcapart.model import FiniteLmc


def random_lmc(n, labels, rng):
    names = [f"s{i}" for i in range(n)]
    trans = {}
    for s in names:
        k = rng.randint(1, min(4, n))
        targets = rng.sample(names, k)
        weights = [rng.randint(1, 6) for _ in targets]
        total = sum(weights)
        trans[s] = {t: Fraction(w, total) for t, w in zip(targets, weights)}
    return FiniteLmc({s: rng.choice(labels) for s in names}, trans)


def workload(n, seed):
    rng = random.Random(seed)
    lmc = random_lmc(n, "ab", rng)
    table = DistanceTable(lmc)
    states = lmc.states()
    lps = []
    for x in states:
        for y in states:
            if x < y and lmc.label(x) == lmc.label(y):
                obj = [lmc.step(x).prob(z) - lmc.step(y).prob(z) for z in states]
                if any(obj):
                    lps.append(nonexpansive_lp(states, obj, lambda u, v: table.value(2, u, v), prune=False))
    return lps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    lps = workload(args.states, args.seed)
    kernels = available_kernels()
    print(f"{len(lps)} LPs over {args.states} states; kernels: {', '.join(kernels)}")
    results, timings = {}, {}
    for name, mod in kernels.items():
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            results[name] = [solve(lp, kernel_module=mod).optimum for lp in lps]
            best = min(best, time.perf_counter() - t0)
        timings[name] = best
        print(f"  {name:<7} {best * 1000:9.1f} ms")
    if len(set(map(tuple, results.values()))) != 1:
        raise SystemExit("kernels disagree")
    if "cython" in timings:
        print(f"  speedup {timings['python'] / timings['cython']:.2f}x")


if __name__ == "__main__":
    main()
