"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel and backend with the best wall time, and the
speed-up of the compiled core where it is available.
"""

import argparse
import random
import timeit
from array import array

import numpy as np

from nbestgec.kernels import backends


def alignment_inputs(rng, pairs=300, length=40, vocab=30):
    out = []
    for _ in range(pairs):
        a = [rng.randrange(vocab) for _ in range(length)]
        b = list(a)
        for _ in range(rng.randint(1, 6)):
            i = rng.randrange(len(b))
            op = rng.random()
            if op < 0.4:
                b[i] = rng.randrange(vocab)
            elif op < 0.7:
                del b[i]
            else:
                b.insert(i, rng.randrange(vocab))
        out.append((array("i", a), array("i", b)))
    return out


def sparse_inputs(rng, count=5000, dim=20000, nnz=60):
    out = []
    for _ in range(count):
        idx = sorted(rng.sample(range(dim), nnz))
        val = [rng.gauss(0.0, 1.0) for _ in idx]
        out.append((array("i", idx), array("d", val), rng.choice((-1.0, 1.0))))
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    pairs = alignment_inputs(rng)
    examples = sparse_inputs(rng)
    dim = 20000
    phi = 1.2815515655446004
    timings = {}
    for name, mod in backends().items():
        def align():
            for a, b in pairs:
                mod.align_ops(a, b)

        def train():
            mu = np.zeros(dim)
            sigma = np.ones(dim)
            for idx, val, y in examples:
                mod.cw_update(mu, sigma, idx, val, y, phi)

        mu = np.random.default_rng(args.seed).normal(size=dim)

        def dot():
            for idx, val, _ in examples:
                mod.sparse_dot(mu, idx, val)

        for kernel, fn in (("align_ops", align), ("cw_update", train), ("sparse_dot", dot)):
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            timings[(kernel, name)] = best
            print(f"{kernel:<11} {name:<7} {best * 1000:9.2f} ms")
    if "cython" in backends():
        for kernel in ("align_ops", "cw_update", "sparse_dot"):
            speedup = timings[(kernel, "python")] / timings[(kernel, "cython")]
            print(f"{kernel:<11} speed-up {speedup:6.1f}x")


if __name__ == "__main__":
    main()
