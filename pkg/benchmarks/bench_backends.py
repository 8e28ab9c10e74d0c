"""Time the compiled kernels against the numpy/Python fallback.

    python3 benchmarks/bench_backends.py --repeat 5
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from wboot import _fallback
from wboot.empirical import Sample

try:
    from wboot import _kernels
except ImportError:
    _kernels = None


def _inputs(n: int, reps: int, seed: int):
    rng = np.random.default_rng(seed)
    s = Sample.from_values(rng.random(n))
    W = rng.standard_exponential((reps, n))
    W /= W.sum(axis=1, keepdims=True)
    return s, np.ascontiguousarray(W)


def cases(n: int, reps: int, seed: int):
    s, W = _inputs(n, reps, seed)
    C = np.ascontiguousarray(W - 1.0 / n)
    path = np.ascontiguousarray(np.cumsum(np.random.default_rng(seed).normal(size=2**16 + 1)))
    g = s.distinct.size
    yield (f"sup_abs_prefix n={n} reps={reps}",
           lambda m: m.sup_abs_prefix(W, s.perm, s.group_ends))
    yield (f"partial_sum_max n={n} reps={min(reps, 20)}",
           lambda m: m.partial_sum_max(s.ranks, C[:20], g))
    yield ("window_range_max m=2^16+1 L=64", lambda m: m.window_range_max(path, 64))


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    backends = [("python", _fallback)] + ([("cython", _kernels)] if _kernels is not None else [])
    print(f"{'kernel':<40}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for label, fn in cases(args.n, args.reps, args.seed):
        times = []
        for _, mod in backends:
            out = fn(mod)
            times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
            if len(times) > 1:
                np.testing.assert_allclose(out, fn(backends[0][1]), atol=1e-12)
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else f"{'-':>10}"
        print(f"{label:<40}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
