"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from cliffbell import _pykernels
from cliffbell.ga_core import DEFAULT_TABLE

try:
    from cliffbell import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    sign, index = DEFAULT_TABLE.sign, DEFAULT_TABLE.index
    x, y = rng.normal(size=8), rng.normal(size=8)
    X, Y = rng.normal(size=(100_000, 8)), rng.normal(size=(100_000, 8))
    lams = rng.normal(size=(1_000_000, 3))
    M = rng.uniform(-1, 1, size=(64, 64))
    return {
        "gp (single)": lambda k: k.gp(x, y, sign, index),
        "gp_batch (1e5)": lambda k: k.gp_batch(X, Y, sign, index),
        "party_outcomes (1e6)": lambda k: k.party_outcomes(lams, 0.6, 0.0, 0.8, False),
        "chsh_grid_max (64)": lambda k: k.chsh_grid_max(M),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    rng = np.random.default_rng(0)
    print(f"{'kernel':24s}" + "".join(f"{b:>14s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases(rng).items():
        times = {}
        for b, mod in backends.items():
            fn(mod)
            number = 1000 if name.startswith("gp (") else 1
            times[b] = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
        row = f"{name:24s}" + "".join(f"{t * 1e3:11.3f} ms" for t in times.values())
        if len(times) == 2:
            row += f"  {times['python'] / times['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
