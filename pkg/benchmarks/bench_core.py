"""Compiled core versus NumPy fallback on the hot kernels.

    python benchmarks/bench_core.py [--rows 2000] [--sizes 30,100,300]

Prints microseconds per sample row for each backend and the speedup.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from smoothnp import _pycore
from smoothnp.kernels import bandwidth, BandwidthRule, get_kernel

try:
    from smoothnp import _core
except ImportError:  # fallback-only install
    _core = None


def _time(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("--sizes", default="30,100,300")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    sign_tab = get_kernel("a11zero").cdf_table()
    walsh_tab = get_kernel("epanechnikov4").cdf_table()
    backends = [("python", _pycore)] + ([("compiled", _core)] if _core else [])
    print(f"{'kernel':<16}{'n':>6}" + "".join(f"{name:>14}" for name, _ in backends)
          + f"{'speedup':>10}")
    for n in (int(v) for v in args.sizes.split(",")):
        x = np.ascontiguousarray(rng.standard_normal((args.rows, n)))
        h = bandwidth(BandwidthRule(), n)
        cases = {
            "sign_sum_rows": lambda m: m.sign_sum_rows(x, 0.0, h, *sign_tab),
            "walsh_sum_rows": lambda m: m.walsh_sum_rows(x, 0.0, h, *walsh_tab),
            "walsh_count": lambda m: m.walsh_count_rows(x),
        }
        for label, call in cases.items():
            per_row = [_time(lambda m=m: call(m), args.repeat) / args.rows * 1e6
                       for _, m in backends]
            speed = per_row[0] / per_row[-1] if len(per_row) > 1 else 1.0
            print(f"{label:<16}{n:>6}" + "".join(f"{t:>12.2f}us" for t in per_row)
                  + f"{speed:>9.1f}x")
        # band sweep against the direct double loop, one row
        row = np.ascontiguousarray(x[0])
        m = _core or _pycore
        direct = _time(lambda: m.walsh_sum_direct(row, 0.0, h, *walsh_tab), args.repeat)
        sweep = _time(lambda: m.walsh_sum_rows(x[:1], 0.0, h, *walsh_tab), args.repeat)
        print(f"{'direct/sweep':<16}{n:>6}{direct * 1e6:>12.2f}us{sweep * 1e6:>12.2f}us"
              f"{direct / sweep:>9.1f}x")


if __name__ == "__main__":
    main()
