"""Polar decomposition y = v b of the generalized circular element.

Sweeps the truncation depth and prints the defects
|phi(v^k v*^l) - delta_kl lambda^k| on the diagonal, plus the two
*-freeness diagnostics of (v, b).  Depth 12 takes about 20 seconds.

    python demos/polar_sweep.py [max_depth]
"""

import sys
import time

from awlab.tla import polar_tla


def main(max_depth=10):
    print("D    k=1        k=2        k=3        |phi(v* b0 v)|  min sing.  time")
    for D in range(6, max_depth + 1):
        t0 = time.perf_counter()
        r = polar_tla(0.5, D)
        dt = time.perf_counter() - t0
        d = r.diagnostics
        print(f"{D:<4} {r.table[1, 1]:.3e}  {r.table[2, 2]:.3e}  {r.table[3, 3]:.3e}  "
              f"{d['|phi(v* b0 v)|']:.3e}       {r.min_singular:.3f}      {dt:.1f}s")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 10)
