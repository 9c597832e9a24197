#!/usr/bin/env python3
"""Reproduce the coordinate-descent Lyapunov coefficient table:
minimal q1 (weight on f(x0) - f*) and minimized q2 (weight on the
L-weighted squared norm) for several block counts d."""

import argparse
import time

from lyacert.scenarios import RcdConfig, run_rcd


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="+",
                    default=[2, 3, 4, 5, 8, 10])
    args = ap.parse_args()
    print("d     q1        q2      seconds")
    for d in args.dims:
        t0 = time.time()
        res = run_rcd(RcdConfig(d=d))
        row = res.rows[0]
        print(f"{d:<4}  {row['q1']:<8.3f}  {row['q2']:<6.3f}  "
              f"{time.time() - t0:.1f}")


if __name__ == "__main__":
    main()
