#!/usr/bin/env python3
"""Run gradient descent certification in all three modes over a range of
step sizes: descent feasibility, best linear rate, min-max value."""

import argparse

from lyacert.scenarios import GdConfig, run_gd


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--gammas", type=float, nargs="+",
                    default=[0.5, 1.0, 1.5, 2.0, 2.5])
    ap.add_argument("--L", type=float, default=1.0)
    args = ap.parse_args()
    print("gamma  descent      minmax value")
    for gamma in args.gammas:
        desc = run_gd(GdConfig(gamma=gamma, L=args.L))
        mm = run_gd(GdConfig(gamma=gamma, L=args.L, minmax=True))
        label = desc.status
        if desc.witness:
            label += " (divergence witness found)"
        print(f"{gamma:<5}  {label:<32}  {mm.value:.2e}")


if __name__ == "__main__":
    main()
