"""Time solve() on a large random instance (defaults: n=200, m=20000, density 0.3, p=5)."""

import argparse
import time

from twovalue_nsw import solve
from twovalue_nsw.fileio import GenSpec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--m", type=int, default=20000)
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--density", type=float, default=0.3)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--no-check", action="store_true", help="skip per-move invariant assertions")
    args = ap.parse_args()

    t0 = time.perf_counter()
    inst = generate(GenSpec(args.n, args.m, args.p, args.density, args.seed))
    t1 = time.perf_counter()
    r = solve(inst, check=not args.no_check)
    t2 = time.perf_counter()
    print(f"generate   {t1 - t0:7.2f} s  ({len(inst.heavy)} heavy pairs)")
    print(f"solve      {t2 - t1:7.2f} s  ({len(r.phase3_moves)} phase-3 moves)")
    print(f"utilities  min {min(r.utilities)}  max {max(r.utilities)}")


if __name__ == "__main__":
    main()
