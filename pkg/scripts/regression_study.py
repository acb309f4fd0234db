"""Bit-plane inner-product demo: error against the truncation+counting
bound as the readout precision grows.

Usage: python3 scripts/regression_study.py --n 8 --planes 6 --seeds 10
"""
from __future__ import annotations

import argparse

from qbc.bitplane import regression_demo, regression_error_bound
from qbc.experiment import check_cap, derive_rng
from qbc.oracles import random_bits
from qbc.protocol import index_width_for


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--planes", type=int, default=6)
    ap.add_argument("--t-values", type=int, nargs="+", default=[4, 5, 6, 7])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    scale = 1 << args.planes
    width = index_width_for(args.n)
    print(f"{'t':>2} {'bound':>8} {'mean |err|':>10} {'max |err|':>10} {'within':>7}")
    for t in args.t_values:
        check_cap("baseline", width, t)
        errors = []
        hits = 0
        for s in range(args.seeds):
            rng = derive_rng(args.seed, 1000 * t + s)
            column = rng.integers(0, scale, size=args.n) / scale
            y = random_bits(args.n, rng)
            res = regression_demo(column, y, t, args.planes, rng=rng)
            errors.append(abs(res.value - res.truth))
            hits += int(res.within_bound)
        bound = regression_error_bound(args.n, args.planes, t)
        print(f"{t:>2} {bound:>8.4f} {sum(errors) / len(errors):>10.4f} "
              f"{max(errors):>10.4f} {hits:>4}/{args.seeds}")


if __name__ == "__main__":
    main()
