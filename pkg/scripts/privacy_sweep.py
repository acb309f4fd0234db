"""Run the attack strategies once each and print the probability tables
behind them (closed forms next to Monte Carlo).

Usage: python3 scripts/privacy_sweep.py --n 8 --t 3 --trials 100000
"""
from __future__ import annotations

import argparse

from qbc.adversary import (
    attack_biased_index,
    attack_blind_server_worst_case,
    attack_plus_probe,
)
from qbc.cli import OVERLAP_GRID, RECOVERY_GRID
from qbc.experiment import derive_rng, privacy_table_overlap, privacy_table_recovery
from qbc.oracles import random_bits
from qbc.protocol import index_width_for


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--t", type=int, default=3)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    y = random_bits(args.n, derive_rng(args.seed, 0))
    truth = "".join(str(int(b)) for b in y)
    rng = derive_rng(args.seed, 1)

    probe = attack_plus_probe(y, args.t, rng, trials=args.trials)
    print(f"plus-probe   y={truth} guessed={probe.guessed} "
          f"known={probe.known_positions} wrong={probe.hamming_to_truth}")

    worst = attack_blind_server_worst_case(y, args.t, rng, trials=args.trials)
    print(f"server-worst y={truth} guessed={worst.guessed} "
          f"certified-zeros={worst.known_positions}")

    biased = attack_biased_index(index_width_for(args.n), 0, 0.9, rng)
    print(f"biased-index focus_prob=0.9: reject {biased['reject_probability']:.4f} "
          f"(mc {biased['mc_reject_rate']:.4f}), honest sampling would give "
          f"{biased['uniform_prob']:.4f} per index\n")

    print("overlap table (sampled support hits per execution):")
    print(privacy_table_overlap(OVERLAP_GRID, derive_rng(args.seed, 2), args.trials))
    print("exact-recovery table (printed closed form vs counting model):")
    print(privacy_table_recovery(RECOVERY_GRID))


if __name__ == "__main__":
    main()
