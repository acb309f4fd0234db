"""Sweep the protocol variants and tabulate measured channel usage
against the closed-form ledgers.

Usage: python3 scripts/channel_costs.py --max-n 4 --max-t 4 --seed 0
"""
from __future__ import annotations

import argparse

import numpy as np

from qbc.experiment import check_cap, derive_rng
from qbc.ledger import VARIANTS, expected_ledger
from qbc.oracles import random_bits
from qbc.protocol import (
    run_blind_client,
    run_blind_server,
    run_multiparty,
    run_qbc_baseline,
)

RUNNERS = {
    "baseline": lambda x, y, t, rng: run_qbc_baseline(x, y[0], t, rng=rng),
    "blind-server": lambda x, y, t, rng: run_blind_server(x, y[0], t, rng=rng),
    "blind-client": lambda x, y, t, rng: run_blind_client(x, y[0], t, rng=rng),
    "multiparty": lambda x, y, t, rng: run_multiparty(x, y, t, rng=rng),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--max-t", type=int, default=4)
    ap.add_argument("--m", type=int, default=3, help="multiparty client count")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = derive_rng(args.seed, 0)
    print(f"{'variant':<13} {'N':>3} {'t':>2} {'qubits':>7} {'classical':>9} "
          f"{'oracle calls':>12}  match")
    mismatches = 0
    for variant in VARIANTS:
        clients = args.m if variant == "multiparty" else 1
        for n in range(1, args.max_n + 1):
            num = 1 << n
            for t in range(1, args.max_t + 1):
                check_cap(variant, n, t, clients)
                x = random_bits(num, rng)
                ys = [random_bits(num, rng) for _ in range(clients)]
                run = RUNNERS[variant](x, ys, t, np.random.default_rng(args.seed))
                want = expected_ledger(variant, n, t, num_clients=clients)
                got = run.ledger
                match = got.as_dict() == want.as_dict()
                mismatches += 0 if match else 1
                print(f"{variant:<13} {num:>3} {t:>2} {got.quantum_qubits_sent:>7} "
                      f"{got.classical_bits_sent:>9} "
                      f"{sum(got.oracle_calls.values()):>12}  {'ok' if match else 'DIFF'}")
    print(f"\n{mismatches} mismatches against the closed forms")
    return 1 if mismatches else 0


if __name__ == "__main__":
    raise SystemExit(main())
