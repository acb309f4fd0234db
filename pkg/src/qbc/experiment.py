"""Batch experiment harness: config validation, per-trial seed
derivation, the simulator size cap, and table/record emission.

Per-trial generators come from numpy's SeedSequence fed with
[master_seed, trial_index], so trials are independent, reproducible,
and order-insensitive. Randomly generated input vectors use a dedicated
stream index so they stay fixed across all trials of a run.
"""
from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .adversary import (
    RedundancyRule,
    overlap_mc_pmf,
    overlap_pmf,
    pr_exact_recovery,
    redundant_decode,
    redundant_encode,
)
from .ledger import VARIANTS
from .oracles import CorrelationMode, load_bitstrings, random_bits
from .protocol import (
    ProtocolRun,
    run_blind_client,
    run_blind_server,
    run_multiparty,
    run_qbc_baseline,
    transcript_lines,
)
from .statevector import GateError

DEFAULT_MAX_QUBITS = 22
INPUT_STREAM = 1 << 32  # trial indices stay below this


class CapExceeded(RuntimeError):
    def __init__(self, required: int, available: int):
        super().__init__(
            f"simulation needs {required} qubits but the cap is {available}; "
            "raise QBC_MAX_QUBITS to override"
        )
        self.required = required
        self.available = available


def max_qubits() -> int:
    raw = os.environ.get("QBC_MAX_QUBITS", "")
    return int(raw) if raw.strip() else DEFAULT_MAX_QUBITS


def qubit_budget(protocol: str, index_width: int, t: int, num_clients: int = 1) -> int:
    if protocol == "baseline":
        return index_width + t + 2
    if protocol in ("blind-server", "blind-client"):
        return index_width + t + 3
    if protocol == "multiparty":
        return index_width + t + 1 + num_clients
    raise GateError(f"unknown protocol {protocol!r}")


def check_cap(protocol: str, index_width: int, t: int, num_clients: int = 1) -> int:
    needed = qubit_budget(protocol, index_width, t, num_clients)
    cap = max_qubits()
    if needed > cap:
        raise CapExceeded(needed, cap)
    return needed


def derive_rng(master_seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, stream]))


@dataclass
class ExperimentConfig:
    protocol: str
    num_values: int
    t: int
    trials: int = 1
    seed: int = 0
    mode: CorrelationMode = CorrelationMode.AND
    num_clients: int = 2
    x_path: str | None = None
    y_path: str | None = None
    random_inputs: bool = False
    out: str | None = None
    fmt: str = "json"
    include_transcript: bool = False
    redundancy_m: int = 1
    redundancy_rule: str = RedundancyRule.HIDE_AMONG_ZEROS.value

    def __post_init__(self):
        if self.protocol not in VARIANTS:
            raise GateError(f"unknown protocol {self.protocol!r}; choose from {VARIANTS}")
        if self.num_values < 1:
            raise GateError("need at least one data value")
        if self.t < 1:
            raise GateError("t must be at least 1")
        if self.trials < 1:
            raise GateError("trials must be at least 1")
        if self.fmt not in ("json", "csv"):
            raise GateError(f"unknown output format {self.fmt!r}")
        files_given = self.x_path is not None or self.y_path is not None
        if files_given == self.random_inputs:
            raise GateError("provide input files or request random inputs, not both")
        if files_given and (self.x_path is None or self.y_path is None):
            raise GateError("x and y input files must both be given")
        if self.redundancy_m < 1:
            raise GateError("redundancy factor must be at least 1")
        if self.redundancy_m > 1:
            RedundancyRule(self.redundancy_rule)
            if self.protocol == "multiparty":
                raise GateError("redundant encoding is a two-party construction")
            if self.mode is not CorrelationMode.AND:
                raise GateError("redundant encoding decodes product means only")

    @property
    def effective_num_values(self) -> int:
        return self.num_values * self.redundancy_m

    @property
    def index_width(self) -> int:
        return max(1, (self.effective_num_values - 1).bit_length())

    def as_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "num_values": self.num_values,
            "t": self.t,
            "trials": self.trials,
            "seed": self.seed,
            "mode": self.mode.value,
            "num_clients": self.num_clients,
            "x_path": self.x_path,
            "y_path": self.y_path,
            "random_inputs": self.random_inputs,
            "redundancy_m": self.redundancy_m,
            "redundancy_rule": self.redundancy_rule,
        }


@dataclass
class RunRecord:
    run_id: int
    estimate: float
    recovered_estimate: float | None
    truth: float
    server_view_truth: float
    abs_error: float
    outcome_j: int
    ledger: dict
    elapsed_s: float
    transcript: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        d = {
            "run_id": self.run_id,
            "estimate": self.estimate,
            "recovered_estimate": self.recovered_estimate,
            "truth": self.truth,
            "server_view_truth": self.server_view_truth,
            "abs_error": self.abs_error,
            "outcome_j": self.outcome_j,
            "ledger": self.ledger,
            "elapsed_s": self.elapsed_s,
        }
        if self.transcript:
            d["transcript"] = self.transcript
        return d


def load_inputs(cfg: ExperimentConfig) -> tuple[np.ndarray, list[np.ndarray]]:
    """The x vector and the per-client y vectors for a config."""
    if cfg.random_inputs:
        rng = derive_rng(cfg.seed, INPUT_STREAM)
        x = random_bits(cfg.num_values, rng)
        count = cfg.num_clients if cfg.protocol == "multiparty" else 1
        ys = [random_bits(cfg.num_values, rng) for _ in range(count)]
        return x, ys
    x = load_bitstrings(cfg.x_path, expect_width=cfg.num_values)[0]
    ys = load_bitstrings(cfg.y_path, expect_width=cfg.num_values)
    if cfg.protocol == "multiparty":
        if len(ys) != cfg.num_clients:
            raise GateError(
                f"multiparty needs {cfg.num_clients} y vectors, file has {len(ys)}"
            )
    else:
        ys = ys[:1]
    return x, ys


def run_protocol(cfg: ExperimentConfig, x, ys, rng) -> ProtocolRun:
    if cfg.protocol == "baseline":
        return run_qbc_baseline(x, ys[0], cfg.t, cfg.mode, rng)
    if cfg.protocol == "blind-server":
        return run_blind_server(x, ys[0], cfg.t, rng)
    if cfg.protocol == "blind-client":
        return run_blind_client(x, ys[0], cfg.t, rng)
    return run_multiparty(x, ys, cfg.t, rng)


def run_experiment(cfg: ExperimentConfig) -> list[RunRecord]:
    check_cap(cfg.protocol, cfg.index_width, cfg.t, cfg.num_clients)
    x, ys = load_inputs(cfg)
    rule = RedundancyRule(cfg.redundancy_rule)
    records = []
    for trial in range(cfg.trials):
        rng = derive_rng(cfg.seed, trial)
        start = time.perf_counter()
        if cfg.redundancy_m > 1:
            x_run, y_run, _ = redundant_encode(x, ys[0], cfg.redundancy_m, rule, rng)
            run = run_protocol(cfg, x_run, [y_run], rng)
            raw = run.recovered_estimate if run.recovered_estimate is not None else run.estimate
            decoded = float(
                redundant_decode(
                    raw,
                    cfg.redundancy_m,
                    rule,
                    sum_x=int(np.sum(x)),
                    num_values=cfg.num_values,
                )
            )
            truth = float(np.sum(x & ys[0])) / cfg.num_values
            recovered = decoded
            estimate = run.estimate
            view = run.server_view_truth
        else:
            run = run_protocol(cfg, x, ys, rng)
            estimate = run.estimate
            recovered = run.recovered_estimate
            truth = run.truth
            view = run.server_view_truth
        elapsed = time.perf_counter() - start
        best = recovered if recovered is not None else estimate
        records.append(
            RunRecord(
                run_id=trial,
                estimate=estimate,
                recovered_estimate=recovered,
                truth=truth,
                server_view_truth=view,
                abs_error=abs(best - truth),
                outcome_j=run.result.j,
                ledger=run.ledger.as_dict(),
                elapsed_s=elapsed,
                transcript=transcript_lines(run) if cfg.include_transcript else [],
            )
        )
    return records


def records_to_json(cfg: ExperimentConfig, records: list[RunRecord]) -> str:
    payload = {"config": cfg.as_dict(), "records": [r.as_dict() for r in records]}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def records_to_csv(records: list[RunRecord]) -> str:
    header = "run_id,estimate,recovered_estimate,truth,server_view_truth,abs_error,outcome_j"
    lines = [header]
    for r in records:
        rec = "" if r.recovered_estimate is None else repr(r.recovered_estimate)
        lines.append(
            f"{r.run_id},{r.estimate!r},{rec},{r.truth!r},"
            f"{r.server_view_truth!r},{r.abs_error!r},{r.outcome_j}"
        )
    return "\n".join(lines) + "\n"


PRIVACY_HEADER = "N,d,t,d0,formula,mc,trials,z_score"


def privacy_table_overlap(grid, rng, trials: int = 100_000) -> str:
    """CSV of overlap probabilities, formula vs Monte Carlo, over rows of
    (N, d_y, t). One MC batch per row serves every d_0."""
    lines = [PRIVACY_HEADER]
    for num_values, d_y, t in grid:
        formula = overlap_pmf(num_values, d_y, t)
        mc = overlap_mc_pmf(num_values, d_y, t, rng, trials)
        for d0 in range(d_y + 1):
            sigma = math.sqrt(max(formula[d0] * (1 - formula[d0]), 0.0) / trials)
            z = 0.0 if sigma == 0 else (mc[d0] - formula[d0]) / sigma
            lines.append(
                f"{num_values},{d_y},{t},{d0},{formula[d0]:.10f},{mc[d0]:.10f},{trials},{z:.4f}"
            )
    return "\n".join(lines) + "\n"


def privacy_table_recovery(grid) -> str:
    """CSV of exact-recovery probabilities over rows of (N, d_x, count):
    the printed closed form next to the combinatorial model value (exact,
    so the trials and z-score columns are zero)."""
    lines = [PRIVACY_HEADER]
    for num_values, d_x, count in grid:
        printed, model = pr_exact_recovery(num_values, d_x, count)
        lines.append(f"{num_values},{d_x},,{count},{printed:.10f},{model:.10f},0,0.0000")
    return "\n".join(lines) + "\n"
