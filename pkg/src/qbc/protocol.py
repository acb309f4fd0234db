"""Two-party and cascaded estimation protocols with channel accounting.

A run wires a party-aware Grover round into the counting layer. One
round of the baseline protocol:

    server encodes its bits into the carrier qubit o1,
    sends index register + o1 to the client          (n+1 qubits),
    client applies its data oracle, the correlation gate, uncomputes,
    sends index register + o1 back                   (n+1 qubits),
    server uncomputes; the counting layer applies the diffusion.

The counting layer drives each round with a control qubit from its
readout register so that a round is one controlled Grover iterate. That
control is threaded mechanically through every gate of the round; it is
the simulation's realization of the distributed controlled iterate and
is exempt from ownership checks (parties never act on it, and the
server-side compilation that would make most of it physical is standard
phase kickback through the carrier qubit). Every qubit a party actually
operates on is checked against the ownership map, and violations abort
the run.

Blinded variants:

    blind-server: the client pads the phase with bits g drawn once per
    execution, zero wherever its own bit is 1, so the server's measured
    mean targets (sum x_i y_i + sum g_i)/N and the client recovers the
    true mean by subtracting mean(g).

    blind-client: the server encodes each branch in a random Z or X
    basis, extracts the product phase with a scratch qubit, and pads
    rounds with fresh random phases, so the client only ever sees o1
    states whose best single-copy distinguishability is fixed.

    multiparty: the carrier hops server -> client 1 -> ... -> client m
    -> server, accumulating the parity of all per-client products. The
    first client may pad; the padded parity mean is what the server
    then estimates (a pad over a parity cannot be subtracted out
    without per-index knowledge, so both truths are reported).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .counting import CountingConfig, EstimateResult, counting_distribution, run_counting
from .ledger import ChannelLedger
from .oracles import (
    BasisAssignment,
    CorrelationMode,
    PadRule,
    apply_correlation_gate,
    apply_data_oracle,
    apply_phase_pad,
    apply_ux1,
    apply_ux2,
    apply_ux3,
    apply_ux4,
    as_bits,
    gen_pad,
    random_bits,
)
from .statevector import GateError, InvariantViolation, StateVector

SERVER = "server"


def client_name(k: int = 1) -> str:
    return f"client{k}"


class OwnershipError(InvariantViolation):
    """A party applied a gate to a qubit it does not currently hold."""


@dataclass
class TranscriptEntry:
    round_index: int
    src: str
    dst: str
    qubits: int
    oracle_calls: int = 0

    def line(self) -> str:
        return f"{self.round_index},{self.src},{self.dst},{self.qubits},{self.oracle_calls}"


def index_width_for(num_values: int) -> int:
    if num_values < 1:
        raise GateError("need at least one data value")
    return max(1, (num_values - 1).bit_length())


class ProtocolSim:
    """Statevector plus ownership map, ledger, and transcript."""

    def __init__(self, num_qubits: int, owners: dict, ledger: ChannelLedger, server_home):
        self.state = StateVector(num_qubits)
        self.owners = dict(owners)
        self.ledger = ledger
        self.transcript: list[TranscriptEntry] = []
        self.server_home = list(server_home)
        self.round_index = 0
        self._round_rows: list[int] = []
        self._round_call_base = 0

    def begin_round(self):
        self.round_index += 1
        self.ledger.grover_rounds += 1
        self._round_rows = []
        self._round_call_base = self.ledger.oracle_total()

    def end_round(self):
        calls = self.ledger.oracle_total() - self._round_call_base
        for row in self._round_rows:
            self.transcript[row].oracle_calls = calls
        self.require_owner(SERVER, self.server_home)

    def require_owner(self, party: str, qubits):
        for q in qubits:
            holder = self.owners.get(q)
            if holder != party:
                raise OwnershipError(
                    f"round {self.round_index}: {party} acted on qubit {q} held by {holder}"
                )

    def transfer(self, qubits, src: str, dst: str):
        self.require_owner(src, qubits)
        for q in qubits:
            self.owners[q] = dst
        self.ledger.quantum_qubits_sent += len(qubits)
        self.transcript.append(TranscriptEntry(self.round_index, src, dst, len(qubits)))
        self._round_rows.append(len(self.transcript) - 1)


@dataclass
class ProtocolRun:
    variant: str
    num_values: int
    index_width: int
    t: int
    mode: str
    result: EstimateResult | None
    estimate: float | None
    recovered_estimate: float | None
    truth: float
    server_view_truth: float
    ledger: ChannelLedger
    transcript: list[TranscriptEntry]
    pads: dict = field(default_factory=dict)
    distribution: np.ndarray | None = None

    @property
    def abs_error(self) -> float | None:
        if self.estimate is None:
            return None
        best = self.recovered_estimate if self.recovered_estimate is not None else self.estimate
        return abs(best - self.truth)


def transcript_lines(run: ProtocolRun) -> list[str]:
    return ["round,from,to,qubits,oracle_calls"] + [e.line() for e in run.transcript]


def _validated_pair(x, y):
    x = as_bits(x)
    y = as_bits(y)
    if len(x) != len(y):
        raise GateError("x and y must have equal length")
    return x, y


def _finish(
    sim: ProtocolSim,
    cfg: CountingConfig,
    rng,
    return_distribution: bool,
    scale: float,
    final_result_bits: int,
):
    """Run or analyze the counting circuit and collect the outputs."""
    if return_distribution:
        dist = counting_distribution(cfg, sim.state)
        return None, None, dist
    if rng is None:
        raise GateError("need an rng to sample the readout")
    result = run_counting(cfg, rng, sim.state)
    sim.ledger.classical_bits_sent += final_result_bits
    return result, result.estimate * scale, None


def run_qbc_baseline(
    x,
    y,
    t: int,
    mode: CorrelationMode = CorrelationMode.AND,
    rng: np.random.Generator | None = None,
    return_distribution: bool = False,
    round_hook=None,
) -> ProtocolRun:
    """Plain two-party estimation of the product (or XOR) mean."""
    x, y = _validated_pair(x, y)
    num = len(x)
    n = index_width_for(num)
    index = list(range(n))
    o1 = n + t
    o2 = n + t + 1
    client = client_name(1)
    ledger = ChannelLedger()
    owners = {q: SERVER for q in range(n + t + 1)}
    owners[o2] = client
    sim = ProtocolSim(n + t + 2, owners, ledger, index + list(range(n, n + t)))

    def grover_round(state, ctrl):
        ctrls = () if ctrl is None else (ctrl,)
        sim.begin_round()
        sim.require_owner(SERVER, index + [o1])
        apply_data_oracle(state, index, o1, x, ctrls, ledger, "Ux")
        sim.transfer(index + [o1], SERVER, client)
        sim.require_owner(client, index + [o1, o2])
        apply_data_oracle(state, index, o2, y, ctrls, ledger, "Uy")
        apply_correlation_gate(state, o1, o2, mode, ctrls)
        apply_data_oracle(state, index, o2, y, ctrls, ledger, "Uy")
        sim.transfer(index + [o1], client, SERVER)
        sim.require_owner(SERVER, index + [o1])
        apply_data_oracle(state, index, o1, x, ctrls, ledger, "Ux")
        sim.end_round()
        if round_hook is not None:
            round_hook(sim.round_index, state)

    cfg = CountingConfig(n, t, grover_round, work_qubits=2)
    scale = (1 << n) / num
    result, estimate, dist = _finish(sim, cfg, rng, return_distribution, scale, t)
    if mode is CorrelationMode.AND:
        truth = float(np.sum(x & y)) / num
    else:
        truth = float(np.sum(x ^ y)) / num
    return ProtocolRun(
        variant="baseline",
        num_values=num,
        index_width=n,
        t=t,
        mode=mode.value,
        result=result,
        estimate=estimate,
        recovered_estimate=None,
        truth=truth,
        server_view_truth=truth,
        ledger=ledger,
        transcript=sim.transcript,
        distribution=dist,
    )


def run_blind_server(
    x,
    y,
    t: int,
    rng: np.random.Generator | None = None,
    pad_bits=None,
    pad_per_round: bool = False,
    disclose_pad_sum: bool = False,
    return_distribution: bool = False,
    round_hook=None,
) -> ProtocolRun:
    """Product-mean estimation where the client pads the phase so the
    server never sees the bare overlap. The pad is drawn once per
    execution: a per-round redraw changes the counted set between
    iterates and breaks exact recovery. pad_per_round=True enables that
    regime anyway so the resulting estimator bias can be studied; the
    recovery then subtracts the average pad mean."""
    x, y = _validated_pair(x, y)
    num = len(x)
    n = index_width_for(num)
    index = list(range(n))
    o1 = n + t
    o2 = n + t + 1
    o3 = n + t + 2
    client = client_name(1)
    ledger = ChannelLedger()
    owners = {q: SERVER for q in range(n + t + 1)}
    owners[o2] = client
    owners[o3] = client
    sim = ProtocolSim(n + t + 3, owners, ledger, index + list(range(n, n + t)))

    if pad_bits is None:
        if rng is None:
            raise GateError("need an rng to draw the pad")
        g = gen_pad(PadRule.BLIND_SERVER_G, y, rng)
    else:
        if pad_per_round:
            raise GateError("a forced pad and per-round redraws are incompatible")
        g = as_bits(pad_bits)
        if len(g) != num:
            raise GateError("pad length must match the data length")
        if np.any(g & y):
            raise GateError("pad must be zero wherever the client bit is 1")
    pads_used: list[np.ndarray] = [g]

    def grover_round(state, ctrl):
        ctrls = () if ctrl is None else (ctrl,)
        sim.begin_round()
        if pad_per_round and sim.round_index > 1:
            pads_used.append(gen_pad(PadRule.BLIND_SERVER_G, y, rng))
        round_pad = pads_used[-1]
        sim.require_owner(SERVER, index + [o1])
        apply_data_oracle(state, index, o1, x, ctrls, ledger, "Ux")
        sim.transfer(index + [o1], SERVER, client)
        sim.require_owner(client, index + [o1, o2, o3])
        apply_data_oracle(state, index, o2, y, ctrls, ledger, "Uy")
        apply_correlation_gate(state, o1, o2, CorrelationMode.AND, ctrls)
        apply_data_oracle(state, index, o2, y, ctrls, ledger, "Uy")
        apply_phase_pad(state, index, round_pad, o3, ctrls, ledger, "Ug")
        sim.transfer(index + [o1], client, SERVER)
        sim.require_owner(SERVER, index + [o1])
        apply_data_oracle(state, index, o1, x, ctrls, ledger, "Ux")
        sim.end_round()
        if round_hook is not None:
            round_hook(sim.round_index, state)

    cfg = CountingConfig(n, t, grover_round, work_qubits=3)
    scale = (1 << n) / num
    result, estimate, dist = _finish(sim, cfg, rng, return_distribution, scale, t)
    pad_mean = float(np.mean([np.sum(p) for p in pads_used])) / num
    if disclose_pad_sum:
        ledger.classical_bits_sent += math.ceil(math.log2(num + 1))
    truth = float(np.sum(x & y)) / num
    return ProtocolRun(
        variant="blind-server",
        num_values=num,
        index_width=n,
        t=t,
        mode=CorrelationMode.AND.value,
        result=result,
        estimate=estimate,
        recovered_estimate=None if estimate is None else estimate - pad_mean,
        truth=truth,
        server_view_truth=truth + pad_mean,
        ledger=ledger,
        transcript=sim.transcript,
        pads={"g": pads_used[0] if not pad_per_round else pads_used},
        distribution=dist,
    )


def run_blind_client(
    x,
    y,
    t: int,
    rng: np.random.Generator | None = None,
    force_basis=None,
    force_pad=None,
    return_distribution: bool = False,
    round_hook=None,
) -> ProtocolRun:
    """Product-mean estimation where the server hides its bits behind
    per-round random basis choices and phase pads. Bases and pads are
    redrawn every round; the pipeline restores the exact baseline branch
    phases each round, so the readout statistics match the baseline."""
    x, y = _validated_pair(x, y)
    num = len(x)
    n = index_width_for(num)
    index = list(range(n))
    o1 = n + t
    o2 = n + t + 1
    oa = n + t + 2
    client = client_name(1)
    ledger = ChannelLedger()
    owners = {q: SERVER for q in range(n + t + 1)}
    owners[o2] = client
    owners[oa] = SERVER
    sim = ProtocolSim(n + t + 3, owners, ledger, index + list(range(n, n + t)))
    if (force_basis is None or force_pad is None) and rng is None:
        raise GateError("need an rng to draw bases and pads")
    bases: list[BasisAssignment] = []
    pads: list[np.ndarray] = []

    def grover_round(state, ctrl):
        ctrls = () if ctrl is None else (ctrl,)
        sim.begin_round()
        r_bits = as_bits(force_basis) if force_basis is not None else random_bits(num, rng)
        h_bits = as_bits(force_pad) if force_pad is not None else random_bits(num, rng)
        basis = BasisAssignment(r_bits, sim.round_index)
        bases.append(basis)
        pads.append(h_bits)
        sim.require_owner(SERVER, index + [o1])
        apply_ux1(state, index, o1, x, basis, ctrls, ledger)
        sim.transfer(index + [o1], SERVER, client)
        sim.require_owner(client, index + [o1, o2])
        apply_data_oracle(state, index, o2, y, ctrls, ledger, "Uy")
        apply_correlation_gate(state, o1, o2, CorrelationMode.AND, ctrls)
        apply_data_oracle(state, index, o2, y, ctrls, ledger, "Uy")
        sim.transfer(index + [o1], client, SERVER)
        sim.require_owner(SERVER, index + [o1, oa])
        apply_ux2(state, index, o1, oa, x, basis, ctrls, ledger)
        apply_ux3(state, index, h_bits, oa, ctrls, ledger)
        sim.transfer(index + [o1], SERVER, client)
        sim.require_owner(client, index + [o1, o2])
        apply_data_oracle(state, index, o2, y, ctrls, ledger, "Uy")
        apply_correlation_gate(state, o1, o2, CorrelationMode.AND, ctrls)
        apply_data_oracle(state, index, o2, y, ctrls, ledger, "Uy")
        sim.transfer(index + [o1], client, SERVER)
        sim.require_owner(SERVER, index + [o1, oa])
        apply_ux4(state, index, o1, oa, x, basis, h_bits, ctrls, ledger)
        sim.end_round()
        if round_hook is not None:
            round_hook(sim.round_index, state)

    cfg = CountingConfig(n, t, grover_round, work_qubits=3)
    scale = (1 << n) / num
    result, estimate, dist = _finish(sim, cfg, rng, return_distribution, scale, 0)
    truth = float(np.sum(x & y)) / num
    return ProtocolRun(
        variant="blind-client",
        num_values=num,
        index_width=n,
        t=t,
        mode=CorrelationMode.AND.value,
        result=result,
        estimate=estimate,
        recovered_estimate=None,
        truth=truth,
        server_view_truth=truth,
        ledger=ledger,
        transcript=sim.transcript,
        pads={"basis": bases, "h": pads},
        distribution=dist,
    )


def parity_fraction(x, ys) -> float:
    """Classical oracle for the cascade: the mean over indices of the
    parity of the per-client products."""
    x = as_bits(x)
    parity = np.zeros(len(x), dtype=np.uint8)
    for y in ys:
        y = as_bits(y)
        if len(y) != len(x):
            raise GateError("client vectors must match the server length")
        parity ^= x & y
    return float(np.sum(parity)) / len(x)


def run_multiparty(
    x,
    ys,
    t: int,
    rng: np.random.Generator | None = None,
    pad_first_client: bool = True,
    pad_bits=None,
    return_distribution: bool = False,
    round_hook=None,
) -> ProtocolRun:
    """Cascaded estimation of the parity-of-products mean across m
    clients. Each client holds its own work qubit; only the index
    register and the carrier hop along the chain."""
    x = as_bits(x)
    ys = [as_bits(y) for y in ys]
    m = len(ys)
    if m < 2:
        raise GateError("cascade needs at least two clients")
    for y in ys:
        if len(y) != len(x):
            raise GateError("client vectors must match the server length")
    num = len(x)
    n = index_width_for(num)
    index = list(range(n))
    o1 = n + t
    work = {k: n + t + 1 + (k - 1) for k in range(1, m + 1)}
    ledger = ChannelLedger()
    owners = {q: SERVER for q in range(n + t + 1)}
    for k in range(1, m + 1):
        owners[work[k]] = client_name(k)
    sim = ProtocolSim(n + t + 1 + m, owners, ledger, index + list(range(n, n + t)))

    g = None
    if pad_first_client:
        if pad_bits is not None:
            g = as_bits(pad_bits)
            if len(g) != num:
                raise GateError("pad length must match the data length")
        else:
            if rng is None:
                raise GateError("need an rng to draw the pad")
            g = random_bits(num, rng)

    def grover_round(state, ctrl):
        ctrls = () if ctrl is None else (ctrl,)
        sim.begin_round()
        sim.require_owner(SERVER, index + [o1])
        apply_data_oracle(state, index, o1, x, ctrls, ledger, "Ux")
        holder = SERVER
        for k in range(1, m + 1):
            party = client_name(k)
            sim.transfer(index + [o1], holder, party)
            holder = party
            sim.require_owner(party, index + [o1, work[k]])
            apply_data_oracle(state, index, work[k], ys[k - 1], ctrls, ledger, "Uy")
            apply_correlation_gate(state, o1, work[k], CorrelationMode.AND, ctrls)
            apply_data_oracle(state, index, work[k], ys[k - 1], ctrls, ledger, "Uy")
            if k == 1 and g is not None:
                apply_phase_pad(state, index, g, work[k], ctrls, ledger, "Ug")
        sim.transfer(index + [o1], holder, SERVER)
        sim.require_owner(SERVER, index + [o1])
        apply_data_oracle(state, index, o1, x, ctrls, ledger, "Ux")
        sim.end_round()
        if round_hook is not None:
            round_hook(sim.round_index, state)

    cfg = CountingConfig(n, t, grover_round, work_qubits=1 + m)
    scale = (1 << n) / num
    result, estimate, dist = _finish(sim, cfg, rng, return_distribution, scale, 0)
    truth = parity_fraction(x, ys)
    if g is not None:
        parity = np.zeros(num, dtype=np.uint8)
        for y in ys:
            parity ^= x & y
        server_view = float(np.sum(parity ^ g)) / num
    else:
        server_view = truth
    return ProtocolRun(
        variant="multiparty",
        num_values=num,
        index_width=n,
        t=t,
        mode=CorrelationMode.AND.value,
        result=result,
        estimate=estimate,
        recovered_estimate=None,
        truth=truth,
        server_view_truth=server_view,
        ledger=ledger,
        transcript=sim.transcript,
        pads={} if g is None else {"g": g},
        distribution=dist,
    )
