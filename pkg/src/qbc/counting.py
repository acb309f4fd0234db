"""Quantum counting: phase estimation over a Grover iterate.

The Grover iterate G composes a caller-supplied phase oracle with the
diffusion about the uniform index state. Controlled powers G**(2**k) are
realized by repeating the controlled iterate, never by exponentiating a
matrix, so a protocol can hop qubits between parties once per iterate
and the communication ledger counts real channel uses.

Register layout: index qubits [0, n), readout register [n, n+t), work
qubits after that. Readout qubit n+j controls G**(2**(t-1-j)), so the
measured register reads big-endian as the integer j with
theta_hat = 2*pi*j / 2**t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .statevector import (
    GateSpec,
    InvariantViolation,
    StateVector,
    WORK_LEAK_ATOL,
    apply_gate,
)

Oracle = Callable[[StateVector, int | None], None]


@dataclass
class CountingConfig:
    index_width: int
    precision: int
    oracle: Oracle
    work_qubits: int = 0
    inverse_oracle: Oracle | None = None

    def __post_init__(self):
        if self.index_width < 1:
            raise ValueError("index register needs at least one qubit")
        if self.precision < 1:
            raise ValueError("readout register needs at least one qubit")

    @property
    def index_reg(self) -> tuple:
        return tuple(range(self.index_width))

    @property
    def readout_reg(self) -> tuple:
        return tuple(range(self.index_width, self.index_width + self.precision))

    @property
    def work_reg(self) -> tuple:
        base = self.index_width + self.precision
        return tuple(range(base, base + self.work_qubits))

    @property
    def total_qubits(self) -> int:
        return self.index_width + self.precision + self.work_qubits


@dataclass(frozen=True)
class OracleOp:
    """Oracle invocation inside a circuit list, with its inverse for
    reversal tests and the readout qubit controlling it."""

    apply: Oracle
    invert: Oracle
    control: int | None

    def inverse(self) -> "OracleOp":
        return OracleOp(self.invert, self.apply, self.control)


@dataclass(frozen=True)
class WorkCheck:
    """Marker: assert work qubits carry no residual excitation here."""

    qubits: tuple


@dataclass
class EstimateResult:
    j: int
    theta_hat: float
    estimate: float
    std_bound: float
    grover_applications: int


def estimate_from_outcome(j: int, t: int) -> EstimateResult:
    if t < 1:
        raise ValueError("t must be at least 1")
    if not 0 <= j < (1 << t):
        raise ValueError(f"outcome {j} out of range for a {t}-bit readout")
    theta_hat = 2.0 * math.pi * j / (1 << t)
    estimate = math.sin(math.pi * j / (1 << t)) ** 2
    return EstimateResult(
        j=j,
        theta_hat=theta_hat,
        estimate=estimate,
        std_bound=2.0 ** (-t + 1),
        grover_applications=(1 << t) - 1,
    )


def diffusion_gates(index_reg, control: int | None) -> list[GateSpec]:
    controls = () if control is None else (control,)
    hs = [GateSpec("h", (q,), controls) for q in index_reg]
    return hs + [GateSpec("reflect0", tuple(index_reg), controls)] + hs


def build_counting_circuit(cfg: CountingConfig) -> list:
    """Hadamards on the readout register, controlled Grover powers by
    repetition (largest power on the top readout qubit), inverse Fourier
    transform, with a work-purity check after every iterate."""
    inverse = cfg.inverse_oracle if cfg.inverse_oracle is not None else cfg.oracle
    ops: list = [GateSpec("h", (q,)) for q in cfg.readout_reg]
    for pos, q in enumerate(cfg.readout_reg):
        for _ in range(1 << (cfg.precision - 1 - pos)):
            ops.append(OracleOp(cfg.oracle, inverse, q))
            ops.extend(diffusion_gates(cfg.index_reg, q))
            ops.append(WorkCheck(cfg.work_reg))
    ops.append(GateSpec("iqft", cfg.readout_reg))
    return ops


def reverse_circuit(circuit: list) -> list:
    out = []
    for op in reversed(circuit):
        if isinstance(op, WorkCheck):
            continue
        out.append(op.inverse())
    return out


def work_leakage(state: StateVector, work_reg) -> float:
    """Total probability mass on components with any work qubit set."""
    if not work_reg:
        return 0.0
    hot = np.zeros(len(state.amps), dtype=bool)
    for q in work_reg:
        hot |= state.bit_values(q) == 1
    return float(np.sum(np.abs(state.amps[hot]) ** 2))


def run_circuit(state: StateVector, circuit: list, check_work: bool = True) -> StateVector:
    for op in circuit:
        if isinstance(op, GateSpec):
            apply_gate(state, op)
        elif isinstance(op, OracleOp):
            op.apply(state, op.control)
        elif isinstance(op, WorkCheck):
            if check_work:
                leak = work_leakage(state, op.qubits)
                if leak > WORK_LEAK_ATOL:
                    raise InvariantViolation(
                        f"work qubits leaked {leak:.3e} probability after a Grover iterate"
                    )
        else:
            raise TypeError(f"unknown circuit op {op!r}")
    return state


def _prepared_state(cfg: CountingConfig, state: StateVector | None) -> StateVector:
    if state is None:
        state = StateVector(cfg.total_qubits)
    elif state.num_qubits != cfg.total_qubits:
        raise ValueError("state size does not match the counting configuration")
    for q in cfg.index_reg:
        state.h(q)
    return state


def counting_distribution(cfg: CountingConfig, state: StateVector | None = None) -> np.ndarray:
    """Exact readout distribution of the full counting circuit, starting
    from the uniform index state."""
    state = _prepared_state(cfg, state)
    run_circuit(state, build_counting_circuit(cfg))
    return state.outcome_distribution(cfg.readout_reg)


def run_counting(
    cfg: CountingConfig, rng: np.random.Generator, state: StateVector | None = None
) -> EstimateResult:
    """Simulate the counting circuit once and measure the readout."""
    state = _prepared_state(cfg, state)
    run_circuit(state, build_counting_circuit(cfg))
    j = 0
    for q in cfg.readout_reg:
        j = (j << 1) | state.measure(q, rng)
    return estimate_from_outcome(j, cfg.precision)


def phase_estimation_distribution(count: int, num_values: int, t: int) -> np.ndarray:
    """Analytic readout distribution for counting `count` marked values
    among `num_values`: the uniform state splits evenly onto the two
    conjugate eigenphases of the iterate, each spread by the kernel
    sin^2(2^t pi d) / (4^t sin^2(pi d)) around its phase."""
    if not 0 <= count <= num_values:
        raise ValueError("marked count out of range")
    size = 1 << t
    theta = 2.0 * math.asin(math.sqrt(count / num_values))
    phi = theta / (2.0 * math.pi)
    js = np.arange(size)

    def kernel(delta: np.ndarray) -> np.ndarray:
        num = np.sin(size * np.pi * delta) ** 2
        den = (size**2) * np.sin(np.pi * delta) ** 2
        out = np.divide(num, den, out=np.ones_like(delta), where=np.abs(den) > 1e-300)
        exact = np.isclose(np.mod(delta, 1.0), 0.0, atol=1e-12) | np.isclose(
            np.mod(delta, 1.0), 1.0, atol=1e-12
        )
        out[exact] = 1.0
        return out

    if count in (0, num_values):
        dist = kernel(phi - js / size)
    else:
        dist = 0.5 * kernel(phi - js / size) + 0.5 * kernel(-phi - js / size)
    return dist / dist.sum()
