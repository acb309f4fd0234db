"""Phase-oracle building blocks over an index register and work qubits.

The data oracle XORs a classical bit vector into a work qubit, indexed by
the index register: |i>|b> -> |i>|b xor data_i>. Composing two data
oracles with a correlation gate between the work qubits imprints the
product (or XOR) of the two parties' bits as a phase on branch i. Pads
and basis assignments support the blinded protocol variants.

Vectors shorter than the index-register span are padded with zeros, so
indices past the data length behave as fixed 0 bits.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .statevector import GateError, InvariantViolation, StateVector


class CorrelationMode(enum.Enum):
    AND = "and"
    XOR = "xor"


class PadRule(enum.Enum):
    """How a random phase pad is drawn.

    BLIND_SERVER_G: zero wherever the pad owner's bit is 1, uniform
    elsewhere, so padded products never wrap mod 2 and the pad mean can
    be subtracted exactly.
    BLIND_CLIENT_H: uniform everywhere.
    """

    BLIND_SERVER_G = "blind-server-g"
    BLIND_CLIENT_H = "blind-client-h"


@dataclass(frozen=True)
class BasisAssignment:
    """Per-index basis choice for one round: 0 = computational, 1 = Hadamard."""

    bits: np.ndarray
    round_index: int

    def __post_init__(self):
        object.__setattr__(self, "bits", as_bits(self.bits))


# -- classical bit vectors ------------------------------------------------


def as_bits(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    if arr.ndim != 1:
        raise GateError("bit vector must be one-dimensional")
    if not np.all((arr == 0) | (arr == 1)):
        raise GateError("bit vector entries must be 0 or 1")
    return arr.astype(np.uint8)


def bits_from_string(text: str) -> np.ndarray:
    try:
        return as_bits([int(c) for c in text.strip()])
    except ValueError:
        raise GateError(f"invalid bitstring {text!r}") from None


def random_bits(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=n).astype(np.uint8)


def load_bitstrings(path, expect_width: int | None = None) -> list[np.ndarray]:
    """Read one bit vector per line of ASCII 0/1 characters.

    Lines must agree on width (and match expect_width when given);
    violations report the offending line number.
    """
    rows: list[np.ndarray] = []
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if set(line) - {"0", "1"}:
            raise GateError(f"{path}: line {lineno}: expected only 0/1 characters")
        bits = bits_from_string(line)
        width = expect_width if expect_width is not None else (len(rows[0]) if rows else None)
        if width is not None and len(bits) != width:
            raise GateError(
                f"{path}: line {lineno}: width {len(bits)} does not match expected {width}"
            )
        rows.append(bits)
    if not rows:
        raise GateError(f"{path}: no bit vectors found")
    return rows


def padded_table(bits, index_width: int) -> np.ndarray:
    """Zero-pad a bit vector to the 2**index_width predicate table."""
    bits = as_bits(bits)
    size = 1 << index_width
    if len(bits) > size:
        raise GateError(f"{len(bits)} bits do not fit a {index_width}-qubit index register")
    table = np.zeros(size, dtype=np.uint8)
    table[: len(bits)] = bits
    return table


# -- oracles ---------------------------------------------------------------


def _count(ledger, name: str, k: int = 1):
    if ledger is not None:
        ledger.count_oracle(name, k)


def apply_data_oracle(state, index_reg, target, data, controls=(), ledger=None, name="Ux"):
    """|i>|b> -> |i>|b xor data_i> on `target`. Self-inverse."""
    table = padded_table(data, len(index_reg))
    state.x(target, controls=controls, index_reg=index_reg, pred=table)
    _count(ledger, name)
    return state


def apply_correlation_gate(state, o1, o2, mode: CorrelationMode, controls=()):
    """Phase (-1)**(a AND b) or (-1)**(a XOR b) of the two work qubits."""
    if o1 == o2:
        raise GateError("correlation gate needs two distinct work qubits")
    if mode is CorrelationMode.AND:
        state.cz(o1, o2, controls=controls)
    elif mode is CorrelationMode.XOR:
        state.cnot(o1, o2, controls=controls)
        state.z(o2, controls=controls)
        state.cnot(o1, o2, controls=controls)
    else:
        raise GateError(f"unknown correlation mode {mode!r}")
    return state


def gen_pad(rule: PadRule, y, rng: np.random.Generator) -> np.ndarray:
    """Draw a phase pad per `rule`; y is the pad owner's bit vector."""
    y = as_bits(y)
    if rule is PadRule.BLIND_SERVER_G:
        return (random_bits(len(y), rng) & (1 - y)).astype(np.uint8)
    if rule is PadRule.BLIND_CLIENT_H:
        return random_bits(len(y), rng)
    raise GateError(f"unknown pad rule {rule!r}")


def apply_phase_pad(state, index_reg, pad, ancilla, controls=(), ledger=None, name="Ug"):
    """Multiply branch i by (-1)**pad_i, via XOR onto `ancilla`, a Z, and
    an uncompute. The ancilla returns to |0>."""
    apply_data_oracle(state, index_reg, ancilla, pad, controls, ledger, name)
    state.z(ancilla, controls=controls)
    apply_data_oracle(state, index_reg, ancilla, pad, controls, ledger, name)
    return state


# -- basis-hiding pipeline (server side of the client-blinded variant) ----


def apply_ux1(state, index_reg, o1, x, basis: BasisAssignment, controls=(), ledger=None):
    """Encode x_i into o1, per-branch in the Z or X basis: branch i
    carries |x_i> where basis bit is 0 and H|x_i> where it is 1."""
    apply_data_oracle(state, index_reg, o1, x, controls, ledger, "Ux")
    table = padded_table(basis.bits, len(index_reg))
    state.h(o1, controls=controls, index_reg=index_reg, pred=table)
    _count(ledger, "UX1")
    return state


def _require_clear(state, qubit, what: str):
    if state.probability(qubit, 1) > 1e-12:
        raise GateError(f"{what} must be |0> at entry")


def apply_ux2(state, index_reg, o1, oa, x, basis: BasisAssignment, controls=(), ledger=None):
    """Extract the product phase out of the X-basis branches and clear
    the Z-basis ones.

    On branches with basis bit 1, o1 arrived as H|x_i xor y_i|; mapping it
    through H and X turns the CZ against |x_i> (held on oa) into exactly
    the phase (-1)**(x_i y_i), after which the encoding is restored.
    Z-basis branches already carry that phase from the counterpart's
    correlation gate, so o1 is reset to |0> there (the owner knows x and
    the basis draw). Without that reset the counterpart's second pass
    would imprint the product phase a second time on those branches and
    cancel it.
    """
    _require_clear(state, oa, "scratch qubit oa")
    x = as_bits(x)
    r_bits = basis.bits
    table = padded_table(r_bits, len(index_reg))
    apply_data_oracle(state, index_reg, oa, x, controls, ledger, "Ux")
    state.h(o1, controls=controls, index_reg=index_reg, pred=table)
    state.x(o1, controls=controls, index_reg=index_reg, pred=table)
    state.cz(o1, oa, controls=controls, index_reg=index_reg, pred=table)
    state.x(o1, controls=controls, index_reg=index_reg, pred=table)
    state.h(o1, controls=controls, index_reg=index_reg, pred=table)
    apply_data_oracle(state, index_reg, oa, x, controls, ledger, "Ux")
    apply_data_oracle(state, index_reg, o1, x & (1 - r_bits), controls, ledger, "Ux")
    _count(ledger, "UX2")
    return state


def apply_ux3(state, index_reg, pad, ancilla, controls=(), ledger=None):
    """Random phase pad (-1)**h_i hiding the product phase from the
    counterpart between the two correlation rounds."""
    apply_phase_pad(state, index_reg, pad, ancilla, controls, ledger, "Uh")
    _count(ledger, "UX3")
    return state


def apply_ux4(state, index_reg, o1, oa, x, basis: BasisAssignment, pad, controls=(), ledger=None):
    """Remove the pad and reset o1 to |0> using the known encoding.

    Only X-basis branches still hold data in o1 by this point (the
    counterpart's second pass stripped their y-phase; Z-basis branches
    were cleared during the phase extraction), so the final unload is
    masked to the basis draw.
    """
    apply_phase_pad(state, index_reg, pad, oa, controls, ledger, "Uh")
    x = as_bits(x)
    r_bits = basis.bits
    table = padded_table(r_bits, len(index_reg))
    state.h(o1, controls=controls, index_reg=index_reg, pred=table)
    apply_data_oracle(state, index_reg, o1, x & r_bits, controls, ledger, "Ux")
    _count(ledger, "UX4")
    if state.probability(o1, 1) > 1e-12:
        raise InvariantViolation(
            "o1 failed to reset; input state did not match the recorded encoding"
        )
    return state
