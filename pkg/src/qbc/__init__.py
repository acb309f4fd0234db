"""Statevector simulation of blind distributed inner-product estimation.

A server holding x and one or more clients holding y estimate
mean(x_i y_i) by phase estimation on a Grover iterate whose oracle is
assembled jointly, one channel round trip per application. Blinded
variants hide each party's bits from the other; the adversary module
quantifies what cheating strategies still learn.
"""
from .adversary import (
    AttackConfig,
    AttackStrategy,
    PrivacyReport,
    RedundancyRule,
    RedundantEncoding,
    attack_biased_index,
    attack_blind_server_worst_case,
    attack_plus_probe,
    biased_index_state,
    blind_client_carrier_state,
    blind_client_distinguishability,
    holevo_quantity,
    occupancy_pmf,
    overlap_mc_pmf,
    overlap_pmf,
    pr_exact_recovery,
    pr_hamming_overlap,
    redundant_decode,
    redundant_encode,
    uniformity_accept_probability,
    verify_index_uniformity,
)
from .bitplane import (
    BitPlaneDecomposition,
    RegressionResult,
    decompose_bitplanes,
    regression_demo,
    regression_error_bound,
)
from .counting import (
    CountingConfig,
    EstimateResult,
    counting_distribution,
    estimate_from_outcome,
    phase_estimation_distribution,
    run_counting,
)
from .experiment import (
    CapExceeded,
    ExperimentConfig,
    RunRecord,
    check_cap,
    derive_rng,
    max_qubits,
    privacy_table_overlap,
    privacy_table_recovery,
    qubit_budget,
    run_experiment,
)
from .ledger import VARIANTS, ChannelLedger, expected_ledger
from .oracles import (
    BasisAssignment,
    CorrelationMode,
    PadRule,
    apply_correlation_gate,
    apply_data_oracle,
    apply_phase_pad,
    as_bits,
    bits_from_string,
    gen_pad,
    load_bitstrings,
    random_bits,
)
from .protocol import (
    OwnershipError,
    ProtocolRun,
    ProtocolSim,
    TranscriptEntry,
    client_name,
    index_width_for,
    parity_fraction,
    run_blind_client,
    run_blind_server,
    run_multiparty,
    run_qbc_baseline,
    transcript_lines,
)
from .statevector import (
    DensityMatrix,
    GateError,
    InvariantViolation,
    StateVector,
    trace_distance,
    von_neumann_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "AttackStrategy",
    "BasisAssignment",
    "BitPlaneDecomposition",
    "CapExceeded",
    "ChannelLedger",
    "CorrelationMode",
    "CountingConfig",
    "DensityMatrix",
    "EstimateResult",
    "ExperimentConfig",
    "GateError",
    "InvariantViolation",
    "OwnershipError",
    "PadRule",
    "PrivacyReport",
    "ProtocolRun",
    "ProtocolSim",
    "RedundancyRule",
    "RedundantEncoding",
    "RegressionResult",
    "RunRecord",
    "StateVector",
    "TranscriptEntry",
    "VARIANTS",
    "apply_correlation_gate",
    "apply_data_oracle",
    "apply_phase_pad",
    "as_bits",
    "attack_biased_index",
    "attack_blind_server_worst_case",
    "attack_plus_probe",
    "biased_index_state",
    "bits_from_string",
    "blind_client_carrier_state",
    "blind_client_distinguishability",
    "check_cap",
    "client_name",
    "counting_distribution",
    "decompose_bitplanes",
    "derive_rng",
    "estimate_from_outcome",
    "expected_ledger",
    "gen_pad",
    "holevo_quantity",
    "index_width_for",
    "load_bitstrings",
    "max_qubits",
    "occupancy_pmf",
    "overlap_mc_pmf",
    "overlap_pmf",
    "parity_fraction",
    "phase_estimation_distribution",
    "pr_exact_recovery",
    "pr_hamming_overlap",
    "privacy_table_overlap",
    "privacy_table_recovery",
    "qubit_budget",
    "random_bits",
    "redundant_decode",
    "redundant_encode",
    "regression_demo",
    "regression_error_bound",
    "run_blind_client",
    "run_blind_server",
    "run_counting",
    "run_experiment",
    "run_multiparty",
    "run_qbc_baseline",
    "trace_distance",
    "transcript_lines",
    "uniformity_accept_probability",
    "verify_index_uniformity",
    "von_neumann_entropy",
]
