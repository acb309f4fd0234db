"""End-to-end protocol runs: channel ledgers, ownership, transcripts,
blindness of the readout statistics, and estimator truth."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbc.ledger import ChannelLedger, expected_ledger
from qbc.oracles import CorrelationMode, random_bits
from qbc.protocol import (
    SERVER,
    OwnershipError,
    ProtocolSim,
    client_name,
    index_width_for,
    parity_fraction,
    run_blind_client,
    run_blind_server,
    run_multiparty,
    run_qbc_baseline,
    transcript_lines,
)
from qbc.statevector import GateError


def tv_distance(p, q) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


def ledgers_equal(got: ChannelLedger, want: ChannelLedger) -> bool:
    return (
        got.quantum_qubits_sent == want.quantum_qubits_sent
        and got.classical_bits_sent == want.classical_bits_sent
        and got.oracle_calls == want.oracle_calls
        and got.grover_rounds == want.grover_rounds
    )


def all_pairs(num: int):
    for xi in range(1 << num):
        for yi in range(1 << num):
            x = [(xi >> k) & 1 for k in range(num)]
            y = [(yi >> k) & 1 for k in range(num)]
            yield x, y


# -- basic runs -----------------------------------------------------------------


def test_baseline_exact_instance():
    # half the padded space marked: theta on the t-grid, deterministic
    rng = np.random.default_rng(0)
    run = run_qbc_baseline([1, 1, 0, 0], [1, 1, 1, 1], 4, rng=rng)
    assert run.truth == 0.5
    assert run.estimate == pytest.approx(0.5, abs=1e-12)
    assert run.result.j in (4, 12)
    assert run.abs_error < 1e-12


def test_baseline_xor_mode_truth():
    rng = np.random.default_rng(1)
    run = run_qbc_baseline([1, 0, 1, 0], [0, 0, 1, 1], 3, mode=CorrelationMode.XOR, rng=rng)
    assert run.truth == 0.5
    assert run.mode == "xor"
    assert run.estimate == pytest.approx(0.5, abs=1e-12)


def test_baseline_scales_for_non_power_of_two():
    # N=3, sum x_i y_i = 2: marked fraction on the padded space is 2/4
    rng = np.random.default_rng(2)
    run = run_qbc_baseline([1, 1, 0], [1, 1, 1], 3, rng=rng)
    assert run.index_width == 2
    assert run.truth == pytest.approx(2 / 3)
    assert run.estimate == pytest.approx(2 / 3, abs=1e-12)


def test_length_mismatch_rejected():
    with pytest.raises(GateError):
        run_qbc_baseline([1, 0], [1, 0, 1], 2, rng=np.random.default_rng(0))


def test_sampling_without_rng_rejected():
    with pytest.raises(GateError, match="rng"):
        run_qbc_baseline([1, 0], [1, 1], 2)


def test_distribution_mode_skips_sampling():
    run = run_qbc_baseline([1, 0], [1, 1], 3, return_distribution=True)
    assert run.result is None and run.estimate is None
    assert run.distribution.shape == (8,)
    assert abs(run.distribution.sum() - 1.0) < 1e-9


def test_same_seed_reproduces_run():
    a = run_qbc_baseline([1, 0, 1, 1], [0, 1, 1, 1], 5, rng=np.random.default_rng(33))
    b = run_qbc_baseline([1, 0, 1, 1], [0, 1, 1, 1], 5, rng=np.random.default_rng(33))
    assert a.result.j == b.result.j
    assert a.estimate == b.estimate


def test_round_hook_called_once_per_round():
    seen = []
    run_qbc_baseline(
        [1, 0], [1, 1], 3,
        return_distribution=True,
        round_hook=lambda r, state: seen.append(r),
    )
    assert seen == list(range(1, 8))


# -- ledgers ---------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_baseline_ledger_grid(n, t):
    rng = np.random.default_rng(n * 10 + t)
    num = 1 << n
    run = run_qbc_baseline(random_bits(num, rng), random_bits(num, rng), t, rng=rng)
    assert ledgers_equal(run.ledger, expected_ledger("baseline", n, t))
    assert run.ledger.quantum_qubits_sent == 2 * (n + 1) * ((1 << t) - 1)


@pytest.mark.parametrize("n,t", [(1, 2), (2, 3), (3, 2), (2, 4)])
def test_blind_server_ledger_grid(n, t):
    rng = np.random.default_rng(n + t)
    num = 1 << n
    run = run_blind_server(random_bits(num, rng), random_bits(num, rng), t, rng=rng)
    assert ledgers_equal(run.ledger, expected_ledger("blind-server", n, t))


@pytest.mark.parametrize("n,t", [(1, 2), (2, 3), (3, 2)])
def test_blind_client_ledger_grid(n, t):
    rng = np.random.default_rng(n + t)
    num = 1 << n
    run = run_blind_client(random_bits(num, rng), random_bits(num, rng), t, rng=rng)
    assert ledgers_equal(run.ledger, expected_ledger("blind-client", n, t))
    rounds = (1 << t) - 1
    assert run.ledger.quantum_qubits_sent == 4 * (n + 1) * rounds
    assert run.ledger.classical_bits_sent == 0


@pytest.mark.parametrize("m", [2, 3])
def test_multiparty_ledger(m):
    rng = np.random.default_rng(m)
    num, t = 8, 3
    n = index_width_for(num)
    ys = [random_bits(num, rng) for _ in range(m)]
    run = run_multiparty(random_bits(num, rng), ys, t, rng=rng)
    assert ledgers_equal(run.ledger, expected_ledger("multiparty", n, t, num_clients=m))
    assert run.ledger.quantum_qubits_sent == (m + 1) * (n + 1) * ((1 << t) - 1)
    assert run.ledger.oracle_calls["Uy"] == 2 * m * ((1 << t) - 1)


def test_blind_server_disclosure_adds_classical_bits():
    rng = np.random.default_rng(4)
    x, y = random_bits(8, rng), random_bits(8, rng)
    plain = run_blind_server(x, y, 2, rng=np.random.default_rng(5))
    told = run_blind_server(x, y, 2, rng=np.random.default_rng(5), disclose_pad_sum=True)
    assert told.ledger.classical_bits_sent == plain.ledger.classical_bits_sent + math.ceil(
        math.log2(9)
    )


def test_expected_ledger_validation():
    with pytest.raises(ValueError):
        expected_ledger("bogus", 2, 2)
    with pytest.raises(ValueError):
        expected_ledger("multiparty", 2, 2, num_clients=1)
    with pytest.raises(ValueError):
        expected_ledger("blind-server", 2, 2, disclose_pad_sum=True)  # needs num_values


# -- ownership and transcript ------------------------------------------------------


def test_transfer_requires_current_owner():
    sim = ProtocolSim(2, {0: SERVER, 1: client_name(1)}, ChannelLedger(), [0])
    with pytest.raises(OwnershipError):
        sim.transfer([1], SERVER, client_name(1))
    sim.transfer([0], SERVER, client_name(1))
    assert sim.owners[0] == client_name(1)
    assert sim.ledger.quantum_qubits_sent == 1


def test_require_owner_names_the_holder():
    sim = ProtocolSim(2, {0: SERVER, 1: client_name(1)}, ChannelLedger(), [0])
    with pytest.raises(OwnershipError, match="client1"):
        sim.require_owner(SERVER, [1])


def test_end_round_requires_registers_back_home():
    sim = ProtocolSim(2, {0: SERVER, 1: SERVER}, ChannelLedger(), [0, 1])
    sim.begin_round()
    sim.transfer([0], SERVER, client_name(1))
    with pytest.raises(OwnershipError):
        sim.end_round()


def test_transcript_field_order_and_counts():
    rng = np.random.default_rng(8)
    t = 3
    run = run_qbc_baseline(random_bits(4, rng), random_bits(4, rng), t, rng=rng)
    lines = transcript_lines(run)
    assert lines[0] == "round,from,to,qubits,oracle_calls"
    rounds = (1 << t) - 1
    assert len(lines) == 1 + 2 * rounds  # two hops per round
    first = lines[1].split(",")
    assert first == ["1", "server", "client1", "3", "4"]
    back = lines[2].split(",")
    assert back == ["1", "client1", "server", "3", "4"]
    total_sent = sum(int(line.split(",")[3]) for line in lines[1:])
    assert total_sent == run.ledger.quantum_qubits_sent


def test_multiparty_transcript_chains_through_clients():
    rng = np.random.default_rng(9)
    run = run_multiparty(random_bits(4, rng), [random_bits(4, rng) for _ in range(3)], 1, rng=rng)
    hops = [line.split(",")[1:3] for line in transcript_lines(run)[1:]]
    assert hops == [
        ["server", "client1"],
        ["client1", "client2"],
        ["client2", "client3"],
        ["client3", "server"],
    ]


# -- blind-server ------------------------------------------------------------------


def test_blind_server_pad_respects_support_rule():
    rng = np.random.default_rng(10)
    for _ in range(10):
        x, y = random_bits(8, rng), random_bits(8, rng)
        run = run_blind_server(x, y, 2, rng=rng)
        assert not np.any(run.pads["g"] & y)


def test_blind_server_recovery_subtracts_pad_mean():
    rng = np.random.default_rng(11)
    x = [1, 1, 1, 1]
    y = [1, 1, 0, 0]
    g = [0, 0, 1, 1]
    run = run_blind_server(x, y, 4, rng=rng, pad_bits=g)
    # padded marked fraction (2+2)/4 = 1: deterministic j = 2^(t-1)
    assert run.estimate == pytest.approx(1.0, abs=1e-12)
    assert run.recovered_estimate == pytest.approx(0.5, abs=1e-12)
    assert run.truth == 0.5
    assert run.server_view_truth == 1.0


def test_blind_server_forced_pad_validation():
    rng = np.random.default_rng(12)
    with pytest.raises(GateError, match="length"):
        run_blind_server([1, 0], [1, 0], 2, rng=rng, pad_bits=[1])
    with pytest.raises(GateError, match="zero wherever"):
        run_blind_server([1, 0], [1, 0], 2, rng=rng, pad_bits=[1, 0])
    with pytest.raises(GateError, match="incompatible"):
        run_blind_server([1, 0], [0, 0], 2, rng=rng, pad_bits=[0, 1], pad_per_round=True)
    with pytest.raises(GateError, match="rng"):
        run_blind_server([1, 0], [1, 0], 2)


def test_blind_server_per_round_pads_are_recorded_per_round():
    rng = np.random.default_rng(13)
    t = 3
    run = run_blind_server([0, 0, 0, 0], [1, 0, 0, 1], t, rng=rng, pad_per_round=True)
    pads = run.pads["g"]
    assert len(pads) == (1 << t) - 1
    assert any(not np.array_equal(pads[0], p) for p in pads[1:])
    means = [float(np.sum(p)) / 4 for p in pads]
    assert run.recovered_estimate == pytest.approx(run.estimate - float(np.mean(means)))


# -- blindness of the readout ------------------------------------------------------


def test_blind_client_distribution_equals_baseline_exhaustive_n2():
    rng = np.random.default_rng(14)
    t = 3
    for x, y in all_pairs(2):
        base = run_qbc_baseline(x, y, t, return_distribution=True)
        blind = run_blind_client(x, y, t, rng=rng, return_distribution=True)
        assert tv_distance(base.distribution, blind.distribution) <= 1e-9, (x, y)


def test_blind_client_distribution_equals_baseline_random_n8():
    rng = np.random.default_rng(15)
    for _ in range(5):
        x, y = random_bits(8, rng), random_bits(8, rng)
        base = run_qbc_baseline(x, y, 4, return_distribution=True)
        blind = run_blind_client(x, y, 4, rng=rng, return_distribution=True)
        assert tv_distance(base.distribution, blind.distribution) <= 1e-9


def test_blind_client_forced_degenerate_draws_match_baseline():
    # all-Z bases with zero pads reduce to the plain pipeline
    for x, y in [([1, 0, 1, 1], [1, 1, 0, 1]), ([0, 0, 1, 0], [1, 0, 1, 0])]:
        base = run_qbc_baseline(x, y, 3, return_distribution=True)
        blind = run_blind_client(
            x, y, 3, force_basis=[0, 0, 0, 0], force_pad=[0, 0, 0, 0],
            return_distribution=True,
        )
        assert tv_distance(base.distribution, blind.distribution) <= 1e-12
        allx = run_blind_client(
            x, y, 3, force_basis=[1, 1, 1, 1], force_pad=[1, 0, 1, 1],
            return_distribution=True,
        )
        assert tv_distance(base.distribution, allx.distribution) <= 1e-9


def test_blind_server_distribution_matches_padded_instance():
    rng = np.random.default_rng(16)
    t = 4
    for _ in range(5):
        x, y = random_bits(8, rng), random_bits(8, rng)
        run = run_blind_server(x, y, t, rng=rng, return_distribution=True)
        g = run.pads["g"]
        padded = (x & y) ^ g
        base = run_qbc_baseline(np.ones(8, dtype=np.uint8), padded, t, return_distribution=True)
        assert tv_distance(run.distribution, base.distribution) <= 1e-9


def test_blind_server_zero_pad_matches_baseline_directly():
    x, y = [1, 0, 1, 1], [1, 1, 0, 1]
    base = run_qbc_baseline(x, y, 4, return_distribution=True)
    run = run_blind_server(x, y, 4, pad_bits=[0, 0, 0, 0], return_distribution=True)
    assert tv_distance(base.distribution, run.distribution) <= 1e-9


def test_blind_client_work_qubits_clear_after_every_round():
    # index register back to a bare superposition state is checked by the
    # counting layer; here the carrier and scratch stay strictly cold
    leaks = []

    def hook(r, state):
        leaks.append(max(state.probability(q, 1) for q in (7, 9)))  # o1, oa at n=3,t=4

    run_blind_client(
        [1, 0, 1, 1, 0, 1, 0, 0], [1, 1, 0, 1, 0, 0, 1, 1], 4,
        rng=np.random.default_rng(17), return_distribution=True, round_hook=hook,
    )
    assert len(leaks) == 15
    assert max(leaks) < 1e-12


# -- multiparty ---------------------------------------------------------------------


def test_parity_fraction_matches_brute_force():
    rng = np.random.default_rng(18)
    x = random_bits(8, rng)
    ys = [random_bits(8, rng) for _ in range(3)]
    want = np.mean([(x[i] & ys[0][i]) ^ (x[i] & ys[1][i]) ^ (x[i] & ys[2][i]) for i in range(8)])
    assert parity_fraction(x, ys) == pytest.approx(float(want))


def test_multiparty_estimates_parity_mean():
    rng = np.random.default_rng(19)
    x = [1, 1, 1, 1]
    ys = [[1, 1, 0, 0], [0, 1, 0, 0]]  # parity = [1, 0, 0, 0]
    run = run_multiparty(x, ys, 4, rng=rng, pad_first_client=False)
    assert run.truth == 0.25
    dist = run_multiparty(x, ys, 4, pad_first_client=False, return_distribution=True).distribution
    # theta for fraction 1/4 is on the t=4 grid within its mirror pair
    top = np.argsort(dist)[-2:]
    est = math.sin(math.pi * max(top) / 16) ** 2
    assert est == pytest.approx(0.25, abs=0.06)


def test_multiparty_pad_shifts_server_view_only():
    rng = np.random.default_rng(20)
    x = [1, 1, 1, 1]
    ys = [[1, 0, 0, 0], [0, 0, 0, 1]]
    g = [0, 1, 1, 0]
    run = run_multiparty(x, ys, 3, rng=rng, pad_bits=g)
    assert run.truth == 0.5
    assert run.server_view_truth == 1.0  # parity ^ g = all ones
    assert run.recovered_estimate is None
    assert run.estimate == pytest.approx(1.0, abs=1e-12)


def test_multiparty_validation():
    rng = np.random.default_rng(21)
    with pytest.raises(GateError, match="two clients"):
        run_multiparty([1, 0], [[1, 0]], 2, rng=rng)
    with pytest.raises(GateError, match="length"):
        run_multiparty([1, 0], [[1, 0], [1]], 2, rng=rng)
    with pytest.raises(GateError, match="rng"):
        run_multiparty([1, 0], [[1, 0], [0, 1]], 2)


def test_multiparty_unpadded_run_reports_single_truth():
    rng = np.random.default_rng(22)
    run = run_multiparty([1, 0, 1, 0], [[1, 1, 0, 0], [1, 0, 1, 0]], 2,
                         rng=rng, pad_first_client=False)
    assert run.server_view_truth == run.truth
    assert run.pads == {}


# -- property checks -----------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_ledger_closed_forms_property(n, t, seed):
    rng = np.random.default_rng(seed)
    num = 1 << n
    run = run_qbc_baseline(random_bits(num, rng), random_bits(num, rng), t, rng=rng)
    rounds = (1 << t) - 1
    assert run.ledger.quantum_qubits_sent == 2 * (n + 1) * rounds
    assert run.ledger.oracle_calls == {"Ux": 2 * rounds, "Uy": 2 * rounds}
    assert run.ledger.classical_bits_sent == t
    assert run.ledger.grover_rounds == rounds


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_blindness_property_small_instances(seed):
    rng = np.random.default_rng(seed)
    num = int(rng.integers(2, 5))
    x, y = random_bits(num, rng), random_bits(num, rng)
    base = run_qbc_baseline(x, y, 3, return_distribution=True)
    blind = run_blind_client(x, y, 3, rng=rng, return_distribution=True)
    assert tv_distance(base.distribution, blind.distribution) <= 1e-9
