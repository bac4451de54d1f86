import csv

import numpy as np
import pytest

from lis_sim.chain import (
    BYTES_PER_COMPLEX,
    CABLE_US_PER_KM,
    DEFAULT_HOP_LATENCY_US,
    ChainTopology,
    fronthaul_latency,
    pack_message,
    payload_complex_values,
    run_chain,
    unpack_message,
    write_hops_csv,
)
from lis_sim.equalize import (
    AggregateState,
    EqualizerKind,
    equalizer_matrix,
    split_panels,
)

KINDS = (EqualizerKind.MRC, EqualizerKind.ZF, EqualizerKind.MMSE)


def rand_instance(rng, m, k):
    h = (rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))) / np.sqrt(2)
    y = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2)
    return h, y


def test_payload_formula():
    assert payload_complex_values(EqualizerKind.MRC, 16) == 16
    assert payload_complex_values(EqualizerKind.ZF, 16) == 16 + 136
    assert payload_complex_values(EqualizerKind.MMSE, 128) == 128 + 128 * 129 // 2
    for k in range(1, 20):
        assert payload_complex_values(EqualizerKind.ZF, k) == k + k * (k + 1) // 2


def test_message_roundtrip_preserves_state():
    rng = np.random.default_rng(0)
    h, y = rand_instance(rng, 8, 5)
    state = AggregateState.empty(5, with_gramian=True)
    from lis_sim.equalize import absorb, local_contribution
    state = absorb(state, local_contribution(h, y, True, 0))
    iu, ju = np.triu_indices(5)
    for kind in (EqualizerKind.ZF, EqualizerKind.MMSE):
        data = pack_message(state, kind)
        assert len(data) == 9 + payload_complex_values(kind, 5) * BYTES_PER_COMPLEX
        got, got_kind = unpack_message(data)
        assert got_kind is kind
        assert np.array_equal(got.z_mrc_sum, state.z_mrc_sum)
        # the wire carries the upper triangle bit-exactly; the lower triangle
        # is rebuilt as its mirror, so it may differ from the sender's own
        # lower triangle by the gemm asymmetry (~1e-16)
        assert np.array_equal(got.gramian_sum[iu, ju], state.gramian_sum[iu, ju])
        assert np.allclose(got.gramian_sum, state.gramian_sum, atol=1e-12)
        assert got.panels_absorbed == state.panels_absorbed
    # MRC carries no Gramian
    lean = AggregateState.empty(5, with_gramian=False)
    lean = absorb(lean, local_contribution(h, y, False, 0))
    data = pack_message(lean, EqualizerKind.MRC)
    assert len(data) == 9 + 5 * BYTES_PER_COMPLEX
    got, got_kind = unpack_message(data)
    assert got.gramian_sum is None


def test_unpack_rejects_truncation():
    rng = np.random.default_rng(1)
    h, y = rand_instance(rng, 4, 3)
    from lis_sim.equalize import absorb, local_contribution
    state = absorb(AggregateState.empty(3, True), local_contribution(h, y, True, 0))
    data = pack_message(state, EqualizerKind.ZF)
    with pytest.raises(ValueError):
        unpack_message(data[:-8])


def test_topology_validation_and_cost():
    topo = ChainTopology.natural(4)
    assert topo.panel_order == (0, 1, 2, 3)
    assert topo.hop_count == 3
    assert topo.hop_cost_us == DEFAULT_HOP_LATENCY_US
    assert fronthaul_latency(topo) == pytest.approx(3 * 0.87)
    with pytest.raises(ValueError):
        ChainTopology(panel_order=(0, 0, 1))
    with pytest.raises(ValueError):
        ChainTopology(panel_order=(0, 2))
    with pytest.raises(ValueError):
        ChainTopology(panel_order=())


def test_cable_term():
    topo = ChainTopology.natural(3, inter_panel_distance_m=50.0)
    assert topo.hop_cost_us == pytest.approx(0.87 + CABLE_US_PER_KM * 0.05)
    off = ChainTopology.natural(3)
    assert off.hop_cost_us == 0.87


def test_chain_matches_central_all_kinds():
    rng = np.random.default_rng(2)
    h, y = rand_instance(rng, 32, 6)
    inputs = split_panels(h, y, 4)
    topo = ChainTopology.natural(4)
    for kind in KINDS:
        z, hops = run_chain(topo, inputs, kind, 0.4)
        central = equalizer_matrix(kind, h, 0.4) @ y
        assert np.allclose(z, central, atol=1e-11)
        assert len(hops) == 3
        values = payload_complex_values(kind, 6)
        for i, hop in enumerate(hops):
            assert hop.payload_complex_values == values
            assert hop.payload_bytes == values * BYTES_PER_COMPLEX
            assert hop.cumulative_latency_us == pytest.approx((i + 1) * 0.87)


def test_chain_visits_panels_in_topology_order():
    rng = np.random.default_rng(3)
    h, y = rand_instance(rng, 12, 3)
    inputs = split_panels(h, y, 4)
    topo = ChainTopology(panel_order=(2, 0, 3, 1))
    z, hops = run_chain(topo, inputs, EqualizerKind.ZF, 0.2)
    assert [(hp.from_panel, hp.to_panel) for hp in hops] == [(2, 0), (0, 3), (3, 1)]
    central = equalizer_matrix(EqualizerKind.ZF, h, 0.2) @ y
    assert np.allclose(z, central, atol=1e-11)


def test_chain_order_does_not_change_result():
    rng = np.random.default_rng(4)
    h, y = rand_instance(rng, 24, 5)
    inputs = split_panels(h, y, 6)
    base, _ = run_chain(ChainTopology.natural(6), inputs, EqualizerKind.MMSE, 0.3)
    other, _ = run_chain(ChainTopology(panel_order=(5, 3, 1, 0, 2, 4)),
                         inputs, EqualizerKind.MMSE, 0.3)
    assert np.allclose(other, base, atol=1e-12)


def test_single_panel_chain_has_no_hops():
    rng = np.random.default_rng(5)
    h, y = rand_instance(rng, 8, 2)
    z, hops = run_chain(ChainTopology.natural(1), split_panels(h, y, 1),
                        EqualizerKind.MRC, 1.0)
    assert hops == []
    assert np.allclose(z, h.conj().T @ y, atol=1e-13)


def test_chain_rejects_wrong_input_count():
    rng = np.random.default_rng(6)
    h, y = rand_instance(rng, 8, 2)
    inputs = split_panels(h, y, 2)
    with pytest.raises(ValueError):
        run_chain(ChainTopology.natural(4), inputs, EqualizerKind.MRC, 1.0)


def test_hops_csv(tmp_path):
    rng = np.random.default_rng(7)
    h, y = rand_instance(rng, 16, 4)
    _, hops = run_chain(ChainTopology.natural(4), split_panels(h, y, 4),
                        EqualizerKind.ZF, 0.5)
    path = tmp_path / "hops.csv"
    write_hops_csv(hops, path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["hop_index", "from_panel", "to_panel", "payload_bytes",
                       "cumulative_latency_us"]
    assert len(rows) == 4
    assert rows[1][3] == str(payload_complex_values(EqualizerKind.ZF, 4) * 16)
