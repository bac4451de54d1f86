import numpy as np
import pytest

from lis_sim.equalize import (
    AggregateState,
    EqualizerKind,
    SingularGramianError,
    absorb,
    equalizer_matrix,
    finalize,
    local_contribution,
    split_panels,
)

KINDS = (EqualizerKind.MRC, EqualizerKind.ZF, EqualizerKind.MMSE)


def rand_h(rng, m, k):
    return (rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))) / np.sqrt(2)


def test_kind_parse_and_flags():
    assert EqualizerKind.parse("zf") is EqualizerKind.ZF
    assert EqualizerKind.parse("MMSE") is EqualizerKind.MMSE
    assert not EqualizerKind.MRC.needs_gramian
    assert EqualizerKind.ZF.needs_gramian
    assert EqualizerKind.MMSE.needs_gramian
    with pytest.raises(ValueError):
        EqualizerKind.parse("dirty")


def test_mrc_is_conjugate_transpose():
    rng = np.random.default_rng(0)
    h = rand_h(rng, 12, 5)
    w = equalizer_matrix(EqualizerKind.MRC, h, 1.0)
    assert np.array_equal(w, h.conj().T)


def test_zf_inverts_the_channel():
    rng = np.random.default_rng(1)
    h = rand_h(rng, 32, 6)
    w = equalizer_matrix(EqualizerKind.ZF, h, 1.0)
    assert np.allclose(w @ h, np.eye(6), atol=1e-10)


def test_mmse_matches_direct_formula():
    rng = np.random.default_rng(2)
    h = rand_h(rng, 24, 5)
    n0 = 0.3
    w = equalizer_matrix(EqualizerKind.MMSE, h, n0)
    g = h.conj().T @ h + n0 * np.eye(5)
    want = np.linalg.solve(g, h.conj().T)
    assert np.allclose(w, want, atol=1e-12)


def test_zf_rejects_more_users_than_antennas():
    rng = np.random.default_rng(3)
    h = rand_h(rng, 4, 6)
    with pytest.raises(SingularGramianError):
        equalizer_matrix(EqualizerKind.ZF, h, 0.0)


def test_zf_rejects_repeated_columns():
    rng = np.random.default_rng(4)
    col = rand_h(rng, 8, 1)
    h = np.concatenate([col, col], axis=1)
    with pytest.raises(SingularGramianError):
        equalizer_matrix(EqualizerKind.ZF, h, 0.0)


def test_mmse_survives_rank_deficiency_with_loading():
    rng = np.random.default_rng(5)
    col = rand_h(rng, 8, 1)
    h = np.concatenate([col, col], axis=1)
    w = equalizer_matrix(EqualizerKind.MMSE, h, 0.5)  # loading regularizes
    assert np.all(np.isfinite(w))


def test_gramian_sums_stay_hermitian_psd():
    # partial Gramians and their running sums, fuzzed over shapes and splits
    rng = np.random.default_rng(6)
    for _ in range(200):
        k = int(rng.integers(1, 9))
        p = int(rng.choice([1, 2, 4]))
        n_per = int(rng.integers(1, 9))
        h = rand_h(rng, n_per * p, k)
        y = rand_h(rng, n_per * p, 1)[:, 0]
        state = AggregateState.empty(k, with_gramian=True)
        for pid, (h_p, y_p) in enumerate(split_panels(h, y, p)):
            state = absorb(state, local_contribution(h_p, y_p, True, pid))
            g = state.gramian_sum
            assert np.allclose(g, g.conj().T, atol=1e-12)
            assert np.linalg.eigvalsh(g)[0] >= -1e-10
        assert state.panels_absorbed == p


def test_two_panel_aggregation_equals_central():
    rng = np.random.default_rng(7)
    h = rand_h(rng, 16, 4)
    y = rand_h(rng, 16, 1)[:, 0]
    n0 = 0.7
    for kind in KINDS:
        state = AggregateState.empty(4, with_gramian=kind.needs_gramian)
        for pid, (h_p, y_p) in enumerate(split_panels(h, y, 2)):
            state = absorb(state, local_contribution(h_p, y_p, kind.needs_gramian, pid))
        z = finalize(state, kind, n0)
        central = equalizer_matrix(kind, h, n0) @ y
        assert np.allclose(z, central, atol=1e-12)


def test_absorb_rejects_mismatches():
    rng = np.random.default_rng(8)
    h = rand_h(rng, 8, 3)
    y = rand_h(rng, 8, 1)[:, 0]
    state = AggregateState.empty(3, with_gramian=True)
    wrong_k = local_contribution(rand_h(rng, 4, 2), y[:4], True, 0)
    with pytest.raises(ValueError):
        absorb(state, wrong_k)
    no_gramian = local_contribution(h[:4], y[:4], False, 0)
    with pytest.raises(ValueError):
        absorb(state, no_gramian)


def test_finalize_requires_gramian_for_zf():
    state = AggregateState.empty(3, with_gramian=False)
    with pytest.raises(ValueError):
        finalize(state, EqualizerKind.ZF, 1.0)


def test_split_panels():
    rng = np.random.default_rng(9)
    h = rand_h(rng, 12, 3)
    y = rand_h(rng, 12, 1)[:, 0]
    parts = split_panels(h, y, 3)
    assert len(parts) == 3
    assert np.array_equal(np.concatenate([hp for hp, _ in parts]), h)
    assert np.array_equal(np.concatenate([yp for _, yp in parts]), y)
    with pytest.raises(ValueError):
        split_panels(h, y, 5)


def test_local_contribution_values():
    rng = np.random.default_rng(10)
    h = rand_h(rng, 6, 2)
    y = rand_h(rng, 6, 1)[:, 0]
    c = local_contribution(h, y, True, panel_id=3)
    assert np.allclose(c.z_mrc_local, h.conj().T @ y, atol=1e-14)
    assert np.allclose(c.gramian_local, h.conj().T @ h, atol=1e-14)
    assert c.panel_id == 3
    lean = local_contribution(h, y, False, panel_id=0)
    assert lean.gramian_local is None
