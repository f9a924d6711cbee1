import numpy as np
import pytest

from latfade import channels
from latfade.channels import (
    RAYLEIGH_MU, ChannelModel, add_noise, apply, estimate_mu, group_of, model_from_dict, model_from_label,
    model_to_dict, sample, sample_batch,
)
from latfade.errors import BlockMismatch, DimensionMismatch, ValidationError
from latfade._rng import rng_for

from oracles import rayleigh_mu_quadrature


def test_mu_constant_matches_quadrature():
    assert RAYLEIGH_MU == pytest.approx(rayleigh_mu_quadrature(), abs=1e-9)
    assert RAYLEIGH_MU == pytest.approx(-0.8327, abs=1e-4)


def test_mu_estimate_rayleigh():
    est = estimate_mu(ChannelModel("iid_rayleigh_diag", 2), 100_000, seed=5)
    assert abs(est.mu_hat - rayleigh_mu_quadrature()) < 4 * est.stderr


def test_mu_estimate_block_same_mean():
    est = estimate_mu(ChannelModel("block_fading_diag", 4, block=2), 50_000, seed=1)
    assert abs(est.mu_hat - RAYLEIGH_MU) < 4 * est.stderr


def test_awgn_mu_exact():
    assert estimate_mu(ChannelModel("awgn", 3), 1000).mu_hat == 0.0


def test_mu_needs_trials():
    with pytest.raises(ValidationError):
        estimate_mu(ChannelModel("iid_rayleigh_diag", 1), 10)


def test_block_mismatch():
    with pytest.raises(BlockMismatch):
        ChannelModel("block_fading_diag", 5, block=2)
    with pytest.raises(BlockMismatch):
        ChannelModel("mimo2_block", 6)


def test_structures():
    rng = rng_for(0)
    H, _, _ = sample_batch(ChannelModel("block_fading_diag", 4, block=2), rng, 10)
    d = np.diagonal(H, axis1=1, axis2=2)
    assert np.allclose(d[:, 0], d[:, 1]) and np.allclose(d[:, 2], d[:, 3])
    assert np.allclose(H - np.einsum("ti,ij->tij", d, np.eye(4)), 0)
    H, _, _ = sample_batch(ChannelModel("mimo2_block", 8), rng, 3)
    for j in range(1, 4):
        assert np.allclose(H[:, 2 * j:2 * j + 2, 2 * j:2 * j + 2], H[:, 0:2, 0:2])
    H, _, _ = sample_batch(ChannelModel("mimo2_block", 8, independent_blocks=True), rng, 3)
    assert np.allclose(H[:, 2:4, 2:4], H[:, 0:2, 0:2])
    assert not np.allclose(H[:, 4:6, 4:6], H[:, 0:2, 0:2])


def test_logdet_and_normalized_member():
    m = ChannelModel("mimo2_block", 4)
    draw = sample(m, 9)
    assert draw.log_det_sq == pytest.approx(np.log2(abs(np.linalg.det(draw.H)) ** 2))
    assert abs(np.linalg.det(draw.normalized_A)) == pytest.approx(1.0)


def test_sampling_deterministic():
    m = ChannelModel("iid_rayleigh_diag", 3)
    assert np.array_equal(sample(m, 42).H, sample(m, 42).H)
    assert not np.array_equal(sample(m, 42).H, sample(m, 43).H)


def test_singular_draws_redrawn(monkeypatch):
    real = channels._draw_matrices
    calls = {"n": 0}

    def fake(model, rng, n):
        calls["n"] += 1
        H = real(model, rng, n)
        if calls["n"] == 1:
            H[0] = 0
        return H

    monkeypatch.setattr(channels, "_draw_matrices", fake)
    H, logdet, rejected = sample_batch(ChannelModel("iid_rayleigh_diag", 2), rng_for(0), 4)
    assert rejected == 1 and np.all(np.isfinite(logdet))


def test_noise_variance():
    w = add_noise(np.zeros((200_000, 1)), 3)
    assert np.mean(np.abs(w) ** 2) == pytest.approx(1.0, abs=0.01)
    assert np.var(w.real) == pytest.approx(0.5, abs=0.01)


def test_apply_dimensions():
    with pytest.raises(DimensionMismatch):
        apply(np.eye(2), np.ones(3))
    assert np.allclose(apply(np.diag([2, 3]), [[1, 1]]), [[2, 3]])


@pytest.mark.parametrize("label", ["awgn", "rayleigh", "block2", "mimo2", "mimo2i"])
def test_labels_and_json(label):
    m = model_from_label(label, 8)
    assert m.label == label
    assert model_from_dict(model_to_dict(m)) == m


def test_group_of():
    assert group_of(ChannelModel("block_fading_diag", 4, block=4)).kind == "identity"
    assert group_of(ChannelModel("block_fading_diag", 4, block=1)).kind == "diagonal"
    assert group_of(ChannelModel("block_fading_diag", 4, block=2)).label == "block_diagonal:2"
