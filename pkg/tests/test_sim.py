import math

import numpy as np
import pytest
from scipy.stats import binomtest

from latfade.channels import ChannelModel, RAYLEIGH_MU
from latfade.codebook import FiniteCode, carve
from latfade.errors import DimensionMismatch, EmptyCode, UncertifiedInvariant, ValidationError
from latfade.forms import MatrixGroupSpec
from latfade.lattice import make_lattice, normalize_volume
from latfade.numfield import certificates, cyclotomic_field, embed_ring
from latfade.sim import (
    ExperimentConfig, _decode_batch, awgn_error_bound, capacity_bits, certified_rh, config_hash, fnv1a64,
    gap_report, martinet_gap, ml_decode, read_results, results_row, rows_to_csv, run_experiment,
    rate_threshold, wilson_interval,
)
from latfade._rng import complex_normal, rng_for

from oracles import rayleigh_capacity_quadrature


def loose_code(points):
    cw = np.atleast_2d(np.asarray(points, dtype=complex))
    return FiniteCode(None, 1.0, np.zeros(cw.shape[1], complex), 1.0, cw, np.zeros((len(cw), 2 * cw.shape[1]), int))


@pytest.fixture(scope="module")
def zeta8_code():
    L = embed_ring(cyclotomic_field(8))
    c = L.volume ** -0.25
    Ln = normalize_volume(L)
    certs = {g: v * c * c for g, v in certificates(cyclotomic_field(8)).items()}
    return carve(Ln, 0.9, 2.0, certificates=certs)


def test_decode_nearest():
    code = loose_code([[0], [10]])
    assert ml_decode([1], np.eye(1), code) == 0
    assert ml_decode([7], np.eye(1), code) == 1


def test_decode_noiseless(zeta8_code):
    H = complex_normal(rng_for(1), (2, 2))
    for i in range(zeta8_code.size):
        assert ml_decode(H @ zeta8_code.codewords[i], H, zeta8_code) == i


def test_decode_empty_and_dims():
    with pytest.raises(EmptyCode):
        ml_decode([0], np.eye(1), loose_code(np.zeros((0, 1))))
    with pytest.raises(DimensionMismatch):
        ml_decode([0, 0], np.eye(1), loose_code([[0], [1]]))


@pytest.mark.parametrize("seed", range(10))
def test_batch_decoder_matches_exhaustive(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 3))
    C = complex_normal(rng, (int(rng.integers(2, 65)), k))
    H = complex_normal(rng, (30, k, k))
    Y = complex_normal(rng, (30, k))
    got = _decode_batch(Y, H, C)
    for t in range(30):
        d = [np.linalg.norm(Y[t] - H[t] @ c) for c in C]
        assert got[t] == int(np.argmin(d))


def test_awgn_well_separated_code():
    Z = make_lattice([[1], [1j]])
    code = carve(Z, 8.0, 100.0)
    agg = run_experiment(ExperimentConfig(code, ChannelModel("awgn", 1), 10_000, seed=1, rh=1.0))
    assert agg.error_rate < 1e-3
    assert agg.violations == 0
    # chi-square tail equals exp(-16) for one complex dimension
    assert awgn_error_bound(8.0, 1) == pytest.approx(math.exp(-16), rel=1e-9)


def test_zero_noise(zeta8_code):
    agg = run_experiment(ExperimentConfig(zeta8_code, ChannelModel("iid_rayleigh_diag", 2), 2000,
                                          zero_noise=True))
    assert agg.errors == 0


def test_deterministic_and_thread_invariant(zeta8_code):
    m = ChannelModel("iid_rayleigh_diag", 2)
    a = run_experiment(ExperimentConfig(zeta8_code, m, 3000, seed=7, threads=1))
    b = run_experiment(ExperimentConfig(zeta8_code, m, 3000, seed=7, threads=4))
    assert a == b


def test_distance_bound_rayleigh(zeta8_code):
    G = MatrixGroupSpec("diagonal", 2)
    rh = certified_rh(zeta8_code, G)
    assert rh == pytest.approx(1.0)
    agg = run_experiment(ExperimentConfig(zeta8_code, ChannelModel("iid_rayleigh_diag", 2), 3000, rh=rh))
    assert agg.violations == 0 and agg.checked_pairs > 0


def test_inflated_rh_is_caught(zeta8_code):
    # an invariant larger than the truth must produce violations
    agg = run_experiment(ExperimentConfig(zeta8_code, ChannelModel("iid_rayleigh_diag", 2), 2000, rh=1.5))
    assert agg.violations > 0


def test_config_validation(zeta8_code):
    with pytest.raises(ValidationError):
        ExperimentConfig(zeta8_code, ChannelModel("awgn", 2), 0)
    with pytest.raises(DimensionMismatch):
        ExperimentConfig(zeta8_code, ChannelModel("awgn", 3), 10)


@pytest.mark.parametrize("s,n", [(0, 10), (3, 10), (10, 10), (17, 1000)])
def test_wilson_matches_scipy(s, n):
    ci = binomtest(s, n).proportion_ci(confidence_level=0.95, method="wilson")
    lo, hi = wilson_interval(s, n)
    assert lo == pytest.approx(ci.low, abs=1e-9) and hi == pytest.approx(ci.high, abs=1e-9)


def test_threshold_arithmetic():
    assert rate_threshold(8.0, 1 / (math.pi * math.e)) == pytest.approx(2.0)
    assert rate_threshold(8.0, 0.25, RAYLEIGH_MU) == pytest.approx(3 + RAYLEIGH_MU - math.log2(8 / (math.pi * math.e)))
    assert martinet_gap(92.368) == pytest.approx(4.435, abs=1e-3)


def test_rayleigh_capacity_matches_quadrature():
    cap, se = capacity_bits(ChannelModel("iid_rayleigh_diag", 1), 10.0, samples=200_000)
    assert abs(cap - rayleigh_capacity_quadrature(10.0)) < 4 * se


def test_gap_report_awgn_reduces(zeta8_code):
    r = gap_report(zeta8_code, ChannelModel("awgn", 2), mu_hat=-5.0, c=1 / (math.pi * math.e))
    assert r.mu_hat == 0.0
    assert r.threshold_bits == pytest.approx(math.log2(2.0) - 1)
    assert r.capacity_bits == pytest.approx(math.log2(3.0))


def test_gap_report_refuses_uncertified(zeta8_code):
    m = ChannelModel("iid_rayleigh_diag", 2)
    with pytest.raises(UncertifiedInvariant):
        gap_report(zeta8_code, m, RAYLEIGH_MU, 0.25, certified=False)
    r = gap_report(zeta8_code, m, RAYLEIGH_MU, 0.25, certified=False, allow_upper_bound=True,
                   capacity_samples=10_000)
    assert "UPPER BOUND" in r.banner


def test_fnv_reference_vectors():
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_config_hash_is_key_order_free():
    assert config_hash({"a": 1, "b": [1.5, 2]}) == config_hash({"b": [1.5, 2], "a": 1})


def test_csv_roundtrip(tmp_path, zeta8_code):
    m = ChannelModel("awgn", 2)
    cfg = ExperimentConfig(zeta8_code, m, 100)
    agg = run_experiment(cfg)
    row = results_row(cfg, agg, None, {"x": 1})
    p = tmp_path / "r.csv"
    p.write_text(rows_to_csv([row]))
    back = read_results(p)[0]
    assert back["model"] == "awgn" and back["threshold_bits"] == ""
    assert float(back["error_rate"]) == pytest.approx(agg.error_rate)
