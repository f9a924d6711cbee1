"""Monte Carlo transmission experiments with ML decoding, and rate/gap reports.

Trials are processed in fixed-size blocks; block ``b`` draws everything from
the counter-based stream ``(seed, b)``.  Aggregates are reduced in block
order, so results do not depend on the number of worker threads.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from ._rng import complex_normal, rng_for, thread_count
from .channels import ChannelModel, apply, group_of, sample_batch
from .codebook import FiniteCode
from .errors import DimensionMismatch, EmptyCode, UncertifiedInvariant, ValidationError
from .lattice import hermite_invariant, to_complex

WILSON_Z = 1.959963984540054
BLOCK = 1024
BOUND_TOL = 1e-6
CSV_COLUMNS = (
    "config_hash", "k", "P", "alpha", "model", "trials", "error_rate", "ci_lo", "ci_hi",
    "rate_bits", "threshold_bits", "capacity_bits", "gap_bits", "mu_hat", "violations",
    "rh_certified",
)


def wilson_interval(successes: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    if n <= 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _decode_batch(Y, H, C, chunk=256):
    out = np.empty(len(Y), dtype=np.int64)
    for s in range(0, len(Y), chunk):
        HC = np.einsum("ck,tjk->tcj", C, H[s: s + chunk])
        d = np.sum(np.abs(Y[s: s + chunk, None, :] - HC) ** 2, axis=2)
        out[s: s + chunk] = np.argmin(d, axis=1)
    return out


def ml_decode(y, H, code: FiniteCode) -> int:
    """Index of the codeword minimising ||y - H[c]||; ties go to the lowest index."""
    if code.size == 0:
        raise EmptyCode("cannot decode with an empty code")
    received = apply(H, code.codewords)
    y = np.asarray(y, dtype=complex)
    if y.shape != (code.k,):
        raise DimensionMismatch(f"received vector must lie in C^{code.k}")
    return int(np.argmin(np.sum(np.abs(y - received) ** 2, axis=1)))


def certified_rh(code: FiniteCode, group) -> float | None:
    """A proven lower bound on the reduced Hermite invariant of the code's base lattice.

    Uses the stored certificates; the identity group is certified by exact
    shortest-vector enumeration.  A bound for a group also holds for any
    subgroup (block-diagonal groups sit inside the diagonal group).
    """
    if code.base is None:
        return None
    scale = code.base.volume ** (1.0 / code.base.k)
    certs = code.certificates
    if group.label in certs:
        return certs[group.label] / scale
    if group.kind == "block_diagonal" and "diagonal" in certs:
        return certs["diagonal"] / scale
    if group.kind == "identity":
        return hermite_invariant(code.base)
    return None


def _difference_set(code: FiniteCode, cap: int, seed) -> np.ndarray:
    """Distinct nonzero codeword differences (up to sign), capped at ``cap`` vectors."""
    N = code.size
    if N < 2:
        return np.zeros((0, code.k), dtype=complex)
    i, j = np.triu_indices(N, 1)
    if code.base is not None and code.coeffs.shape[0] == N:
        dc = code.coeffs[i] - code.coeffs[j]
        first = dc[np.arange(len(dc)), np.argmax(dc != 0, axis=1)]
        dc = dc * np.where(first < 0, -1, 1)[:, None]
        dc = np.unique(dc, axis=0)
        vecs = code.alpha * to_complex(dc @ code.base.basis)
    else:
        vecs = code.codewords[i] - code.codewords[j]
    if len(vecs) > cap:
        norms = np.sum(np.abs(vecs) ** 2, axis=1)
        order = np.argsort(norms, kind="stable")
        near = order[: cap // 2]
        rest = rng_for(seed, 0xD1FF).choice(order[cap // 2:], cap - cap // 2, replace=False)
        vecs = vecs[np.sort(np.concatenate([near, rest]))]
    return vecs


@dataclass
class ExperimentConfig:
    code: FiniteCode
    model: ChannelModel
    trials: int
    seed: int = 0
    epsilon: float = 0.5
    rh: float | None = None
    zero_noise: bool = False
    threads: int | None = None
    max_pairs: int = 4096

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")
        if self.code.k != self.model.k:
            raise DimensionMismatch(f"code is in C^{self.code.k}, channel in C^{self.model.k}")
        if self.code.size == 0:
            raise EmptyCode("cannot simulate an empty code")


@dataclass
class Aggregate:
    trials: int
    errors: int
    error_rate: float
    ci_lo: float
    ci_hi: float
    mu_hat: float
    mu_stderr: float
    min_dH2: float | None
    violations: int
    checked_pairs: int
    rejected_draws: int
    noise_exceed: int
    distance_short: int
    extra: dict = field(default_factory=dict)


def _run_block(cfg: ExperimentConfig, b: int, n: int, D):
    rng = rng_for(cfg.seed, b)
    C = cfg.code.codewords
    k = cfg.code.k
    tx = rng.integers(0, len(C), size=n)
    H, logdet, rej = sample_batch(cfg.model, rng, n)
    w = complex_normal(rng, (n, k))
    if cfg.zero_noise:
        w = np.zeros_like(w)
    Y = np.einsum("tjk,tk->tj", H, C[tx]) + w
    dec = _decode_batch(Y, H, C)
    errs = int(np.count_nonzero(dec != tx))
    ld = logdet / k
    wsq = np.sum(np.abs(w) ** 2, axis=1)
    noise_exceed = int(np.count_nonzero(wsq / k >= 1 + cfg.epsilon))
    out = {"errors": errs, "mu_sum": math.fsum(ld), "mu_sq": math.fsum(ld * ld),
           "rej": rej, "noise": noise_exceed, "viol": 0, "short": 0, "min_dH2": math.inf}
    if D is not None and len(D):
        dmin = np.empty(n)
        for s in range(0, n, 64):
            HD = np.einsum("dk,tjk->tdj", D, H[s: s + 64])
            dmin[s: s + 64] = np.min(np.sum(np.abs(HD) ** 2, axis=2), axis=1)
        out["min_dH2"] = float(dmin.min())
        out["short"] = int(np.count_nonzero(dmin / (4 * k) < 1 + cfg.epsilon))
        if cfg.rh is not None:
            bound = cfg.code.alpha**2 * 2.0 ** (ld) * cfg.rh
            out["viol"] = int(np.count_nonzero(dmin < bound - BOUND_TOL * np.maximum(1.0, bound)))
    return out


def run_experiment(cfg: ExperimentConfig) -> Aggregate:
    """Simulate uniform transmission over the code with ML decoding.

    When ``cfg.rh`` is given, every trial also checks the faded minimum
    distance against alpha^2 det(H H^H)^(1/k) rh over the code's difference
    set and counts violations.
    """
    D = _difference_set(cfg.code, cfg.max_pairs, cfg.seed) if cfg.code.size > 1 else None
    blocks = [(b, min(BLOCK, cfg.trials - b * BLOCK)) for b in range((cfg.trials + BLOCK - 1) // BLOCK)]
    nthreads = thread_count(cfg.threads)
    if nthreads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            parts = list(ex.map(lambda bn: _run_block(cfg, bn[0], bn[1], D), blocks))
    else:
        parts = [_run_block(cfg, b, n, D) for b, n in blocks]

    n = cfg.trials
    errors = sum(p["errors"] for p in parts)
    mu = math.fsum(p["mu_sum"] for p in parts) / n
    mu_sq = math.fsum(p["mu_sq"] for p in parts) / n
    mu_se = math.sqrt(max(mu_sq - mu * mu, 0.0) / max(n - 1, 1)) if n > 1 else 0.0
    lo, hi = wilson_interval(errors, n)
    min_d = min(p["min_dH2"] for p in parts)
    return Aggregate(
        trials=n, errors=errors, error_rate=errors / n, ci_lo=lo, ci_hi=hi,
        mu_hat=mu, mu_stderr=mu_se,
        min_dH2=None if math.isinf(min_d) else min_d,
        violations=sum(p["viol"] for p in parts),
        checked_pairs=0 if D is None else len(D),
        rejected_draws=sum(p["rej"] for p in parts),
        noise_exceed=sum(p["noise"] for p in parts),
        distance_short=sum(p["short"] for p in parts),
    )


# -- rate thresholds and gaps ----------------------------------------------


def rate_loss_bits(c: float) -> float:
    """log2(2 / (pi e c))."""
    return math.log2(2.0 / (math.pi * math.e * c))


def rate_threshold(P: float, c: float, mu: float = 0.0) -> float:
    """Largest rate covered by the achievability bound: log2 P + mu - log2(2/(pi e c))."""
    return math.log2(P) + mu - rate_loss_bits(c)


def martinet_gap(G: float = 92.368) -> float:
    """Constant gap log2(2G/(pi e)) for a tower with root discriminant G^2 per complex dimension."""
    return math.log2(2.0 * G / (math.pi * math.e))


def capacity_bits(model: ChannelModel, P: float, samples: int = 10**6, seed=0):
    """(1/k) E log2 det(I + P H H^H) by Monte Carlo, with its standard error.

    For diagonal models this is E log2(1 + P|h|^2); AWGN is exact.
    """
    if model.kind == "awgn":
        return math.log2(1 + P), 0.0
    k = model.k
    per_draw = max(1, samples // k)
    total, total_sq, done, b = 0.0, 0.0, 0, 0
    while done < per_draw:
        n = min(1 << 15, per_draw - done)
        H, _, _ = sample_batch(model, rng_for(seed, 0xCA9, b), n)
        G = np.eye(k) + P * np.einsum("tij,tkj->tik", H, H.conj())
        v = np.linalg.slogdet(G)[1] / math.log(2) / k
        total += math.fsum(v)
        total_sq += math.fsum(v * v)
        done += n
        b += 1
    m = total / per_draw
    se = math.sqrt(max(total_sq / per_draw - m * m, 0.0) / max(per_draw - 1, 1))
    return m, se


@dataclass
class GapReport:
    rate_bits: float
    threshold_bits: float
    capacity_bits: float
    capacity_stderr: float
    gap_bits: float
    mu_hat: float
    c: float
    certified: bool
    banner: str = ""


def gap_report(code: FiniteCode, model: ChannelModel, mu_hat: float, c: float, certified: bool = True,
               allow_upper_bound: bool = False, capacity_samples: int = 10**6, seed=0) -> GapReport:
    """Achieved rate, rate threshold, channel capacity and the gap between the last two."""
    if c is None or not c > 0:
        raise UncertifiedInvariant("no positive reduced Hermite invariant available for this channel")
    banner = ""
    if not certified:
        if not allow_upper_bound:
            raise UncertifiedInvariant(
                "reduced Hermite invariant is only an upper bound; refusing to print a rate threshold"
            )
        banner = "UPPER BOUND ONLY: invariant not certified, threshold is not a proven achievable rate"
    mu = 0.0 if model.kind == "awgn" else mu_hat
    thr = rate_threshold(code.power_P, c, mu)
    cap, se = capacity_bits(model, code.power_P, capacity_samples, seed)
    return GapReport(code.rate_bits, thr, cap, se, cap - thr, mu, c, certified, banner)


def awgn_error_bound(d: float, k: int) -> float:
    """P{||w||^2 >= (d/2)^2} with 2||w||^2 chi-square on 2k degrees of freedom."""
    return float(chi2.sf(2 * (d / 2) ** 2, 2 * k))


def noise_tail(k: int, epsilon: float) -> float:
    """P{||w||^2 / k >= 1 + epsilon}."""
    return float(chi2.sf(2 * k * (1 + epsilon), 2 * k))


# -- results files -----------------------------------------------------------


def _canon(obj):
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return "%.12g" % float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + _canon(obj[k]) for k in sorted(obj)) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_canon(v) for v in obj) + "]"
    raise TypeError(f"cannot canonicalise {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Sorted keys, no whitespace, floats as %.12g."""
    return _canon(obj)


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def config_hash(obj) -> str:
    return "%016x" % fnv1a64(canonical_json(obj).encode())


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


def results_row(cfg: ExperimentConfig, agg: Aggregate, report: GapReport | None, config: dict) -> dict:
    code = cfg.code
    return {
        "config_hash": config_hash(config),
        "k": code.k, "P": code.power_P, "alpha": code.alpha, "model": cfg.model.label,
        "trials": agg.trials, "error_rate": agg.error_rate, "ci_lo": agg.ci_lo, "ci_hi": agg.ci_hi,
        "rate_bits": code.rate_bits,
        "threshold_bits": None if report is None else report.threshold_bits,
        "capacity_bits": None if report is None else report.capacity_bits,
        "gap_bits": None if report is None else report.gap_bits,
        "mu_hat": agg.mu_hat, "violations": agg.violations,
        "rh_certified": "" if report is None else int(report.certified),
    }


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
