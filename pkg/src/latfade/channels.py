"""Linear fading channels y = H[x] + w with unit-variance complex Gaussian noise."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._rng import as_generator, complex_normal, rng_for
from .errors import BlockMismatch, DimensionMismatch, ValidationError
from .forms import MatrixGroupSpec

MODEL_KINDS = ("awgn", "iid_rayleigh_diag", "block_fading_diag", "mimo2_block")
SINGULAR_DET = 1e-300
RAYLEIGH_MU = -np.euler_gamma / math.log(2)


@dataclass(frozen=True)
class ChannelModel:
    kind: str
    k: int
    block: int | None = None
    law: str = "rayleigh"
    independent_blocks: bool = False

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValidationError(f"unknown channel kind {self.kind!r}")
        if self.k < 1:
            raise ValidationError("k must be positive")
        if self.law != "rayleigh":
            raise ValidationError(f"unsupported fading law {self.law!r}")
        if self.kind == "block_fading_diag" and (not self.block or self.block < 1 or self.k % self.block):
            raise BlockMismatch(f"block length {self.block} does not divide k={self.k}")
        if self.kind == "mimo2_block" and self.k % 4:
            raise BlockMismatch(f"mimo2_block needs k divisible by 4, got k={self.k}")

    @property
    def label(self) -> str:
        if self.kind == "block_fading_diag":
            return f"block{self.block}"
        if self.kind == "mimo2_block":
            return "mimo2i" if self.independent_blocks else "mimo2"
        return {"awgn": "awgn", "iid_rayleigh_diag": "rayleigh"}[self.kind]


def model_from_label(label: str, k: int) -> ChannelModel:
    """Parse short names: awgn, rayleigh, block<n>, mimo2, mimo2i."""
    if label == "awgn":
        return ChannelModel("awgn", k)
    if label == "rayleigh":
        return ChannelModel("iid_rayleigh_diag", k)
    if label.startswith("block"):
        return ChannelModel("block_fading_diag", k, block=int(label[5:] or 2))
    if label in ("mimo2", "mimo2i"):
        return ChannelModel("mimo2_block", k, independent_blocks=label == "mimo2i")
    raise ValidationError(f"unknown channel model {label!r}")


def model_to_dict(model: ChannelModel) -> dict:
    d = {"kind": model.kind, "k": model.k, "law": model.law}
    if model.block is not None:
        d["block"] = model.block
    if model.independent_blocks:
        d["independent_blocks"] = True
    return d


def model_from_dict(d: dict) -> ChannelModel:
    return ChannelModel(d["kind"], int(d["k"]), d.get("block"), d.get("law", "rayleigh"),
                        bool(d.get("independent_blocks", False)))


def group_of(model: ChannelModel) -> MatrixGroupSpec:
    """The normalised matrix group containing every draw of the model."""
    if model.kind == "awgn":
        return MatrixGroupSpec("identity", model.k)
    if model.kind == "iid_rayleigh_diag":
        return MatrixGroupSpec("diagonal", model.k)
    if model.kind == "block_fading_diag":
        if model.block == model.k:
            # a single scalar: the normalised group is unitary scalars
            return MatrixGroupSpec("identity", model.k)
        if model.block == 1:
            return MatrixGroupSpec("diagonal", model.k)
        return MatrixGroupSpec("block_diagonal", model.k, block=model.block)
    return MatrixGroupSpec("mimo2_block", model.k, independent_blocks=model.independent_blocks)


@dataclass(frozen=True, eq=False)
class ChannelDraw:
    H: np.ndarray
    log_det_sq: float
    normalized_A: np.ndarray
    rejected: int = 0


def _draw_matrices(model: ChannelModel, rng, n: int) -> np.ndarray:
    k = model.k
    H = np.zeros((n, k, k), dtype=complex)
    idx = np.arange(k)
    if model.kind == "awgn":
        H[:, idx, idx] = 1.0
    elif model.kind == "iid_rayleigh_diag":
        H[:, idx, idx] = complex_normal(rng, (n, k))
    elif model.kind == "block_fading_diag":
        h = complex_normal(rng, (n, k // model.block))
        H[:, idx, idx] = np.repeat(h, model.block, axis=1)
    else:
        nb = k // 4 if model.independent_blocks else 1
        M = complex_normal(rng, (n, nb, 2, 2))
        for j in range(k // 2):
            m = M[:, j // 2] if model.independent_blocks else M[:, 0]
            H[:, 2 * j: 2 * j + 2, 2 * j: 2 * j + 2] = m
    return H


def sample_batch(model: ChannelModel, rng, n: int):
    """``n`` channel matrices with singular draws rejected and redrawn.

    Returns ``(H, log2 det(H H^H), rejected_count)``.
    """
    rng = as_generator(rng)
    H = _draw_matrices(model, rng, n)
    absdet = np.abs(np.linalg.det(H))
    rejected = 0
    bad = absdet < SINGULAR_DET
    while np.any(bad):
        nb = int(bad.sum())
        rejected += nb
        H[bad] = _draw_matrices(model, rng, nb)
        absdet[bad] = np.abs(np.linalg.det(H[bad]))
        bad = absdet < SINGULAR_DET
    if model.kind == "awgn":
        logdet = np.zeros(n)
    else:
        logdet = 2.0 * np.linalg.slogdet(H)[1] / math.log(2)
    return H, logdet, rejected


def sample(model: ChannelModel, seed) -> ChannelDraw:
    H, logdet, rejected = sample_batch(model, as_generator(seed), 1)
    H = H[0]
    A = H * abs(np.linalg.det(H)) ** (-1.0 / model.k)
    return ChannelDraw(H, float(logdet[0]), A, rejected)


def apply(H, x):
    """H[x] = (H x^T)^T; accepts a ChannelDraw or a matrix, and batches of x."""
    M = H.H if isinstance(H, ChannelDraw) else np.asarray(H)
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != M.shape[-1]:
        raise DimensionMismatch(f"channel is {M.shape[-1]}-dimensional, x has length {x.shape[-1]}")
    return x @ M.T


def add_noise(y0, seed):
    y0 = np.asarray(y0, dtype=complex)
    return y0 + complex_normal(as_generator(seed), y0.shape)


@dataclass(frozen=True)
class MuEstimate:
    mu_hat: float
    stderr: float
    samples: int


def estimate_mu(model: ChannelModel, trials: int, seed=0, chunk: int = 1 << 16) -> MuEstimate:
    """Monte Carlo mean of (1/k) log2 det(H H^H), in bits."""
    if trials < 100:
        raise ValidationError("estimate_mu needs at least 100 trials")
    if model.kind == "awgn":
        return MuEstimate(0.0, 0.0, trials)
    total, total_sq, done, block = 0.0, 0.0, 0, 0
    while done < trials:
        n = min(chunk, trials - done)
        _, logdet, _ = sample_batch(model, rng_for(seed, block), n)
        v = logdet / model.k
        total += math.fsum(v)
        total_sq += math.fsum(v * v)
        done += n
        block += 1
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0) * trials / (trials - 1)
    return MuEstimate(mean, math.sqrt(var / trials), trials)


def save_model(model: ChannelModel, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh)
