"""Finite codes carved from shifted, scaled lattices under an average power constraint."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import rng_for
from .errors import DimensionMismatch, EmptyCode, InvalidTrials, NonPositiveScale, NotNormalized
from .lattice import MAX_POINTS, Lattice, _ball_coeffs, lattice_from_dict, lattice_to_dict, scale, to_complex, to_real

VOLUME_TOL = 1e-9
POWER_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteCode:
    base: Lattice | None
    alpha: float
    shift: np.ndarray
    power_P: float
    codewords: np.ndarray
    coeffs: np.ndarray
    certificates: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.codewords.shape[1]

    @property
    def size(self) -> int:
        return len(self.codewords)

    @property
    def rate_bits(self) -> float:
        return rate(self)

    def __len__(self):
        return len(self.codewords)

    def __repr__(self):
        return f"FiniteCode(k={self.k}, |C|={self.size}, alpha={self.alpha:.6g}, P={self.power_P:.6g})"


def ball_volume_constant(k: int) -> float:
    """(pi k)^k / k!, so that Vol(B(sqrt(kP))) = C_k P^k in 2k real dimensions."""
    return math.exp(k * math.log(math.pi * k) - math.lgamma(k + 1))


def guaranteed_size(k: int, alpha: float, P: float) -> float:
    """Vol(B(sqrt(kP))) / Vol(alpha L) for a unit-volume L."""
    return ball_volume_constant(k) * P**k / alpha ** (2 * k)


def carve(L: Lattice, alpha: float, P: float, shift=None, max_points: int = MAX_POINTS, certificates=None) -> FiniteCode:
    """All points of shift + alpha L in the closed ball of radius sqrt(kP)."""
    if abs(L.volume - 1.0) > VOLUME_TOL:
        raise NotNormalized(f"base lattice must have unit volume, got {L.volume:.12g}")
    if not (alpha > 0 and P > 0):
        raise NonPositiveScale("alpha and P must be positive")
    k = L.k
    shift = np.zeros(k, dtype=complex) if shift is None else np.asarray(shift, dtype=complex).reshape(-1)
    if shift.shape != (k,):
        raise DimensionMismatch(f"shift must lie in C^{k}")
    radius = math.sqrt(k * P)
    aL = scale(L, alpha)
    coeffs = _ball_coeffs(aL, radius * (1 + 1e-9), -shift, max_points)
    pts = shift + to_complex(coeffs @ aL.basis).reshape(-1, k)
    keep = np.sum(np.abs(pts) ** 2, axis=1) / k <= P + POWER_TOL
    return FiniteCode(L, float(alpha), shift, float(P), pts[keep], coeffs[keep], dict(certificates or {}))


@dataclass(frozen=True)
class ShiftSearch:
    shift: np.ndarray
    code: FiniteCode
    guarantee_met: bool
    guarantee: float
    trial_index: int


def find_shift(L: Lattice, alpha: float, P: float, trials: int, seed=0, certificates=None) -> ShiftSearch:
    """Search shifts in the fundamental parallelotope of alpha L for a large carved code.

    Trial 0 is the zero shift; trials 1.. are uniform in the parallelotope,
    drawn from stream ``(seed, trial)``.  The first maximiser wins.
    """
    if trials < 1:
        raise InvalidTrials(f"trials must be positive, got {trials}")
    aB = L.basis * alpha
    best = None
    best_i = 0
    for i in range(trials):
        if i == 0:
            shift = np.zeros(L.k, dtype=complex)
        else:
            u = rng_for(seed, i).random(L.dim)
            shift = to_complex(u @ aB)
        code = carve(L, alpha, P, shift, certificates=certificates)
        if best is None or code.size > best.size:
            best, best_i = code, i
    bound = guaranteed_size(L.k, alpha, P)
    return ShiftSearch(best.shift, best, best.size >= bound, bound, best_i)


def rate(code: FiniteCode) -> float:
    if code.size == 0:
        raise EmptyCode("rate of an empty code is undefined")
    return math.log2(code.size) / code.k


def code_to_dict(code: FiniteCode) -> dict:
    d = {
        "k": code.k,
        "alpha": code.alpha,
        "P": code.power_P,
        "shift": [float(v) for v in to_real(code.shift)],
        "codewords": [[float(v) for v in row] for row in to_real(code.codewords)],
        "coeffs": [[int(v) for v in row] for row in code.coeffs],
    }
    if code.base is not None:
        d["base"] = lattice_to_dict(code.base, certificates=dict(code.certificates))
    return d


def code_from_dict(d: dict) -> FiniteCode:
    """Load a codebook; if a base lattice is stored, codewords are rebuilt from it and checked."""
    k = int(d["k"])
    shift = to_complex(np.asarray(d["shift"], dtype=float))
    cw = to_complex(np.asarray(d["codewords"], dtype=float).reshape(-1, 2 * k))
    if "base" in d:
        base = lattice_from_dict(d["base"])
        coeffs = np.asarray(d.get("coeffs", []), dtype=np.int64).reshape(-1, 2 * k)
        rebuilt = shift + to_complex(float(d["alpha"]) * (coeffs @ base.basis))
        if rebuilt.shape != cw.shape or (len(cw) and np.max(np.abs(rebuilt - cw)) > 1e-9):
            raise DimensionMismatch("codewords are inconsistent with base lattice coefficients")
        certs = {str(a): float(b) for a, b in d["base"].get("certificates", {}).items()}
    else:
        base = None
        coeffs = np.zeros((len(cw), 2 * k), dtype=np.int64)
        certs = {}
    return FiniteCode(base, float(d["alpha"]), shift, float(d["P"]), cw, coeffs, certs)


def save_code(code: FiniteCode, path):
    with open(path, "w") as fh:
        json.dump(code_to_dict(code), fh)


def load_code(path) -> FiniteCode:
    with open(path) as fh:
        return code_from_dict(json.load(fh))
