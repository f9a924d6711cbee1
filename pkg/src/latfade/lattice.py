"""Full-rank lattices in C^k, stored as 2k real generators.

A vector in C^k is handled internally as 2k real coordinates with real and
imaginary parts interleaved: ``(re x_1, im x_1, re x_2, im x_2, ...)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, NonPositiveScale, Overflow, RankDeficient

RANK_TOL = 1e-10
MAX_POINTS = 10**7
LLL_DELTA = 0.99
_BALL_RTOL = 1e-9


def to_real(x) -> np.ndarray:
    """Interleave real and imaginary parts along the last axis."""
    x = np.asarray(x, dtype=complex)
    out = np.empty(x.shape[:-1] + (2 * x.shape[-1],))
    out[..., 0::2] = x.real
    out[..., 1::2] = x.imag
    return out


def to_complex(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return r[..., 0::2] + 1j * r[..., 1::2]


@dataclass(frozen=True)
class LatticePoint:
    coeffs: tuple
    embedding: np.ndarray = field(compare=False)

    def __repr__(self):
        return f"LatticePoint(coeffs={self.coeffs}, embedding={np.round(self.embedding, 6)})"


@dataclass(frozen=True, eq=False)
class Lattice:
    """Lattice spanned over Z by the rows of ``basis`` (2k x 2k, real coordinates)."""

    k: int
    basis: np.ndarray
    volume: float
    gram: np.ndarray

    @property
    def generators(self) -> np.ndarray:
        """The 2k generators as complex vectors, shape (2k, k)."""
        return to_complex(self.basis)

    @property
    def dim(self) -> int:
        return 2 * self.k

    @cached_property
    def _reduced(self):
        return lll_reduce(self.basis, LLL_DELTA)

    def point(self, coeffs) -> LatticePoint:
        c = tuple(int(v) for v in coeffs)
        return LatticePoint(c, to_complex(np.asarray(c, dtype=float) @ self.basis))

    def __repr__(self):
        return f"Lattice(k={self.k}, volume={self.volume:.6g})"


def _from_real(basis: np.ndarray) -> Lattice:
    basis = np.array(basis, dtype=float)
    n = basis.shape[0]
    if basis.ndim != 2 or basis.shape[1] != n or n % 2:
        raise DimensionMismatch(f"expected a 2k x 2k real basis, got shape {basis.shape}")
    s = np.linalg.svd(basis, compute_uv=False)
    if s[0] == 0 or s[-1] < RANK_TOL * s[0]:
        raise RankDeficient(
            "generators are not linearly independent over R "
            f"(singular value ratio {s[-1] / s[0] if s[0] else 0.0:.3g})"
        )
    basis.setflags(write=False)
    gram = basis @ basis.T
    gram = 0.5 * (gram + gram.T)
    gram.setflags(write=False)
    volume = float(abs(np.linalg.det(basis)))
    return Lattice(n // 2, basis, volume, gram)


def make_lattice(generators) -> Lattice:
    """Build a lattice from 2k complex vectors of length k."""
    g = np.asarray(generators, dtype=complex)
    if g.ndim == 1:
        g = g[:, None]
    if g.ndim != 2:
        raise DimensionMismatch("generators must be a list of vectors")
    n, k = g.shape
    if n != 2 * k:
        raise DimensionMismatch(f"need exactly 2k = {2 * k} generators in C^{k}, got {n}")
    return _from_real(to_real(g))


def from_real_basis(basis) -> Lattice:
    return _from_real(basis)


def volume(L: Lattice) -> float:
    return L.volume


def scale(L: Lattice, c: float) -> Lattice:
    if not c > 0:
        raise NonPositiveScale(f"scale factor must be positive, got {c}")
    if c == 1:
        return L
    return _from_real(L.basis * c)


def normalize_volume(L: Lattice) -> Lattice:
    return scale(L, L.volume ** (-1.0 / L.dim))


def lll_reduce(basis, delta: float = LLL_DELTA):
    """Floating-point LLL on the rows of ``basis``.

    Returns ``(reduced, U)`` with ``reduced = U @ basis`` and ``U`` unimodular.
    """
    B = np.array(basis, dtype=float)
    n = B.shape[0]
    U = np.eye(n, dtype=np.int64)

    def gso(B):
        Bs = np.zeros_like(B)
        mu = np.zeros((n, n))
        bb = np.zeros(n)
        for i in range(n):
            v = B[i].copy()
            for j in range(i):
                mu[i, j] = B[i] @ Bs[j] / bb[j]
                v -= mu[i, j] * Bs[j]
            Bs[i] = v
            bb[i] = v @ v
        return mu, bb

    mu, bb = gso(B)
    i = 1
    while i < n:
        for j in range(i - 1, -1, -1):
            q = round(mu[i, j])
            if q:
                B[i] -= q * B[j]
                U[i] -= q * U[j]
                mu[i, : j + 1] -= q * np.append(mu[j, :j], 1.0)
        if bb[i] >= (delta - mu[i, i - 1] ** 2) * bb[i - 1]:
            i += 1
        else:
            B[[i - 1, i]] = B[[i, i - 1]]
            U[[i - 1, i]] = U[[i, i - 1]]
            mu, bb = gso(B)
            i = max(i - 1, 1)
    return B, U


def _ball_coeffs(L: Lattice, radius: float, center, max_points: int) -> np.ndarray:
    """Integer coefficients (original basis) of all points within ``radius`` of ``center``.

    Breadth-first Fincke-Pohst over the QR factor of the LLL-reduced basis.
    """
    Bred, U = L._reduced
    n = L.dim
    t = to_real(np.atleast_1d(np.asarray(center, dtype=complex)))
    if t.shape != (n,):
        raise DimensionMismatch(f"center must lie in C^{L.k}")
    Q, R = np.linalg.qr(Bred.T)
    y = Q.T @ t
    r2 = float(radius) ** 2
    slack = r2 * _BALL_RTOL + 1e-12
    cap = 4 * max_points + 1024

    coeffs = np.zeros((1, 0), dtype=np.int64)
    partial = np.zeros(1)
    for i in range(n - 1, -1, -1):
        rii = R[i, i]
        s = y[i] - coeffs @ R[i, i + 1:]
        center_i = s / rii
        width = np.sqrt(np.maximum(r2 + slack - partial, 0.0)) / abs(rii)
        lo = np.ceil(center_i - width - 1e-9).astype(np.int64)
        hi = np.floor(center_i + width + 1e-9).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        total = int(counts.sum())
        if total > cap:
            raise Overflow(f"ball of radius {radius:g} holds too many points for enumeration")
        idx = np.repeat(np.arange(len(lo)), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        ci = lo[idx] + (np.arange(total) - starts)
        newpartial = partial[idx] + (rii * ci - s[idx]) ** 2
        keep = newpartial <= r2 + slack
        coeffs = np.concatenate([ci[keep, None], coeffs[idx][keep]], axis=1)
        partial = newpartial[keep]

    orig = coeffs @ U
    if len(orig):
        pts = orig @ L.basis
        d2 = np.sum((pts - t) ** 2, axis=1)
        orig = orig[d2 <= r2 + slack]
    if len(orig) > max_points:
        raise Overflow(f"{len(orig)} points exceed max_points={max_points}")
    order = np.lexsort(orig.T[::-1]) if len(orig) else np.arange(0)
    return orig[order]


def enumerate_ball(L: Lattice, radius: float, center=None, max_points: int = MAX_POINTS):
    """All lattice points x with ||x - center|| <= radius, in lexicographic coefficient order."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    if center is None:
        center = np.zeros(L.k, dtype=complex)
    coeffs = _ball_coeffs(L, radius, center, max_points)
    pts = to_complex(coeffs @ L.basis)
    return [LatticePoint(tuple(int(v) for v in c), p) for c, p in zip(coeffs, pts)]


def ball_points(L: Lattice, radius: float, center=None, max_points: int = MAX_POINTS):
    """Array form of :func:`enumerate_ball`: ``(coeffs, points)``."""
    if center is None:
        center = np.zeros(L.k, dtype=complex)
    coeffs = _ball_coeffs(L, radius, center, max_points)
    return coeffs, to_complex(coeffs @ L.basis)


def pick_achiever(coeffs: np.ndarray, values: np.ndarray, sqnorms: np.ndarray, rtol=1e-9) -> int:
    """Index of the canonical minimiser: smallest value, then smallest norm, then lex-largest coeffs."""
    vmin = values.min()
    tied = np.flatnonzero(values <= vmin + rtol * max(abs(vmin), 1e-300) + 1e-15)
    nmin = sqnorms[tied].min()
    tied = tied[sqnorms[tied] <= nmin * (1 + rtol)]
    best = tied[0]
    for j in tied[1:]:
        if tuple(coeffs[j]) > tuple(coeffs[best]):
            best = j
    return int(best)


def shortest_vector_sq(L: Lattice):
    """Minimum nonzero squared norm and a canonical achiever."""
    Bred, _ = L._reduced
    r2 = min(np.min(np.sum(L.basis**2, axis=1)), np.min(np.sum(Bred**2, axis=1)))
    coeffs, pts = ball_points(L, np.sqrt(r2) * (1 + 1e-9))
    nz = np.any(coeffs != 0, axis=1)
    coeffs, pts = coeffs[nz], pts[nz]
    sq = np.sum(np.abs(pts) ** 2, axis=1)
    j = pick_achiever(coeffs, sq, sq)
    return float(sq[j]), L.point(coeffs[j])


def hermite_invariant(L: Lattice) -> float:
    return shortest_vector_sq(L)[0] / L.volume ** (1.0 / L.k)


def lattice_to_dict(L: Lattice, **extra) -> dict:
    d = {"k": L.k, "generators": [[float(v) for v in row] for row in L.basis]}
    d.update(extra)
    return d


def lattice_from_dict(d: dict) -> Lattice:
    try:
        k = int(d["k"])
        gens = np.asarray(d["generators"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionMismatch(f"malformed lattice JSON: {exc}") from exc
    if gens.shape != (2 * k, 2 * k):
        raise DimensionMismatch(f"'generators' must be {2 * k} rows of {2 * k} reals, got {gens.shape}")
    return _from_real(gens)


def save_lattice(L: Lattice, path, **extra):
    with open(path, "w") as fh:
        json.dump(lattice_to_dict(L, **extra), fh, indent=1)


def load_lattice(path) -> Lattice:
    with open(path) as fh:
        return lattice_from_dict(json.load(fh))
