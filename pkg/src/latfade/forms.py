"""Homogeneous forms, reduced norms and homogeneous minima.

The four built-in forms are the squared reduced norms of the fading groups:

===================  =====================  ==========================================
group                form                   value at x
===================  =====================  ==========================================
identity             ``euclidean_sq``       sum |x_i|^2
diagonal             ``product_sq``         k |x_1 ... x_k|^(2/k)
block_diagonal(b)    ``block_product_sq``   m (prod_j ||x_(j)||^2)^(1/m),  m = k/b
mimo2_block          ``mimo_det2``          2 sqrt(det X X^H),  X = [x_1 x_3 ...; x_2 x_4 ...]
===================  =====================  ==========================================

The block formula for general ``b`` follows from the same AM-GM argument as
the diagonal one: scaling block j by a_j costs |a_j|^2 ||x_(j)||^2 and the
constraint is prod |a_j| = 1.  For the repeated 2x2 MIMO group the infimum of
tr(M G M^H) over |det M| = 1 with G = X X^H is 2 sqrt(det G), attained by
M proportional to G^(-1/2).  For k = 4 this is 2|x_1 x_4 - x_2 x_3|, the
ordering consistent with the channel action
(h1 x1 + h2 x2, h3 x1 + h4 x2, h1 x3 + h2 x4, h3 x3 + h4 x4).
The ordering 2|x_1 x_2 - x_3 x_4| is available as ``ordering="printed"``;
it is not invariant under that action.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ._rng import as_generator, complex_normal
from .errors import DimensionMismatch, EmptySearch, UnsupportedGroup, ValidationError, ZeroVector
from .lattice import Lattice, LatticePoint, ball_points, pick_achiever

FORM_KINDS = ("euclidean_sq", "product_sq", "block_product_sq", "mimo_det2")
GROUP_KINDS = ("identity", "diagonal", "block_diagonal", "mimo2_block")
CERT_RTOL = 1e-8


@dataclass(frozen=True)
class HomogeneousForm:
    kind: str
    k: int
    block_size: int | None = None
    ordering: str = "channel"
    degree_sigma: float = 2.0

    def __post_init__(self):
        if self.kind not in FORM_KINDS:
            raise ValidationError(f"unknown form kind {self.kind!r}")
        if self.k < 1:
            raise ValidationError("k must be positive")
        if self.kind == "block_product_sq":
            b = self.block_size
            if b is None or b < 1 or self.k % b:
                raise ValidationError(f"block_size must divide k={self.k}, got {b}")
        if self.kind == "mimo_det2":
            if self.ordering not in ("channel", "printed"):
                raise ValidationError(f"unknown ordering {self.ordering!r}")
            if self.ordering == "printed" and self.k != 4:
                raise ValidationError("printed mimo_det2 ordering is defined for k = 4 only")
            if self.k % 4:
                raise ValidationError("mimo_det2 needs k divisible by 4")

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class MatrixGroupSpec:
    """A group of unit-|det| fading matrices acting by x -> (A x^T)^T.

    ``block`` is the repetition length for ``block_diagonal``.  For
    ``mimo2_block`` one 2x2 matrix acts on consecutive coordinate pairs; with
    ``independent_blocks`` each 4-coordinate block has its own matrix.
    """

    kind: str
    k: int
    block: int | None = None
    independent_blocks: bool = False

    def __post_init__(self):
        if self.kind not in GROUP_KINDS:
            raise UnsupportedGroup(f"unknown group kind {self.kind!r}")
        if self.kind == "block_diagonal" and (self.block is None or self.block < 1 or self.k % self.block):
            raise ValidationError(f"block length must divide k={self.k}, got {self.block}")
        if self.kind == "mimo2_block" and self.k % 4:
            raise ValidationError("mimo2_block needs k divisible by 4")

    @property
    def label(self) -> str:
        if self.kind == "block_diagonal":
            return f"block_diagonal:{self.block}"
        if self.kind == "mimo2_block" and self.independent_blocks:
            return "mimo2_block:independent"
        return self.kind


def group_from_label(label: str, k: int) -> MatrixGroupSpec:
    kind, _, arg = label.partition(":")
    if kind == "block_diagonal":
        return MatrixGroupSpec(kind, k, block=int(arg))
    if kind == "mimo2_block":
        return MatrixGroupSpec(kind, k, independent_blocks=(arg == "independent"))
    return MatrixGroupSpec(kind, k)


def _check_dim(x, k):
    x = np.asarray(x, dtype=complex)
    if x.shape[-1:] != (k,):
        raise DimensionMismatch(f"expected vectors in C^{k}, got shape {x.shape}")
    return x


def _pair_wedges(x):
    """|x_(i,0) x_(j,1) - x_(i,1) x_(j,0)|^2 summed over column pairs i < j of X."""
    p = x.reshape(x.shape[:-1] + (-1, 2))
    m = p.shape[-2]
    total = np.zeros(x.shape[:-1])
    for i in range(m):
        for j in range(i + 1, m):
            w = p[..., i, 0] * p[..., j, 1] - p[..., i, 1] * p[..., j, 0]
            total = total + np.abs(w) ** 2
    return total


def evaluate(F: HomogeneousForm, x):
    """Value of the form at x (vectorised over leading axes)."""
    x = _check_dim(x, F.k)
    a2 = np.abs(x) ** 2
    if F.kind == "euclidean_sq":
        return a2.sum(axis=-1)
    if F.kind == "product_sq":
        return F.k * np.prod(a2 ** (1.0 / F.k), axis=-1)
    if F.kind == "block_product_sq":
        m = F.k // F.block_size
        blocks = a2.reshape(a2.shape[:-1] + (m, F.block_size)).sum(axis=-1)
        return m * np.prod(blocks ** (1.0 / m), axis=-1)
    # mimo_det2
    if F.ordering == "printed":
        return 2 * np.abs(x[..., 0] * x[..., 1] - x[..., 2] * x[..., 3])
    if F.k == 4:
        return 2 * np.abs(x[..., 0] * x[..., 3] - x[..., 1] * x[..., 2])
    return 2 * np.sqrt(_pair_wedges(x))


def form_for_group(G: MatrixGroupSpec) -> HomogeneousForm:
    if G.kind == "identity":
        return HomogeneousForm("euclidean_sq", G.k)
    if G.kind == "diagonal":
        return HomogeneousForm("product_sq", G.k)
    if G.kind == "block_diagonal":
        return HomogeneousForm("block_product_sq", G.k, block_size=G.block)
    if G.independent_blocks:
        raise UnsupportedGroup("independent 2x2 blocks have a closed form but no single built-in form")
    return HomogeneousForm("mimo_det2", G.k)


def reduced_norm_sq_closed_form(G: MatrixGroupSpec, x):
    """inf over A in G of ||A[x]||^2, from the closed forms."""
    x = _check_dim(x, G.k)
    if G.kind == "mimo2_block" and G.independent_blocks:
        m = G.k // 4
        blocks = x.reshape(x.shape[:-1] + (m, 4))
        d = 2 * np.abs(blocks[..., 0] * blocks[..., 3] - blocks[..., 1] * blocks[..., 2])
        return m * np.prod(d ** (1.0 / m), axis=-1)
    return evaluate(form_for_group(G), x)


# -- group members ---------------------------------------------------------


def _herm_exp_half(s):
    """exp(S/2) for S = [[a, b+ic], [b-ic, -a]] (traceless Hermitian, det exp = 1)."""
    a, b, c = s
    S = np.array([[a, b + 1j * c], [b - 1j * c, -a]])
    rho = np.sqrt(a * a + b * b + c * c)
    if rho < 1e-300:
        return np.eye(2, dtype=complex)
    return np.cosh(rho / 2) * np.eye(2) + (np.sinh(rho / 2) / rho) * S


def _n_log_params(G: MatrixGroupSpec) -> int:
    if G.kind == "identity":
        return 0
    if G.kind == "diagonal":
        return G.k - 1
    if G.kind == "block_diagonal":
        return G.k // G.block - 1
    if G.independent_blocks:
        m = G.k // 4
        return 3 * m + (m - 1)
    return 3


def _free_to_sum_zero(t):
    return np.append(t, -np.sum(t))


def group_member(G: MatrixGroupSpec, theta, phases=None) -> np.ndarray:
    """The k x k member of G with log-parameters ``theta`` (|det| = 1 by construction).

    ``phases`` optionally supplies unit-modulus factors (diagonal kinds) or
    2x2 unitaries (MIMO kinds); they do not change ||A[x]||.
    """
    theta = np.asarray(theta, dtype=float)
    k = G.k
    if G.kind == "identity":
        return np.eye(k, dtype=complex)
    if G.kind in ("diagonal", "block_diagonal"):
        t = _free_to_sum_zero(theta)
        rep = 1 if G.kind == "diagonal" else G.block
        # |a_j|^2 = exp(t_j / rep) keeps prod |a_j|^rep = 1
        mod = np.repeat(np.exp(t / (2 * rep)), rep)
        d = mod.astype(complex)
        if phases is not None:
            d = d * phases
        return np.diag(d)
    A = np.zeros((k, k), dtype=complex)
    if G.independent_blocks:
        m = k // 4
        t = _free_to_sum_zero(theta[3 * m:])
        for j in range(m):
            M = np.exp(t[j] / 2) * _herm_exp_half(theta[3 * j: 3 * j + 3])
            if phases is not None:
                M = phases[j] @ M
            A[4 * j: 4 * j + 2, 4 * j: 4 * j + 2] = M
            A[4 * j + 2: 4 * j + 4, 4 * j + 2: 4 * j + 4] = M
        return A
    M = _herm_exp_half(theta)
    if phases is not None:
        M = phases[0] @ M
    for j in range(k // 2):
        A[2 * j: 2 * j + 2, 2 * j: 2 * j + 2] = M
    return A


def _random_unitary2(rng):
    z = complex_normal(rng, (2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def sample_member(G: MatrixGroupSpec, rng, spread: float = 1.0) -> np.ndarray:
    rng = as_generator(rng)
    theta = spread * rng.standard_normal(_n_log_params(G))
    if G.kind in ("diagonal", "block_diagonal"):
        m = G.k if G.kind == "diagonal" else G.k // G.block
        ph = np.exp(2j * np.pi * rng.random(m))
        phases = ph if G.kind == "diagonal" else np.repeat(ph, G.block)
    elif G.kind == "mimo2_block":
        n = G.k // 4 if G.independent_blocks else 1
        phases = [_random_unitary2(rng) for _ in range(n)]
    else:
        phases = None
    A = group_member(G, theta, phases)
    return A * abs(np.linalg.det(A)) ** (-1.0 / G.k)


def apply_matrix(A, x):
    """A[x] = (A x^T)^T, vectorised over leading axes of x."""
    return np.asarray(x) @ np.asarray(A).T


def reduced_norm_sq_numeric(G: MatrixGroupSpec, x, iterations: int = 500, restarts: int = 4, seed=0) -> float:
    """Upper bound on inf ||A[x]||^2 by direct minimisation over the group parameters.

    The objective is evaluated by building the member and applying it, so the
    returned value is always realised by an actual element of G.
    """
    x = _check_dim(x, G.k)
    if not np.any(x):
        raise ZeroVector("reduced norm minimisation needs x != 0")
    n = _n_log_params(G)
    if n == 0:
        return float(np.sum(np.abs(x) ** 2))

    def f(theta):
        y = apply_matrix(group_member(G, theta), x)
        return float(np.sum(np.abs(y) ** 2))

    rng = as_generator(seed)
    bounds = [(-60.0, 60.0)] * n
    best = f(np.zeros(n))
    for r in range(restarts):
        start = np.zeros(n) if r == 0 else rng.standard_normal(n)
        res = minimize(
            f, start, method="L-BFGS-B", bounds=bounds,
            options={"maxiter": iterations, "ftol": 1e-15, "gtol": 1e-12, "maxls": 50},
        )
        best = min(best, f(res.x))
    return best


# -- minima over lattices --------------------------------------------------


@dataclass(frozen=True)
class MinimumResult:
    value: float
    achiever: LatticePoint
    certified: bool


def _lattice_minimum(fn, L: Lattice, search_radius, lower_bound, complete):
    coeffs, pts = ball_points(L, search_radius)
    nz = np.any(coeffs != 0, axis=1)
    coeffs, pts = coeffs[nz], pts[nz]
    if not len(coeffs):
        raise EmptySearch(
            f"no nonzero lattice point within radius {search_radius:g}; "
            f"try a radius of at least {np.sqrt(np.min(np.sum(L.basis ** 2, axis=1))):.4g}"
        )
    vals = np.abs(fn(pts))
    sq = np.sum(np.abs(pts) ** 2, axis=1)
    j = pick_achiever(coeffs, vals, sq)
    value = float(vals[j])
    certified = complete
    if lower_bound is not None:
        if value < lower_bound * (1 - CERT_RTOL) - 1e-12:
            raise ValidationError(f"found value {value:.12g} lies below the supplied lower bound {lower_bound:.12g}")
        if value <= lower_bound * (1 + CERT_RTOL) + 1e-12:
            certified = True
    return value, L.point(coeffs[j]), certified


def homogeneous_minimum(F: HomogeneousForm, L: Lattice, search_radius: float, lower_bound=None) -> MinimumResult:
    """Minimum of |F| over nonzero lattice points within ``search_radius``.

    Only the Euclidean form is certified by the ball search alone; for the
    others the value is an upper bound on the homogeneous minimum unless
    ``lower_bound`` (a proven bound for the whole lattice) matches it.
    """
    if F.k != L.k:
        raise DimensionMismatch(f"form is on C^{F.k}, lattice in C^{L.k}")
    v, a, c = _lattice_minimum(lambda p: evaluate(F, p), L, search_radius, lower_bound,
                               F.kind == "euclidean_sq")
    return MinimumResult(v, a, c)


def reduced_hermite_invariant(G: MatrixGroupSpec, L: Lattice, search_radius: float, lower_bound=None) -> MinimumResult:
    """Reduced Hermite invariant: min reduced norm over L divided by Vol(L)^(1/k).

    ``lower_bound`` bounds the unnormalised minimum of the reduced norm on L.
    """
    if G.k != L.k:
        raise DimensionMismatch(f"group acts on C^{G.k}, lattice in C^{L.k}")
    v, a, c = _lattice_minimum(lambda p: reduced_norm_sq_closed_form(G, p), L, search_radius,
                               lower_bound, G.kind == "identity")
    return MinimumResult(v / L.volume ** (1.0 / L.k), a, c)


def form_to_dict(F: HomogeneousForm) -> dict:
    d = {"kind": F.kind, "k": F.k}
    if F.block_size is not None:
        d["block_size"] = F.block_size
    if F.kind == "mimo_det2" and F.ordering != "channel":
        d["ordering"] = F.ordering
    return d


def form_from_dict(d: dict) -> HomogeneousForm:
    try:
        return HomogeneousForm(d["kind"], int(d["k"]), d.get("block_size"), d.get("ordering", "channel"))
    except KeyError as exc:
        raise ValidationError(f"form descriptor missing {exc}") from exc


def form_from_json(text: str) -> HomogeneousForm:
    return form_from_dict(json.loads(text))
