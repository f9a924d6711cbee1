"""Lattices from totally complex number fields via the relative canonical embedding.

Fields enter as numeric embedding data: row i of ``embeddings`` is
psi(w_i) = (sigma_1(w_i), ..., sigma_k(w_i)) for a Z-basis w_1..w_2k of the
ring of integers, one embedding per conjugate pair.  No symbolic number
theory is done; discriminants are recovered from the embedded volume
Vol(psi(O_K)) = 2^-k sqrt|d_K| and gated by an integrality check.

Certification relies on integrality of algebraic norms: for nonzero x in an
ideal I, |nr(x)| = prod |sigma_i(x)|^2 is a positive multiple of N(I), so the
product form k |x_1...x_k|^(2/k) is at least k N(I)^(1/k) on psi(I).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadConductor,
    DimensionMismatch,
    EmptySearch,
    InconsistentDiscriminant,
    NonIntegerNorm,
    NormMismatch,
    ValidationError,
)
from .forms import HomogeneousForm, homogeneous_minimum
from .lattice import Lattice, LatticePoint, ball_points, make_lattice, pick_achiever, to_real

MARTINET_G = 92.368
HAJIR_MAIRE_G = 82.2
DISC_RTOL = 1e-6
IDENTITY_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class NumberFieldSpec:
    label: str
    degree: int
    embeddings: np.ndarray
    abs_discriminant: int
    n_min: int | None = None

    @property
    def k(self) -> int:
        return self.degree // 2


@dataclass(frozen=True, eq=False)
class IdealSpec:
    coeffs: np.ndarray
    norm: int
    principal: bool | None = None


@dataclass
class FieldLatticeReport:
    label: str
    k: int
    volume: float | None
    nd_pmin: float
    rh: float
    min_I: float
    certified: dict = field(default_factory=dict)
    mode: str = "constructive"

    def as_dict(self) -> dict:
        return {
            "label": self.label, "k": self.k, "volume": self.volume, "nd_pmin": self.nd_pmin,
            "rh": self.rh, "min_I": self.min_I, "certified": dict(self.certified), "mode": self.mode,
        }


def integer_det(m) -> int:
    """Exact determinant of an integer matrix (Bareiss elimination)."""
    a = [[int(v) for v in row] for row in m]
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionMismatch("determinant needs a square matrix")
    sign, prev = 1, 1
    for i in range(n - 1):
        if a[i][i] == 0:
            for r in range(i + 1, n):
                if a[r][i]:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[n - 1][n - 1] if n else 1


def _discriminant_from_volume(vol: float, k: int) -> int:
    d = (2.0**k * vol) ** 2
    r = round(d)
    if r < 1 or abs(d - r) > DISC_RTOL * max(1.0, d):
        raise InconsistentDiscriminant(f"embedded volume gives |d_K| = {d!r}, not an integer")
    return int(r)


def _make_spec(label, embeddings, abs_discriminant=None, n_min=None) -> NumberFieldSpec:
    emb = np.asarray(embeddings, dtype=complex)
    if emb.ndim != 2 or emb.shape[0] != 2 * emb.shape[1]:
        raise DimensionMismatch(f"embedding matrix must be 2k x k, got {emb.shape}")
    k = emb.shape[1]
    vol = make_lattice(emb).volume
    if abs_discriminant is None:
        disc = _discriminant_from_volume(vol, k)
    else:
        disc = int(abs_discriminant)
        expected = 2.0**-k * math.sqrt(disc)
        if disc < 1 or abs(vol - expected) > DISC_RTOL * expected:
            raise InconsistentDiscriminant(
                f"|d_K| = {disc} implies volume {expected:.10g}, embeddings give {vol:.10g}"
            )
    emb.setflags(write=False)
    return NumberFieldSpec(label, 2 * k, emb, disc, n_min)


def cyclotomic_field(n: int) -> NumberFieldSpec:
    """Q(zeta_n) with power basis and embeddings zeta -> exp(2 pi i a / n), a < n/2, gcd(a, n) = 1."""
    n = int(n)
    if n < 3 or n % 4 == 2:
        raise BadConductor(f"conductor must be >= 3 and not 2 mod 4, got {n}")
    units = [a for a in range(1, n) if math.gcd(a, n) == 1]
    reps = [a for a in units if a < n - a]
    deg = len(units)
    j = np.arange(deg)[:, None]
    emb = np.exp(2j * np.pi * j * np.asarray(reps)[None, :] / n)
    return _make_spec(f"Q(zeta_{n})", emb)


def field_from_dict(d: dict) -> NumberFieldSpec:
    try:
        raw = np.asarray(d["embeddings"], dtype=float)
    except (KeyError, ValueError, TypeError) as exc:
        raise ValidationError(f"field JSON needs an 'embeddings' matrix of [re, im] pairs: {exc}") from exc
    if raw.ndim != 3 or raw.shape[-1] != 2:
        raise DimensionMismatch(f"'embeddings' must be rows of [re, im] pairs, got shape {raw.shape}")
    emb = raw[..., 0] + 1j * raw[..., 1]
    if "degree" in d and int(d["degree"]) != emb.shape[0]:
        raise DimensionMismatch(f"degree {d['degree']} does not match {emb.shape[0]} basis rows")
    return _make_spec(d.get("label", "field"), emb, d.get("abs_discriminant"), d.get("n_min"))


def field_from_file(path) -> NumberFieldSpec:
    with open(path) as fh:
        return field_from_dict(json.load(fh))


def field_to_dict(spec: NumberFieldSpec) -> dict:
    d = {
        "label": spec.label,
        "degree": spec.degree,
        "embeddings": [[[float(z.real), float(z.imag)] for z in row] for row in spec.embeddings],
        "abs_discriminant": spec.abs_discriminant,
    }
    if spec.n_min is not None:
        d["n_min"] = spec.n_min
    return d


def ideal_from_dict(d: dict) -> IdealSpec:
    try:
        return make_ideal(d["coeffs"], d["norm"], d.get("principal"))
    except KeyError as exc:
        raise ValidationError(f"ideal JSON missing {exc}") from exc


def ideal_from_file(path) -> IdealSpec:
    with open(path) as fh:
        return ideal_from_dict(json.load(fh))


def ideal_to_dict(ideal: IdealSpec) -> dict:
    d = {"coeffs": [[int(v) for v in row] for row in ideal.coeffs], "norm": ideal.norm}
    if ideal.principal is not None:
        d["principal"] = ideal.principal
    return d


def make_ideal(coeffs, norm: int, principal=None) -> IdealSpec:
    c = np.asarray(coeffs)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DimensionMismatch("ideal coefficient matrix must be square")
    if not np.all(np.asarray(coeffs, dtype=float) == np.round(np.asarray(coeffs, dtype=float))):
        raise ValidationError("ideal coefficients must be integers")
    c = c.astype(np.int64)
    det = abs(integer_det(c))
    if det != int(norm):
        raise NormMismatch(f"|det(coeffs)| = {det} but N(I) declared as {norm}")
    c.setflags(write=False)
    return IdealSpec(c, int(norm), principal)


def unit_ideal(spec: NumberFieldSpec) -> IdealSpec:
    return make_ideal(np.eye(spec.degree, dtype=np.int64), 1, True)


def embed_element(spec: NumberFieldSpec, coeffs) -> np.ndarray:
    """psi of the element with the given integral-basis coordinates."""
    return np.asarray(coeffs, dtype=float) @ spec.embeddings


def element_coeffs(spec: NumberFieldSpec, embedded) -> np.ndarray:
    """Integral-basis coordinates of an embedded element (rounded, checked)."""
    L = make_lattice(spec.embeddings)
    c = np.linalg.solve(L.basis.T, to_real(np.asarray(embedded, dtype=complex)))
    r = np.round(c)
    if np.max(np.abs(c - r)) > 1e-6:
        raise ValidationError("vector is not in psi(O_K)")
    return r.astype(np.int64)


def algebraic_norm(embedded) -> np.ndarray:
    """|nr_{K/Q}(x)| = prod_i |sigma_i(x)|^2 from embedded coordinates."""
    return np.prod(np.abs(np.asarray(embedded)) ** 2, axis=-1)


def principal_ideal(spec: NumberFieldSpec, element) -> IdealSpec:
    """The ideal x O_K for x given by integral-basis coordinates."""
    xe = embed_element(spec, element)
    rows = [element_coeffs(spec, xe * w) for w in spec.embeddings]
    nr = algebraic_norm(xe)
    return make_ideal(np.array(rows), int(round(float(nr))), True)


def multiply_ideal(spec: NumberFieldSpec, ideal: IdealSpec, element) -> IdealSpec:
    """x I as an ideal spec (basis rows x * b_i)."""
    xe = embed_element(spec, element)
    gens = ideal.coeffs @ spec.embeddings
    rows = [element_coeffs(spec, xe * g) for g in gens]
    nr = int(round(float(algebraic_norm(xe))))
    return make_ideal(np.array(rows), nr * ideal.norm, ideal.principal)


def embed_ring(spec: NumberFieldSpec) -> Lattice:
    return make_lattice(spec.embeddings)


def embed_ideal(spec: NumberFieldSpec, ideal: IdealSpec) -> Lattice:
    if ideal.coeffs.shape != (spec.degree, spec.degree):
        raise DimensionMismatch(f"ideal basis must be {spec.degree} x {spec.degree}")
    L = make_lattice(ideal.coeffs @ spec.embeddings)
    expected = ideal.norm * 2.0**-spec.k * math.sqrt(spec.abs_discriminant)
    if abs(L.volume - expected) > IDENTITY_RTOL * expected:
        raise NormMismatch(f"ideal lattice volume {L.volume:.12g} differs from N(I) 2^-k sqrt|d_K| = {expected:.12g}")
    return L


def default_radius(spec: NumberFieldSpec, ideal: IdealSpec | None = None) -> float:
    norm = 1 if ideal is None else ideal.norm
    return 2.0 * math.sqrt(spec.k) * norm ** (1.0 / (2 * spec.k))


def product_lower_bound(spec: NumberFieldSpec, ideal: IdealSpec | None = None) -> float:
    """Proven lower bound k N(I)^(1/k) for the product form on psi(I) minus 0."""
    norm = 1 if ideal is None else ideal.norm
    return spec.k * norm ** (1.0 / spec.k)


def certificates(spec: NumberFieldSpec, ideal: IdealSpec | None = None) -> dict:
    """Lower bounds on the reduced-norm minimum of psi(I), keyed by group label.

    Block-diagonal groups are subgroups of the diagonal group, so the same
    bound holds for them.
    """
    lb = product_lower_bound(spec, ideal)
    out = {"diagonal": lb}
    for b in range(1, spec.k):
        if spec.k % b == 0 and b > 1:
            out[f"block_diagonal:{b}"] = lb
    return out


@dataclass(frozen=True)
class IdealMinimum:
    value: float
    achiever: LatticePoint
    certified: bool
    abs_norm: int


def min_of_ideal(spec: NumberFieldSpec, ideal: IdealSpec | None = None, search_radius: float | None = None) -> IdealMinimum:
    """min over nonzero x in I of sqrt(|nr(x)| / N(I)), from enumeration."""
    ideal = unit_ideal(spec) if ideal is None else ideal
    L = embed_ideal(spec, ideal)
    radius = default_radius(spec, ideal) if search_radius is None else search_radius
    coeffs, pts = ball_points(L, radius)
    nz = np.any(coeffs != 0, axis=1)
    coeffs, pts = coeffs[nz], pts[nz]
    if not len(coeffs):
        raise EmptySearch(f"no nonzero ideal element within radius {radius:g}")
    nr = algebraic_norm(pts)
    nr_int = np.round(nr)
    bad = np.abs(nr - nr_int) > 1e-6 * np.maximum(1.0, nr)
    if np.any(bad) or np.any(nr_int < 1):
        raise NonIntegerNorm(f"algebraic norm {nr[np.argmax(bad)]!r} is not a positive integer")
    nr_int = nr_int.astype(np.int64)
    if np.any(nr_int % ideal.norm):
        raise NonIntegerNorm(f"an element norm is not divisible by N(I) = {ideal.norm}")
    sq = np.sum(np.abs(pts) ** 2, axis=1)
    j = pick_achiever(coeffs, nr_int.astype(float), sq)
    q = int(nr_int[j]) // ideal.norm
    certified = q == 1 or (q == 2 and ideal.principal is False)
    return IdealMinimum(math.sqrt(q), L.point(coeffs[j]), certified, int(nr_int[j]))


def field_report(spec: NumberFieldSpec, ideal: IdealSpec | None = None, search_radius: float | None = None) -> FieldLatticeReport:
    """Volume, normalised product distance, reduced Hermite invariant and min(I).

    Closed forms come from |d_K|, N(I) and min(I); the enumerated product-form
    minimum is cross-checked against them.
    """
    ideal_ = unit_ideal(spec) if ideal is None else ideal
    k = spec.k
    L = embed_ideal(spec, ideal_)
    radius = default_radius(spec, ideal_) if search_radius is None else search_radius
    mi = min_of_ideal(spec, ideal_, radius)
    nd = 2.0 ** (k / 2) * mi.value / spec.abs_discriminant**0.25
    rh = k * nd ** (2.0 / k)

    F = HomogeneousForm("product_sq", k)
    lb = k * (ideal_.norm * mi.value**2) ** (1.0 / k) if mi.certified else None
    hm = homogeneous_minimum(F, L, radius, lower_bound=lb)
    rh_enum = hm.value / L.volume ** (1.0 / k)
    nd_enum = (hm.value / k) ** (k / 2) / math.sqrt(L.volume)
    agree = abs(rh_enum - rh) <= IDENTITY_RTOL * rh and abs(nd_enum - nd) <= IDENTITY_RTOL * nd
    expected_vol = ideal_.norm * 2.0**-k * math.sqrt(spec.abs_discriminant)
    cert = {
        "volume": abs(L.volume - expected_vol) <= IDENTITY_RTOL * expected_vol,
        "min_I": mi.certified,
        "nd_pmin": mi.certified and hm.certified and agree,
        "rh": mi.certified and hm.certified and agree,
    }
    return FieldLatticeReport(spec.label, k, L.volume, nd, rh, mi.value, cert)


def martinet_report(k: int, G: float = MARTINET_G) -> FieldLatticeReport:
    """Formula-only report for a tower field with |d_K|^(1/k) = G^2 (not constructed)."""
    return FieldLatticeReport(
        f"virtual tower field (G={G})", k, None, (2.0 / G) ** (k / 2), 2.0 * k / G, 1.0,
        {"volume": False, "min_I": False, "nd_pmin": False, "rh": False}, mode="virtual",
    )


def optimal_ideal_values(k: int, abs_discriminant: int, n_min: int) -> tuple[float, float]:
    """(Nd, rh) of an ideal maximising the product distance, from |d_K| and N_min(K)."""
    nd = 2.0 ** (k / 2) * math.sqrt(n_min) / abs_discriminant**0.25
    rh = 2.0 * k * n_min ** (1.0 / k) / abs_discriminant ** (1.0 / (2 * k))
    return nd, rh


# -- 2x2 MIMO lattice from a cyclic division algebra --------------------------


GOLDEN_THETA = (1 + math.sqrt(5)) / 2
GOLDEN_THETA_BAR = (1 - math.sqrt(5)) / 2


def golden_code_lattice() -> tuple[Lattice, dict]:
    """Lattice of 2x2 codewords [[x, y], [i s(y), s(x)]] with x, y in Z[i][theta].

    Here theta = (1 + sqrt5)/2 and s swaps theta with its conjugate.  The
    codeword occupies (x1, x2, x3, x4) = (x, i s(y), y, s(x)), so the channel
    matrix acts on the columns (x1, x2) and (x3, x4).  det = x s(x) - i y s(y)
    is a nonzero Gaussian integer for (x, y) != 0 because i is not a relative
    norm from Q(i, sqrt5), so 2|det| >= 2 on every nonzero point.  The
    block-product form dominates 2|det| (Hadamard), so the same bound applies
    to it; both are attained at x = 1, y = 0.

    Returns the lattice (volume 25) and its certificate dictionary.
    """
    t, tb = GOLDEN_THETA, GOLDEN_THETA_BAR
    gens = []
    for u in (1, 1j):
        gens.append([u, 0, 0, u])                       # x = u
        gens.append([u * t, 0, 0, u * tb])              # x = u theta
        gens.append([0, 1j * u, u, 0])                  # y = u
        gens.append([0, 1j * u * tb, u * t, 0])         # y = u theta
    L = make_lattice(gens)
    return L, {"mimo2_block": 2.0, "block_diagonal:2": 2.0}


def golden_determinants(points) -> np.ndarray:
    """x1 x4 - x2 x3 for golden-code lattice points (Gaussian integers)."""
    p = np.asarray(points)
    return p[..., 0] * p[..., 3] - p[..., 1] * p[..., 2]
