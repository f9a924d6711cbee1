import json

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from latfade.errors import DimensionMismatch, NonPositiveScale, RankDeficient
from latfade.lattice import (
    ball_points, enumerate_ball, from_real_basis, hermite_invariant, lattice_from_dict, lattice_to_dict,
    lll_reduce, make_lattice, normalize_volume, scale, shortest_vector_sq, to_complex, to_real,
)

from conftest import brute_force_ball


def test_real_complex_roundtrip():
    x = np.array([1 + 2j, -3.5 + 0.25j])
    assert np.allclose(to_real(x), [1, 2, -3.5, 0.25])
    assert np.allclose(to_complex(to_real(x)), x)


def test_gaussian_integer_volume(gaussian_integers):
    assert gaussian_integers.k == 1
    assert gaussian_integers.volume == pytest.approx(1.0)


def test_hexagonal(hexagonal):
    assert hexagonal.volume == pytest.approx(np.sqrt(3) / 2, rel=1e-12)
    sv, _ = shortest_vector_sq(hexagonal)
    assert sv == pytest.approx(1.0)
    assert hermite_invariant(hexagonal) == pytest.approx(2 / np.sqrt(3), rel=1e-12)


def test_rank_deficient():
    with pytest.raises(RankDeficient):
        make_lattice([[1], [2]])


def test_wrong_generator_count():
    with pytest.raises(DimensionMismatch):
        make_lattice([[1, 0], [0, 1]])


@pytest.mark.parametrize("radius,count", [(1.0, 5), (1.5, 9), (0.5, 1)])
def test_gaussian_ball_counts(gaussian_integers, radius, count):
    assert len(enumerate_ball(gaussian_integers, radius)) == count


def test_ball_off_centre(gaussian_integers):
    pts = enumerate_ball(gaussian_integers, 0.75, center=np.array([0.5 + 0.5j]))
    assert sorted(p.coeffs for p in pts) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_ball_output_is_lexicographic(gaussian_integers):
    coeffs = [p.coeffs for p in enumerate_ball(gaussian_integers, 2.5)]
    assert coeffs == sorted(coeffs)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]))
def test_enumeration_matches_brute_force(seed, k):
    rng = np.random.default_rng(seed)
    B = np.eye(2 * k) + 0.4 * rng.standard_normal((2 * k, 2 * k))
    assume(np.linalg.cond(B) < 8)
    L = from_real_basis(B)
    radius = float(rng.uniform(0.5, 2.0))
    centre = rng.uniform(-1, 1, 2 * k)
    # box bound from the dual basis: |c_i| <= (radius + |centre|) * ||row i of B^-1 transposed||
    box = int(np.ceil((radius + np.linalg.norm(centre)) * np.max(np.linalg.norm(np.linalg.inv(B), axis=0)))) + 1
    expected = brute_force_ball(B, radius, centre, box)
    coeffs, _ = ball_points(L, radius, to_complex(centre))
    assert {tuple(c) for c in coeffs.tolist()} == expected


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lll_is_unimodular(seed):
    rng = np.random.default_rng(seed)
    B = rng.integers(-20, 21, (4, 4)).astype(float)
    if abs(np.linalg.det(B)) < 1:
        return
    Bred, U = lll_reduce(B)
    assert np.allclose(U @ B, Bred)
    assert abs(round(np.linalg.det(U))) == 1
    assert np.all(U == np.round(U))
    # first reduced vector within the LLL factor of the true shortest
    sv, _ = shortest_vector_sq(from_real_basis(B))
    assert np.sum(Bred[0] ** 2) <= 2 ** 3 * sv * (1 + 1e-9)


def test_shortest_vector_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(20):
        B = np.eye(4) + 0.5 * rng.standard_normal((4, 4))
        if np.linalg.cond(B) > 8:
            continue
        sv, _ = shortest_vector_sq(from_real_basis(B))
        box = int(np.ceil(np.sqrt(sv) * np.max(np.linalg.norm(np.linalg.inv(B), axis=0)))) + 1
        pts = brute_force_ball(B, np.sqrt(sv) * 1.5, np.zeros(4), box)
        norms = [np.sum((np.array(c) @ B) ** 2) for c in pts if any(c)]
        assert sv == pytest.approx(min(norms), rel=1e-9)


def test_scale_and_normalize(hexagonal):
    assert scale(hexagonal, 2).volume == pytest.approx(4 * hexagonal.volume)
    assert normalize_volume(hexagonal).volume == pytest.approx(1.0)
    assert hermite_invariant(scale(hexagonal, 3.7)) == pytest.approx(hermite_invariant(hexagonal))
    with pytest.raises(NonPositiveScale):
        scale(hexagonal, 0)


def test_json_roundtrip(hexagonal):
    d = json.loads(json.dumps(lattice_to_dict(hexagonal, certificates={"diagonal": 1.0})))
    L2 = lattice_from_dict(d)
    assert np.allclose(L2.basis, hexagonal.basis)
    with pytest.raises(DimensionMismatch):
        lattice_from_dict({"k": 2, "generators": [[1, 0], [0, 1]]})
