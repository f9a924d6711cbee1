import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latfade._rng import complex_normal
from latfade.errors import EmptySearch, UnsupportedGroup, ValidationError, ZeroVector
from latfade.forms import (
    HomogeneousForm, MatrixGroupSpec, apply_matrix, evaluate, form_from_json, form_to_dict, group_from_label,
    homogeneous_minimum, reduced_hermite_invariant, reduced_norm_sq_closed_form, reduced_norm_sq_numeric,
    sample_member,
)
from latfade.lattice import make_lattice

GROUPS = [
    ("identity", 2), ("diagonal", 2), ("diagonal", 4), ("block_diagonal:2", 4), ("block_diagonal:3", 6),
    ("mimo2_block", 4), ("mimo2_block", 8), ("mimo2_block:independent", 8),
]


def test_product_form_example():
    F = HomogeneousForm("product_sq", 2)
    assert evaluate(F, [2, 0.5]) == pytest.approx(2.0)


def test_mimo_orderings():
    ch = HomogeneousForm("mimo_det2", 4)
    pr = HomogeneousForm("mimo_det2", 4, ordering="printed")
    assert evaluate(ch, [1, 0, 0, 1]) == pytest.approx(2.0)
    assert evaluate(ch, [1, 1, 0, 0]) == pytest.approx(0.0)
    assert evaluate(pr, [1, 1, 0, 0]) == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        HomogeneousForm("mimo_det2", 8, ordering="printed")


def test_printed_ordering_not_invariant():
    # the channel action changes x1 x2 - x3 x4 but preserves x1 x4 - x2 x3
    G = MatrixGroupSpec("mimo2_block", 4)
    A = sample_member(G, 3)
    x = np.array([1, 2j, -1, 0.5])
    pr = HomogeneousForm("mimo_det2", 4, ordering="printed")
    ch = HomogeneousForm("mimo_det2", 4)
    assert evaluate(ch, apply_matrix(A, x)) == pytest.approx(evaluate(ch, x), rel=1e-10)
    assert evaluate(pr, apply_matrix(A, x)) != pytest.approx(evaluate(pr, x), rel=1e-3)


@pytest.mark.parametrize("label,k", GROUPS)
def test_closed_form_is_group_invariant(label, k):
    G = group_from_label(label, k)
    rng = np.random.default_rng(0)
    x = complex_normal(rng, (20, k))
    base = reduced_norm_sq_closed_form(G, x)
    for s in range(5):
        A = sample_member(G, rng)
        assert abs(abs(np.linalg.det(A)) - 1) < 1e-9
        assert np.allclose(reduced_norm_sq_closed_form(G, apply_matrix(A, x)), base, rtol=1e-9)


@pytest.mark.parametrize("label,k", GROUPS)
def test_closed_form_is_lower_bound_over_members(label, k):
    G = group_from_label(label, k)
    rng = np.random.default_rng(1)
    x = complex_normal(rng, (50, k))
    cf = reduced_norm_sq_closed_form(G, x)
    for _ in range(20):
        A = sample_member(G, rng, spread=2.0)
        assert np.all(np.sum(np.abs(apply_matrix(A, x)) ** 2, axis=-1) >= cf * (1 - 1e-12))


@pytest.mark.parametrize("label,k", GROUPS)
def test_numeric_oracle_agrees(label, k):
    G = group_from_label(label, k)
    rng = np.random.default_rng(2)
    for x in complex_normal(rng, (5, k)):
        num = reduced_norm_sq_numeric(G, x)
        assert num == pytest.approx(float(reduced_norm_sq_closed_form(G, x)), rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(GROUPS), st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.floats(0, 2 * np.pi))
def test_degree_two_homogeneity(group, seed, r, phi):
    G = group_from_label(*group)
    x = complex_normal(np.random.default_rng(seed), group[1])
    a = r * np.exp(1j * phi)
    assert reduced_norm_sq_closed_form(G, a * x) == pytest.approx(r**2 * reduced_norm_sq_closed_form(G, x),
                                                                   rel=1e-9)


def test_zero_vector_rejected():
    with pytest.raises(ZeroVector):
        reduced_norm_sq_numeric(MatrixGroupSpec("diagonal", 2), [0, 0])


def test_bad_group():
    with pytest.raises(UnsupportedGroup):
        MatrixGroupSpec("orthogonal", 2)
    with pytest.raises(ValidationError):
        MatrixGroupSpec("block_diagonal", 5, block=2)


def test_minimum_on_gaussian_integers():
    L = make_lattice([[1], [1j]])
    res = homogeneous_minimum(HomogeneousForm("euclidean_sq", 1), L, 2.0)
    assert res.value == pytest.approx(1.0) and res.certified
    assert res.achiever.coeffs == (1, 0)


def test_uncertified_without_bound():
    Z2 = make_lattice(np.eye(4)[:, ::2] + 1j * np.eye(4)[:, 1::2])
    res = reduced_hermite_invariant(MatrixGroupSpec("diagonal", 2), Z2, 2.0)
    # Z[i]^2 has points with a zero coordinate, so the product minimum is 0
    assert res.value == pytest.approx(0.0)
    assert not res.certified


def test_lower_bound_certifies_and_guards():
    L = make_lattice([[1], [1j]])
    G = MatrixGroupSpec("diagonal", 1)
    assert reduced_hermite_invariant(G, L, 2.0, lower_bound=1.0).certified
    with pytest.raises(ValidationError):
        reduced_hermite_invariant(G, L, 2.0, lower_bound=1.5)


def test_empty_search_suggests_radius():
    L = make_lattice([[1], [1j]])
    with pytest.raises(EmptySearch, match="radius"):
        homogeneous_minimum(HomogeneousForm("euclidean_sq", 1), L, 0.01)


def test_form_json_roundtrip():
    F = HomogeneousForm("block_product_sq", 6, block_size=3)
    import json
    assert form_from_json(json.dumps(form_to_dict(F))) == F
