"""Reduced norms: how small can a fading matrix of unit determinant make a vector?"""
# %%
import numpy as np

from latfade import group_from_label, reduced_norm_sq_closed_form, reduced_norm_sq_numeric
from latfade._rng import complex_normal, rng_for

# %% For diagonal fading the answer is k times the geometric mean of |x_i|^2.
G = group_from_label("diagonal", 2)
x = np.array([2.0, 0.5])
print("diagonal, x = (2, 0.5):", reduced_norm_sq_closed_form(G, x), "(numeric:", reduced_norm_sq_numeric(G, x), ")")

# %% A vector with a zero coordinate can be faded away entirely.
print("diagonal, x = (1, 0):", reduced_norm_sq_closed_form(G, [1, 0]))

# %% Each group's closed form against direct minimisation over the group.
for label, k in [("diagonal", 4), ("block_diagonal:2", 4), ("mimo2_block", 4), ("mimo2_block", 8)]:
    G = group_from_label(label, k)
    X = complex_normal(rng_for(1), (5, k))
    closed = reduced_norm_sq_closed_form(G, X)
    numeric = np.array([reduced_norm_sq_numeric(G, v) for v in X])
    print(f"{label:>18} k={k}: max relative gap {np.max(np.abs(numeric - closed) / closed):.1e}")

# %% The 2x2 MIMO form is 2|x1 x4 - x2 x3|: the determinant of the 2x2 codeword matrix.
G = group_from_label("mimo2_block", 4)
print("mimo2, x = (1, 0, 0, 1):", reduced_norm_sq_closed_form(G, [1, 0, 0, 1]))
print("mimo2, x = (1, 1, 0, 0):", reduced_norm_sq_closed_form(G, [1, 1, 0, 0]), "(rank-one codeword)")
