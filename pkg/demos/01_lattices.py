"""Lattices in C^k: construction, volume, enumeration and the Hermite invariant."""
# %%
import numpy as np

from latfade import enumerate_ball, hermite_invariant, make_lattice, normalize_volume, shortest_vector_sq

# %% The Gaussian integers Z[i] have unit volume; five points lie in the unit ball.
Zi = make_lattice([[1], [1j]])
print("Z[i] volume:", Zi.volume)
print("points with |x| <= 1:", [complex(p.embedding[0]) for p in enumerate_ball(Zi, 1.0)])

# %% The hexagonal lattice is the densest packing in C, so its Hermite invariant beats Z[i].
hexagonal = make_lattice([[1], [0.5 + np.sqrt(3) / 2 * 1j]])
print("hexagonal volume:", hexagonal.volume)
print("Hermite invariant: Z[i] =", hermite_invariant(Zi), " hexagonal =", hermite_invariant(hexagonal))

# %% A random lattice in C^2, rescaled to unit volume; the invariant does not change.
rng = np.random.default_rng(0)
gens = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
L = make_lattice(gens)
sv, pt = shortest_vector_sq(L)
print(f"random lattice: volume {L.volume:.4f}, shortest |x|^2 {sv:.4f} at coefficients {pt.coeffs}")
print("h before/after normalisation:", hermite_invariant(L), hermite_invariant(normalize_volume(L)))
