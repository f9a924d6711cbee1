"""Carving finite codes from shifted lattices under an average power constraint."""
# %%
import numpy as np

from latfade import carve, find_shift, guaranteed_size, make_lattice, normalize_volume
from latfade.numfield import cyclotomic_field, embed_ring

# %% Z[i] with alpha = 1, P = 1: the unit disc holds five points; a half-shift leaves four.
Zi = make_lattice([[1], [1j]])
print("no shift:", carve(Zi, 1.0, 1.0).size, " shift 0.5+0.5i:", carve(Zi, 1.0, 1.0, shift=[0.5 + 0.5j]).size)

# %% A shift search reaches the volume guarantee C_k P^k / alpha^2k.
L = normalize_volume(embed_ring(cyclotomic_field(8)))
for alpha in (1.0, 0.7, 0.5):
    s = find_shift(L, alpha, 2.0, 32, seed=1)
    print(f"alpha={alpha}: |C|={s.code.size:5d}  guarantee={guaranteed_size(2, alpha, 2.0):8.1f}  "
          f"rate={s.code.rate_bits:.3f} bits  met={s.guarantee_met}")

# %% Every codeword satisfies the power constraint ||x||^2 / k <= P.
code = find_shift(L, 0.5, 2.0, 8).code
print("max ||x||^2/k:", np.max(np.sum(np.abs(code.codewords) ** 2, axis=1)) / code.k)
