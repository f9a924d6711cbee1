"""Ideal lattices from cyclotomic fields and their certified fading invariants."""
# %%
from latfade import cyclotomic_field, field_report, golden_code_lattice, martinet_report
from latfade.numfield import certificates, embed_ring

# %% Volume, |d_K|, product distance and reduced Hermite invariant, all certified.
print(f"{'field':>12} {'k':>2} {'|d_K|':>10} {'volume':>10} {'Nd':>10} {'rh':>10}  certified")
for n in (3, 4, 5, 8, 12, 16):
    spec = cyclotomic_field(n)
    r = field_report(spec)
    print(f"{r.label:>12} {r.k:>2} {spec.abs_discriminant:>10} {r.volume:>10.4f} {r.nd_pmin:>10.6f} "
          f"{r.rh:>10.6f}  {all(r.certified.values())}")

# %% The product-form bound that certifies the diagonal invariant comes from |nr(x)| >= 1.
print("certificates for Q(zeta_8):", certificates(cyclotomic_field(8)))

# %% Along a tower with root discriminant G^2, rh = 2k/G, so c = rh/(2k) = 1/G stays fixed (formula only).
for k in (10, 100, 1000):
    print(f"virtual tower field, k={k}: rh = {martinet_report(k).rh:.4f}")

# %% A 2x2 MIMO lattice: codewords [[x, y], [i s(y), s(x)]] have nonzero Gaussian-integer determinants.
L, certs = golden_code_lattice()
print("golden-code lattice volume:", round(L.volume, 9), "certificates:", certs)
print("Z[zeta_8] volume:", embed_ring(cyclotomic_field(8)).volume)
