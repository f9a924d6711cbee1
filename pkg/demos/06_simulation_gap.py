"""ML decoding over fading channels, the distance inequality, and gap-to-capacity reports."""
# %%
import math

from latfade import carve, cyclotomic_field, embed_ring, gap_report, run_experiment, ExperimentConfig
from latfade.channels import ChannelModel, group_of
from latfade.lattice import scale
from latfade.numfield import certificates
from latfade.sim import certified_rh, martinet_gap

# %% Unit-volume Z[zeta_8] with certified diagonal invariant rh = 1.
spec = cyclotomic_field(8)
L = embed_ring(spec)
c = L.volume ** -0.25
Ln = scale(L, c)
certs = {g: v * c * c for g, v in certificates(spec).items()}
model = ChannelModel("iid_rayleigh_diag", 2)

# %% Error rate falls as alpha grows; the faded distance bound is never violated.
for alpha in (1.6, 2.0, 2.5, 3.0):
    code = carve(Ln, alpha, 16.0, certificates=certs)
    rh = certified_rh(code, group_of(model))
    agg = run_experiment(ExperimentConfig(code, model, 20_000, seed=1, rh=rh))
    rep = gap_report(code, model, agg.mu_hat, rh / (2 * code.k), capacity_samples=200_000)
    print(f"alpha={alpha}: rate {rep.rate_bits:.3f} (threshold {rep.threshold_bits:.3f}, capacity "
          f"{rep.capacity_bits:.3f}) P_e {agg.error_rate:.4f} [{agg.ci_lo:.4f}, {agg.ci_hi:.4f}] "
          f"violations {agg.violations}")

# %% Along the tower with G = 92.368 the gap to capacity stays below a constant.
print(f"constant gap: {martinet_gap(92.368):.3f} bits;  c = 1/(pi e) gives threshold log2 P - 1:",
      gap_report(code, ChannelModel("awgn", 2), 0.0, 1 / (math.pi * math.e)).threshold_bits,
      "at P =", code.power_P)
