"""Fading channel models and the first-order statistic mu = E (1/k) log2 det(H H^H)."""
# %%
import numpy as np

from latfade import ChannelModel, estimate_mu, model_from_label, sample
from latfade.channels import RAYLEIGH_MU

# %% Four models; the draw for each acts on C^4.
for label in ("awgn", "rayleigh", "block2", "mimo2"):
    d = sample(model_from_label(label, 4), seed=3)
    print(f"{label:>8}: log2|det H|^2 = {d.log_det_sq:7.3f}; nonzero pattern\n{(np.abs(d.H) > 0).astype(int)}")

# %% Rayleigh mu is -gamma / ln 2 for every model with unit-variance Rayleigh entries on the diagonal.
print("exact Rayleigh mu:", RAYLEIGH_MU)
for label in ("rayleigh", "block2"):
    est = estimate_mu(model_from_label(label, 4), 200_000, seed=1)
    print(f"{label:>8}: mu_hat = {est.mu_hat:.4f} +- {est.stderr:.4f}")
print("mimo2   :", estimate_mu(ChannelModel("mimo2_block", 4), 200_000).mu_hat)
