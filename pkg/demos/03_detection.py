"""Threshold calibration: the matching-bit count from unwatermarked
latents is Binomial(k, 1/2), so false positive rates have a closed form
and thresholds can be solved for any target rate.
"""

import numpy as np

import latentmark as lm
from latentmark.simulate import match_counts_random_latents

cfg = lm.CapacityConfig(4, 64, 64, f_c=1, f_hw=8, l=1)
rng = np.random.default_rng(3)

print("threshold table for k=256:")
print("target FPR   tau   FPR(tau)")
for target in (1e-2, 1e-3, 1e-6, 1e-9, 1e-13):
    policy = lm.solve_threshold(cfg.k, target)
    print(f"{target:10.0e}   {policy.tau:3d}   {lm.fpr_detection(policy.tau, cfg.k):.3e}")

# serving N users compounds the false positive rate; solve it exactly
for users in (1, 1000, 10**6):
    policy = lm.solve_threshold(cfg.k, 1e-6, n_users=users)
    print(f"N={users:<8d} tau={policy.tau}")

# empirical check of the null on 20k random latents
material = lm.KeyMaterial.generate(rng)
accs = match_counts_random_latents(material, cfg, trials=20_000, rng=rng)
policy = lm.solve_threshold(cfg.k, 1e-2)
print(f"\nnull Acc: mean {accs.mean():.2f} (128 expected), sd {accs.std():.2f} (8 expected)")
print(f"empirical P(Acc > {policy.tau}) = {(accs > policy.tau).mean():.5f}, "
      f"theory {lm.fpr_detection(policy.tau, cfg.k):.5f}")

# end to end: detect on a watermarked latent, an attacked one, and noise
payload = lm.random_payload(cfg, rng)
policy = lm.solve_threshold(cfg.k, 1e-6)
z = lm.embed(payload, material, cfg, rng)
hit = lm.apply_channel(z, lm.parse_channel("gauss:0.8+flip:0.1"), rng)
noise = rng.standard_normal(cfg.latent_shape)
for name, tensor in [("clean", z), ("attacked", hit), ("unrelated noise", noise)]:
    report = lm.detect(tensor, material, payload, cfg, policy)
    print(f"{name:16s} acc={report.acc:3d}  detected={report.detected}")
