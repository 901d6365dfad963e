"""
Smoothness, tuning levels and convergence
=========================================

Besov parameters fix the theoretical levels and thresholds of the
estimators.  A small rate study then checks that the integrated squared
error of the linear estimator falls with the sample size.
"""

from wavedens.besov import BesovParams, holder_embedding_s, linear_level, rate_params
from wavedens.experiments import ExperimentConfig, run_rates

# levels and thresholds for s = 1, p = 2 measured in L^2
rp = rate_params(BesovParams(1, 2), 2, 400)
print(f"eps {rp.eps}, alpha {rp.alpha:.4f}, j0 {rp.j0}, j1 {rp.j1}, K0 {rp.K0:.4f}")
for j, lam in sorted(rp.lambda_bar.items()):
    print(f"  threshold at level {j}: {lam:.4f}")

# a Lipschitz density in two dimensions has s' = 1/2, which sets the
# linear level 4^j ~ n^(1/2)
s_prime = holder_embedding_s(1, 2)
for n in (400, 1225, 2500, 4225):
    print(f"n={n}: linear level {linear_level(s_prime, n)}")

# mean ISE for a product triangular density sampled through two
# dependent fields; a handful of replications keeps this quick
cfg = ExperimentConfig(sizes=[20, 35, 50], reps=4, iterations=200)
res = run_rates(cfg, "tent")
for n, j, m in zip(res["n"], res["j"], res["mean_ise"]):
    print(f"n={n} j={j} mean ISE {m:.4f}")
print(f"log-log slope {res['slope']:.3f}, theory {res['predicted_slope']:.3f}")
