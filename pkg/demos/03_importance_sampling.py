"""
Standard versus quantile-stratified importance sampling
=======================================================

Both estimators average the importance function H(x) f(x) / g(x) over a
sample from the proposal g; they differ only in whether that sample is IID
or quantile-stratified.  On smooth problems the stratified variant cuts the
standard error by an order of magnitude at the same cost.
"""

import numpy as np

from qstrat import (
    beta_log_integral,
    estimate_replicates,
    gamma_gaussian_integral,
    importance_weight,
    taylor_variance_approx,
)

for make in (beta_log_integral, gamma_gaussian_integral):
    prob = make()
    print(f"--- {prob.label}: target {prob.target!r}, proposal {prob.proposal!r}")
    print(f"    true value mu = {prob.true_value:.7f}")

    # The importance function evaluated where the proposal puts mass.
    xs = prob.proposal.quantile(np.array([0.1, 0.25, 0.5, 0.75, 0.9]))
    print("    importance function on proposal quantiles:",
          np.round(importance_weight(xs, prob), 4))

    # 300 replicate estimates from m = 100 points each.
    for method in ("iid", "qs"):
        study = estimate_replicates(prob, m=100, method=method,
                                    replicates=300, seed=20_000)
        print(f"    {method:<4} mean={study.mean:+.7f}  stderr={study.std_err:.6f}"
              f"  rmse={study.rmse:.6f}")
    print()

# The first-order picture: linearizing the composition G = importance
# function o proposal quantile around u = 1/2 predicts variances
# G'(1/2)^2/(12 m) for IID and G'(1/2)^2/(12 m^3) for QS.
print("first-order variance scale for unit slope, m = 100:")
print(f"  iid: {taylor_variance_approx(1.0, 100, 'iid'):.2e}")
print(f"  qs:  {taylor_variance_approx(1.0, 100, 'qs'):.2e}"
      "   (smaller by exactly 1/m^2)")

# An exactly-linear composition attains the QS approximation.
from qstrat.sampling import qs_uniform_batches

a, b, m = 2.0, 1.0, 10
rng = np.random.default_rng(3)
u, _ = qs_uniform_batches(m, 100_000, rng)
var_hat = (a * u + b).mean(axis=1).var(ddof=1)
print(f"\naffine integrand over a uniform proposal, m = 10:")
print(f"  replicate variance {var_hat:.3e} vs predicted "
      f"{taylor_variance_approx(a, m, 'qs'):.3e}")
