"""One noisy deriv2 problem solved three ways, with the discrepancy trace.

Noise is 1% of ||y||; every method stops once ||A x - y_delta|| <= 1.1 delta.
"""

from hilbert_iter import IterationConfig, add_noise, algorithm1, make_problem, newton_dp_tikhonov, run_geometric

problem = make_problem("ii", m=400)
noisy = add_noise(problem.y, sigma=0.01, seed=1)
cfg = IterationConfig(s=1.0, C=1.1)
print(f"m = {problem.m}, delta = {noisy.delta:.3e}, target d <= {1.1 * noisy.delta:.3e}\n")

runs = {
    "Tikhonov + Newton": newton_dp_tikhonov(problem, noisy, cfg),
    "Newton-driven implicit iteration": algorithm1(problem, noisy, cfg),
    "geometric alphas from 1": run_geometric(problem, noisy, cfg, alpha1=1.0, q=0.5),
}
for name, rep in runs.items():
    print(f"{name}: n = {rep.n}, alpha_n = {rep.alpha_n:.3e}, error = {rep.e_n:.3e}")
    for row in rep.trace:
        print(f"    k={row.k:2d}  alpha={row.alpha:.3e}  d={row.d:.3e}  e={row.e:.3e}")
    print()
