"""How the implicit iteration acts on a single spectral component.

After n steps with parameters alpha_1..alpha_n, a component with eigenvalue
lam of the preconditioned operator is damped by r_n(lam) and the data enter
through g_n(lam). Small lam (noise-dominated directions) stay suppressed until
sigma_n = sum(1/alpha_k) grows past 1/lam.
"""

import numpy as np

from hilbert_iter import AlphaSequence, check_properties, eval_g, eval_r

seq = AlphaSequence((1.0, 0.5, 0.25, 0.125))
print(f"alphas {seq.alphas}  ->  sigma_n = {seq.sigma_n:g}")

lam = np.logspace(-4, 2, 7)
print(f"\n{'lambda':>10} {'r_n':>12} {'lambda*g_n':>12}")
for l, r, g in zip(lam, eval_r(seq, lam), eval_g(seq, lam)):
    print(f"{l:10.1e} {r:12.4e} {l * g:12.4e}")

grid = np.logspace(-10, 2, 400)
worst = max(check_properties(seq, grid).values())
print(f"\nlargest violation of the filter inequalities on a 400-point grid: {worst:.1e}")
