"""
Boundary test functions
=======================

A half-space profile is squeezed by ``eps``, bent onto the curved boundary by
``x_N -> x_N - phi(x')`` and cut off smoothly.  For small ``eps`` the largest
energy along its ray falls below the half-space level; far out on the ray the
energy is very negative.
"""

# %%
from nehari import DomainSpec, ProblemParams, SolveConfig, solve_half_space
from nehari.analysis import test_function_scan

P = ProblemParams(3, 1.0, 0.5, 0.0, 2.0, 1.0, 1.0, -1e-3)
hs = solve_half_space(P, 1.0, 1 / 8, SolveConfig(positive_part=True))
spec = DomainSpec.perturbed(1.0, (-1.0, -1.0))
rep = test_function_scan(hs.u_star, spec, P, [0.5, 0.35, 0.25, 0.2], c_limit=hs.energy)

print(f"half-space level {rep.c_limit:.6f}")
for eps, top, far in zip(rep.epsilons, rep.max_energy_over_t, rep.energy_at_top):
    print(f"eps {eps:.2f}: max over the ray {top:.6f}  energy at the top of the t-grid {far:.2e}")
print(f"K1 = {rep.K1:.4f}  K2 = {rep.K2:.4f}  K3 = {rep.K3:.4f}")
