"""
Switching on a critical third term
==================================

With ``p = 2*(s3) - 1`` the third term is critical too, and the fibering
root is no longer guaranteed unique.  Starting from ``lambda3 = 0`` and
stepping ``lambda3`` down, each solve is warm-started from the previous one.
The energy moves by roughly ``d/(p+1)`` per unit of ``lambda3``.
"""

# %%
from nehari import DomainSpec, ProblemParams, SolveConfig, build, continuation_in_lambda3

P = ProblemParams(3, 1.0, 0.5, 0.0, 5.0, 1.0, 1.0, 0.0, continuation=True)
grid = build(DomainSpec.perturbed(1.0, (-1.0, -1.0)), 1 / 8)
path = [0.0, -1e-3, -2e-3, -4e-3]
reports = continuation_in_lambda3(grid, P, path, SolveConfig(symmetrize=True))

prev = None
for lam, rep in zip(path, reports):
    line = f"lambda3 {lam:+.0e}: energy {rep.energy:.8f}  min value {rep.u_star.values.min():.2e}"
    if prev is not None:
        predicted = prev.quad.d / (P.p + 1) * abs(lam - prev.params.lambda3)
        line += f"  change {rep.energy - prev.energy:.2e} (envelope {predicted:.2e})"
    print(line)
    prev = rep
