"""
The fibering map and the Nehari projection
==========================================

Every nonzero field ``u`` is summarised by four numbers: its Dirichlet
energy ``a`` and three weighted integrals ``b, c, d``.  Along the ray
``t u`` the Nehari functional factors as ``t^2 g(t)`` with

    g(t) = a - lambda1 b t^(q1-2) - lambda2 c t^(q2-2) - lambda3 d t^(p-1)

so projecting onto the manifold means finding the positive root of ``g``.
"""

# %%
# One quadruple, four sign patterns.  In each supported case ``g`` has
# exactly one sign change on a geometric scan from 2^-64 to 2^64.
import numpy as np

from nehari import ProblemParams, classify_case, project
from nehari.fibering import g_eval, scan_grid, sign_changes
from nehari.functional import Quadruple

quad = Quadruple(a=2.0, b=0.7, c=1.3, d=0.4)
settings = [(1.0, 1.0, 2.0), (1.0, -1.0, 2.0), (-1.0, 1.0, 4.0), (-1.0, -1.0, 2.0)]
for lam1, lam3, p in settings:
    P = ProblemParams(N=3, s1=1.0, s2=0.5, s3=0.0, p=p, lambda1=lam1, lambda2=1.0, lambda3=lam3)
    root = project(quad, P)
    n = sign_changes(quad, P, scan_grid())
    print(f"{classify_case(P)}: t_u = {root.t_u:.12f}  g(t_u) = {root.residual:+.1e}  "
          f"sign changes = {n}  certified = {root.certified_unique}")

# %%
# Beyond the root ``g`` stays negative, so ``t -> energy(t u)`` has a single
# interior maximum on every ray.
P = ProblemParams(3, 1.0, 0.5, 0.0, 2.0, 1.0, 1.0, 1.0)
t_u = project(quad, P).t_u
ts = t_u * np.array([0.5, 0.9, 1.0, 1.1, 2.0, 10.0])
for t, g in zip(ts, g_eval(quad, P, ts)):
    print(f"t = {t:8.4f}   g = {g:+.6f}")
