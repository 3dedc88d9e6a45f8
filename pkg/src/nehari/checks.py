"""Verification routines shared by ``nehari verify`` and the acceptance suite.

Each check returns a :class:`CheckResult`; none of them raise on a failed
comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import analysis, fibering
from .functional import Quadruple, gradient, nehari_of, phi_of, quadruple
from .grid import DomainSpec, Field, Grid, dirichlet_energy, dirichlet_pairing
from .params import CaseTag, ProblemParams, classify_case, critical_exponent
from .solver import SolveConfig, minimize, solve_half_space


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""

    def line(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        extra = f" {self.detail}" if self.detail else ""
        return f"{word} {self.name} residual={self.residual:.3e}{extra}"


# ------------------------------------------------------------ fibering

def random_case_params(case: CaseTag, rng: np.random.Generator, N: int = 3) -> ProblemParams:
    """Random admissible parameters inside one of the four cases.

    Weights are kept in ``(0, 1.6]`` and ``p >= 1.2`` so that no exponent
    ``q - 2`` degenerates; near-degenerate exponents push the root far past
    ``2**64``.
    """
    while True:
        s1 = rng.uniform(0.1, 1.6)
        s2 = rng.uniform(0.05, s1 - 0.05)
        s3 = rng.uniform(0.0, 1.6)
        q1, q2, q3 = (critical_exponent(N, s) for s in (s1, s2, s3))
        lo, hi = 1.2, q3 - 1.0
        if case is CaseTag.CASE2:
            hi = min(hi, q1 - 1.0)
        elif case is CaseTag.CASE3:
            lo = max(lo, q1 - 1.0)
        elif case is CaseTag.CASE4:
            hi = min(hi, q2 - 1.0)
        width = hi - lo
        if width <= 1e-6:
            continue
        p = lo + width * rng.uniform(0.001, 0.999)
        sign1 = 1.0 if case in (CaseTag.CASE1, CaseTag.CASE2) else -1.0
        sign3 = 1.0 if case in (CaseTag.CASE1, CaseTag.CASE3) else -1.0
        params = ProblemParams(N, s1, s2, s3, p, sign1 * rng.uniform(0.1, 3.0),
                               rng.uniform(0.1, 3.0), sign3 * rng.uniform(0.1, 3.0))
        if classify_case(params) is case:
            return params


def random_quadruple(rng: np.random.Generator) -> Quadruple:
    return Quadruple(*np.exp(rng.uniform(-3.0, 3.0, 4)))


def scan_roots(quad: Quadruple, params: ProblemParams, n: int = 10_000):
    """Independent oracle: sign scan of the fibering map on a geometric grid plus
    Brent refinement of every sign change.  Returns the list of roots and the
    value of ``g`` at the top of the grid."""
    q1, q2, q3 = params.exponents
    coef = [(params.lambda1 * quad.b, q1 - 2), (params.lambda2 * quad.c, q2 - 2),
            (params.lambda3 * quad.d, q3 - 2)]

    def g(t):
        return quad.a - sum(k * np.power(t, e) for k, e in coef)

    ts = np.geomspace(2.0**-64, 2.0**64, n)
    vals = g(ts)
    roots = []
    for i in np.flatnonzero(np.sign(vals[1:]) != np.sign(vals[:-1])):
        roots.append(brentq(g, ts[i], ts[i + 1], xtol=1e-300, rtol=1e-15, maxiter=500))
    return roots, float(vals[-1])


def fibering_check(n_per_case: int = 500, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, failures, ambiguous = 0.0, 0, 0
    for case in (CaseTag.CASE1, CaseTag.CASE2, CaseTag.CASE3, CaseTag.CASE4):
        for _ in range(n_per_case):
            while True:
                params = random_case_params(case, rng)
                quad = random_quadruple(rng)
                roots, top = scan_roots(quad, params)
                # roots beyond the overflow guard are outside the scan window
                if roots and 2.0**-60 < roots[0] < 2.0**60:
                    break
            try:
                root = fibering.project(quad, params)
            except fibering.AmbiguousRoot:
                ambiguous += 1
                continue
            if len(roots) != 1 or top >= 0 or not root.certified_unique:
                failures += 1
                continue
            worst = max(worst, abs(root.t_u - roots[0]) / roots[0])
    ok = failures == 0 and ambiguous == 0 and worst <= 1e-10
    return CheckResult("fibering", ok, worst,
                       f"cases=4 samples={4 * n_per_case} failures={failures} ambiguous={ambiguous}")


# ------------------------------------------------------------ gradient

def random_field(grid: Grid, rng: np.random.Generator) -> Field:
    return Field(grid, rng.uniform(-1.0, 1.0, grid.size) + 0.5)


def gradient_check(grid: Grid, params: ProblemParams, samples: int = 50, seed: int = 0,
                   eps: float = 1e-5, corrupt: bool = False,
                   positive_part: bool = False) -> CheckResult:
    """Central differences of the energy against the Dirichlet pairing of the gradient."""
    rng = np.random.default_rng(seed)
    fd_worst, j_worst = 0.0, 0.0

    def phi(w):
        return phi_of(quadruple(w, params, positive_part), params)

    for _ in range(samples):
        u, v = random_field(grid, rng), random_field(grid, rng)
        g = gradient(u, params, positive_part)
        if corrupt:
            g = 1.001 * g
        fd = (phi(u + eps * v) - phi(u - eps * v)) / (2 * eps)
        pair = dirichlet_pairing(g, v)
        fd_worst = max(fd_worst, abs(fd - pair) / max(abs(fd), 1e-300))
        J = nehari_of(quadruple(u, params, positive_part), params)
        j_worst = max(j_worst, abs(J - dirichlet_pairing(g, u)) / max(abs(J), 1e-300))
    ok = fd_worst < 1e-5 and j_worst <= 1e-10
    return CheckResult("gradient", ok, max(fd_worst, j_worst),
                       f"fd={fd_worst:.3e} nehari={j_worst:.3e} samples={samples}")


# ------------------------------------------------------------- scaling

def scaling_check(grid: Grid, params: ProblemParams, samples: int = 100,
                  seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = Field(grid, rng.normal(size=grid.size))
        pk = params.with_(lambda1=rng.uniform(-2, 2), lambda2=rng.uniform(0.5, 4.0), lambda3=0.0)
        worst = max(worst, analysis.scaling_identity_check(u, pk).relative_error)
    return CheckResult("scaling", worst <= 1e-10, worst, f"samples={samples}")


# --------------------------------------------------------- Brezis-Lieb

def dilated_profile(grid: Grid, width: float, energy: float = 1.0) -> Field:
    """``y_N exp(-|y|^2)`` dilated about 0 to ``width``, scaled to fixed Dirichlet energy."""
    x = grid.coords / width
    f = Field(grid, x[:, -1] * np.exp(-np.sum(x**2, axis=1)))
    a = dirichlet_energy(f)
    if a == 0:
        raise ValueError("profile vanishes on this grid")
    return np.sqrt(energy / a) * f


def compact_profile(grid: Grid, width: float, energy: float | None = None) -> Field:
    """``y_N (1 - |y|^2)_+^3`` dilated to ``width``; supported in the ball of that radius."""
    y = grid.coords / width
    f = Field(grid, y[:, -1] * np.clip(1.0 - np.sum(y**2, axis=1), 0.0, None) ** 3)
    if energy is None:
        return f
    return np.sqrt(energy / dirichlet_energy(f)) * f


def brezis_lieb_check(grid: Grid, params: ProblemParams, widths=None) -> CheckResult:
    from .solver import positive_bump

    u = positive_bump(grid)
    zero = analysis.brezis_lieb_defect(u, Field.zeros(grid), params)
    upper = grid.coords[:, -1] > np.median(grid.coords[:, -1])
    disjoint = analysis.brezis_lieb_defect(Field(grid, u.values * upper),
                                           Field(grid, u.values * ~upper), params)
    if widths is None:
        widths = min(grid.spec.extent) * np.geomspace(0.25, 0.08, 5)
    defects = [analysis.brezis_lieb_defect(u, dilated_profile(grid, w), params) for w in widths]
    trend = all(b < a for a, b in zip(defects, defects[1:]))
    ok = zero == 0.0 and disjoint == 0.0 and trend
    seq = ",".join(f"{d:.3e}" for d in defects)
    return CheckResult("brezis_lieb", ok, max(zero, disjoint), f"sequence={seq}")


# ---------------------------------------------------------- threshold

def threshold_check(grid: Grid, params: ProblemParams, cfg: SolveConfig,
                    halfspace_L: float) -> CheckResult:
    """Domain level against the two-term half-space level at the same spacing."""
    dom = minimize(grid, params, cfg)
    hs = solve_half_space(params, halfspace_L, grid.h, cfg)
    margin = hs.energy - dom.energy
    ok = dom.converged and hs.converged and analysis.threshold_compare(dom, hs) \
        and margin > 10 * cfg.grad_tol
    return CheckResult("threshold", ok, margin,
                       f"domain={dom.energy:.10e} halfspace={hs.energy:.10e}")


def testfunction_check(spec: DomainSpec, params: ProblemParams, h: float, L: float,
                       epsilons, cfg: SolveConfig) -> CheckResult:
    hs = solve_half_space(params, L, h, cfg)
    rep = analysis.test_function_scan(hs.u_star, spec, params, epsilons, c_limit=hs.energy)
    k = int(np.argmin(rep.epsilons))
    gap = rep.c_limit - rep.max_energy_over_t[k]
    ok = hs.converged and gap > 0 and bool(np.all(rep.energy_at_top < 0)) and rep.K3 > 0
    return CheckResult("testfunction", ok, gap,
                       f"eps={rep.epsilons[k]:g} max={rep.max_energy_over_t[k]:.10e} "
                       f"c_limit={rep.c_limit:.10e} K3={rep.K3:.3e}")
