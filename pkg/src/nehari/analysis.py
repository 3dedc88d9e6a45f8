"""Quantitative checks built on top of the solver: scaling, thresholds,
concentration, blow-up rescaling and boundary test functions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import minimize_scalar

from . import fibering
from .functional import Quadruple, phi_of, quadruple, two_term_energy
from .grid import DomainKind, DomainSpec, Field, Grid, build, dirichlet_energy, singular_weights
from .params import ProblemParams
from .solver import SolveReport


class OutOfCoverage(ValueError):
    """The rescaled profile does not fit inside the target domain."""


SUPPORT_CUTOFF = 1e-6


# ---------------------------------------------------------------- scaling

@dataclass(frozen=True)
class ScalingCheck:
    lhs: float
    rhs: float
    lambda_reduced: float

    @property
    def relative_error(self) -> float:
        return abs(self.lhs - self.rhs) / max(abs(self.rhs), np.finfo(float).tiny)


def reduced_coefficient(params: ProblemParams) -> float:
    q1, q2, _ = params.exponents
    return params.lambda1 * params.lambda2 ** ((2 - q1) / (q2 - 2))


def scaling_identity_check(u: Field, params: ProblemParams) -> ScalingCheck:
    """Compare ``A_{lam,1}(k u)`` with ``k^2 A_{lambda1,lambda2}(u)``, ``k = lambda2^(1/(2*(s2)-2))``."""
    q2 = params.q2
    k = params.lambda2 ** (1.0 / (q2 - 2))
    lam = reduced_coefficient(params)
    lhs = two_term_energy(quadruple(k * u, params), lam, 1.0, params)
    rhs = params.lambda2 ** (2.0 / (q2 - 2)) * two_term_energy(
        quadruple(u, params), params.lambda1, params.lambda2, params)
    return ScalingCheck(lhs=lhs, rhs=rhs, lambda_reduced=lam)


def threshold_compare(domain_report: SolveReport, halfspace_report: SolveReport) -> bool:
    """Is the bounded-domain level strictly below the half-space level?"""
    return domain_report.energy < halfspace_report.energy


# ---------------------------------------------------------- concentration

@dataclass(frozen=True)
class ConcentrationProfile:
    radii: np.ndarray
    q_values: np.ndarray
    r_star: float | None
    delta: float
    mu_s_floor: float
    saturation: float
    delta_admissible: bool


def concentration_density(u: Field, params: ProblemParams) -> np.ndarray:
    """Nodal singular mass; the ``lambda1`` term is dropped when ``lambda1 < 0``."""
    q1, q2, _ = params.exponents
    g = u.grid
    dens = params.lambda2 * np.abs(u.values) ** q2 * singular_weights(g, params.s2)
    if params.lambda1 > 0:
        dens = dens + params.lambda1 * np.abs(u.values) ** q1 * singular_weights(g, params.s1)
    return dens


def delta_admissible(delta: float, params: ProblemParams, mu_s_floor: float) -> bool:
    """Smallness of the concentration level, with ``mu_s_floor`` standing in for ``mu_s``."""
    q1, q2, _ = params.exponents
    if params.lambda1 > 0:
        val = (params.lambda1 ** (2 / q1) / mu_s_floor * delta ** ((q1 - 2) / q1)
               + params.lambda2 ** (2 / q2) / mu_s_floor * delta ** ((q2 - 2) / q2))
        return bool(val < 0.5)
    N, s2 = params.N, params.s2
    return bool(delta < (mu_s_floor / 2) ** ((N - s2) / (2 - s2)))


def concentration_profile(u: Field, params: ProblemParams, radii, delta: float | None = None,
                          mu_s_floor: float = 1.0) -> ConcentrationProfile:
    """Singular mass ``Q(r)`` inside the balls ``|x| < r`` about the boundary point 0.

    ``r_star`` is where ``Q`` first reaches ``delta`` (default: half the total),
    linearly interpolated between the sampled radii.
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if radii.size == 0 or radii[0] <= 0:
        raise ValueError("radii must be positive")
    dens = concentration_density(u, params)
    order = np.argsort(u.grid.radius, kind="stable")
    cum = np.concatenate([[0.0], np.cumsum(dens[order])])
    counts = np.searchsorted(u.grid.radius[order], radii, side="left")
    q = cum[counts]
    total = float(cum[-1])
    if delta is None:
        delta = 0.5 * total
    r_star = None
    if total > 0 and delta > 0:
        hit = np.flatnonzero(q >= delta)
        if hit.size:
            i = int(hit[0])
            r0, q0 = (0.0, 0.0) if i == 0 else (radii[i - 1], q[i - 1])
            r1, q1v = radii[i], q[i]
            r_star = float(r1 if q1v == q0 else r0 + (delta - q0) * (r1 - r0) / (q1v - q0))
    return ConcentrationProfile(radii=radii, q_values=q, r_star=r_star, delta=float(delta),
                                mu_s_floor=mu_s_floor, saturation=total,
                                delta_admissible=delta_admissible(delta, params, mu_s_floor))


# --------------------------------------------------------------- rescaling

def _interpolator(u: Field) -> RegularGridInterpolator:
    g = u.grid
    axes = [g.axis_coords(ax) for ax in range(g.N)]
    return RegularGridInterpolator(axes, u.lattice(), method="linear",
                                   bounds_error=False, fill_value=0.0)


def rescale(u: Field, r: float, target: Grid | None = None) -> Field:
    """Blow-up ``v(x) = r^((N-2)/2) u(r x)`` sampled on ``target`` (default: ``u.grid``)."""
    if not r > 0:
        raise ValueError("scale must be positive")
    target = target or u.grid
    g = u.grid
    if target.N != g.N:
        raise ValueError("dimension mismatch")
    # significant support: tails below 1e-6 of the peak may be cut off
    big = np.abs(u.values) > SUPPORT_CUTOFF * np.max(np.abs(u.values), initial=0.0)
    support = g.coords[big] / r
    if support.size and not np.all(target.spec.contains(support, tol=-1e-9 * target.h)):
        raise OutOfCoverage(f"support of u rescaled by r={r:g} leaves the target domain")
    vals = _interpolator(u)(r * target.coords)
    return Field(target, r ** ((g.N - 2) / 2) * vals)


def brezis_lieb_defect(u: Field, bump: Field, params: ProblemParams) -> float:
    """Largest relative splitting defect of the three singular integrals at ``u + bump``.

    The defect is summed node by node, so it vanishes exactly when the supports
    are disjoint.
    """
    u._check(bump)
    x, y = np.abs(u.values), np.abs(bump.values)
    xy = np.abs(u.values + bump.values)
    worst = 0.0
    for q, s in zip(params.exponents, params.weights):
        w = singular_weights(u.grid, s)
        local = xy**q - x**q - y**q
        denom = float(np.dot(w, x**q) + np.dot(w, y**q))
        if denom > 0:
            worst = max(worst, abs(float(np.dot(w, local))) / denom)
    return worst


# ------------------------------------------------------- test functions

@dataclass
class TestFunctionReport:
    epsilons: np.ndarray
    max_energy_over_t: np.ndarray
    energy_at_top: np.ndarray
    t_nehari: np.ndarray
    c_limit: float
    K1: float
    K2: float
    K3: float
    mean_curvature: float
    quads: list = field(default_factory=list, repr=False)

    __test__ = False  # keep pytest from collecting this class


def curvature_integrals(u: Field, params: ProblemParams) -> tuple[float, float, float]:
    """``K1, K2`` (weighted by ``y_N |y'|^2 / |y|^(s+2)``) and ``K3`` (normal derivative on the flat face)."""
    g = u.grid
    y = g.coords
    yp2 = np.sum(y[:, :-1] ** 2, axis=1)
    vol = g.h ** g.N
    q1, q2, _ = params.exponents
    K1 = float(np.sum(np.abs(u.values) ** q1 * y[:, -1] * yp2 / g.radius ** (params.s1 + 2)) * vol)
    K2 = float(np.sum(np.abs(u.values) ** q2 * y[:, -1] * yp2 / g.radius ** (params.s2 + 2)) * vol)
    # first interior layer above the flat face; one-sided difference against the zero boundary
    k_first = 1 - g.offset[-1]
    layer = u.lattice()[..., k_first]
    xp = np.stack(np.meshgrid(*[g.axis_coords(ax) for ax in range(g.N - 1)], indexing="ij"), -1)
    K3 = float(np.sum((layer / g.h) ** 2 * np.sum(xp**2, axis=-1)) * g.h ** (g.N - 1))
    return K1, K2, K3


def quintic_taper(rho: np.ndarray, r0: float) -> np.ndarray:
    """1 on ``rho <= r0/2``, 0 on ``rho >= r0``, C^2 in between."""
    s = np.clip((np.asarray(rho) - 0.5 * r0) / (0.5 * r0), 0.0, 1.0)
    return 1.0 - s**3 * (10 - 15 * s + 6 * s**2)


def boundary_test_function(halfspace_u: Field, spec: DomainSpec, eps: float,
                           r0: float | None = None) -> Field:
    """Cut-off ``eta * eps^(-(N-2)/2) u(flatten(x)/eps)`` on a lattice of spacing ``eps h``."""
    hs = halfspace_u.grid
    if hs.spec.kind is not DomainKind.HALF_SPACE_BOX:
        raise ValueError("the profile must live on a HalfSpaceBox grid")
    r0 = float(min(spec.extent)) if r0 is None else r0
    reach = float(np.max(np.linalg.norm(hs.coords[halfspace_u.values != 0], axis=1), initial=0.0))
    reach = max(reach, float(np.linalg.norm(hs.spec.extent)))
    if eps * reach > r0 or eps * max(hs.spec.extent) >= min(spec.extent):
        raise OutOfCoverage(f"eps={eps:g} pushes the profile outside the flattening neighbourhood")
    grid = build(spec, eps * hs.h)
    x = grid.coords
    flat = x.copy()
    flat[:, -1] = x[:, -1] - spec.boundary_graph(x[:, :-1])
    eta = quintic_taper(np.linalg.norm(flat, axis=1), r0)
    vals = eps ** (-(hs.N - 2) / 2) * _interpolator(halfspace_u)(flat / eps)
    return Field(grid, eta * vals)


def _ray_energy(quad: Quadruple, params: ProblemParams, t):
    t = np.asarray(t, dtype=float)
    q1, q2, q3 = params.exponents
    l1, l2, l3 = params.coefficients
    return (t**2 * quad.a / 2 - l1 * t**q1 * quad.b / q1 - l2 * t**q2 * quad.c / q2
            - l3 * t**q3 * quad.d / q3)


def test_function_scan(halfspace_u: Field, spec: DomainSpec, params: ProblemParams,
                       epsilons, c_limit: float | None = None, r0: float | None = None,
                       n_t: int = 200) -> TestFunctionReport:
    """Maximal ray energy of boundary test functions built from a half-space profile.

    ``c_limit`` defaults to the two-term energy of the profile itself.
    """
    if spec.kind is not DomainKind.PERTURBED_BOUNDARY:
        raise ValueError("test functions are placed on a PerturbedBoundary domain")
    from .grid import mean_curvature_at_origin
    H0 = mean_curvature_at_origin(spec)
    if not H0 < 0:
        raise ValueError(f"the scan needs negative mean curvature at 0, got {H0:g}")
    if c_limit is None:
        c_limit = two_term_energy(quadruple(halfspace_u, params), params.lambda1,
                                  params.lambda2, params)
    eps_arr = np.asarray([float(e) for e in epsilons])
    maxima, tops, roots, quads = [], [], [], []
    for eps in eps_arr:
        v = boundary_test_function(halfspace_u, spec, eps, r0)
        quad = quadruple(v, params)
        t_u = fibering.project(quad, params).t_u
        ts = t_u * np.geomspace(1e-2, 1e2, n_t)
        vals = _ray_energy(quad, params, ts)
        k = int(np.argmax(vals))
        lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, n_t - 1)]
        ref = minimize_scalar(lambda t: -_ray_energy(quad, params, t), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12 * hi})
        best = max(float(vals[k]), float(-ref.fun), float(_ray_energy(quad, params, t_u)))
        maxima.append(best)
        tops.append(float(vals[-1]))
        roots.append(t_u)
        quads.append(quad)
    K1, K2, K3 = curvature_integrals(halfspace_u, params)
    return TestFunctionReport(epsilons=eps_arr, max_energy_over_t=np.asarray(maxima),
                              energy_at_top=np.asarray(tops), t_nehari=np.asarray(roots),
                              c_limit=float(c_limit), K1=K1, K2=K2, K3=K3,
                              mean_curvature=H0, quads=quads)
