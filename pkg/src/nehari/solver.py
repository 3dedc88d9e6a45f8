"""Nehari-manifold minimisation by projected gradient descent."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from . import fibering
from .functional import (Quadruple, nehari_of, phi_of, quadruple, residual, riesz)
from .grid import DomainKind, DomainSpec, Field, Grid, build, embed
from .params import CaseTag, ProblemParams, classify_case, derived_constants

log = logging.getLogger(__name__)

SUFFICIENT_DECREASE = 1e-4
IDENTITY_RTOL = 1e-8
DETACH_JUMP = 0.2


@dataclass(frozen=True)
class SolveConfig:
    max_iters: int = 2000
    grad_tol: float = 1e-7
    step: float = 1.0
    armijo: float = 0.5
    seed: int = 0
    positive_part: bool = False
    init: Union[str, Field] = "bump"
    symmetrize: bool = False

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0 < self.armijo < 1:
            raise ValueError("armijo backtracking factor must lie in (0, 1)")
        if not self.step > 0:
            raise ValueError("initial step must be positive")
        if isinstance(self.init, str) and self.init not in ("bump", "random"):
            raise ValueError(f"unknown init {self.init!r}; use 'bump', 'random' or a Field")


@dataclass
class SolveReport:
    u_star: Field
    energy: float
    grad_norm: float
    nehari_residual: float
    iters: int
    trace: list[tuple[int, float, float]]
    ps_bound_ok: bool
    multiplier_bound_ok: bool
    converged: bool
    params: ProblemParams
    quad: Quadruple
    positive_part: bool = False
    detached: bool = False

    @property
    def a(self) -> float:
        return self.quad.a


def positive_bump(grid: Grid) -> Field:
    """Product of sine profiles across the domain; strictly positive inside."""
    spec, x = grid.spec, grid.coords
    L = np.asarray(spec.extent)
    if spec.kind is DomainKind.BOX:
        return Field(grid, np.prod(np.sin(np.pi * x / L), axis=1))
    prof = np.prod(np.cos(0.5 * np.pi * x[:, :-1] / L[:-1]), axis=1)
    floor = spec.boundary_graph(x[:, :-1])
    prof *= np.sin(np.pi * (x[:, -1] - floor) / (L[-1] - floor))
    return Field(grid, prof)


def initial_field(grid: Grid, cfg: SolveConfig) -> Field:
    if isinstance(cfg.init, Field):
        # a field from another grid of the same spacing is transferred by lattice coordinate
        return cfg.init if cfg.init.grid is grid else embed(cfg.init, grid)
    if cfg.init == "random":
        rng = np.random.default_rng(cfg.seed)
        return Field(grid, rng.uniform(0.0, 1.0, grid.size))
    return positive_bump(grid)


def identity_exponent(params: ProblemParams) -> float | None:
    """Power ``q`` for which ``Phi - J/q`` has only nonnegative extra terms."""
    q1, q2, q3 = params.exponents
    case = classify_case(params)
    if case is CaseTag.CASE1:
        return q1 if q3 >= q1 else q3
    if case is CaseTag.CASE2:
        return q3
    if case is CaseTag.CASE3:
        return q1
    if case is CaseTag.CASE4:
        return q2
    if params.lambda3 == 0.0:
        return q1 if params.lambda1 >= 0 else q2
    return None


def ps_identity(quad: Quadruple, params: ProblemParams) -> tuple[float, list[float]] | None:
    """Right-hand side of ``Phi = (1/2 - 1/q) a + sum_i (1/q - 1/q_i) lambda_i I_i`` on the manifold.

    Returns the value and the list of its terms (the first is the coercive one).
    """
    q = identity_exponent(params)
    if q is None:
        return None
    q1, q2, q3 = params.exponents
    l1, l2, l3 = params.coefficients
    terms = [(0.5 - 1 / q) * quad.a, (1 / q - 1 / q1) * l1 * quad.b,
             (1 / q - 1 / q2) * l2 * quad.c, (1 / q - 1 / q3) * l3 * quad.d]
    return float(sum(terms)), terms


def ps_bound_holds(quad: Quadruple, params: ProblemParams) -> bool:
    out = ps_identity(quad, params)
    if out is None:
        return False
    rhs, terms = out
    phi = phi_of(quad, params)
    scale = 1e-14 * max(abs(t) for t in terms)
    return (abs(phi - rhs) <= IDENTITY_RTOL * abs(phi)
            and all(t >= -scale for t in terms[1:]) and terms[0] > 0)


def multiplier_bound_holds(quad: Quadruple, params: ProblemParams) -> bool:
    varrho = derived_constants(params).varrho
    return fibering.multiplier_bound_check(quad, params) < -varrho * quad.a


class _State:
    __slots__ = ("u", "quad", "phi", "r", "g", "gtan", "gnorm")


def _evaluate(u: Field, params, positive_part, g0=None) -> _State:
    st = _State()
    st.u = u
    st.quad = quadruple(u, params, positive_part)
    st.phi = phi_of(st.quad, params)
    st.r = residual(u, params, positive_part)
    st.g = riesz(u.grid, st.r, x0=g0)
    # drop the component along u, transversal to the manifold
    gu = float(st.r @ u.values)
    st.gtan = st.g - (gu / st.quad.a) * u.values
    st.gnorm = float(np.sqrt(max(st.r @ st.g - gu * gu / st.quad.a, 0.0)))
    return st


def _project(values: np.ndarray, grid: Grid, params, cfg) -> Field | None:
    if cfg.symmetrize:
        values = grid.symmetrize(values)
    u = Field(grid, values)
    quad = quadruple(u, params, cfg.positive_part)
    if not quad.a > 0 or (cfg.positive_part and not np.any(u.values > 0)):
        return None
    try:
        root = fibering.project(quad, params)
    except fibering.NoRoot:
        return None
    return root.t_u * u


def minimize(grid: Grid, params: ProblemParams, cfg: SolveConfig | None = None) -> SolveReport:
    """Minimise the energy over the Nehari manifold of ``grid``.

    Iterates ``u <- P(u - tau g_tan)`` where ``P`` is the fibering projection and
    ``g_tan`` the Dirichlet-metric gradient with its radial component removed;
    ``tau`` starts at ``cfg.step`` and is backtracked by ``cfg.armijo``.
    """
    cfg = cfg or SolveConfig()
    if not fibering.uniqueness_expected(params) and not params.continuation:
        raise fibering.UnsupportedCase(
            f"{classify_case(params)} parameters need continuation mode")
    u0 = initial_field(grid, cfg)
    u = _project(u0.values, grid, params, cfg)
    if u is None:
        raise ValueError("initial field has no Nehari point on its ray")
    st = _evaluate(u, params, cfg.positive_part)
    trace = [(0, st.phi, st.gnorm)]
    converged = st.gnorm <= cfg.grad_tol
    it = 0
    while not converged and it < cfg.max_iters:
        it += 1
        tau = cfg.step
        accepted = None
        while tau > 1e-14:
            trial = _project(st.u.values - tau * st.gtan, grid, params, cfg)
            if trial is not None:
                phi_t = phi_of(quadruple(trial, params, cfg.positive_part), params)
                if phi_t <= st.phi - SUFFICIENT_DECREASE * tau * st.gnorm**2:
                    accepted = trial
                    break
            tau *= cfg.armijo
        if accepted is None:
            log.info("line search stalled at iteration %d (grad %.3e)", it, st.gnorm)
            break
        st = _evaluate(accepted, params, cfg.positive_part, g0=st.g)
        trace.append((it, st.phi, st.gnorm))
        converged = st.gnorm <= cfg.grad_tol
    quad = st.quad
    return SolveReport(
        u_star=st.u, energy=st.phi, grad_norm=st.gnorm,
        nehari_residual=abs(nehari_of(quad, params)), iters=it, trace=trace,
        ps_bound_ok=converged and ps_bound_holds(quad, params),
        multiplier_bound_ok=converged and multiplier_bound_holds(quad, params),
        converged=converged and st.phi > 0, params=params, quad=quad,
        positive_part=cfg.positive_part)


def solve_half_space(params: ProblemParams, L: float, h: float,
                     cfg: SolveConfig | None = None) -> SolveReport:
    """Least-energy approximation of the two-term half-space problem on ``[-L, L]^(N-1) x [0, L]``."""
    cfg = replace(cfg or SolveConfig(), symmetrize=True)
    grid = build(DomainSpec.half_space(params.N, L), h)
    return minimize(grid, params.with_(lambda3=0.0), cfg)


def continuation_in_lambda3(grid: Grid, params: ProblemParams, lambda3_path: Sequence[float],
                            cfg: SolveConfig | None = None) -> list[SolveReport]:
    """Follow the positive solution from ``lambda3 = 0`` along ``lambda3_path``.

    Each point is warm-started from the previous solution.  A report is marked
    ``detached`` when its energy differs from the previous one by more than 20%.
    """
    path = [float(x) for x in lambda3_path]
    if not path or path[0] != 0.0:
        raise ValueError("the continuation path must start at lambda3 = 0")
    cfg = replace(cfg or SolveConfig(), positive_part=True)
    reports: list[SolveReport] = []
    prev = None
    for lam in path:
        p_k = params.with_(lambda3=lam, continuation=True)
        c_k = cfg if prev is None else replace(cfg, init=prev.u_star)
        rep = minimize(grid, p_k, c_k)
        if prev is not None and abs(rep.energy - prev.energy) > DETACH_JUMP * abs(prev.energy):
            rep.detached = True
        reports.append(rep)
        prev = rep
    return reports
