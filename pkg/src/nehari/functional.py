"""Energy, Nehari functional and Dirichlet-metric gradient on a lattice."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .grid import Field, dirichlet_energy, singular_weights
from .params import ProblemParams

CG_RTOL = 1e-10


class LinearSolveFailure(RuntimeError):
    """The stiffness solve did not reach its tolerance."""


@dataclass(frozen=True)
class Quadruple:
    """Dirichlet energy ``a`` and the singular integrals ``b, c, d`` of one field."""

    a: float
    b: float
    c: float
    d: float

    def scaled(self, t: float, params: ProblemParams) -> "Quadruple":
        """Quadruple of ``t u`` for ``t >= 0``, by homogeneity."""
        q1, q2, q3 = params.exponents
        return Quadruple(t * t * self.a, t**q1 * self.b, t**q2 * self.c, t**q3 * self.d)


@dataclass(frozen=True)
class EnergyReport:
    phi: float
    j: float
    grad_norm: float


def _base(u: Field, positive_part: bool) -> np.ndarray:
    return np.maximum(u.values, 0.0) if positive_part else np.abs(u.values)


def quadruple(u: Field, params: ProblemParams, positive_part: bool = False) -> Quadruple:
    v = _base(u, positive_part)
    terms = [float(np.sum(v**q * singular_weights(u.grid, s)))
             for q, s in zip(params.exponents, params.weights)]
    return Quadruple(dirichlet_energy(u), *terms)


def phi_of(quad: Quadruple, params: ProblemParams) -> float:
    q1, q2, q3 = params.exponents
    l1, l2, l3 = params.coefficients
    return quad.a / 2 - l1 * quad.b / q1 - l2 * quad.c / q2 - l3 * quad.d / q3


def nehari_of(quad: Quadruple, params: ProblemParams) -> float:
    l1, l2, l3 = params.coefficients
    return quad.a - l1 * quad.b - l2 * quad.c - l3 * quad.d


def two_term_energy(quad: Quadruple, lambda1: float, lambda2: float,
                    params: ProblemParams) -> float:
    """Limit functional ``A_{lambda1, lambda2}`` (no third term)."""
    q1, q2, _ = params.exponents
    return quad.a / 2 - lambda1 * quad.b / q1 - lambda2 * quad.c / q2


def residual(u: Field, params: ProblemParams, positive_part: bool = False) -> np.ndarray:
    """Nodal vector ``r`` with ``<Phi'(u), v> = r . v`` for every field ``v``."""
    g = u.grid
    r = g.stiffness @ u.values
    if positive_part:
        base, sign = np.maximum(u.values, 0.0), 1.0
    else:
        base, sign = np.abs(u.values), np.sign(u.values)
    for lam, q, s in zip(params.coefficients, params.exponents, params.weights):
        if lam != 0.0:
            r -= lam * sign * base ** (q - 1.0) * singular_weights(g, s)
    return r


def riesz(grid, r: np.ndarray, x0: np.ndarray | None = None) -> np.ndarray:
    """Solve ``A g = r`` with conjugate gradients."""
    if not np.any(r):
        return np.zeros_like(r)
    g, info = spla.cg(grid.stiffness, r, x0=x0, rtol=CG_RTOL, atol=0.0,
                      maxiter=20 * grid.size + 100)
    if info != 0:
        raise LinearSolveFailure(f"CG stopped with info={info} on {grid.size} unknowns")
    return g


def gradient(u: Field, params: ProblemParams, positive_part: bool = False) -> Field:
    """Riesz representative of ``Phi'(u)`` in the discrete Dirichlet inner product."""
    return Field(u.grid, riesz(u.grid, residual(u, params, positive_part)))


def energy(u: Field, params: ProblemParams, positive_part: bool = False) -> EnergyReport:
    quad = quadruple(u, params, positive_part)
    r = residual(u, params, positive_part)
    g = riesz(u.grid, r)
    return EnergyReport(phi=phi_of(quad, params), j=nehari_of(quad, params),
                        grad_norm=float(np.sqrt(max(r @ g, 0.0))))
