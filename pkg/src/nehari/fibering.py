"""Scalar fibering map ``g(t)`` and projection onto the Nehari manifold.

Along a ray ``t u`` the derivative of the energy is ``t g(t)`` with::

    g(t) = a - lambda1 b t^(2*(s1)-2) - lambda2 c t^(2*(s2)-2) - lambda3 d t^(p-1)

so the Nehari point on the ray is a positive root of ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functional import Quadruple, quadruple, nehari_of
from .grid import Field
from .params import CaseTag, ProblemParams, classify_case

T_CAP = 2.0**64
SCAN_POINTS = 10_000
BISECT_RTOL = 1e-12


class FiberingError(RuntimeError):
    pass


class NoRoot(FiberingError):
    """``g`` stayed positive up to the overflow guard."""


class AmbiguousRoot(FiberingError):
    """The sign scan found more than one positive root."""


class UnsupportedCase(FiberingError):
    """Parameters outside every regime where the projection is well defined."""


@dataclass(frozen=True)
class FiberingRoot:
    t_u: float
    certified_unique: bool
    bracket: tuple[float, float]
    residual: float


def g_eval(quad: Quadruple, params: ProblemParams, t):
    t = np.asarray(t, dtype=float)
    q1, q2, q3 = params.exponents
    l1, l2, l3 = params.coefficients
    out = quad.a - l1 * quad.b * t ** (q1 - 2) - l2 * quad.c * t ** (q2 - 2) \
        - l3 * quad.d * t ** (q3 - 2)
    return float(out) if out.ndim == 0 else out


def uniqueness_expected(params: ProblemParams) -> bool:
    """True where the fibering root is provably unique.

    That is one of the four cases, or the two-term problem ``lambda3 = 0``
    (every case argument goes through with ``d`` dropped).
    """
    return classify_case(params) is not CaseTag.UNSUPPORTED or params.lambda3 == 0.0


def sign_changes(quad: Quadruple, params: ProblemParams, t_grid: np.ndarray) -> int:
    gv = g_eval(quad, params, t_grid)
    s = np.sign(gv)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def scan_grid(n: int = SCAN_POINTS) -> np.ndarray:
    return np.geomspace(1.0 / T_CAP, T_CAP, n)


def _bracket(quad, params):
    t_hi = 1.0
    if g_eval(quad, params, t_hi) > 0:
        t_lo = t_hi
        while g_eval(quad, params, t_hi) > 0:
            t_lo, t_hi = t_hi, 2.0 * t_hi
            if t_hi > T_CAP:
                raise NoRoot(f"g(t) > 0 up to t = {T_CAP:.3g}; check the case classification")
        return t_lo, t_hi
    t_lo = 0.5
    while g_eval(quad, params, t_lo) <= 0:
        t_hi, t_lo = t_lo, 0.5 * t_lo
        if t_lo < 1.0 / T_CAP:
            raise NoRoot("g(t) <= 0 down to the underflow guard although g(0) = a > 0")
    return t_lo, t_hi


def project(quad: Quadruple, params: ProblemParams) -> FiberingRoot:
    """Smallest positive root of ``g``, with a sign-scan uniqueness certificate."""
    if not quad.a > 0:
        raise ValueError("projection needs a nonzero field (a > 0)")
    expected = uniqueness_expected(params)
    if not expected and not params.continuation:
        raise UnsupportedCase(f"no Nehari projection for {classify_case(params)} parameters "
                              "outside continuation mode")
    t_lo, t_hi = _bracket(quad, params)
    bracket = (t_lo, t_hi)
    lo, hi = t_lo, t_hi
    # stop far below the requested 1e-12 so J is at rounding level
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= 4e-16 * hi:
            break
        if g_eval(quad, params, mid) > 0:
            lo = mid
        else:
            hi = mid
    glo, ghi = g_eval(quad, params, lo), g_eval(quad, params, hi)
    t_u = lo if abs(glo) <= abs(ghi) else hi
    assert hi - lo <= BISECT_RTOL * hi
    res = g_eval(quad, params, t_u)

    pts = scan_grid()
    gv = g_eval(quad, params, pts)
    n_changes = sign_changes(quad, params, pts)
    unique = n_changes == 1 and gv[-1] < 0
    if expected and n_changes > 1:
        raise AmbiguousRoot(f"{n_changes} sign changes of g on the scan grid")
    return FiberingRoot(t_u=float(t_u), certified_unique=bool(unique),
                        bracket=bracket, residual=float(res))


def project_field(u: Field, params: ProblemParams, positive_part: bool = False) -> Field:
    """Rescale ``u`` onto the Nehari manifold along its ray."""
    root = project(quadruple(u, params, positive_part), params)
    return root.t_u * u


def multiplier_bound_check(quad: Quadruple, params: ProblemParams) -> float:
    """``<J'(u), u>``; on the manifold it lies below ``-varrho a`` in every case."""
    q1, q2, q3 = params.exponents
    l1, l2, l3 = params.coefficients
    return 2 * quad.a - q1 * l1 * quad.b - q2 * l2 * quad.c - q3 * l3 * quad.d


def on_manifold(quad: Quadruple, params: ProblemParams, tol: float = 1e-8) -> bool:
    return abs(nehari_of(quad, params)) <= tol * quad.a
