"""Discrete Nehari-manifold solver for elliptic problems with several Hardy-Sobolev terms.

The main entry points are :class:`ProblemParams`, :func:`build` for grids,
:func:`minimize` for the constrained descent and the checks in
:mod:`nehari.analysis`.
"""

from .functional import Quadruple, energy, gradient, quadruple
from .fibering import project, project_field
from .grid import DomainKind, DomainSpec, Field, Grid, build, read_field, write_field
from .params import CaseTag, ProblemParams, classify_case, derived_constants
from .solver import SolveConfig, SolveReport, continuation_in_lambda3, minimize, solve_half_space

__all__ = [
    "CaseTag", "DomainKind", "DomainSpec", "Field", "Grid", "ProblemParams", "Quadruple",
    "SolveConfig", "SolveReport", "build", "classify_case", "continuation_in_lambda3",
    "derived_constants", "energy", "gradient", "minimize", "project", "project_field",
    "quadruple", "read_field", "solve_half_space", "write_field",
]
__version__ = "0.1.0"
