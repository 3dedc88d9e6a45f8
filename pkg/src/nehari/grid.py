"""Uniform lattices on domains with the singular point 0 on the boundary.

Values live on interior nodes only; every other lattice node carries the
homogeneous Dirichlet value 0.  Node numbering is the C-order (lexicographic)
enumeration of the interior mask and never changes once a grid is built.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp


class EmptyInterior(ValueError):
    """The requested spacing leaves no lattice node inside the domain."""


class DomainKind(enum.Enum):
    BOX = "Box"
    HALF_SPACE_BOX = "HalfSpaceBox"
    PERTURBED_BOUNDARY = "PerturbedBoundary"


@dataclass(frozen=True)
class DomainSpec:
    """Geometry of the computational domain.

    * ``Box``: ``[0, L_1] x ... x [0, L_N]`` with 0 at a corner.
    * ``HalfSpaceBox``: ``[-L_1, L_1] x ... x [-L_{N-1}, L_{N-1}] x [0, L_N]``
      with 0 at the centre of the bottom face.
    * ``PerturbedBoundary``: the half-space box with the bottom face replaced
      by the graph ``x_N = sum_i alpha_i x_i^2`` (the domain lies above it).
    """

    kind: DomainKind
    extent: tuple[float, ...]
    alpha: tuple[float, ...] = ()

    def __post_init__(self):
        kind = DomainKind(self.kind)
        object.__setattr__(self, "kind", kind)
        extent = tuple(float(x) for x in self.extent)
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if len(extent) < 3:
            raise ValueError("domains need at least three axes")
        if any(not x > 0 for x in extent):
            raise ValueError(f"extents must be positive, got {extent}")
        if kind is DomainKind.PERTURBED_BOUNDARY:
            if len(self.alpha) != len(extent) - 1:
                raise ValueError("PerturbedBoundary needs N - 1 curvature coefficients")
        elif kind is DomainKind.HALF_SPACE_BOX:
            if self.alpha and any(a != 0.0 for a in self.alpha):
                raise ValueError("HalfSpaceBox has a flat bottom; alpha must be zero")

    @classmethod
    def box(cls, lengths: Sequence[float]) -> "DomainSpec":
        return cls(DomainKind.BOX, tuple(lengths))

    @classmethod
    def half_space(cls, N: int, L: float) -> "DomainSpec":
        return cls(DomainKind.HALF_SPACE_BOX, (L,) * N)

    @classmethod
    def perturbed(cls, L: float, alpha: Sequence[float]) -> "DomainSpec":
        return cls(DomainKind.PERTURBED_BOUNDARY, (L,) * (len(alpha) + 1), tuple(alpha))

    @property
    def N(self) -> int:
        return len(self.extent)

    def boundary_graph(self, xp: np.ndarray) -> np.ndarray:
        """Height ``sum_i alpha_i x_i^2`` of the bottom boundary over ``x'``."""
        xp = np.asarray(xp, dtype=float)
        if self.kind is not DomainKind.PERTURBED_BOUNDARY:
            return np.zeros(xp.shape[:-1])
        return (xp**2) @ np.asarray(self.alpha)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned bounding box of the domain."""
        L = np.asarray(self.extent)
        if self.kind is DomainKind.BOX:
            return np.zeros_like(L), L
        lo = -L.copy()
        lo[-1] = 0.0
        if self.kind is DomainKind.PERTURBED_BOUNDARY:
            alpha = np.asarray(self.alpha)
            lo[-1] = float(np.sum(np.minimum(alpha, 0.0) * L[:-1] ** 2))
        return lo, L.copy()

    def contains(self, x: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Strict membership test for points ``x`` of shape ``(..., N)``."""
        x = np.asarray(x, dtype=float)
        L = np.asarray(self.extent)
        if self.kind is DomainKind.BOX:
            return np.all((x > tol) & (x < L - tol), axis=-1)
        inside = np.all(np.abs(x[..., :-1]) < L[:-1] - tol, axis=-1)
        inside &= x[..., -1] < L[-1] - tol
        inside &= x[..., -1] - self.boundary_graph(x[..., :-1]) > tol
        return inside


def mean_curvature_at_origin(spec: DomainSpec) -> float:
    """Mean curvature ``(sum_i alpha_i)/(N - 1)`` of the bottom boundary at 0."""
    if spec.kind is DomainKind.BOX:
        raise ValueError("a Box has its singular point at a corner; no curvature data")
    if spec.kind is DomainKind.HALF_SPACE_BOX:
        return 0.0
    return float(sum(spec.alpha)) / (spec.N - 1)


@dataclass(frozen=True, eq=False)
class Grid:
    """Lattice ``h * Z^N`` restricted to a domain, with one exterior layer of padding."""

    spec: DomainSpec
    h: float
    offset: tuple[int, ...]
    mask: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.mask.ndim

    @property
    def dims(self) -> tuple[int, ...]:
        return self.mask.shape

    @property
    def size(self) -> int:
        return self.interior_index.size

    @cached_property
    def interior_index(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @cached_property
    def lattice_index(self) -> np.ndarray:
        """Integer lattice coordinates ``k`` with ``x = k h`` for every interior node."""
        idx = np.array(np.unravel_index(self.interior_index, self.dims)).T
        return idx + np.asarray(self.offset)

    @cached_property
    def coords(self) -> np.ndarray:
        return self.lattice_index * self.h

    @cached_property
    def radius(self) -> np.ndarray:
        return np.linalg.norm(self.coords, axis=1)

    @cached_property
    def node_number(self) -> np.ndarray:
        """Lattice array holding the interior node number, -1 elsewhere."""
        num = np.full(self.dims, -1, dtype=np.int64)
        num.flat[self.interior_index] = np.arange(self.size)
        return num

    def axis_coords(self, axis: int) -> np.ndarray:
        return (self.offset[axis] + np.arange(self.dims[axis])) * self.h

    def to_lattice(self, values: np.ndarray) -> np.ndarray:
        """Scatter interior values into the zero-padded lattice array."""
        full = np.zeros(self.dims)
        full.flat[self.interior_index] = values
        return full

    def from_lattice(self, full: np.ndarray) -> np.ndarray:
        return full.flat[self.interior_index].copy()

    @cached_property
    def stiffness(self) -> sp.csr_matrix:
        """Matrix of the quadratic form :func:`dirichlet_energy`; SPD."""
        num = self.node_number
        rows, cols = [], []
        for axis in range(self.N):
            a = np.moveaxis(num, axis, 0)
            left, right = a[:-1].ravel(), a[1:].ravel()
            keep = (left >= 0) & (right >= 0)
            rows.append(left[keep])
            cols.append(right[keep])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        n = self.size
        adj = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
        adj = adj + adj.T
        A = 2 * self.N * sp.identity(n) - adj
        return (self.h ** (self.N - 2) * A).tocsr()

    @cached_property
    def symmetry_group(self) -> list[tuple[tuple[int, ...], tuple[bool, ...]]]:
        """Signed permutations of the tangential axes that map the grid onto itself.

        Each element is ``(perm, flips)`` acting on the lattice array; the last
        axis (the inward normal at 0) is never touched.
        """
        identity = (tuple(range(self.N)), (False,) * self.N)
        if self.spec.kind is DomainKind.BOX:
            return [identity]
        ops = []
        for perm in itertools.permutations(range(self.N - 1)):
            for flips in itertools.product((False, True), repeat=self.N - 1):
                op = (tuple(perm) + (self.N - 1,), tuple(flips) + (False,))
                if self._is_lattice_map(op) and np.array_equal(
                        self._apply_op(self.mask, op), self.mask):
                    ops.append(op)
        return ops

    def _is_lattice_map(self, op) -> bool:
        perm, flips = op
        for ax, src in enumerate(perm):
            if self.offset[ax] != self.offset[src] or self.dims[ax] != self.dims[src]:
                return False
        # a flip is k -> -k only when the index range is symmetric about 0
        return all(not f or self.offset[ax] + self.dims[ax] - 1 == -self.offset[ax]
                   for ax, f in enumerate(flips))

    @staticmethod
    def _apply_op(arr: np.ndarray, op) -> np.ndarray:
        perm, flips = op
        out = np.transpose(arr, perm)
        sl = tuple(slice(None, None, -1) if f else slice(None) for f in flips)
        return out[sl]

    def symmetrize(self, values: np.ndarray) -> np.ndarray:
        """Average interior values over :attr:`symmetry_group`."""
        ops = self.symmetry_group
        if len(ops) == 1:
            return np.array(values, dtype=float)
        full = self.to_lattice(values)
        acc = np.zeros_like(full)
        for op in ops:
            acc += self._apply_op(full, op)
        return self.from_lattice(acc / len(ops))

    def symmetry_defect(self, values: np.ndarray) -> float:
        """Largest difference between values at symmetry-related nodes."""
        full = self.to_lattice(values)
        return max(float(np.max(np.abs(self._apply_op(full, op) - full)))
                   for op in self.symmetry_group)


def build(spec: DomainSpec, h: float) -> Grid:
    """Lattice of spacing ``h`` on ``spec``; interior nodes lie strictly inside."""
    if not h > 0:
        raise ValueError(f"spacing must be positive, got {h!r}")
    lo, hi = spec.bounds()
    kmin = np.floor(lo / h).astype(int) - 1
    kmax = np.ceil(hi / h).astype(int) + 1
    axes = [np.arange(a, b + 1) * h for a, b in zip(kmin, kmax)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    mask = spec.contains(pts, tol=1e-12 * h)
    if not mask.any():
        raise EmptyInterior(f"no interior node for {spec.kind.value} at h={h!r}")
    # crop to the interior bounding box plus one exterior layer
    nz = np.nonzero(mask)
    sl, offset = [], []
    for ax in range(mask.ndim):
        a, b = nz[ax].min() - 1, nz[ax].max() + 1
        sl.append(slice(a, b + 1))
        offset.append(int(kmin[ax] + a))
    mask = np.ascontiguousarray(mask[tuple(sl)])
    mask.setflags(write=False)
    return Grid(spec=spec, h=float(h), offset=tuple(offset), mask=mask)


@dataclass(frozen=True, eq=False)
class Field:
    """Nodal values on the interior nodes of ``grid``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.size))

    @classmethod
    def from_function(cls, grid: Grid, f) -> "Field":
        return cls(grid, np.asarray(f(grid.coords), dtype=float).reshape(grid.size))

    def _check(self, other: "Field"):
        if other.grid is not self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, k: float) -> "Field":
        return Field(self.grid, k * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)

    def lattice(self) -> np.ndarray:
        return self.grid.to_lattice(self.values)


def embed(u: Field, target: Grid) -> Field:
    """Transfer ``u`` to ``target`` (same spacing) by lattice coordinate.

    Target nodes absent from ``u.grid`` get 0; values at nodes outside ``target``
    are dropped.  Zero extension into a larger domain preserves every integral.
    """
    if not np.isclose(u.grid.h, target.h, rtol=1e-12, atol=0.0):
        raise ValueError(f"spacings differ: {u.grid.h} vs {target.h}")
    return _place(u.grid.lattice_index, u.values, target)


def _place(k: np.ndarray, values: np.ndarray, grid: Grid) -> Field:
    k = k - np.asarray(grid.offset)
    ok = np.all((k >= 0) & (k < np.asarray(grid.dims)), axis=1)
    full = np.zeros(grid.dims)
    full[tuple(k[ok].T)] = values[ok]
    return Field(grid, grid.from_lattice(full * grid.mask))


def dirichlet_energy(u: Field) -> float:
    """Sum over lattice edges of squared differences times ``h^(N-2)``."""
    full = u.lattice()
    total = 0.0
    for axis in range(full.ndim):
        total += float(np.sum(np.diff(full, axis=axis) ** 2))
    return total * u.grid.h ** (u.grid.N - 2)


def dirichlet_pairing(u: Field, v: Field) -> float:
    """Bilinear form associated with :func:`dirichlet_energy`."""
    u._check(v)
    return float(u.values @ (u.grid.stiffness @ v.values))


def singular_weights(grid: Grid, s: float) -> np.ndarray:
    """Quadrature weights ``|x|^(-s) h^N`` of the measure ``dx/|x|^s``."""
    return grid.radius ** (-s) * grid.h ** grid.N


def singular_integral(u: Field, q: float, s: float) -> float:
    """Riemann sum of ``|u|^q / |x|^s`` over interior nodes."""
    return float(np.sum(np.abs(u.values) ** q * singular_weights(u.grid, s)))


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_field(u: Field, path) -> None:
    """Plain-text dump: header ``N h dim_1 .. dim_N``, then ``x_1 .. x_N value`` lines."""
    g = u.grid
    lines = [" ".join([str(g.N), _fmt(g.h)] + [str(d) for d in g.dims])]
    for x, val in zip(g.coords, u.values):
        lines.append(" ".join([_fmt(c) for c in x] + [_fmt(val)]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_field(path, grid: Grid | None = None):
    """Parse a field dump.

    Without ``grid`` returns ``(h, dims, coords, values)``.  With ``grid`` the
    values are matched to its interior nodes by lattice coordinate and a
    :class:`Field` is returned (nodes absent from the dump get 0).
    """
    with open(path) as fh:
        header = fh.readline().split()
        data = np.loadtxt(fh, ndmin=2)
    N = int(header[0])
    h = float(header[1])
    dims = tuple(int(d) for d in header[2:2 + N])
    coords, values = data[:, :N], data[:, N]
    if grid is None:
        return h, dims, coords, values
    if grid.N != N:
        raise ValueError(f"dump has dimension {N}, grid has {grid.N}")
    if not np.allclose(coords / grid.h, np.rint(coords / grid.h), atol=1e-6):
        raise ValueError(f"dump nodes do not lie on the lattice of spacing {grid.h}")
    return _place(np.rint(coords / grid.h).astype(int), values, grid)
