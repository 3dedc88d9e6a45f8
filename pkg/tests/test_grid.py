import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_interior, loop_dirichlet, loop_singular
from nehari.grid import (DomainKind, DomainSpec, EmptyInterior, Field, build, dirichlet_energy,
                         dirichlet_pairing, mean_curvature_at_origin, read_field,
                         singular_integral, write_field)


class TestBuild:
    # [TRIVIAL] one interior lattice point
    def test_unit_box(self):
        g = build(DomainSpec.box((1.0, 1.0, 1.0)), 0.5)
        assert g.size == 1
        np.testing.assert_allclose(g.coords[0], [0.5, 0.5, 0.5])

    # [TRIVIAL] 3 * 3 * 1 enumeration
    def test_half_space_nine(self, nine_grid):
        assert nine_grid.size == 9
        assert np.all(nine_grid.coords[:, -1] == 0.5)

    # [DERIVED] brute-force lattice enumeration oracle
    @pytest.mark.parametrize("h", [0.25, 0.2, 1 / 6])
    def test_perturbed_count(self, h):
        spec = DomainSpec.perturbed(1.0, (-1.0, -1.0))
        assert build(spec, h).size == brute_force_interior(spec, h)

    @pytest.mark.parametrize("spec", [DomainSpec.box((1.0, 0.75, 1.25)),
                                      DomainSpec.half_space(3, 1.0),
                                      DomainSpec.perturbed(1.0, (0.5, -0.25))])
    def test_count_matches_enumeration(self, spec):
        assert build(spec, 0.25).size == brute_force_interior(spec, 0.25)

    def test_nodes_strictly_inside_and_radius_positive(self):
        spec = DomainSpec.perturbed(1.0, (-1.0, -1.0))
        g = build(spec, 0.125)
        assert np.all(spec.contains(g.coords))
        assert np.all(g.radius > 0)

    def test_lexicographic(self, small_hs):
        k = small_hs.lattice_index
        order = np.lexsort(k.T[::-1])
        assert np.array_equal(order, np.arange(small_hs.size))

    def test_errors(self):
        with pytest.raises(ValueError):
            build(DomainSpec.half_space(3, 1.0), 0.0)
        with pytest.raises(EmptyInterior):
            build(DomainSpec.box((1.0, 1.0, 1.0)), 1.0)

    def test_origin_on_boundary(self):
        for spec in (DomainSpec.box((1.0,) * 3), DomainSpec.half_space(3, 1.0),
                     DomainSpec.perturbed(1.0, (-1.0, 2.0))):
            assert not spec.contains(np.zeros(3))


class TestCurvature:
    @pytest.mark.parametrize("alpha,expected", [((-1.0, -1.0), -1.0), ((0.0, 0.0), 0.0),
                                                ((-1.0, 2.0, -4.0), -1.0)])
    def test_values(self, alpha, expected):
        spec = DomainSpec.perturbed(1.0, alpha)
        assert mean_curvature_at_origin(spec) == pytest.approx(expected)

    def test_box_rejected(self):
        with pytest.raises(ValueError):
            mean_curvature_at_origin(DomainSpec.box((1.0,) * 3))

    def test_half_space_flat(self):
        assert mean_curvature_at_origin(DomainSpec.half_space(3, 1.0)) == 0.0

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=2, max_size=2),
           st.lists(st.floats(-5, 5), min_size=2, max_size=2), st.floats(-3, 3))
    def test_linear(self, a, b, k):
        H = lambda al: mean_curvature_at_origin(DomainSpec.perturbed(1.0, al))
        combo = [x + k * y for x, y in zip(a, b)]
        assert H(combo) == pytest.approx(H(a) + k * H(b), abs=1e-9)


class TestDirichlet:
    def test_zero(self, small_hs):
        assert dirichlet_energy(Field.zeros(small_hs)) == 0.0

    # [TRIVIAL] six incident edges of weight v^2 h
    def test_single_node(self):
        g = build(DomainSpec.box((1.0,) * 3), 0.5)
        assert dirichlet_energy(Field(g, np.array([2.0]))) == pytest.approx(12.0)

    # [DERIVED] direct edge loop oracle
    @pytest.mark.parametrize("spec", [DomainSpec.half_space(3, 1.0),
                                      DomainSpec.perturbed(1.0, (-1.0, -1.0)),
                                      DomainSpec.box((1.0, 0.5, 0.75))])
    def test_loop_oracle(self, spec, rng):
        g = build(spec, 0.25)
        u = rng.normal(size=g.size)
        assert dirichlet_energy(Field(g, u)) == pytest.approx(loop_dirichlet(g, u), rel=1e-12)

    def test_pairing_symmetric(self, small_hs, rng):
        u, v = (Field(small_hs, rng.normal(size=small_hs.size)) for _ in range(2))
        assert dirichlet_pairing(u, v) == pytest.approx(dirichlet_pairing(v, u), rel=1e-13)
        assert dirichlet_pairing(u, u) == pytest.approx(dirichlet_energy(u), rel=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-10, 10))
    def test_positive_and_quadratic(self, seed, alpha):
        g = build(DomainSpec.half_space(3, 1.0), 0.25)
        u = Field(g, np.random.default_rng(seed).normal(size=g.size))
        a = dirichlet_energy(u)
        assert a > 0
        assert dirichlet_energy(alpha * u) == pytest.approx(alpha**2 * a, rel=1e-12, abs=1e-300)


class TestSingular:
    def test_zero(self, small_hs):
        assert singular_integral(Field.zeros(small_hs), 4.0, 1.0) == 0.0

    def test_single_node(self):
        g = build(DomainSpec.box((1.0,) * 3), 0.5)
        r = np.sqrt(0.75)
        assert singular_integral(Field(g, np.array([-2.0])), 3.0, 1.0) == pytest.approx(
            8.0 / r * 0.125, rel=1e-14)

    def test_loop_oracle(self, small_hs, rng):
        u = rng.normal(size=small_hs.size)
        assert singular_integral(Field(small_hs, u), 4.0, 1.0) == pytest.approx(
            loop_singular(small_hs, u, 4.0, 1.0), rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(1.1, 6.0), st.floats(0.0, 1.99))
    def test_homogeneity(self, seed, q, s):
        g = build(DomainSpec.half_space(3, 1.0), 0.5)
        u = Field(g, np.random.default_rng(seed).normal(size=g.size))
        assert singular_integral(2.0 * u, q, s) == pytest.approx(
            2.0**q * singular_integral(u, q, s), rel=1e-12)


def test_hardy_sobolev_ratio_stabilises():
    # discrete ratio sup over random fields is bounded and nonincreasing as h shrinks
    s = 1.0
    q = 2 * (3 - s) / (3 - 2)
    rng = np.random.default_rng(7)
    sups = []
    for h in (1 / 8, 1 / 16, 1 / 32):
        g = build(DomainSpec.half_space(3, 0.5), h)
        best = 0.0
        for _ in range(200):
            u = Field(g, rng.uniform(0, 1, g.size))
            best = max(best, singular_integral(u, q, s) ** (2 / q) / dirichlet_energy(u))
        sups.append(best)
    assert all(np.isfinite(sups))
    assert sups[0] >= sups[1] >= sups[2]


class TestSymmetry:
    def test_group_sizes(self):
        assert len(build(DomainSpec.half_space(3, 1.0), 0.25).symmetry_group) == 8
        assert len(build(DomainSpec.perturbed(1.0, (-1.0, -0.5)), 0.25).symmetry_group) == 4
        assert len(build(DomainSpec.box((1.0,) * 3), 0.25).symmetry_group) == 1

    def test_symmetrize_projects(self, small_hs, rng):
        u = rng.normal(size=small_hs.size)
        v = small_hs.symmetrize(u)
        assert small_hs.symmetry_defect(v) < 1e-14
        np.testing.assert_allclose(small_hs.symmetrize(v), v, atol=1e-14)

    def test_commutes_with_stiffness(self, small_hs, rng):
        u = rng.normal(size=small_hs.size)
        A = small_hs.stiffness
        np.testing.assert_allclose(small_hs.symmetrize(A @ u), A @ small_hs.symmetrize(u),
                                   atol=1e-12)


class TestFieldIO:
    def test_roundtrip(self, tmp_path, rng):
        g = build(DomainSpec.perturbed(1.0, (-1.0, -1.0)), 0.25)
        u = Field(g, rng.normal(size=g.size))
        write_field(u, tmp_path / "u.field")
        v = read_field(tmp_path / "u.field", g)
        assert np.array_equal(u.values, v.values)
        h, dims, coords, values = read_field(tmp_path / "u.field")
        assert h == 0.25 and dims == g.dims
        np.testing.assert_array_equal(coords, g.coords)

    def test_header_format(self, tmp_path, nine_grid):
        write_field(Field(nine_grid, np.arange(9.0)), tmp_path / "f")
        lines = (tmp_path / "f").read_text().splitlines()
        assert lines[0].split()[:2] == ["3", "5.0000000000000000e-01"]
        assert len(lines) == 10
        assert lines[1].split()[-1] == "0.0000000000000000e+00"

    def test_field_validation(self, nine_grid):
        with pytest.raises(ValueError):
            Field(nine_grid, np.zeros(8))
        with pytest.raises(ValueError):
            Field(nine_grid, np.full(9, np.nan))

    def test_kind_values(self):
        assert {k.value for k in DomainKind} == {"Box", "HalfSpaceBox", "PerturbedBoundary"}


def test_embed_preserves_integrals(rng):
    from nehari.grid import embed
    small = build(DomainSpec.half_space(3, 1.0), 0.25)
    big = build(DomainSpec.half_space(3, 2.0), 0.25)
    u = Field(small, rng.normal(size=small.size))
    v = embed(u, big)
    assert dirichlet_energy(v) == pytest.approx(dirichlet_energy(u), rel=1e-13)
    assert singular_integral(v, 4.0, 1.0) == pytest.approx(singular_integral(u, 4.0, 1.0), rel=1e-13)
    np.testing.assert_array_equal(embed(v, small).values, u.values)
    with pytest.raises(ValueError):
        embed(u, build(DomainSpec.half_space(3, 1.0), 0.5))
