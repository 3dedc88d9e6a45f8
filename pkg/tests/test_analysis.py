import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nehari import analysis
from nehari.analysis import (OutOfCoverage, boundary_test_function, brezis_lieb_defect,
                             concentration_profile, curvature_integrals, quintic_taper,
                             reduced_coefficient, rescale, scaling_identity_check,
                             test_function_scan as scan, threshold_compare)
from nehari.checks import compact_profile, dilated_profile
from nehari.functional import quadruple
from nehari.grid import DomainSpec, Field, build, dirichlet_energy, singular_integral
from nehari.params import ProblemParams
from nehari.solver import SolveConfig, positive_bump, solve_half_space


@pytest.fixture(scope="module")
def fine32():
    return build(DomainSpec.half_space(3, 1.0), 1 / 32)


class TestScaling:
    def test_lambda2_16(self, case1, small_hs, rng):
        # v = k u with k = 16^(1/(2*(s2) - 2)); lhs = k^2 A(u)
        P = case1.with_(lambda2=16.0)
        u = Field(small_hs, rng.normal(size=small_hs.size))
        chk = scaling_identity_check(u, P)
        k = 16.0 ** (1 / (P.q2 - 2))
        assert chk.lhs == pytest.approx(k**2 * analysis.two_term_energy(
            quadruple(u, P), P.lambda1, P.lambda2, P), rel=1e-12)
        assert chk.relative_error <= 1e-12

    def test_identity_scaling(self, case1, small_hs, rng):
        u = Field(small_hs, rng.normal(size=small_hs.size))
        chk = scaling_identity_check(u, case1.with_(lambda1=0.7))
        assert chk.lhs == chk.rhs and chk.lambda_reduced == 0.7

    def test_reduced_coefficient(self, case1):
        P = case1.with_(lambda1=1.5, lambda2=3.0)
        assert reduced_coefficient(P) == pytest.approx(1.5 * 3.0 ** ((2 - 4) / (5 - 2)))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-2, 2), st.floats(0.5, 4.0))
    def test_random(self, seed, l1, l2):
        g = build(DomainSpec.half_space(3, 1.0), 0.25)
        P = ProblemParams(3, 1.0, 0.5, 0.0, 2.0, l1, l2, 0.0)
        u = Field(g, np.random.default_rng(seed).normal(size=g.size))
        assert scaling_identity_check(u, P).relative_error <= 1e-10


def test_threshold_compare_strict(case1):
    class R:
        def __init__(self, e):
            self.energy = e
    assert not threshold_compare(R(1.0), R(1.0))
    assert threshold_compare(R(0.9), R(1.0))


class TestConcentration:
    def test_zero(self, case1, small_hs):
        prof = concentration_profile(Field.zeros(small_hs), case1, [0.1, 0.5])
        assert np.all(prof.q_values == 0) and prof.r_star is None

    def test_saturation(self, case1, small_hs, rng):
        u = Field(small_hs, rng.normal(size=small_hs.size))
        Q = quadruple(u, case1)
        prof = concentration_profile(u, case1, [0.2, 0.5, 1.0, 5.0])
        assert prof.q_values[-1] == pytest.approx(Q.b + Q.c, rel=1e-12)
        assert np.all(np.diff(prof.q_values) >= 0)
        neg = concentration_profile(u, case1.with_(lambda1=-1.0), [5.0])
        assert neg.q_values[-1] == pytest.approx(Q.c, rel=1e-12)

    def test_r_star_interpolation(self, case1, small_hs, rng):
        u = positive_bump(small_hs)
        radii = np.linspace(0.05, 2.0, 40)
        prof = concentration_profile(u, case1, radii)
        i = np.flatnonzero(prof.q_values >= prof.delta)[0]
        assert radii[i - 1] <= prof.r_star <= radii[i]
        assert prof.delta == pytest.approx(0.5 * prof.saturation)

    def test_concentrating_sequence(self, case1):
        g = build(DomainSpec.half_space(3, 1.0), 1 / 16)
        radii = np.linspace(g.h, 2.0, 200)
        rs = [concentration_profile(dilated_profile(g, w), case1, radii).r_star
              for w in np.geomspace(0.5, 0.2, 5)]
        assert all(b < a for a, b in zip(rs, rs[1:]))

    def test_delta_admissible(self, case1):
        assert analysis.delta_admissible(1e-6, case1, 1.0)
        assert not analysis.delta_admissible(1e3, case1, 1.0)


class TestRescale:
    def test_identity(self, case1, small_hs):
        u = positive_bump(small_hs)
        np.testing.assert_allclose(rescale(u, 1.0).values, u.values, rtol=1e-13)

    @pytest.mark.parametrize("r", [0.5, 0.75, 1.25, 1.5, 2.0])
    def test_invariances(self, fine32, r):
        u = compact_profile(fine32, 0.45)
        v = rescale(u, r)
        assert dirichlet_energy(v) / dirichlet_energy(u) == pytest.approx(1.0, abs=0.05)
        ratio = singular_integral(v, 4.0, 1.0) / singular_integral(u, 4.0, 1.0)
        assert ratio == pytest.approx(1.0, abs=0.05)

    def test_out_of_coverage(self, small_hs):
        with pytest.raises(OutOfCoverage):
            rescale(positive_bump(small_hs), 0.5)
        with pytest.raises(ValueError):
            rescale(positive_bump(small_hs), 0.0)


class TestBrezisLieb:
    def test_zero_bump(self, case1, small_hs):
        assert brezis_lieb_defect(positive_bump(small_hs), Field.zeros(small_hs), case1) == 0.0

    def test_disjoint_exact(self, case1, small_hs, rng):
        u = rng.normal(size=small_hs.size)
        mask = rng.random(small_hs.size) < 0.5
        a, b = Field(small_hs, u * mask), Field(small_hs, u * ~mask)
        assert brezis_lieb_defect(a, b, case1) == 0.0
        assert brezis_lieb_defect(b, a, case1) == 0.0

    def test_defect_decreases_as_bump_concentrates(self, case1):
        g = build(DomainSpec.half_space(3, 1.0), 1 / 16)
        u = positive_bump(g)
        d = [brezis_lieb_defect(u, dilated_profile(g, w), case1)
             for w in np.geomspace(0.25, 0.08, 5)]
        assert all(b < a for a, b in zip(d, d[1:]))


@pytest.fixture(scope="module")
def profile8():
    P = ProblemParams(3, 1.0, 0.5, 0.0, 2.0, 1.0, 1.0, -1e-3)
    return P, solve_half_space(P, 1.0, 1 / 8, SolveConfig(positive_part=True))


class TestTestFunction:
    def test_taper(self):
        rho = np.linspace(0, 2, 401)
        eta = quintic_taper(rho, 1.0)
        assert np.all(eta[rho <= 0.5] == 1) and np.all(eta[rho >= 1.0] == 0)
        assert np.all(np.diff(eta) <= 1e-15)
        # C^2 at the joins: second differences stay small
        assert np.max(np.abs(np.diff(eta, 2))) < 1e-3

    def test_curvature_integrals_positive(self, profile8):
        P, hs = profile8
        K1, K2, K3 = curvature_integrals(hs.u_star, P)
        assert K1 > 0 and K2 > 0 and K3 > 0

    def test_scan(self, profile8):
        P, hs = profile8
        spec = DomainSpec.perturbed(1.0, (-1.0, -1.0))
        rep = scan(hs.u_star, spec, P, [0.5, 0.35, 0.25], c_limit=hs.energy)
        assert np.all(rep.energy_at_top < 0)
        assert rep.max_energy_over_t[-1] < rep.c_limit
        assert rep.mean_curvature == -1.0
        assert rep.K3 > 0

    def test_out_of_coverage(self, profile8):
        P, hs = profile8
        with pytest.raises(OutOfCoverage):
            boundary_test_function(hs.u_star, DomainSpec.perturbed(1.0, (-1.0, -1.0)), 2.0)

    def test_needs_concave_domain(self, profile8):
        P, hs = profile8
        with pytest.raises(ValueError):
            scan(hs.u_star, DomainSpec.perturbed(1.0, (1.0, 1.0)), P, [0.25])
