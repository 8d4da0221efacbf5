import numpy as np
import pytest

from sectorcalc import calculus as ca
from sectorcalc import functionals as fn
from sectorcalc import geometry as g
from sectorcalc import semigroups as sg
from sectorcalc.geometry import ProductSector

PI = np.pi
DOM = (-PI / 2 + 0.05, PI / 2 - 0.05)
SECT = (-PI / 4, PI / 4)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


@pytest.fixture
def scalar_tuple():
    return sg.CommutingTuple([np.array([[-2.0]])], [DOM])


@pytest.fixture
def cone():
    return g.make_region([SECT[0]], [SECT[1]], [0.0])


class TestAdmissibility:
    def test_pass_with_margin(self, scalar_tuple, cone):
        rep = ca.check_admissible_for(cone, scalar_tuple, [1.0])
        assert rep.passed
        assert rep.margins[0] == pytest.approx(np.sqrt(2.0))

    def test_negated_lambda_moves_spectrum_outside(self, scalar_tuple, cone):
        rep = ca.check_admissible_for(cone, scalar_tuple, [-1.0])
        assert not rep.passed
        assert not rep.spectrum_inside

    def test_vertex_beyond_the_growth_bound_fails(self, scalar_tuple):
        # the weighted orbit stays bounded only for vertex offsets below
        # the spectral abscissa along the edges
        u_bad = g.make_region([SECT[0]], [SECT[1]], [5.0])
        rep = ca.check_admissible_for(u_bad, scalar_tuple, [1.0])
        assert not rep.passed
        assert rep.anchor_class != sg.IN_N0


class TestMainCalculus:
    def test_scalar_oracle(self, scalar_tuple, cone):
        f = ca.inverse_square(1, [1.0])
        val = ca.functional_calculus(f, scalar_tuple, [1.0], cone, [0.25], tol=1e-9)
        assert abs(val[0, 0] - 1.0 / 9.0) <= 1e-9

    def test_separable_two_axes(self):
        tup = sg.CommutingTuple([np.array([[-2.0]]), np.array([[-3.0]])], [DOM] * 2)
        u = g.make_region([SECT[0]] * 2, [SECT[1]] * 2, [0.0, 0.0])
        f = ca.inverse_square(2, [1.0, 1.0])
        val = ca.functional_calculus(f, tup, [1.0, 1.0], u, [0.25, 0.25], tol=5e-9)
        assert abs(val[0, 0] - 1.0 / 144.0) <= 1e-9

    def test_zero_function(self, scalar_tuple, cone):
        zero = ca.HoloFunction(lambda p: np.zeros(p.shape[0]), "H1", (0.0, 2.0))
        val = ca.functional_calculus(zero, scalar_tuple, [1.0], cone, [0.25], tol=1e-9)
        assert np.all(val == 0.0)

    def test_contour_independence(self, scalar_tuple, cone):
        f = ca.inverse_square(1, [1.0])
        tol = 1e-9
        v1 = ca.functional_calculus(f, scalar_tuple, [1.0], cone, [0.25], tol=tol)
        u2 = g.make_region([SECT[0]], [SECT[1]], [0.0], kind="cone_minus_disk",
                           radius=0.5)
        v2 = ca.functional_calculus(f, scalar_tuple, [1.0], u2, [0.5 + 0.1j], tol=tol)
        u3 = g.make_region([-PI / 3], [PI / 3], [-0.2])
        v3 = ca.functional_calculus(f, scalar_tuple, [1.0], u3, [0.3], tol=tol)
        assert sg.opnorm(v1 - v2) <= 2 * tol
        assert sg.opnorm(v1 - v3) <= 2 * tol

    def test_multiplicativity(self, rng, scalar_tuple, cone):
        tol = 1e-9
        f1 = ca.inverse_square(1, [1.0])
        f2 = ca.inverse_square(1, [1.5 + 0.2j])
        prod = ca.product_function(f1, f2)
        lhs = ca.functional_calculus(prod, scalar_tuple, [1.0], cone, [0.25], tol=tol)
        rhs = ca.functional_calculus(f1, scalar_tuple, [1.0], cone, [0.25], tol=tol) \
            @ ca.functional_calculus(f2, scalar_tuple, [1.0], cone, [0.25], tol=tol)
        assert sg.opnorm(lhs - rhs) <= 10 * tol

    def test_halfplane_axis(self):
        # ray-domain semigroup, full-line contour
        tup = sg.CommutingTuple([np.array([[-1.0, 0.7], [0.0, -2.0]])], [(0.0, 0.0)])
        u = g.make_region([0.0], [0.0], [-0.5])
        f = ca.inverse_square(1, [1.5])
        val = ca.functional_calculus(f, tup, [1.0], u, [0.25], tol=1e-9)
        r = np.linalg.inv(1.5 * np.eye(2) - tup.matrices[0])
        assert sg.opnorm(val - r @ r) <= 1e-9

    def test_mixed_degenerate_and_sector_axes(self):
        tup = sg.CommutingTuple([np.array([[-1.0]]), np.array([[-2.0]])],
                                [(0.0, 0.0), DOM])
        u = g.AdmissibleRegion(g.make_region([0.0], [0.0], [-0.5]).axes
                               + g.make_region([SECT[0]], [SECT[1]], [0.0]).axes)
        f = ca.inverse_square(2, [1.5, 1.0])
        val = ca.functional_calculus(f, tup, [1.0, 1.0], u, [0.25, 0.25], tol=1e-9)
        oracle = (1.0 / (1.0 + 1.5) ** 2) * (1.0 / (2.0 + 1.0) ** 2)
        assert abs(val[0, 0] - oracle) <= 1e-9

    def test_intersected_region_gives_the_same_value(self, scalar_tuple):
        # the family of admissible regions is intersection stable and the
        # calculus does not see which member is used
        f = ca.inverse_square(1, [1.0])
        tol = 1e-9
        u1 = g.make_region([SECT[0]], [SECT[1]], [0.0], kind="cone_minus_disk",
                           radius=0.5)
        u2 = g.make_region([-PI / 3], [PI / 3], [-0.2], kind="cone_minus_rect",
                           s0=0.4, s1=0.3)
        w = g.intersect_admissible(u1, u2)
        v1 = ca.functional_calculus(f, scalar_tuple, [1.0], u1, [0.25], tol=tol)
        vw = ca.functional_calculus(f, scalar_tuple, [1.0], w, [0.25], tol=tol)
        assert sg.opnorm(v1 - vw) <= 2 * tol

    def test_multiplicativity_two_axes(self):
        tol = 5e-9
        tup = sg.CommutingTuple([np.array([[-2.0]]), np.array([[-3.0]])], [DOM] * 2)
        u = g.make_region([SECT[0]] * 2, [SECT[1]] * 2, [0.0, 0.0])
        f1 = ca.inverse_square(2, [1.0, 1.0])
        f2 = ca.inverse_square(2, [2.0, 1.5])
        prod = ca.product_function(f1, f2)
        lhs = ca.functional_calculus(prod, tup, [1.0, 1.0], u, [0.25, 0.25], tol=tol)
        rhs = ca.functional_calculus(f1, tup, [1.0, 1.0], u, [0.25, 0.25], tol=tol) \
            @ ca.functional_calculus(f2, tup, [1.0, 1.0], u, [0.25, 0.25], tol=tol)
        assert sg.opnorm(lhs - rhs) <= 10 * tol

    def test_matrix_tuple_against_eigen_oracle(self, rng):
        tup = sg.CommutingTuple([sg.random_sectorial_matrix(rng, 4)], [DOM])
        u = ca.default_region(tup, [1.0], ProductSector([SECT]))
        f = ca.inverse_square(1, [1.0])
        rep = ca.spectral_map_check(f, tup, [1.0], u, tol=1e-9)
        assert rep.max_eig_rel_err <= 1e-8
        assert rep.matrix_rel_err <= 1e-8

    def test_missing_certificate_rejected(self, scalar_tuple, cone):
        f = ca.HoloFunction(lambda p: 1.0 / (p[:, 0] + 1.0), "H1", (1.0, 1.0))
        with pytest.raises(ca.AdmissibilityError):
            ca.functional_calculus(f, scalar_tuple, [1.0], cone, [0.25])

    def test_inadmissible_region_rejected(self, scalar_tuple):
        u_bad = g.make_region([SECT[0]], [SECT[1]], [5.0])
        with pytest.raises(ca.AdmissibilityError):
            ca.functional_calculus(ca.inverse_square(1, [1.0]), scalar_tuple,
                                   [1.0], u_bad, [0.25])

    def test_boundedness_estimate(self, scalar_tuple, cone):
        f = ca.inverse_square(1, [1.0])
        val = ca.functional_calculus(f, scalar_tuple, [1.0], cone, [0.25], tol=1e-9)
        norm = ca.h1_norm(f, cone, tol=1e-6)
        kk = ca.resolvent_sup_on_contour(scalar_tuple, [1.0], cone, [0.25])
        assert sg.opnorm(val) <= (2 * PI) ** -1 * kk * norm * (1 + 1e-6)


class TestQuotientExtensions:
    def test_constant_gives_identity(self, scalar_tuple, cone):
        one = ca.constant_function(1, 1.0)
        val = ca.functional_calculus_hinf(one, scalar_tuple, [1.0], cone, tol=1e-9)
        assert sg.opnorm(val - np.eye(1)) <= 1e-8

    def test_exponential_reproduces_semigroup(self, scalar_tuple, cone):
        nu = 1.0
        f = ca.exponential_function(1, nu)
        val = ca.functional_calculus_hinf(f, scalar_tuple, [1.0], cone, tol=1e-9)
        assert sg.opnorm(val - sg.expm(nu * scalar_tuple.matrices[0])) <= 1e-8

    def test_hinf_agrees_with_direct_route(self, scalar_tuple, cone):
        f = ca.inverse_square(1, [1.0])
        tol = 1e-9
        direct = ca.functional_calculus(f, scalar_tuple, [1.0], cone, [0.25], tol=tol)
        quotient = ca.functional_calculus_hinf(f, scalar_tuple, [1.0], cone, tol=tol)
        assert sg.opnorm(direct - quotient) <= 2 * tol

    def test_projection_reproduces_scaled_generator(self, rng):
        tup = sg.CommutingTuple([sg.random_sectorial_matrix(rng, 3)], [DOM])
        u = ca.default_region(tup, [0.8], ProductSector([SECT]))
        f = ca.projection_function(tup, [0.8], u, 0)
        val = ca.functional_calculus_smirnov(f, tup, [0.8], u, tol=1e-9)
        assert sg.opnorm(val - 0.8 * tup.matrices[0]) <= 1e-8

    def test_product_monomial_two_axes(self):
        tup = sg.CommutingTuple([np.array([[-2.0]]), np.array([[-3.0]])], [DOM] * 2)
        u = g.make_region([SECT[0]] * 2, [SECT[1]] * 2, [0.0, 0.0])
        w0 = ca.projection_witness(tup, [1.0, 1.0], u, 0)
        w1 = ca.projection_witness(tup, [1.0, 1.0], u, 1)
        witness = ca.product_function(w0, w1)
        witness = ca.HoloFunction(witness.fun, "Hinf", (1.0, 0.0), None, None, "w")
        f = ca.HoloFunction(lambda p: p[:, 0] * p[:, 1], "Smirnov", None, None,
                            witness, "z1*z2")
        val = ca.functional_calculus_smirnov(f, tup, [1.0, 1.0], u, tol=1e-9)
        oracle = tup.matrices[0] * tup.matrices[1]  # 1x1 blocks commute
        assert sg.opnorm(val - oracle) <= 1e-7

    def test_constant_smirnov(self, scalar_tuple, cone):
        w = ca.projection_witness(scalar_tuple, [1.0], cone, 0)
        f = ca.HoloFunction(lambda p: np.full(p.shape[0], 3.0 + 0j), "Smirnov",
                            None, None, w, "const3")
        val = ca.functional_calculus_smirnov(f, scalar_tuple, [1.0], cone, tol=1e-9)
        assert sg.opnorm(val - 3.0 * np.eye(1)) <= 1e-7

    def test_missing_witness_rejected(self, scalar_tuple, cone):
        f = ca.monomial(1, 0)
        with pytest.raises(ca.AdmissibilityError):
            ca.functional_calculus_smirnov(f, scalar_tuple, [1.0], cone)

    def test_singular_quotient_image_is_reported(self, cone):
        # a spectral spread of six decades drives the quotient image past
        # the condition threshold; surfaced, not regularized
        tup = sg.CommutingTuple([np.diag([-0.6, -1.0e6])], [DOM])
        one = ca.constant_function(1, 1.0)
        with pytest.raises(ca.DenseRangeError):
            ca.functional_calculus_hinf(one, tup, [1.0], cone, tol=1e-7)


class TestTransformConsistency:
    def test_transform_of_atom_matches_pairing(self, rng):
        # realizing the transform of a point mass equals the orbit pairing
        tup = sg.CommutingTuple([sg.random_sectorial_matrix(rng, 3)], [DOM])
        ps = ProductSector([SECT])
        phi = fn.dirac(ps, [0.7], 1.3)
        u = ca.default_region(tup, [1.0], ps)
        fb_fun = ca.HoloFunction(lambda pts: phi.fb(pts), "Hinf", None, None,
                                 None, "transform")
        lhs = ca.functional_calculus_hinf(fb_fun, tup, [1.0], u, tol=1e-9)
        rhs = fn.pair_semigroup(tup, [1.0], phi, "measure")
        assert sg.opnorm(lhs - rhs) <= 1e-7

    def test_transform_of_density_matches_pairing(self):
        tup = sg.CommutingTuple([np.array([[-2.0, 0.5], [0.0, -1.0]])], [DOM])
        ps = ProductSector([SECT])
        phi = fn.bisector_density(ps, s=[1.5], coeffs=[[1.0, 0.3]])
        u = ca.default_region(tup, [1.0], ps)
        fb_fun = ca.HoloFunction(lambda pts: phi.fb(pts), "Hinf", None, None,
                                 None, "transform")
        lhs = ca.functional_calculus_hinf(fb_fun, tup, [1.0], u, tol=1e-9)
        rhs = fn.pair_semigroup(tup, [1.0], phi, "measure", tol=1e-11)
        assert sg.opnorm(lhs - rhs) <= 1e-7


class TestHardyDiagnostics:
    def test_halfplane_norm_value(self):
        u = g.make_region([0.0], [0.0], [0.0])
        f = ca.inverse_square(1, [1.0])
        grid = ca.default_eps_grid(u) + [np.array([1e-6 + 0j])]
        val = ca.h1_norm(f, u, eps_grid=grid, tol=1e-7)
        assert abs(val - PI) <= 1e-4

    def test_norm_grid_monotone(self):
        u = g.make_region([0.0], [0.0], [0.0])
        f = ca.inverse_square(1, [1.0])
        coarse = ca.h1_norm(f, u, eps_grid=ca.default_eps_grid(u, directions=4),
                            tol=1e-6)
        fine = ca.h1_norm(f, u, eps_grid=ca.default_eps_grid(u, directions=4)
                          + ca.default_eps_grid(u, directions=8), tol=1e-6)
        assert fine >= coarse - 1e-12

    def test_zero_norm_for_zero_function(self):
        u = g.make_region([0.0], [0.0], [0.0])
        zero = ca.HoloFunction(lambda p: np.zeros(p.shape[0]), "H1", (0.0, 2.0))
        assert ca.h1_norm(zero, u, eps_grid=[np.array([0.5 + 0j])]) == 0.0

    def test_pointwise_bound_ratios(self):
        u = g.make_region([0.0], [0.0], [0.0])
        f = ca.inverse_square(1, [1.0])
        grid = ca.default_eps_grid(u) + [np.array([1e-6 + 0j])]
        norm = ca.h1_norm(f, u, eps_grid=grid, tol=1e-7)
        worst, ratios = ca.pointwise_bound_check(f, u, [[1.0], [2.0], [5.0]],
                                                 norm_lower=norm)
        assert worst <= 1.0 + 1e-3
        # deep interior: the ratio decays
        far, _ = ca.pointwise_bound_check(f, u, [[50.0]], norm_lower=norm)
        assert far < 0.1

    def test_separable_ratio_factorizes(self):
        u1 = g.make_region([0.0], [0.0], [0.0])
        u2 = g.make_region([0.0, 0.0], [0.0, 0.0], [0.0, 0.0])
        f1 = ca.inverse_square(1, [1.0])
        f2 = ca.inverse_square(2, [1.0, 1.0])
        grid1 = [np.array([1e-6 + 0j])]
        grid2 = [np.array([1e-6 + 0j, 1e-6 + 0j])]
        n1 = ca.h1_norm(f1, u1, eps_grid=grid1, tol=1e-7)
        n2 = ca.h1_norm(f2, u2, eps_grid=grid2, tol=1e-6)
        assert n2 == pytest.approx(n1 * n1, rel=1e-4)
        r1, _ = ca.pointwise_bound_check(f1, u1, [[2.0]], norm_lower=n1)
        r2, _ = ca.pointwise_bound_check(f2, u2, [[2.0, 2.0]], norm_lower=n2)
        assert r2 == pytest.approx(r1 * r1, rel=1e-3)

    def test_zero_integral_on_every_preset(self):
        presets = [
            g.make_region([SECT[0]], [SECT[1]], [0.0]),
            g.make_region([SECT[0]], [SECT[1]], [0.0], kind="cone_minus_disk",
                          radius=0.5),
            g.make_region([SECT[0]], [SECT[1]], [0.0], kind="cone_minus_rect",
                          s0=0.4, s1=0.6),
        ]
        bank = [ca.inverse_square(1, [1.0]), ca.inverse_square(1, [2.0 + 0.3j])]
        for u in presets:
            for f in bank:
                val = ca.boundary_contour_integral(f, u, [0.3], tol=1e-8)
                assert abs(val) <= 1e-7

    def test_zero_integral_on_a_product_region(self):
        u = g.make_region([SECT[0]] * 2, [SECT[1]] * 2, [0.0, 0.0],
                          kind="cone_minus_rect", s0=0.3, s1=0.3)
        f = ca.inverse_square(2, [1.0, 1.5])
        val = ca.boundary_contour_integral(f, u, [0.3, 0.2], tol=1e-7)
        assert abs(val) <= 1e-6

    def test_exponential_certificate_sets_the_truncation(self, scalar_tuple, cone):
        # exp-certified integrand: the radius comes from the rate, the value
        # still matches the scalar oracle
        nu = 1.0
        rate = nu * np.cos(PI / 4)

        def fun(p):
            return np.exp(-nu * p[:, 0]) / (p[:, 0] + 1.0) ** 2

        f = ca.HoloFunction(fun, "H1", (1.0, 2.0), exp_rate=rate, label="exp*invsq")
        val = ca.functional_calculus(f, scalar_tuple, [1.0], cone, [0.25], tol=1e-9)
        oracle = np.exp(-2.0) / 9.0
        assert abs(val[0, 0] - oracle) <= 1e-9

    def test_interior_reproduction(self, cone):
        f = ca.inverse_square(1, [2.0])
        val = ca.interior_cauchy_value(f, cone, [0.5], [1.0], tol=1e-10)
        assert abs(val - 1.0 / 9.0) <= 1e-10


class TestOuterDiagnostics:
    def test_disk_witness_passes(self):
        f = lambda s: (1.0 - s) / 2.0
        wit = ca.WitnessSequence(tuple((lambda s, n=n: (1.0 + 1.0 / n - s) / 2.0)
                                       for n in (1, 4, 16, 64, 256)))
        rr, th = np.meshgrid(np.linspace(0.05, 0.95, 10),
                             np.linspace(0, 2 * PI, 16, endpoint=False))
        grid = (rr * np.exp(1j * th)).ravel()
        rep = ca.strongly_outer_check(f, wit, grid,
                                      0.999 * np.exp(1j * np.linspace(0, 2 * PI, 64,
                                                                      endpoint=False)))
        assert rep.passed
        assert rep.min_witness_modulus > 0

    def test_singular_slice_fails(self):
        f = lambda s: np.exp((s + 1.0) / (s - 1.0))
        wit = ca.WitnessSequence(tuple(
            (lambda s, n=n: np.exp((s + 1.0 + 1.0 / n) / (s - 1.0 - 1.0 / n)))
            for n in (1, 2, 4, 8, 16)))
        rep = ca.strongly_outer_check(f, wit, np.linspace(0.0, 0.98, 40))
        assert not rep.passed

    def test_singular_slice_means(self):
        f = lambda s: np.exp((s + 1.0) / (s - 1.0))
        means, bmean = ca.outer_diagnostic_disk(f)
        assert np.max(np.abs(means + 1.0)) <= 1e-12
        assert abs(bmean) <= 1e-12

    def test_constant_means_agree(self):
        f = lambda s: np.full(np.shape(s), 2.5 + 0j)
        means, bmean = ca.outer_diagnostic_disk(f)
        assert np.allclose(means, np.log(2.5))
        assert bmean == pytest.approx(np.log(2.5))

    def test_zero_detection(self):
        f = lambda s: s - 0.5
        with pytest.raises(ZeroDivisionError):
            ca.outer_diagnostic_disk(f, r_grid=np.array([0.5]),
                                     t_grid=np.array([0.0]))
