#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netkit/geometry.hpp"
#include "netkit/rng.hpp"

#include <cmath>
#include <complex>

using namespace netkit;

static constexpr double kPi = 3.14159265358979323846;

TEST_CASE("mobius map: inverse, pole, unit-disk preservation") {
    const std::complex<double> alpha(-0.9, 0.0);
    const std::complex<double> zs[] = {{0.3, 0.4}, {-0.7, 0.1}, {0.0, 0.0}, {0.05, -0.85}};
    for (const auto& z : zs) {
        const auto w = mobius_map(z, alpha);
        const auto back = mobius_inverse(w, alpha);
        CHECK(std::abs(back - z) < 1e-12);
        CHECK(std::abs(w) < 1.0 + 1e-12);  // disk automorphism
    }
    CHECK_THROWS_AS(mobius_map(1.0 / alpha, alpha), std::domain_error);
}

TEST_CASE("funnel map parameter: frozen values and small-eps expansion") {
    CHECK(funnel_alpha(1, 1, 0.01) == doctest::Approx(-0.904875).epsilon(1e-6));
    CHECK(funnel_alpha(1, 1, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(funnel_alpha(1, 3, 0.02) == doctest::Approx(-0.8412670270).epsilon(1e-9));

    // alpha = -1 + sqrt(2 rc eps/(Rc+rc)) + O(eps)
    const double eps = 1e-6;
    const double lead = -1 + std::sqrt(2 * 3 * eps / (1 + 3));
    CHECK(funnel_alpha(1, 3, eps) == doctest::Approx(lead).epsilon(1e-5));
    CHECK(std::abs(funnel_alpha(2, 0.5, 0.05)) < 1.0);

    CHECK_THROWS_AS(funnel_alpha(-1, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(funnel_alpha(1, 1, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(funnel_alpha(1, 1, 1.0), std::invalid_argument);
}

TEST_CASE("planar funnel spec: constructors, regime, scaling round-trip") {
    const auto tc = PlanarFunnelSpec::tangent_circles(0.05, 0.35, 0.4, 1.0);
    CHECK(tc.eps == 0.05);
    CHECK(tc.Rc == 0.35);
    CHECK(tc.rc == 0.4);
    CHECK(tc.nu_plus == 1.0);
    CHECK(tc.ell_plus == 0.35);
    CHECK(tc.ell_minus == 0.4);
    tc.validate();

    const auto pw = PlanarFunnelSpec::power_walls(0.02, 2.0, 0.5, 1.5);
    CHECK(pw.nu_plus == 2.0);
    CHECK(pw.ell_plus == 0.5);
    CHECK(pw.Rc == 0.5);  // duplicated for formula selection
    CHECK_THROWS_AS(PlanarFunnelSpec::power_walls(0.02, 1.0, 0.5, 1.5), std::invalid_argument);

    CHECK(PlanarFunnelSpec::tangent_circles(0.01, 1, 1, 1).is_asymptotic_regime());
    CHECK_FALSE(PlanarFunnelSpec::tangent_circles(0.5, 1, 1, 1).is_asymptotic_regime());

    PlanarFunnelSpec bad = tc;
    bad.eps = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    const auto nd = nondimensionalize(tc);
    CHECK(nd.scale == doctest::Approx(0.35));
    CHECK(nd.spec.ell_plus == doctest::Approx(1.0));
    CHECK(nd.spec.eps == doctest::Approx(0.05 / 0.35));
    CHECK(nd.spec.area == doctest::Approx(1.0 / (0.35 * 0.35)));
    const auto rd = redimensionalize(nd.spec, nd.scale);
    CHECK(rd.eps == doctest::Approx(tc.eps).epsilon(1e-14));
    CHECK(rd.area == doctest::Approx(tc.area).epsilon(1e-14));
    CHECK(rd.rc == doctest::Approx(tc.rc).epsilon(1e-14));
}

TEST_CASE("planar domain: realization, containment, absorption, reflection") {
    const auto spec = PlanarFunnelSpec::tangent_circles(0.05, 0.35, 0.35, 1.0);
    PlanarFunnelDomain dom(spec);
    CHECK(dom.n_necks() == 1);
    CHECK(dom.area() == doctest::Approx(1.0).epsilon(1e-12));
    const double Rh = dom.head_radius();
    // area + excluded half-disks = head half-disk
    CHECK(kPi / 2 * Rh * Rh ==
          doctest::Approx(1.0 + kPi / 2 * 2 * 0.35 * 0.35).epsilon(1e-12));

    CHECK(dom.contains({0.0, 0.8 * Rh}));
    CHECK(dom.contains({0.0, 0.5}));             // above the gap, outside both circles
    CHECK_FALSE(dom.contains({0.374, 0.01}));    // inside the right flanking circle
    CHECK_FALSE(dom.contains({0.0, -0.1}));      // below the floor
    CHECK_FALSE(dom.contains({Rh + 0.1, 0.2}));  // beyond the head arc

    // conservative clearance: positive inside, no larger than the true distance
    const double true_gap = std::sqrt(0.375 * 0.375 + 0.25) - 0.35;  // to the circle
    const double sd = dom.safe_distance({0.0, 0.5});
    CHECK(sd > 0);
    CHECK(sd <= true_gap + 1e-12);
    CHECK(dom.neck_distance({0.0, 0.3}) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(dom.neck_distance({0.5, 0.0}) == doctest::Approx(0.475).epsilon(1e-12));  // to the gap edge

    // straight drop through the gap absorbs and reports the neck index
    const auto hit = dom.advance({0.0, 0.001}, {0.0, -0.01});
    CHECK(hit.absorbed);
    CHECK(hit.neck == 0);

    // floor outside the neck assembly reflects
    const auto ref = dom.advance({0.9, 0.001}, {0.0, -0.01});
    CHECK_FALSE(ref.absorbed);
    CHECK(ref.pos.y > 0);
    CHECK(dom.contains(ref.pos));

    CHECK_THROWS_AS(dom.advance({0.0, 0.5}, {10 * Rh, 0.0}), std::invalid_argument);

    // no leakage under a long reflected walk
    Xoshiro256pp rng(7, 0);
    Vec2 pos{0.0, 0.7 * Rh};
    int absorbed = 0;
    for (int i = 0; i < 4000; ++i) {
        const Vec2 step{0.05 * rng.gaussian(), 0.05 * rng.gaussian()};
        const auto res = dom.advance(pos, step);
        if (res.rejected) continue;
        if (res.absorbed) {
            ++absorbed;
            pos = {0.0, 0.7 * Rh};
            continue;
        }
        REQUIRE(dom.contains(res.pos));
        pos = res.pos;
    }
    CHECK(absorbed > 0);  // the walk does find the gap eventually

    // interior sampling is deterministic in (seed, index) and in-domain
    const Vec2 s0 = dom.sample_interior(42, 7);
    const Vec2 s1 = dom.sample_interior(42, 7);
    CHECK(s0.x == s1.x);
    CHECK(s0.y == s1.y);
    CHECK(dom.contains(s0));
    const Vec2 s2 = dom.sample_interior(42, 8);
    CHECK((s2.x != s0.x || s2.y != s0.y));

    // free-function spellings forward to the member versions
    CHECK(contains({0.0, 0.5}, dom));
    const auto r2 = reflect({0.9, 0.001}, {0.0, -0.01}, dom);
    CHECK_FALSE(r2.absorbed);

    // head too small to enclose the neck assembly
    CHECK_THROWS_AS(PlanarFunnelDomain(PlanarFunnelSpec::tangent_circles(0.05, 1, 1, kPi)),
                    std::invalid_argument);
}

TEST_CASE("planar domain: multiple necks and the power-law wedge wall") {
    PlanarFunnelDomain dom({{0.01, 0.25}, {0.04, 0.25}}, 2.262);
    CHECK(dom.n_necks() == 2);
    CHECK(dom.neck(0).eps == doctest::Approx(0.01));
    CHECK(dom.neck(1).eps == doctest::Approx(0.04));
    CHECK(dom.neck(0).xc != dom.neck(1).xc);
    CHECK(dom.contains({0.0, 0.8 * dom.head_radius()}));
    CHECK_THROWS_AS(PlanarFunnelDomain({}, 1.0), std::invalid_argument);

    // wedge wall follows eps/2 + y^{1+nu}/(nu(1+nu) ell^nu)
    PlanarFunnelDomain wdom(PlanarFunnelSpec::power_walls(0.02, 2.0, 0.5, 1.5));
    const auto& nk = wdom.neck(0);
    CHECK(nk.nu == 2.0);
    CHECK(nk.wall_at(0.2) == doctest::Approx(0.01 + std::pow(0.2, 3) / 1.5).epsilon(1e-6));
    CHECK(nk.wall_at(0.0) == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("revolution profiles: sphere, funnel bulb, cylinder, cone") {
    const auto sph = RevolutionProfile::sphere(1.0, 0.1);
    sph.validate();
    CHECK(sph.Lambda == doctest::Approx(-(1 + std::cos(0.1))).epsilon(1e-14));
    CHECK(sph.a == doctest::Approx(std::sin(0.1)).epsilon(1e-14));
    CHECK(sph.k_top == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // Archimedes: lateral area of a zone is 2 pi R times its height
    CHECK(profile_area(sph, sph.Lambda) ==
          doctest::Approx(2 * kPi * (1 + std::cos(0.1))).epsilon(1e-6));

    const auto fb = RevolutionProfile::funnel_bulb(0.1, 1.0, 0.5);
    fb.validate();
    CHECK(fb.a == doctest::Approx(0.1));
    CHECK(fb.r(fb.Lambda) == doctest::Approx(0.1).epsilon(1e-9));
    // C1 join between the funnel wall and the bulb
    const double h = 1e-7;
    CHECK(fb.dr(fb.x_join - h) == doctest::Approx(fb.dr(fb.x_join + h)).epsilon(1e-4));
    CHECK(fb.r(fb.x_join - h) == doctest::Approx(fb.r(fb.x_join + h)).epsilon(1e-5));
    CHECK_THROWS_AS(RevolutionProfile::funnel_bulb(0.6, 1.0, 0.5), std::invalid_argument);

    const auto cyl = RevolutionProfile::cylinder(0.5, 2.0);
    cyl.validate();
    CHECK(profile_area(cyl, cyl.Lambda) == doctest::Approx(2 * kPi * 0.5 * 2.0).epsilon(1e-9));

    const auto cone = RevolutionProfile::cone(0.1, 0.5, 1.0);
    cone.validate();
    CHECK(cone.r(0.0) == doctest::Approx(0.6).epsilon(1e-12));
    const double lateral = 2 * kPi * std::sqrt(1.25) * (0.1 * 1.0 + 0.5 * 0.5);
    CHECK(profile_area(cone, cone.Lambda) == doctest::Approx(lateral).epsilon(1e-9));

    // a declared nu must match the realized neck shape
    RevolutionProfile lying = RevolutionProfile::funnel_bulb(0.1, 1.0, 0.5);
    lying.nu = 2.0;
    CHECK_THROWS_AS(lying.validate(), std::invalid_argument);
}

TEST_CASE("revolution solid: volume, containment, absorption, no leakage") {
    const RevolutionSolid solid(RevolutionProfile::funnel_bulb(0.1, 1.0, 0.5));
    // frozen from an independent 1D quadrature of the same profile
    CHECK(solid.volume() == doctest::Approx(0.58599).epsilon(1e-3));

    const auto& prof = solid.profile();
    CHECK(solid.contains({-0.5, 0.2, 0.3}));  // inside the bulb
    const double xn = prof.Lambda + 0.05;
    CHECK(solid.contains({xn, 0.09, 0.0}));
    CHECK_FALSE(solid.contains({xn, 0.2, 0.0}));
    CHECK_FALSE(solid.contains({prof.Lambda - 0.01, 0.0, 0.0}));
    CHECK_FALSE(solid.contains({0.2, 0.0, 0.0}));  // beyond the far pole

    CHECK(solid.safe_distance({-0.5, 0.0, 0.0}) > 0);
    CHECK(solid.neck_distance({prof.Lambda, 0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(solid.neck_distance({prof.Lambda + 0.3, 0.0, 0.0}) == doctest::Approx(0.3));

    const auto hit = solid.advance({prof.Lambda + 0.001, 0.0, 0.0}, {-0.01, 0.0, 0.0});
    CHECK(hit.absorbed);

    Xoshiro256pp rng(11, 0);
    Vec3 pos{-0.5, 0.0, 0.0};
    int absorbed = 0;
    for (int i = 0; i < 4000; ++i) {
        const Vec3 step{0.03 * rng.gaussian(), 0.03 * rng.gaussian(), 0.03 * rng.gaussian()};
        const auto res = solid.advance(pos, step);
        if (res.rejected) continue;
        if (res.absorbed) {
            ++absorbed;
            pos = {-0.5, 0.0, 0.0};
            continue;
        }
        REQUIRE(solid.contains(res.pos));
        pos = res.pos;
    }

    const Vec3 s0 = solid.sample_interior(5, 3);
    const Vec3 s1 = solid.sample_interior(5, 3);
    CHECK(s0.x == s1.x);
    CHECK(solid.contains(s0));
}

TEST_CASE("composite, dumbbell, needle descriptors") {
    CompositeSpec c;
    c.head_volume = 1;
    c.neck_radius = 0.01;
    c.neck_len = 1;
    c.dim = 3;
    c.validate();
    CHECK(c.absorbing_measure() == doctest::Approx(kPi * 1e-4).epsilon(1e-14));
    c.dim = 4;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    DumbbellSpec d;
    d.omega1_vol = d.omega3_vol = 1;
    d.Rc1 = d.Rc3 = 1;
    d.a = 0.01;
    d.L = 1;
    d.D = 1;
    d.validate();
    CHECK(d.is_asymptotic_regime());
    d.a = 0.5;
    CHECK_FALSE(d.is_asymptotic_regime());
    d.a = -1;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);

    NeedleStripSpec n;
    n.l0 = 1;
    n.l = 0.99;
    n.DX = n.DY = 1;
    n.Dr = 1;
    n.validate();
    CHECK(n.eps() == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(needle_contains(0.0, 0.3, n));          // horizontal needle, wide clearance
    CHECK(needle_contains(kPi / 2 - 0.001, 0.004, n));
    CHECK_FALSE(needle_contains(kPi / 2 - 0.001, 0.006, n));
    n.l = 1.5;
    CHECK_THROWS_AS(n.validate(), std::invalid_argument);
}
