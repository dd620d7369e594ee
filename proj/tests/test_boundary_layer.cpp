#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netkit/asymptotics.hpp"
#include "netkit/boundary_layer.hpp"

#include <cmath>

using namespace netkit;

static constexpr double kPi = 3.14159265358979323846;

// Closed form for Y'' + c Y/(1+xi^2)^2 = 0: with theta = arctan(xi) and
// omega = sqrt(1+c),  Y = sqrt(1+xi^2) [y0 cos(omega theta) + (dy0/omega) sin(omega theta)].
static double bleq_exact(double y0, double dy0, double xi, double c) {
    const double w = std::sqrt(1.0 + c);
    const double th = std::atan(xi);
    return std::sqrt(1.0 + xi * xi) * (y0 * std::cos(w * th) + dy0 / w * std::sin(w * th));
}

// xi -> inf limits of the same closed form: Y ~ slope * xi + intercept
static void bleq_limits(double y0, double dy0, double c, double& slope, double& intercept) {
    const double w = std::sqrt(1.0 + c);
    const double half = w * kPi / 2;
    slope = y0 * std::cos(half) + dy0 / w * std::sin(half);
    intercept = w * (y0 * std::sin(half) - dy0 / w * std::cos(half));
}

TEST_CASE("neck layer ODE: solver matches the closed form along the grid") {
    for (auto ics : {std::pair{-4.7, -1.0}, std::pair{0.0, 2.0}, std::pair{1.0, 0.5}}) {
        const auto sol = solve_bleq(ics.first, ics.second);
        REQUIRE(sol.grid.size() == sol.Y.size());
        REQUIRE(sol.grid.front() == 0.0);
        CHECK(sol.Y.front() == ics.first);
        CHECK(sol.dY.front() == ics.second);
        for (size_t i = 0; i < sol.grid.size(); i += 97) {
            const double exact = bleq_exact(ics.first, ics.second, sol.grid[i], 0.25);
            CHECK(std::abs(sol.Y[i] - exact) <= 1e-6 * (1.0 + std::abs(exact)));
        }
    }
}

TEST_CASE("neck layer ODE: extrapolated limits, classification, Wronskian") {
    const auto dec = solve_bleq(-4.7, -1.0);
    double slope, intercept;
    bleq_limits(-4.7, -1.0, 0.25, slope, intercept);
    CHECK(slope == doctest::Approx(-0.012667276634).epsilon(1e-6));  // frozen closed form
    CHECK(intercept == doctest::Approx(-5.3490465903).epsilon(1e-10));
    CHECK_FALSE(dec.growing);  // |slope| under 2% of the IC scale
    CHECK(dec.slope == doctest::Approx(slope).epsilon(1e-6));
    CHECK(std::abs(dec.intercept - intercept) < 1e-6);
    CHECK(dec.asymptote == dec.intercept);
    // companion started from (0,2): W = Y1 Y' - Y1' Y = -2 y0 for all xi
    CHECK(dec.wronskian == doctest::Approx(9.4).epsilon(1e-9));
    CHECK(dec.wronskian_drift < 1e-8);

    const auto grow = solve_bleq(0.0, 2.0);
    bleq_limits(0.0, 2.0, 0.25, slope, intercept);
    CHECK(slope == doctest::Approx(1.7581956314).epsilon(1e-9));
    CHECK(grow.growing);
    CHECK(grow.slope == doctest::Approx(slope).epsilon(1e-8));
    CHECK(std::abs(grow.intercept - intercept) < 1e-5);
    CHECK(grow.asymptote == grow.slope);
    CHECK(grow.wronskian == doctest::Approx(0.0).epsilon(1e-12));  // W(Y1, Y1)

    // limits are already converged: halving the range moves them negligibly
    const auto half = solve_bleq(-4.7, -1.0, 5e3);
    CHECK(std::abs(half.intercept - dec.intercept) < 1e-6);
    CHECK(std::abs(half.slope - dec.slope) < 1e-7);

    CHECK_THROWS_AS(solve_bleq(1, 1, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_bleq(1, 1, 1e4, -1.0), std::invalid_argument);

    const auto txt = dec.to_text();
    CHECK(txt.find('\n') != std::string::npos);
    CHECK(txt.compare(0, 1, "0") == 0);  // first grid node
}

TEST_CASE("projected surface drift: cylinder and sphere references") {
    const auto cyl = drift_field(RevolutionProfile::cylinder(0.5, 2.0), 1.5, 33);
    for (size_t i = 0; i < cyl.grid.size(); ++i) {
        CHECK(cyl.a_of_z[i] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(cyl.b_of_z[i] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
        CHECK(cyl.A_of_z[i] == doctest::Approx(0.0).epsilon(1e-14));
    }

    // sphere, R = 1, D = 1: x + 1 is an eigenfunction of the generator, so
    // a(x) = -2(x+1) exactly and b(x) = sqrt(2) r(x)
    const double delta = 0.1;
    const auto sph = drift_field(RevolutionProfile::sphere(1.0, delta), 1.0, 201);
    const double Lam = -(1 + std::cos(delta));
    CHECK(sph.grid.front() == doctest::Approx(Lam).epsilon(1e-14));
    CHECK(sph.grid.back() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(sph.a_of_z.front() == doctest::Approx(-2.0 * (Lam + 1)).epsilon(1e-10));
    CHECK(sph.b_of_z.front() == doctest::Approx(std::sqrt(2.0) * std::sin(delta)).epsilon(1e-10));
    CHECK(sph.a_of_z.back() == doctest::Approx(-2.0).epsilon(1e-12));  // pole limit -4D/k^2
    CHECK(sph.b_of_z.back() == 0.0);
    const double xm = sph.grid[100];
    CHECK(sph.a_of_z[100] == doctest::Approx(-2.0 * (xm + 1)).epsilon(1e-10));
    CHECK(sph.b_of_z[100] ==
          doctest::Approx(std::sqrt(2.0 * (1.0 - (xm + 1) * (xm + 1)))).epsilon(1e-10));

    // A is the trapezoid antiderivative of -a on the same grid, A(Lambda) = 0
    CHECK(sph.A_of_z.front() == 0.0);
    const double h = sph.grid[1] - sph.grid[0];
    for (int i = 0; i < 200; ++i) {
        const double inc = -h * (sph.a_of_z[i] + sph.a_of_z[i + 1]) / 2;
        CHECK(sph.A_of_z[i + 1] - sph.A_of_z[i] == doctest::Approx(inc).epsilon(1e-12));
    }

    CHECK_THROWS_AS(drift_field(RevolutionProfile::sphere(1, 0.1), 1.0, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(drift_field(RevolutionProfile::sphere(1, 0.1), 0.0, 10),
                    std::invalid_argument);
}

TEST_CASE("pole-to-rim escape time: quadrature against the log closed form") {
    // sphere with an absorbing polar cap: tau = (2 R^2 / D) log(1 / sin(delta/2))
    const double tau1 = surface_mfpt_quadrature(RevolutionProfile::sphere(1.0, 0.1), 1.0);
    CHECK(tau1 == doctest::Approx(2.0 * std::log(1.0 / std::sin(0.05))).epsilon(1e-4));
    const double tau2 = surface_mfpt_quadrature(RevolutionProfile::sphere(0.7, 0.3), 2.0);
    CHECK(tau2 ==
          doctest::Approx(2.0 * 0.49 / 2.0 * std::log(1.0 / std::sin(0.15))).epsilon(1e-4));

    // 1/D scaling is exact
    const double tauD = surface_mfpt_quadrature(RevolutionProfile::sphere(1.0, 0.1), 2.0);
    CHECK(tauD == doctest::Approx(tau1 / 2).epsilon(1e-12));

    CHECK_THROWS_AS(surface_mfpt_quadrature(RevolutionProfile::sphere(1, 0.1), -1.0),
                    std::invalid_argument);
}

TEST_CASE("pole-to-rim escape time: funnel necks approach the neck formula") {
    // the quadrature is exact for any neck size; the closed-form prediction is
    // the small-neck limit, so the ratio must approach 1 from a = 0.04 to 0.02
    double ratio[2];
    int k = 0;
    for (double a : {0.04, 0.02}) {
        const auto prof = RevolutionProfile::funnel_bulb(a, 1.0, 1.0);
        const double quad = surface_mfpt_quadrature(prof, 1.0);
        const double S = profile_area(prof, prof.Lambda);
        const double pred = net_surface(S, a, 1.0, 1.0, 1.0).tau;
        ratio[k++] = quad / pred;
    }
    CHECK(std::abs(ratio[1] - 1.0) < std::abs(ratio[0] - 1.0));
    CHECK(std::abs(ratio[1] - 1.0) < 0.35);

    // smaller necks take longer
    const double t4 = surface_mfpt_quadrature(RevolutionProfile::funnel_bulb(0.04, 1, 1), 1.0);
    const double t2 = surface_mfpt_quadrature(RevolutionProfile::funnel_bulb(0.02, 1, 1), 1.0);
    const double t1 = surface_mfpt_quadrature(RevolutionProfile::funnel_bulb(0.01, 1, 1), 1.0);
    CHECK(t1 > t2);
    CHECK(t2 > t4);
}
