#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netkit/asymptotics.hpp"
#include "netkit/boundary_layer.hpp"
#include "netkit/mc_engine.hpp"

#include <cmath>
#include <cstdlib>

using namespace netkit;

TEST_CASE("simulation parameters: validation") {
    SimParams p;
    p.validate();
    p.dt = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.dt = 1e-4;
    p.n_paths = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.n_paths = 10;
    p.max_time = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.max_time = 1;
    p.refine_factor = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("worker pool: env override and bit-identical estimates") {
    setenv("NET_WORKERS", "5", 1);
    CHECK(worker_count() == 5);
    setenv("NET_WORKERS", "junk", 1);
    CHECK(worker_count() >= 1);  // falls back to hardware concurrency

    SimParams prm;
    prm.dt = 5e-4;
    prm.n_paths = 400;
    prm.seed = 11;
    setenv("NET_WORKERS", "1", 1);
    const auto serial = simulate_disk_calibration(1.0, 1.0, {0.2, 0.1}, prm);
    setenv("NET_WORKERS", "3", 1);
    const auto pooled = simulate_disk_calibration(1.0, 1.0, {0.2, 0.1}, prm);
    unsetenv("NET_WORKERS");
    CHECK(serial.mean == pooled.mean);  // exact: per-path streams, ordered reduce
    CHECK(serial.std_error == pooled.std_error);
    CHECK(serial.n_absorbed == pooled.n_absorbed);

    // same worker count, different seed: statistically compatible, not equal
    SimParams prm2 = prm;
    prm2.seed = 12;
    const auto other = simulate_disk_calibration(1.0, 1.0, {0.2, 0.1}, prm2);
    CHECK(other.mean != serial.mean);
}

TEST_CASE("calibration kernels: exact mean first-passage references") {
    SimParams prm;
    prm.dt = 1e-4;
    prm.n_paths = 1500;
    prm.seed = 3;

    // disk, from the center: (R^2 - r^2)/4D = 0.25
    const auto disk = simulate_disk_calibration(1.0, 1.0, {0.0, 0.0}, prm);
    CHECK(disk.n_censored == 0);
    CHECK(std::abs(disk.mean - 0.25) < 0.025);
    CHECK(disk.std_error > 0);
    CHECK(disk.std_error < 0.02);
    REQUIRE(disk.tail.has_value());  // n_absorbed >= 200
    CHECK(disk.tail->n_tail >= 50);
    CHECK(disk.tail->pass);  // center-start disk FPT has an exponential tail

    // ball, from the center: (R^2 - r^2)/6D, and off-center start
    const auto ball = simulate_ball_calibration(1.0, 1.0, {0.0, 0.0, 0.0}, prm);
    CHECK(std::abs(ball.mean - 1.0 / 6.0) < 0.02);
    const auto off = simulate_ball_calibration(1.0, 1.0, {0.5, 0.0, 0.0}, prm);
    CHECK(std::abs(off.mean - 0.75 / 6.0) < 0.02);

    // start on the absorbing boundary: immediate escape
    const auto zero = simulate_disk_calibration(1.0, 1.0, {1.0, 0.0}, prm);
    CHECK(zero.mean == 0.0);
    CHECK(zero.n_absorbed == prm.n_paths);

    CHECK_THROWS_AS(simulate_disk_calibration(-1.0, 1.0, {0, 0}, prm), std::invalid_argument);
    CHECK_THROWS_AS(simulate_ball_calibration(1.0, 0.0, {0, 0, 0}, prm), std::invalid_argument);
}

TEST_CASE("censoring: flagged when the horizon bites, throws when it starves") {
    SimParams prm;
    prm.dt = 1e-4;
    prm.n_paths = 400;
    prm.seed = 4;
    prm.max_time = 0.15;  // mean is 0.25, so a large fraction gets cut
    const auto cut = simulate_disk_calibration(1.0, 1.0, {0.0, 0.0}, prm);
    CHECK(cut.n_censored > 0);
    CHECK(cut.censor_flagged);
    CHECK(cut.mean < 0.15);  // mean over absorbed paths only

    prm.max_time = 1e-4;  // one step cannot reach the boundary from the center
    CHECK_THROWS_WITH_AS(simulate_disk_calibration(1.0, 1.0, {0.0, 0.0}, prm),
                         "mc_engine: all paths censored, no estimate possible",
                         std::runtime_error);
}

TEST_CASE("planar funnel kernel: smoke against the prediction, start checks") {
    const auto spec = PlanarFunnelSpec::tangent_circles(0.05, 0.35, 0.35, 1.0);
    PlanarFunnelDomain dom(spec);
    SimParams prm;
    prm.dt = 2.5e-4;
    prm.n_paths = 600;
    prm.seed = 9;
    const auto est = simulate_mfpt_2d(dom, std::nullopt, 1.0, prm);
    const double pred = net_2d_funnel(spec, 1.0).tau;
    CHECK(est.n_censored == 0);
    CHECK(est.mean / pred > 0.55);  // pre-asymptotic gap stays bounded
    CHECK(est.mean / pred < 1.15);

    CHECK_THROWS_AS(simulate_mfpt_2d(dom, Vec2{0.0, -1.0}, 1.0, prm), std::invalid_argument);
    CHECK_THROWS_AS(simulate_mfpt_2d(dom, std::nullopt, 0.0, prm), std::invalid_argument);
}

TEST_CASE("exit splitting: two equal necks, binomial errors, guards") {
    PlanarFunnelDomain dom({{0.05, 0.25}, {0.05, 0.25}}, 2.262);
    SimParams prm;
    prm.dt = 5e-4;
    prm.n_paths = 400;
    prm.seed = 5;
    const auto [probs, fpt] = simulate_exit_probs(dom, std::nullopt, 1.0, prm);
    REQUIRE(probs.p.size() == 2);
    CHECK(probs.p[0] + probs.p[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(probs.std_error[0] > 0);
    CHECK(std::abs(probs.p[0] - 0.5) < 4 * probs.std_error[0]);
    CHECK(fpt.mean > 0);
    CHECK(fpt.n_absorbed == prm.n_paths);

    PlanarFunnelDomain one(PlanarFunnelSpec::tangent_circles(0.05, 0.35, 0.35, 1.0));
    CHECK_THROWS_AS(simulate_exit_probs(one, std::nullopt, 1.0, prm), std::invalid_argument);
}

TEST_CASE("revolution solid kernel: smoke run and start checks") {
    const RevolutionSolid solid(RevolutionProfile::funnel_bulb(0.2, 0.3, 0.4));
    SimParams prm;
    prm.dt = 5e-4;
    prm.n_paths = 150;
    prm.seed = 6;
    const auto est = simulate_mfpt_3d(solid, std::nullopt, 1.0, prm);
    CHECK(est.mean > 0);
    CHECK(est.n_absorbed == prm.n_paths);

    const double below = solid.profile().Lambda - 0.1;
    CHECK_THROWS_AS(simulate_mfpt_3d(solid, Vec3{below, 0, 0}, 1.0, prm),
                    std::invalid_argument);
}

TEST_CASE("projected surface kernel: matches the exact quadrature") {
    const auto prof = RevolutionProfile::sphere(1.0, 0.3);
    const auto field = drift_field(prof, 1.0, 4096);
    SimParams prm;
    prm.dt = 2e-4;
    prm.n_paths = 500;
    prm.seed = 7;
    const auto est = simulate_surface_1d(field, 0.0, prm);
    const double exact = surface_mfpt_quadrature(prof, 1.0);
    CHECK(std::abs(est.mean / exact - 1.0) < 0.2);

    // at or below the absorbing end: immediate escape; above the pole: invalid
    CHECK(simulate_surface_1d(field, prof.Lambda, prm).mean == 0.0);
    CHECK_THROWS_AS(simulate_surface_1d(field, 0.5, prm), std::invalid_argument);
}

TEST_CASE("needle kernel: doubled mean, metadata, start checks") {
    NeedleStripSpec spec;
    spec.l0 = 1.0;
    spec.l = 0.9;
    spec.DX = spec.DY = spec.Dr = 1.0;
    SimParams prm;
    prm.dt = 5e-4;
    prm.n_paths = 250;
    prm.seed = 8;
    const auto est = simulate_needle(spec, 0.0, 0.3, prm);
    CHECK(est.n_absorbed + est.n_censored == prm.n_paths);
    CHECK(est.mean > 0);
    // the reported mean is the doubled half-turn time
    CHECK(est.metadata_value("mean_to_black") == doctest::Approx(est.mean / 2).epsilon(1e-12));
    CHECK_THROWS_AS(est.metadata_value("nope"), std::out_of_range);

    CHECK(simulate_needle(spec, 1.6, 0.0, prm).mean == 0.0);  // already past the barrier
    CHECK_THROWS_AS(simulate_needle(spec, -0.1, 0.3, prm), std::invalid_argument);
    spec.l = 1.2;  // longer than the strip
    CHECK_THROWS_AS(simulate_needle(spec, 0.0, 0.3, prm), std::invalid_argument);
}
