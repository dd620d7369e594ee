#pragma once
// Euler-Maruyama first-passage Monte Carlo for the supported domain families.
// Every kernel draws per-path random streams derived from (seed, path index),
// so estimates are bit-identical for any worker count.

#include "netkit/boundary_layer.hpp"
#include "netkit/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace netkit {

struct SimParams {
    double dt = 1e-4;
    uint64_t n_paths = 1000;
    uint64_t seed = 1;
    double max_time = 1e9;  // per-path cap; hitting it censors the path
    bool adaptive = true;   // refine dt near the absorbing neck
    int refine_factor = 16;

    void validate() const;
};

// Exponential-tail fit of the first-passage sample beyond its median
// (Lilliefors-type Kolmogorov-Smirnov with estimated rate, 5% level).
struct TailDiagnostic {
    double ks_stat = 0;        // Stephens-modified statistic
    double threshold = 1.094;  // 5% critical value
    bool pass = false;
    uint64_t n_tail = 0;
};

struct FptEstimate {
    double mean = 0;       // over absorbed paths
    double std_error = 0;
    uint64_t n_absorbed = 0;
    uint64_t n_censored = 0;
    bool censor_flagged = false;  // censored fraction reached 1%
    std::optional<TailDiagnostic> tail;
    std::vector<std::pair<std::string, double>> metadata;

    double metadata_value(const std::string& key) const;
};

struct ExitProbEstimate {
    std::vector<double> p;
    std::vector<double> std_error;  // binomial, per neck
};

// worker pool size: NET_WORKERS env var wins, else hardware concurrency
int worker_count();

// calibration oracles: fully absorbing circle / sphere of radius R
FptEstimate simulate_disk_calibration(double R, double D, Vec2 start, const SimParams& prm);
FptEstimate simulate_ball_calibration(double R, double D, Vec3 start, const SimParams& prm);

// planar funnel domain; start = fixed point, or uniform over the bulk if empty
FptEstimate simulate_mfpt_2d(const PlanarFunnelDomain& dom, std::optional<Vec2> start,
                             double D, const SimParams& prm);

FptEstimate simulate_mfpt_3d(const RevolutionSolid& solid, std::optional<Vec3> start,
                             double D, const SimParams& prm);

// dz = a dt + b dW on [Lambda, 0], reflecting at 0, absorbing at Lambda
FptEstimate simulate_surface_1d(const DriftField& field, double start_z,
                                const SimParams& prm);

// (theta, y) needle marginal; mean is the DOUBLED first passage to theta = pi/2
// (full turnaround); the raw mean is exposed as metadata "mean_to_black"
FptEstimate simulate_needle(const NeedleStripSpec& spec, double theta0, double y0,
                            const SimParams& prm);

std::pair<ExitProbEstimate, FptEstimate> simulate_exit_probs(const PlanarFunnelDomain& dom,
                                                             std::optional<Vec2> start,
                                                             double D, const SimParams& prm);

} // namespace netkit
