#pragma once
// Numerical companions to the closed-form predictions: the neck boundary-layer
// ODE, the drift/potential of the projected surface motion, and the exact
// quadrature MFPT for surfaces of revolution.

#include "netkit/geometry.hpp"

#include <string>
#include <vector>

namespace netkit {

// Solution record of Y'' + c/(1+xi^2)^2 Y = 0 integrated from xi = 0.
// Every solve also integrates the canonical growing companion Y1 (ICs 0, 2)
// so the constant-Wronskian diagnostic is available on a single record.
struct BleqSolution {
    std::vector<double> grid;  // strictly increasing from 0
    std::vector<double> Y;
    std::vector<double> dY;
    double wronskian = 0;        // W(Y1, Y) = Y1 Y' - Y1' Y, constant in exact arithmetic
    double wronskian_drift = 0;  // max relative variation of W along the grid
    double asymptote = 0;        // intercept for bounded solutions, slope for growing ones
    double intercept = 0;        // lim (Y - xi Y'), Richardson-extrapolated
    double slope = 0;            // lim Y', Richardson-extrapolated
    bool growing = false;

    std::string to_text() const;  // two-column (xi, Y) for plotting
};

BleqSolution solve_bleq(double y0, double dy0, double xi_max = 1e4,
                        double coeff_scale = 0.25);

// Drift a(z), noise intensity b(z), and potential A(z) = -int_Lambda^z a of the
// one-dimensional projection of surface diffusion, sampled on a uniform grid
// over [Lambda, 0] in the profile's own coordinate (unit length scale).
struct DriftField {
    std::vector<double> grid;
    std::vector<double> a_of_z;
    std::vector<double> b_of_z;
    std::vector<double> A_of_z;
};

DriftField drift_field(const RevolutionProfile& p, double D, int n_samples);

// Mean escape time from the far pole through the absorbing rim at x = Lambda,
// by nested adaptive quadrature; exact up to quadrature tolerance.
double surface_mfpt_quadrature(const RevolutionProfile& p, double D);

} // namespace netkit
