#include "netkit/boundary_layer.hpp"
#include "netkit/quadrature.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace netkit {

static constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) for the 4-state system (Y, Y', Y1, Y1')

namespace {

using State = std::array<double, 4>;

State rhs(double xi, const State& s, double c) {
    const double q = 1.0 + xi * xi;
    const double k = -c / (q * q);
    return {s[1], k * s[0], s[3], k * s[2]};
}

State axpy(const State& a, double h, const State& b) {
    State r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + h * b[i];
    return r;
}

// advance from xi to xi_end with local tolerance tol; throws on step underflow
void dp45(double& xi, double xi_end, State& s, double c, double tol) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double h = std::min(0.1, xi_end - xi);
    while (xi < xi_end) {
        bool last = false;
        if (xi + h >= xi_end) {
            h = xi_end - xi;
            last = true;
        }
        const State k1 = rhs(xi, s, c);
        const State k2 = rhs(xi + c2 * h, axpy(s, h * a21, k1), c);
        State t = s;
        for (int i = 0; i < 4; ++i) t[i] += h * (a31 * k1[i] + a32 * k2[i]);
        const State k3 = rhs(xi + c3 * h, t, c);
        t = s;
        for (int i = 0; i < 4; ++i) t[i] += h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const State k4 = rhs(xi + c4 * h, t, c);
        t = s;
        for (int i = 0; i < 4; ++i)
            t[i] += h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const State k5 = rhs(xi + c5 * h, t, c);
        t = s;
        for (int i = 0; i < 4; ++i)
            t[i] += h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const State k6 = rhs(xi + h, t, c);
        State s5 = s;
        for (int i = 0; i < 4; ++i)
            s5[i] += h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const State k7 = rhs(xi + h, s5, c);
        double err = 0, scale = 0;
        for (int i = 0; i < 4; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = 1.0 + std::max(std::abs(s[i]), std::abs(s5[i]));
            err = std::max(err, std::abs(ei) / sc);
            scale = std::max(scale, sc);
        }
        (void)scale;
        if (err <= tol) {
            xi = last ? xi_end : xi + h;
            s = s5;
        }
        const double fac = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, fac));
        if (h < 1e-14 * (1.0 + xi))
            throw std::runtime_error("solve_bleq: step size underflow at local tolerance");
    }
}

} // namespace

BleqSolution solve_bleq(double y0, double dy0, double xi_max, double coeff_scale) {
    if (!(xi_max >= 100)) throw std::invalid_argument("solve_bleq: xi_max must be >= 100");
    if (!(coeff_scale > 0)) throw std::invalid_argument("solve_bleq: coeff_scale must be > 0");
    const double tol = 1e-10;
    const int n_nodes = 2048;

    BleqSolution out;
    out.grid.reserve(n_nodes);
    out.Y.reserve(n_nodes);
    out.dY.reserve(n_nodes);

    State s = {y0, dy0, 0.0, 2.0};
    double xi = 0;
    const double w0 = s[2] * s[1] - s[3] * s[0];  // Y1 Y' - Y1' Y at 0
    double wmin = w0, wmax = w0;
    double half_intercept = 0, half_slope = 0;

    const double umax = std::asinh(xi_max);
    for (int i = 0; i < n_nodes; ++i) {
        const double target = i == 0 ? 0.0 : std::sinh(umax * double(i) / (n_nodes - 1));
        if (i > 0) dp45(xi, target, s, coeff_scale, tol);
        out.grid.push_back(xi);
        out.Y.push_back(s[0]);
        out.dY.push_back(s[1]);
        const double w = s[2] * s[1] - s[3] * s[0];
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
    }
    // half-range estimates for Richardson extrapolation of the limits
    {
        State sh = {y0, dy0, 0.0, 2.0};
        double xih = 0;
        dp45(xih, xi_max / 2, sh, coeff_scale, tol);
        half_intercept = sh[0] - xih * sh[1];
        half_slope = sh[1];
    }
    const double full_intercept = s[0] - xi_max * s[1];
    const double full_slope = s[1];
    // truncation errors: intercept ~ -c*slope/xi, slope ~ c*slope/(2 xi^2);
    // Richardson with range halving removes the leading order of each
    out.intercept = full_intercept + (full_intercept - half_intercept);
    out.slope = full_slope + (full_slope - half_slope) / 3.0;
    out.growing = std::abs(out.slope) > 0.02 * (std::abs(y0) + std::abs(dy0));
    out.asymptote = out.growing ? out.slope : out.intercept;
    out.wronskian = s[2] * s[1] - s[3] * s[0];
    const double wref = std::max({std::abs(wmin), std::abs(wmax), 1e-300});
    out.wronskian_drift = (wmax - wmin) / wref;
    return out;
}

std::string BleqSolution::to_text() const {
    std::string s;
    char buf[64];
    for (size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", grid[i], Y[i]);
        s += buf;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Drift field of the projected surface motion

DriftField drift_field(const RevolutionProfile& p, double D, int n_samples) {
    if (n_samples < 3) throw std::invalid_argument("drift_field: need n_samples >= 3");
    if (!(D > 0)) throw std::invalid_argument("drift_field: D must be positive");
    p.validate();
    DriftField f;
    f.grid.resize(n_samples);
    f.a_of_z.resize(n_samples);
    f.b_of_z.resize(n_samples);
    f.A_of_z.resize(n_samples);
    const double h = (0.0 - p.Lambda) / (n_samples - 1);
    for (int i = 0; i < n_samples; ++i) {
        const double x = p.Lambda + h * i;
        f.grid[i] = x;
        if (i == n_samples - 1 && p.k_top > 0) {
            // closing pole r ~ k sqrt(-x): a -> -4D/k^2, b -> 0
            f.a_of_z[i] = -4.0 * D / (p.k_top * p.k_top);
            f.b_of_z[i] = 0.0;
            continue;
        }
        const double r = p.r(x);
        if (!(r > 0)) throw std::domain_error("drift_field: r <= 0 at a sample point");
        const double r1 = p.dr(x), r2 = p.ddr(x);
        const double q = 1.0 + r1 * r1;
        f.a_of_z[i] = D * (r1 / (r * q) - r1 * r2 / (q * q));
        f.b_of_z[i] = std::sqrt(2.0 * D / q);
    }
    f.A_of_z[0] = 0.0;  // A(Lambda) = 0 by the integral's lower limit
    for (int i = 1; i < n_samples; ++i)
        f.A_of_z[i] = f.A_of_z[i - 1] - h * (f.a_of_z[i - 1] + f.a_of_z[i]) / 2;
    return f;
}

// ---------------------------------------------------------------------------
// Exact surface MFPT by nested quadrature

double surface_mfpt_quadrature(const RevolutionProfile& p, double D) {
    if (!(D > 0)) throw std::invalid_argument("surface_mfpt_quadrature: D must be positive");
    p.validate();
    auto F = [&](double t) {
        const double r = p.r(t);
        if (!(r > 0)) throw std::domain_error("surface_mfpt_quadrature: r <= 0 inside");
        const double r1 = p.dr(t);
        return std::sqrt(1.0 + r1 * r1) / r * profile_area(p, t);
    };
    double hi = 0.0, tail = 0.0;
    if (p.k_top > 0) {
        // the integrand tends to the finite limit pi k^2 / 2 at the pole, but the
        // factors are separately singular; peel the endpoint off analytically
        const double eta = 1e-7 * (-p.Lambda);
        hi = -eta;
        tail = kPi * p.k_top * p.k_top / 2 * eta;
    }
    return (adaptive_simpson(F, p.Lambda, hi, 1e-10 * (-p.Lambda), 48) + tail) /
           (2 * kPi * D);
}

} // namespace netkit
