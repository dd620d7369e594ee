#pragma once
// Closed-form narrow-escape-time predictions. One function per formula family;
// every result carries a stable formula identifier, the validity-regime note,
// and an echo of the inputs so downstream tooling can serialize comparisons.

#include "netkit/geometry.hpp"

#include <string>
#include <utility>
#include <vector>

namespace netkit {

enum class FormulaId {
    WINDOW_2D,
    WINDOW_3D,
    PLANAR_FUNNEL_GENERAL,
    PLANAR_FUNNEL_SYMMETRIC,
    PLANAR_FUNNEL_NU,
    PLANAR_MULTI_NECK,
    SOLID_FUNNEL_3D,
    SOLID_MULTI_NECK_3D,
    SURFACE_FUNNEL,
    SURFACE_FUNNEL_NU1,
    SPHERE_CAP,
    SURFACE_CYLINDER,
    CONE_FUNNEL,
    COMPOSITE_NECK,
    DUMBBELL_RATES,
    NEEDLE_TURNAROUND,
    CAL_DISK,
    CAL_BALL,
};

const char* to_string(FormulaId id);
FormulaId formula_from_string(const std::string& s);

struct NetPrediction {
    FormulaId id;
    double tau = 0;
    std::string regime_note;
    bool extrapolated = false;  // inputs outside the small-parameter regime
    std::vector<std::pair<std::string, double>> inputs;
    std::vector<std::pair<std::string, double>> aux;  // derived side values

    double aux_value(const std::string& key) const;
};

struct ExitProbabilities {
    std::vector<double> probs;
};

struct DumbbellRates {
    double lambda_12 = 0;  // rate head 1 -> head 2
    double lambda_21 = 0;
    double eigenvalue = 0;  // principal relaxation rate, lambda_12 + lambda_21
    double tau_12 = 0;      // reciprocals, kept for reporting
    double tau_21 = 0;
};

// tau = (|Omega|/pi D) ln(|dOmega| / (pi |dOmega_a|)); O(1) additive term dropped
NetPrediction net_2d_window(double area, double boundary_len, double window_len, double D);

// tau = V / (4 a D [1 + ((L+N)/2pi) a ln a]); L, N mean boundary curvatures at the window
NetPrediction net_3d_window(double volume, double a, double D, double L_curv, double N_curv);

// planar funnel through a smooth neck; formula branch selected by (nu, Rc, rc)
NetPrediction net_2d_funnel(const PlanarFunnelSpec& spec, double D);

// several well-separated planar necks (eps_j, ell_j); splitting probabilities included
std::pair<NetPrediction, ExitProbabilities> net_2d_multi_neck(
    const std::vector<std::pair<double, double>>& eps_ell, double area, double D);

// solid of revolution, one funnel neck: tau = (1/sqrt2)(ell/a)^{3/2} V/(ell D)
NetPrediction net_3d_funnel(double volume, double ell, double a, double D);

std::pair<NetPrediction, ExitProbabilities> net_3d_multi_neck(
    const std::vector<std::pair<double, double>>& a_ell, double volume, double D);

// diffusion on a surface of revolution ending in a funnel of power nu
NetPrediction net_surface(double S, double a, double ell, double nu, double D);

// exact sphere formula: tau = (2R^2/D) ln(sin(theta/2)/sin(delta/2))
NetPrediction net_sphere_cap(double R, double theta, double delta, double D);

// surface funnel extended by a circular cylinder of length cyl_len
NetPrediction net_surface_with_cylinder(double S, double a, double ell, double nu,
                                        double cyl_len, double D);

// conical surface funnel; head_integral is the quadrature over the head portion.
// CL' > a uses the leading-order log form; otherwise the full pre-simplified form.
NetPrediction net_cone(double S, double a, double C, double cone_len, double D,
                       double head_integral);

// head + cylindrical neck: tau = head_tau + L^2/2D + |Omega_1| L / (|dOmega_a| D)
NetPrediction net_composite(double head_tau, const CompositeSpec& spec, double D);

double eigen_bottleneck(double composite_tau);
double eigen_multi(const std::vector<double>& taus);

DumbbellRates dumbbell_rates(const DumbbellSpec& spec);

// leading-order time scale for a confined needle to turn around (pass through
// the vertical configuration); constant-level accuracy only, see regime_note
NetPrediction needle_turnaround(const NeedleStripSpec& spec);

} // namespace netkit
