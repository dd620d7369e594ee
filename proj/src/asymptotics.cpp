#include "netkit/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace netkit {

static constexpr double kPi = 3.14159265358979323846;
static constexpr double kRegimeRatio = 0.1;  // neck scale / domain scale threshold

const char* to_string(FormulaId id) {
    switch (id) {
        case FormulaId::WINDOW_2D: return "WINDOW_2D";
        case FormulaId::WINDOW_3D: return "WINDOW_3D";
        case FormulaId::PLANAR_FUNNEL_GENERAL: return "PLANAR_FUNNEL_GENERAL";
        case FormulaId::PLANAR_FUNNEL_SYMMETRIC: return "PLANAR_FUNNEL_SYMMETRIC";
        case FormulaId::PLANAR_FUNNEL_NU: return "PLANAR_FUNNEL_NU";
        case FormulaId::PLANAR_MULTI_NECK: return "PLANAR_MULTI_NECK";
        case FormulaId::SOLID_FUNNEL_3D: return "SOLID_FUNNEL_3D";
        case FormulaId::SOLID_MULTI_NECK_3D: return "SOLID_MULTI_NECK_3D";
        case FormulaId::SURFACE_FUNNEL: return "SURFACE_FUNNEL";
        case FormulaId::SURFACE_FUNNEL_NU1: return "SURFACE_FUNNEL_NU1";
        case FormulaId::SPHERE_CAP: return "SPHERE_CAP";
        case FormulaId::SURFACE_CYLINDER: return "SURFACE_CYLINDER";
        case FormulaId::CONE_FUNNEL: return "CONE_FUNNEL";
        case FormulaId::COMPOSITE_NECK: return "COMPOSITE_NECK";
        case FormulaId::DUMBBELL_RATES: return "DUMBBELL_RATES";
        case FormulaId::NEEDLE_TURNAROUND: return "NEEDLE_TURNAROUND";
        case FormulaId::CAL_DISK: return "CAL_DISK";
        case FormulaId::CAL_BALL: return "CAL_BALL";
    }
    throw std::logic_error("to_string: unknown FormulaId");
}

FormulaId formula_from_string(const std::string& s) {
    for (int i = 0; i <= int(FormulaId::CAL_BALL); ++i) {
        const auto id = FormulaId(i);
        if (s == to_string(id)) return id;
    }
    throw std::invalid_argument("unknown formula id: " + s);
}

double NetPrediction::aux_value(const std::string& key) const {
    for (const auto& [k, v] : aux)
        if (k == key) return v;
    throw std::out_of_range("NetPrediction: no aux value '" + key + "'");
}

static void require_positive(double v, const char* what) {
    if (!(v > 0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

NetPrediction net_2d_window(double area, double boundary_len, double window_len, double D) {
    require_positive(area, "area");
    require_positive(boundary_len, "boundary_len");
    require_positive(window_len, "window_len");
    require_positive(D, "D");
    if (window_len > boundary_len / kPi)
        throw std::invalid_argument("net_2d_window: window too large, log argument < 1");
    NetPrediction p;
    p.id = FormulaId::WINDOW_2D;
    p.tau = area / (kPi * D) * std::log(boundary_len / (kPi * window_len));
    p.regime_note = "leading order in eps = pi|dOmega_a|/|dOmega|; O(1) additive term dropped";
    p.extrapolated = kPi * window_len / boundary_len > kRegimeRatio;
    p.inputs = {{"area", area},
                {"boundary_len", boundary_len},
                {"window_len", window_len},
                {"D", D}};
    p.aux = {{"eps", kPi * window_len / boundary_len}};
    return p;
}

NetPrediction net_3d_window(double volume, double a, double D, double L_curv, double N_curv) {
    require_positive(volume, "volume");
    require_positive(a, "a");
    require_positive(D, "D");
    const double bracket = 1.0 + (L_curv + N_curv) / (2 * kPi) * a * std::log(a);
    if (bracket <= 0)
        throw std::invalid_argument("net_3d_window: curvature correction bracket <= 0");
    NetPrediction p;
    p.id = FormulaId::WINDOW_3D;
    p.tau = volume / (4 * a * D * bracket);
    p.regime_note = "relative error o(a ln a)";
    p.extrapolated = a > kRegimeRatio * std::cbrt(volume);
    p.inputs = {{"volume", volume}, {"a", a}, {"D", D}, {"L_curv", L_curv}, {"N_curv", N_curv}};
    p.aux = {{"bracket", bracket}};
    return p;
}

NetPrediction net_2d_funnel(const PlanarFunnelSpec& spec, double D) {
    spec.validate();
    require_positive(D, "D");
    NetPrediction p;
    p.extrapolated = !spec.is_asymptotic_regime();
    p.inputs = {{"eps", spec.eps},      {"Rc", spec.Rc},           {"rc", spec.rc},
                {"nu", spec.nu_plus},   {"ell_plus", spec.ell_plus}, {"area", spec.area},
                {"D", D}};
    if (spec.nu_plus == 1.0 && spec.nu_minus == 1.0) {
        if (spec.Rc == spec.rc) {
            p.id = FormulaId::PLANAR_FUNNEL_SYMMETRIC;
            p.tau = kPi * spec.area / (2 * D * std::sqrt(spec.eps / spec.Rc));
        } else {
            p.id = FormulaId::PLANAR_FUNNEL_GENERAL;
            p.tau = std::sqrt(spec.Rc * (spec.Rc + spec.rc) / (2 * spec.rc * spec.eps)) *
                    kPi * spec.area / (2 * D);
        }
        p.regime_note = "leading order, relative error O(sqrt(eps/Rc))";
    } else if (spec.nu_plus == spec.nu_minus && spec.nu_plus > 1.0) {
        p.id = FormulaId::PLANAR_FUNNEL_NU;
        p.tau = kPi * spec.area / (2 * D * std::sqrt(spec.eps / spec.ell_plus));
        p.regime_note = "symmetric power-law walls, relative error O(sqrt(eps/ell))";
    } else {
        throw std::invalid_argument(
            "net_2d_funnel: asymmetric walls with nu != 1 have no closed form");
    }
    return p;
}

std::pair<NetPrediction, ExitProbabilities> net_2d_multi_neck(
    const std::vector<std::pair<double, double>>& eps_ell, double area, double D) {
    if (eps_ell.empty()) throw std::invalid_argument("net_2d_multi_neck: empty neck list");
    require_positive(area, "area");
    require_positive(D, "D");
    double sum = 0;
    std::vector<double> w;
    bool extr = false;
    for (auto& [eps, ell] : eps_ell) {
        require_positive(eps, "eps");
        require_positive(ell, "ell");
        w.push_back(std::sqrt(eps / ell));
        sum += w.back();
        extr |= eps > kRegimeRatio * ell;
    }
    NetPrediction p;
    p.id = FormulaId::PLANAR_MULTI_NECK;
    p.tau = kPi * area / (2 * D * sum);
    p.regime_note = "well-separated necks, relative error O(max sqrt(eps_j/ell_j))";
    p.extrapolated = extr;
    p.inputs = {{"area", area}, {"D", D}, {"n_necks", double(eps_ell.size())}};
    ExitProbabilities probs;
    for (double wi : w) probs.probs.push_back(wi / sum);
    return {p, probs};
}

NetPrediction net_3d_funnel(double volume, double ell, double a, double D) {
    require_positive(volume, "volume");
    require_positive(ell, "ell");
    require_positive(a, "a");
    require_positive(D, "D");
    NetPrediction p;
    p.id = FormulaId::SOLID_FUNNEL_3D;
    p.tau = std::pow(ell / a, 1.5) * volume / (std::sqrt(2.0) * ell * D);
    p.regime_note = "leading order, relative error O(sqrt(a/ell))";
    p.extrapolated = a > kRegimeRatio * ell;
    p.inputs = {{"volume", volume}, {"ell", ell}, {"a", a}, {"D", D}};
    return p;
}

std::pair<NetPrediction, ExitProbabilities> net_3d_multi_neck(
    const std::vector<std::pair<double, double>>& a_ell, double volume, double D) {
    if (a_ell.empty()) throw std::invalid_argument("net_3d_multi_neck: empty neck list");
    require_positive(volume, "volume");
    require_positive(D, "D");
    double sum = 0;
    std::vector<double> w;
    bool extr = false;
    for (auto& [a, ell] : a_ell) {
        require_positive(a, "a");
        require_positive(ell, "ell");
        w.push_back(ell * std::pow(a / ell, 1.5));  // = a^{3/2} ell^{-1/2}
        sum += w.back();
        extr |= a > kRegimeRatio * ell;
    }
    NetPrediction p;
    p.id = FormulaId::SOLID_MULTI_NECK_3D;
    p.tau = volume / (std::sqrt(2.0) * D * sum);
    p.regime_note = "well-separated necks, relative error O(max sqrt(a_j/ell_j))";
    p.extrapolated = extr;
    p.inputs = {{"volume", volume}, {"D", D}, {"n_necks", double(a_ell.size())}};
    ExitProbabilities probs;
    for (double wi : w) probs.probs.push_back(wi / sum);
    return {p, probs};
}

NetPrediction net_surface(double S, double a, double ell, double nu, double D) {
    require_positive(S, "S");
    require_positive(a, "a");
    require_positive(ell, "ell");
    require_positive(D, "D");
    if (!(nu > 0))
        throw std::invalid_argument(
            "net_surface: nu must be > 0 (nu = 0 cases are net_sphere_cap / net_cone)");
    NetPrediction p;
    p.id = nu == 1.0 ? FormulaId::SURFACE_FUNNEL_NU1 : FormulaId::SURFACE_FUNNEL;
    const double expo = nu / (1.0 + nu);
    p.tau = S / (2 * D) * std::pow(ell / ((1.0 + nu) * a), expo) *
            std::pow(nu, 1.0 / (1.0 + nu)) / std::sin(nu * kPi / (1.0 + nu));
    p.regime_note = "leading order, relative error O((a/ell)^{nu/(1+nu)})";
    p.extrapolated = a > kRegimeRatio * ell;
    p.inputs = {{"S", S}, {"a", a}, {"ell", ell}, {"nu", nu}, {"D", D}};
    return p;
}

NetPrediction net_sphere_cap(double R, double theta, double delta, double D) {
    require_positive(R, "R");
    require_positive(D, "D");
    if (!(delta > 0) || !(theta <= kPi) || theta < delta)
        throw std::invalid_argument("net_sphere_cap: need 0 < delta <= theta <= pi");
    NetPrediction p;
    p.id = FormulaId::SPHERE_CAP;
    p.tau = 2 * R * R / D * std::log(std::sin(theta / 2) / std::sin(delta / 2));
    p.regime_note = "exact for the sphere, all angles";
    p.extrapolated = false;
    p.inputs = {{"R", R}, {"theta", theta}, {"delta", delta}, {"D", D}};
    p.aux = {{"cap_radius", R * std::sin(delta / 2)}};
    return p;
}

NetPrediction net_surface_with_cylinder(double S, double a, double ell, double nu,
                                        double cyl_len, double D) {
    if (cyl_len < 0) throw std::invalid_argument("net_surface_with_cylinder: cyl_len < 0");
    NetPrediction p = net_surface(S, a, ell, nu, D);
    const double head = p.tau;
    p.id = FormulaId::SURFACE_CYLINDER;
    p.tau = head + S * cyl_len / (2 * kPi * D * a) + cyl_len * cyl_len / (2 * D);
    p.regime_note = "head funnel leading order plus exact cylinder drift terms";
    p.inputs.push_back({"cyl_len", cyl_len});
    p.aux = {{"head_tau", head}};
    return p;
}

NetPrediction net_cone(double S, double a, double C, double cone_len, double D,
                       double head_integral) {
    require_positive(S, "S");
    require_positive(a, "a");
    require_positive(C, "C");
    require_positive(cone_len, "cone_len");
    require_positive(D, "D");
    if (head_integral < 0) throw std::invalid_argument("net_cone: head_integral < 0");
    NetPrediction p;
    p.id = FormulaId::CONE_FUNNEL;
    const double CL = C * cone_len;
    const double c2 = 1.0 + C * C;
    if (CL > a) {
        const double lg = std::log(CL / a);
        p.tau = head_integral + S * std::sqrt(c2) / (2 * kPi * D * C) * lg +
                c2 * cone_len * cone_len / (2 * D) * lg;
        p.regime_note = "a << CL' leading order, O(1) dropped";
        p.extrapolated = a > kRegimeRatio * CL;
    } else {
        // full pre-simplification form from the exact wall integral
        const double lg = std::log1p(CL / a);
        const double b = a + CL;
        p.tau = head_integral + S * std::sqrt(c2) / (2 * kPi * D * C) * lg +
                c2 / (2 * D * C * C) * (b * b * lg - a * CL - CL * CL / 2);
        p.regime_note = "pre-simplification form, exact cone wall integral";
        p.extrapolated = false;
    }
    p.inputs = {{"S", S}, {"a", a},
                {"C", C}, {"cone_len", cone_len},
                {"D", D}, {"head_integral", head_integral}};
    return p;
}

NetPrediction net_composite(double head_tau, const CompositeSpec& spec, double D) {
    spec.validate();
    require_positive(D, "D");
    if (head_tau < 0) throw std::invalid_argument("net_composite: head_tau < 0");
    NetPrediction p;
    p.id = FormulaId::COMPOSITE_NECK;
    const double L = spec.neck_len;
    p.tau = head_tau + L * L / (2 * D) + spec.head_volume * L / (spec.absorbing_measure() * D);
    p.regime_note = "head formula accuracy carries over; neck terms exact for a cylinder";
    p.inputs = {{"head_tau", head_tau},
                {"head_volume", spec.head_volume},
                {"neck_radius", spec.neck_radius},
                {"neck_len", L},
                {"dim", double(spec.dim)},
                {"D", D}};
    return p;
}

double eigen_bottleneck(double composite_tau) {
    require_positive(composite_tau, "composite_tau");
    return 1.0 / composite_tau;
}

double eigen_multi(const std::vector<double>& taus) {
    if (taus.empty()) throw std::invalid_argument("eigen_multi: empty list");
    double lam = 0;
    for (double t : taus) lam += eigen_bottleneck(t);
    return lam;
}

DumbbellRates dumbbell_rates(const DumbbellSpec& s) {
    s.validate();
    auto one_over_rate = [&](double vol, double Rc) {
        return std::sqrt(2.0) * std::pow(Rc / s.a, 1.5) * vol / (Rc * s.D) +
               s.L * s.L / (4 * s.D) + vol * s.L / (kPi * s.a * s.a * s.D);
    };
    DumbbellRates r;
    r.tau_12 = one_over_rate(s.omega1_vol, s.Rc1);
    r.tau_21 = one_over_rate(s.omega3_vol, s.Rc3);
    r.lambda_12 = 1.0 / r.tau_12;
    r.lambda_21 = 1.0 / r.tau_21;
    r.eigenvalue = r.lambda_12 + r.lambda_21;
    return r;
}

NetPrediction needle_turnaround(const NeedleStripSpec& s) {
    s.validate();
    NetPrediction p;
    p.id = FormulaId::NEEDLE_TURNAROUND;
    p.tau = kPi * (kPi / 2 - 1.0) / (s.Dr * std::sqrt(s.l0 * (s.l0 - s.l))) *
            std::sqrt(s.DX / s.Dr);
    p.regime_note = "turnaround time scale, constant-level accuracy: exact reference "
                    "solves put the true mean turnaround at 1.28-1.42x this value for "
                    "(l0-l)/l0 in [6e-4, 4e-2]";
    p.extrapolated = s.eps() > kRegimeRatio;
    p.inputs = {{"l0", s.l0}, {"l", s.l}, {"DX", s.DX}, {"DY", s.DY}, {"Dr", s.Dr}};
    p.aux = {{"turnaround_doubled", 2 * p.tau}};
    return p;
}

} // namespace netkit
