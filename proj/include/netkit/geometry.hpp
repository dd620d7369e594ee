#pragma once
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace netkit {

struct Vec2 {
    double x = 0, y = 0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const;
};

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return x * x + y * y + z * z; }
    double norm() const;
};

// ---------------------------------------------------------------------------
// Conformal map machinery for the tangent-circle strait

// w = (z - alpha) / (1 - alpha z); pole at z = 1/alpha is a domain error
std::complex<double> mobius_map(std::complex<double> z, std::complex<double> alpha);
std::complex<double> mobius_inverse(std::complex<double> w, std::complex<double> alpha);

// Map parameter for the strait between circles of radii Rc (upper) and rc
// (lower) separated by gap eps (dimensionless, scaled by Rc). Exact radical,
// branch chosen with |alpha| < 1; alpha = -1 + sqrt(2 rc eps/(Rc+rc)) + O(eps).
double funnel_alpha(double Rc, double rc, double eps);

// ---------------------------------------------------------------------------
// Planar funnel descriptor

struct PlanarFunnelSpec {
    double eps = 0;                      // gap width
    double Rc = 0, rc = 0;               // osculating radii (nu = 1 walls)
    double nu_plus = 1, nu_minus = 1;    // wall exponents
    double ell_plus = 0, ell_minus = 0;  // wall length scales (== radii for nu = 1)
    double area = 0;                     // |Omega|
    double boundary_len = 0;             // |dOmega|, filled in by the realization

    // tangent-circle walls (nu = 1); ell_* duplicate the radii
    static PlanarFunnelSpec tangent_circles(double eps, double Rc, double rc, double area);
    // symmetric power-law walls |x| = eps/2 + y^{1+nu}/(nu(1+nu) ell^nu)
    static PlanarFunnelSpec power_walls(double eps, double nu, double ell, double area);

    bool is_asymptotic_regime(double ratio_threshold = 0.1) const;
    void validate() const;  // positivity invariants
};

struct ScaledSpec {
    PlanarFunnelSpec spec;
    double scale;  // ell_plus of the original
};
ScaledSpec nondimensionalize(const PlanarFunnelSpec& s);
PlanarFunnelSpec redimensionalize(const PlanarFunnelSpec& s, double scale);

// ---------------------------------------------------------------------------
// Realized planar domain for simulation: upper half-disk head of radius
// head_R, floor on y = 0 carrying one or more neck assemblies. A nu = 1 neck
// is a gap of width eps flanked by two tangent circles; a nu > 1 neck is a
// gap flanked by power-law wedges sampled on a fixed grid.

struct NeckRealization {
    double xc = 0;    // gap center on the floor
    double eps = 0;   // gap width
    double nu = 1;
    double Rl = 0, Rr = 0;  // flanking circle radii (nu = 1)
    double ell = 0;         // wall scale (nu > 1)
    double wall_h = 0;      // wedge height (nu > 1)
    std::vector<double> wall;  // sampled wall offset from xc at uniform heights
    double wall_at(double y) const;    // linear interpolation
    double max_slope = 0;              // wall slope at wall_h
    double half_extent() const;        // floor footprint half-width
};

class PlanarFunnelDomain {
  public:
    // single neck centered at the origin; head radius derived from spec.area
    explicit PlanarFunnelDomain(const PlanarFunnelSpec& spec);
    // multi-neck: (eps_j, ell_j) tangent-circle necks, auto-placed on the floor
    PlanarFunnelDomain(const std::vector<std::pair<double, double>>& eps_ell, double area);

    bool contains(Vec2 p) const;
    double head_radius() const { return head_R_; }
    double area() const { return area_; }
    double boundary_len() const { return boundary_len_; }
    int n_necks() const { return (int)necks_.size(); }
    const NeckRealization& neck(int i) const { return necks_[i]; }

    // conservative lower bound on the distance from p to any boundary piece
    double safe_distance(Vec2 p) const;
    // distance to the nearest absorbing gap center (adaptive-dt trigger)
    double neck_distance(Vec2 p) const;

    struct StepResult {
        Vec2 pos;
        bool absorbed = false;
        int neck = -1;        // which gap absorbed the path
        bool rejected = false;  // > max bounces; caller must resample the step
    };
    // resolve pos+step against the boundary: specular multi-bounce reflection,
    // absorption on gap-chord crossing (max 8 bounces, then rejected)
    StepResult advance(Vec2 pos, Vec2 step) const;

    Vec2 sample_interior(uint64_t seed, uint64_t idx) const;  // uniform over the head bulk

  private:
    void place(const std::vector<std::pair<double, double>>& eps_ell, double area);
    double head_R_ = 0, area_ = 0, boundary_len_ = 0;
    std::vector<NeckRealization> necks_;
};

// spec-mandated free-function spellings
bool contains(Vec2 p, const PlanarFunnelDomain& d);
PlanarFunnelDomain::StepResult reflect(Vec2 pos, Vec2 step, const PlanarFunnelDomain& d);

// ---------------------------------------------------------------------------
// Surface-of-revolution profile r(x) on [Lambda, 0], absorbing end at Lambda

struct RevolutionProfile {
    std::function<double(double)> r, dr, ddr;
    double Lambda = 0;     // absorbing end (< 0)
    double a = 0;          // neck radius, r(Lambda)
    double ell = 0;        // curvature length at the neck
    double nu = 1;         // wall exponent (0 for cap/cone profiles)
    double cyl_len = 0;    // attached-cylinder bookkeeping (formulas only)
    double cone_slope = 0;
    double k_top = 0;      // r ~ k_top sqrt(-x) as x -> 0-, 0 if the profile stays open
    double x_join = 0;     // funnel/head joint; == Lambda when there is no funnel piece

    // sphere of radius R with an absorbing polar cap of opening angle delta
    static RevolutionProfile sphere(double R, double delta);
    // power-law funnel r = a + (x-Lambda)^{1+nu}/(nu(1+nu) ell^nu) joined C^1
    // to a spherical bulb of radius head_R whose far pole sits at x = 0
    static RevolutionProfile funnel_bulb(double a, double ell, double head_R, double nu = 1);
    static RevolutionProfile cylinder(double radius, double len);
    static RevolutionProfile cone(double a, double slope, double len);

    void validate(double tol = 1e-6) const;  // r > 0, r(Lambda) = a, neck shape check
};

// S(t) = 2 pi int_t^0 r sqrt(1 + r'^2), adaptive quadrature
double profile_area(const RevolutionProfile& p, double t);

// ---------------------------------------------------------------------------
// Composite / dumbbell / needle descriptors (formula inputs)

struct CompositeSpec {
    double head_volume = 0;  // |Omega_1| (area in 2D)
    double neck_radius = 0;  // a
    double neck_len = 0;     // L
    int dim = 3;             // 2 or 3
    double absorbing_measure() const;  // 2a (2D) or pi a^2 (3D)
    void validate() const;
};

struct DumbbellSpec {
    double omega1_vol = 0, omega3_vol = 0;
    double Rc1 = 0, Rc3 = 0;
    double a = 0, L = 0, D = 0;
    bool is_asymptotic_regime(double ratio_threshold = 0.1) const;
    void validate() const;
};

struct NeedleStripSpec {
    double l0 = 0;  // strip width
    double l = 0;   // needle length
    double DX = 0, DY = 0, Dr = 0;
    double eps() const { return (l0 - l) / l0; }
    void validate() const;  // 0 < l < l0, DX >= DY > 0, Dr > 0
};

bool needle_contains(double theta, double y, const NeedleStripSpec& s);

// 3D solid of revolution realized for Cartesian simulation
class RevolutionSolid {
  public:
    explicit RevolutionSolid(const RevolutionProfile& p);
    const RevolutionProfile& profile() const { return p_; }
    bool contains(const Vec3& q) const;
    double safe_distance(const Vec3& q) const;
    double neck_distance(const Vec3& q) const;  // distance to the absorbing disk
    double volume() const { return volume_; }

    struct StepResult {
        Vec3 pos;
        bool absorbed = false;
        bool rejected = false;
    };
    StepResult advance(Vec3 pos, Vec3 step) const;

    Vec3 sample_interior(uint64_t seed, uint64_t idx) const;

  private:
    double wall_gap(const Vec3& q) const;  // r(x) - rho, < 0 outside
    RevolutionProfile p_;
    double head_R_ = 0, head_cx_ = 0;  // bulb sphere (center on the axis)
    double join_slope_ = 0, slope_K_ = 1;
    double volume_ = 0;
    bool has_bulb_ = false;
};

} // namespace netkit
