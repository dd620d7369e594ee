#include "netkit/geometry.hpp"
#include "netkit/quadrature.hpp"
#include "netkit/rng.hpp"

#include <algorithm>
#include <cmath>

namespace netkit {

static constexpr double kPi = 3.14159265358979323846;

double Vec2::norm() const { return std::sqrt(norm2()); }
double Vec3::norm() const { return std::sqrt(norm2()); }

// ---------------------------------------------------------------------------
// Mobius map

std::complex<double> mobius_map(std::complex<double> z, std::complex<double> alpha) {
    const std::complex<double> den = 1.0 - alpha * z;
    if (std::abs(den) < 1e-14 * (1.0 + std::abs(z)))
        throw std::domain_error("mobius_map: z coincides with the pole 1/alpha");
    return (z - alpha) / den;
}

std::complex<double> mobius_inverse(std::complex<double> w, std::complex<double> alpha) {
    const std::complex<double> den = 1.0 + alpha * w;
    if (std::abs(den) < 1e-14 * (1.0 + std::abs(w)))
        throw std::domain_error("mobius_inverse: w coincides with the pole -1/alpha");
    return (w + alpha) / den;
}

double funnel_alpha(double Rc, double rc, double eps) {
    if (Rc <= 0 || rc <= 0) throw std::invalid_argument("funnel_alpha: radii must be positive");
    if (eps < 0 || eps >= 1) throw std::invalid_argument("funnel_alpha: eps must lie in [0,1)");
    const double den = 2.0 * (eps * Rc + rc + Rc);
    const double head =
        2 * eps * Rc + 2 * Rc + eps * eps * Rc + 2 * rc * eps + 2 * rc;
    const double disc =
        eps * (8 * Rc * rc + 4 * eps * Rc * Rc + 12 * eps * Rc * rc + 4 * eps * eps * Rc * Rc +
               8 * rc * rc + 4 * eps * eps * Rc * rc + eps * eps * eps * Rc * Rc +
               4 * eps * rc * rc);
    if (disc < 0) throw std::runtime_error("funnel_alpha: negative discriminant");
    // '+' root is the disk automorphism (|alpha| < 1); '-' falls outside
    return (-head + std::sqrt(disc)) / den;
}

// ---------------------------------------------------------------------------
// PlanarFunnelSpec

void PlanarFunnelSpec::validate() const {
    if (!(eps > 0)) throw std::invalid_argument("PlanarFunnelSpec: eps must be > 0");
    if (!(Rc > 0) || !(rc > 0)) throw std::invalid_argument("PlanarFunnelSpec: radii must be > 0");
    if (!(ell_plus > 0)) throw std::invalid_argument("PlanarFunnelSpec: ell_plus must be > 0");
    if (!(area > 0)) throw std::invalid_argument("PlanarFunnelSpec: area must be > 0");
}

PlanarFunnelSpec PlanarFunnelSpec::tangent_circles(double eps, double Rc, double rc, double area) {
    PlanarFunnelSpec s;
    s.eps = eps;
    s.Rc = Rc;
    s.rc = rc;
    s.nu_plus = s.nu_minus = 1.0;
    s.ell_plus = Rc;
    s.ell_minus = rc;
    s.area = area;
    s.validate();
    return s;
}

PlanarFunnelSpec PlanarFunnelSpec::power_walls(double eps, double nu, double ell, double area) {
    if (!(nu > 1.0)) throw std::invalid_argument("power_walls: nu must be > 1 (use tangent_circles for nu = 1)");
    PlanarFunnelSpec s;
    s.eps = eps;
    s.Rc = s.rc = ell;  // regime bookkeeping: the wall scale plays the radius role
    s.nu_plus = s.nu_minus = nu;
    s.ell_plus = s.ell_minus = ell;
    s.area = area;
    s.validate();
    return s;
}

bool PlanarFunnelSpec::is_asymptotic_regime(double ratio_threshold) const {
    double scale = std::min(Rc, rc);
    if (boundary_len > 0) scale = std::min(scale, boundary_len);
    return eps <= ratio_threshold * scale;
}

ScaledSpec nondimensionalize(const PlanarFunnelSpec& s) {
    s.validate();
    const double L = s.ell_plus;
    PlanarFunnelSpec t = s;
    t.eps /= L;
    t.Rc /= L;
    t.rc /= L;
    t.ell_plus /= L;
    t.ell_minus /= L;
    t.area /= L * L;
    t.boundary_len /= L;
    return {t, L};
}

PlanarFunnelSpec redimensionalize(const PlanarFunnelSpec& s, double scale) {
    PlanarFunnelSpec t = s;
    t.eps *= scale;
    t.Rc *= scale;
    t.rc *= scale;
    t.ell_plus *= scale;
    t.ell_minus *= scale;
    t.area *= scale * scale;
    t.boundary_len *= scale;
    return t;
}

// ---------------------------------------------------------------------------
// Planar domain realization

double NeckRealization::wall_at(double y) const {
    const size_t n = wall.size();
    if (y <= 0) return wall.front();
    if (y >= wall_h) return wall.back();
    const double u = y / wall_h * double(n - 1);
    const size_t i = std::min(size_t(u), n - 2);
    const double f = u - double(i);
    return wall[i] * (1.0 - f) + wall[i + 1] * f;
}

double NeckRealization::half_extent() const {
    if (nu == 1.0) return eps / 2 + 2 * std::max(Rl, Rr);
    return wall.back();
}

PlanarFunnelDomain::PlanarFunnelDomain(const PlanarFunnelSpec& spec) {
    spec.validate();
    NeckRealization nk;
    nk.xc = 0;
    nk.eps = spec.eps;
    nk.nu = spec.nu_plus;
    double excluded = 0;  // area occupied by the wall structures inside the head
    if (spec.nu_plus == 1.0 && spec.nu_minus == 1.0) {
        nk.Rl = spec.Rc;
        nk.Rr = spec.rc;
        excluded = kPi / 2 * (nk.Rl * nk.Rl + nk.Rr * nk.Rr);
    } else {
        if (spec.nu_plus != spec.nu_minus)
            throw std::invalid_argument("PlanarFunnelDomain: mixed nu walls unsupported");
        nk.ell = spec.ell_plus;
        nk.wall_h = nk.ell;
        const int N = 2048;
        nk.wall.resize(N);
        const double c = 1.0 / (nk.nu * (1.0 + nk.nu) * std::pow(nk.ell, nk.nu));
        for (int i = 0; i < N; ++i) {
            const double y = nk.wall_h * double(i) / double(N - 1);
            nk.wall[i] = nk.eps / 2 + std::pow(y, 1.0 + nk.nu) * c;
        }
        nk.max_slope = std::pow(nk.wall_h, nk.nu) / std::pow(nk.ell, nk.nu);
        // two wedges, each between the wall curve and the vertical x = wall(h)
        const double h = nk.wall_h;
        const double wedge =
            h * nk.wall.back() -
            (nk.eps / 2 * h + std::pow(h, 2.0 + nk.nu) * c / (2.0 + nk.nu));
        excluded = 2 * wedge;
    }
    necks_.push_back(std::move(nk));
    area_ = spec.area;
    head_R_ = std::sqrt(2 * (spec.area + excluded) / kPi);
    const double need = necks_[0].half_extent();
    if (head_R_ < 1.05 * need)
        throw std::invalid_argument(
            "PlanarFunnelDomain: area too small to enclose the neck structure");
    // boundary: head arc + floor outside the footprint + wall curves + gap
    double walls;
    if (necks_[0].nu == 1.0)
        walls = kPi * (necks_[0].Rl + necks_[0].Rr);
    else {
        const NeckRealization& k = necks_[0];
        double arc = 0;  // wall curve length by trapezoid on the sample grid
        for (size_t i = 1; i < k.wall.size(); ++i) {
            const double dy = k.wall_h / double(k.wall.size() - 1);
            const double dx = k.wall[i] - k.wall[i - 1];
            arc += std::sqrt(dx * dx + dy * dy);
        }
        walls = 2 * (arc + k.wall_h);  // curve + outer vertical, both sides
    }
    boundary_len_ = kPi * head_R_ + (2 * head_R_ - 2 * necks_[0].half_extent()) + walls + spec.eps;
}

void PlanarFunnelDomain::place(const std::vector<std::pair<double, double>>& eps_ell,
                               double area) {
    if (eps_ell.empty()) throw std::invalid_argument("PlanarFunnelDomain: empty neck list");
    double excluded = 0, maxfp = 0;
    std::vector<double> fp;
    for (auto& [e, ell] : eps_ell) {
        if (!(e > 0) || !(ell > 0))
            throw std::invalid_argument("PlanarFunnelDomain: neck parameters must be positive");
        NeckRealization nk;
        nk.eps = e;
        nk.nu = 1.0;
        nk.Rl = nk.Rr = ell;
        excluded += kPi * ell * ell;
        fp.push_back(nk.half_extent());
        maxfp = std::max(maxfp, fp.back());
        necks_.push_back(std::move(nk));
    }
    const double sep = 0.3 * maxfp;  // clearance between adjacent footprints
    double total = sep * double(fp.size() - 1);
    for (double f : fp) total += 2 * f;
    double x = -total / 2;
    for (size_t j = 0; j < necks_.size(); ++j) {
        necks_[j].xc = x + fp[j];
        x += 2 * fp[j] + sep;
    }
    area_ = area;
    head_R_ = std::sqrt(2 * (area + excluded) / kPi);
    if (head_R_ < 1.05 * total / 2)
        throw std::invalid_argument("PlanarFunnelDomain: area too small for the neck layout");
    double walls = 0, span = 0, gaps = 0;
    for (auto& k : necks_) {
        walls += kPi * (k.Rl + k.Rr);
        span += 2 * k.half_extent();
        gaps += k.eps;
    }
    boundary_len_ = kPi * head_R_ + (2 * head_R_ - span) + walls + gaps;
}

PlanarFunnelDomain::PlanarFunnelDomain(const std::vector<std::pair<double, double>>& eps_ell,
                                       double area) {
    place(eps_ell, area);
}

bool PlanarFunnelDomain::contains(Vec2 p) const {
    if (p.y <= 0) return false;
    if (p.norm2() >= head_R_ * head_R_) return false;
    for (const auto& k : necks_) {
        const double dx = p.x - k.xc;
        if (k.nu == 1.0) {
            const double clx = -(k.eps / 2 + k.Rl), crx = k.eps / 2 + k.Rr;
            const double dl = dx - clx, drr = dx - crx;
            if (dl * dl + p.y * p.y < k.Rl * k.Rl) return false;
            if (drr * drr + p.y * p.y < k.Rr * k.Rr) return false;
        } else {
            const double adx = std::abs(dx);
            if (p.y < k.wall_h && adx < k.wall.back() && adx >= k.wall_at(p.y)) return false;
        }
    }
    return true;
}

double PlanarFunnelDomain::safe_distance(Vec2 p) const {
    double d = std::min(p.y, head_R_ - p.norm());
    for (const auto& k : necks_) {
        const double dx = p.x - k.xc;
        if (k.nu == 1.0) {
            const double clx = -(k.eps / 2 + k.Rl), crx = k.eps / 2 + k.Rr;
            const double dl = dx - clx, drr = dx - crx;
            d = std::min(d, std::sqrt(dl * dl + p.y * p.y) - k.Rl);
            d = std::min(d, std::sqrt(drr * drr + p.y * p.y) - k.Rr);
        } else {
            const double adx = std::abs(dx);
            const double ax = std::max({k.eps / 2 - adx, adx - k.wall.back(), 0.0});
            const double ay = std::max(p.y - k.wall_h, 0.0);
            if (ax == 0.0 && ay == 0.0) {
                // inside the wedge's bounding strip: bound via the wall gap
                d = std::min(d, (k.wall_at(p.y) - adx) /
                                    std::sqrt(1.0 + k.max_slope * k.max_slope));
            } else {
                d = std::min(d, std::sqrt(ax * ax + ay * ay));
            }
        }
    }
    return d;
}

double PlanarFunnelDomain::neck_distance(Vec2 p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& k : necks_) {
        const double ax = std::max(std::abs(p.x - k.xc) - k.eps / 2, 0.0);
        d = std::min(d, std::sqrt(ax * ax + p.y * p.y));
    }
    return d;
}

namespace {
struct Hit {
    double t = 2.0;  // crossing parameter along the chord, > 1 means none
    Vec2 normal;     // inward unit normal at the crossing
    bool absorb = false;
    int neck = -1;
};

// earliest segment/circle crossing from outside: |c - cc + t d| = R
void circle_hit(Vec2 c, Vec2 d, Vec2 cc, double R, Hit& h) {
    const Vec2 f = c - cc;
    const double a = d.norm2();
    if (a == 0) return;
    const double b = 2 * f.dot(d);
    const double e = f.norm2() - R * R;
    const double disc = b * b - 4 * a * e;
    if (disc <= 0) return;
    const double t = (-b - std::sqrt(disc)) / (2 * a);
    if (t >= 0 && t <= 1 && t < h.t) {
        const Vec2 q = c + d * t;
        Vec2 n = (q - cc) * (1.0 / R);
        h = {t, n, false, -1};
    }
}
} // namespace

PlanarFunnelDomain::StepResult PlanarFunnelDomain::advance(Vec2 pos, Vec2 step) const {
    if (step.norm2() > 4 * head_R_ * head_R_)
        throw std::invalid_argument("advance: step exceeds the domain diameter");
    const double nudge = 1e-9 * head_R_;
    Vec2 c = pos, d = step;
    for (int bounce = 0; bounce < 8; ++bounce) {
        Hit h;
        // floor (and the absorbing gaps within it)
        if (d.y < 0 && c.y + d.y < 0) {
            const double t = c.y / (-d.y);
            if (t >= 0 && t <= 1 && t < h.t) {
                const double xh = c.x + t * d.x;
                h = {t, {0, 1}, false, -1};
                for (size_t j = 0; j < necks_.size(); ++j)
                    if (std::abs(xh - necks_[j].xc) < necks_[j].eps / 2) {
                        h.absorb = true;
                        h.neck = int(j);
                        break;
                    }
            }
        }
        // head arc, leaving: |c + t d| = head_R
        {
            const double a = d.norm2(), b = 2 * c.dot(d), e = c.norm2() - head_R_ * head_R_;
            const double disc = b * b - 4 * a * e;
            if (a > 0 && disc > 0) {
                const double t = (-b + std::sqrt(disc)) / (2 * a);
                if (t >= 0 && t <= 1 && t < h.t) {
                    const Vec2 q = c + d * t;
                    h = {t, q * (-1.0 / head_R_), false, -1};
                }
            }
        }
        // neck structures
        for (const auto& k : necks_) {
            if (k.nu == 1.0) {
                circle_hit(c, d, {k.xc - (k.eps / 2 + k.Rl), 0.0}, k.Rl, h);
                circle_hit(c, d, {k.xc + (k.eps / 2 + k.Rr), 0.0}, k.Rr, h);
            } else {
                // sampled scan for wedge entry, then bisection to the surface
                auto inside_wedge = [&](Vec2 q) {
                    const double adx = std::abs(q.x - k.xc);
                    return q.y < k.wall_h && q.y > 0 && adx < k.wall.back() &&
                           adx >= k.wall_at(q.y);
                };
                const int M = 16;
                double tprev = 0;
                for (int i = 1; i <= M; ++i) {
                    const double t = double(i) / M;
                    if (t >= h.t) break;
                    if (inside_wedge(c + d * t)) {
                        double lo = tprev, hi = t;
                        for (int it = 0; it < 60; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            (inside_wedge(c + d * mid) ? hi : lo) = mid;
                        }
                        const Vec2 q = c + d * hi;
                        const double adx = std::abs(q.x - k.xc);
                        const double sgn = (q.x > k.xc) ? 1.0 : -1.0;
                        Vec2 n;
                        if (k.wall.back() - adx < adx - k.wall_at(q.y)) {
                            n = {sgn, 0};  // outer vertical face
                        } else {
                            // inner curve x' = wall(y): inward normal points to the gap
                            const double dy = k.wall_h / double(k.wall.size() - 1);
                            const double slope =
                                (k.wall_at(std::min(q.y + dy, k.wall_h)) -
                                 k.wall_at(std::max(q.y - dy, 0.0))) /
                                (std::min(q.y + dy, k.wall_h) - std::max(q.y - dy, 0.0));
                            const double nn = std::sqrt(1 + slope * slope);
                            n = {-sgn / nn, slope / nn};
                        }
                        if (lo < h.t) h = {lo, n, false, -1};
                        break;
                    }
                    tprev = t;
                }
            }
        }
        if (h.t > 1.0) {
            c = c + d;
            break;
        }
        const Vec2 q = c + d * h.t;
        if (h.absorb) return {q, true, h.neck, false};
        Vec2 rem = d * (1.0 - h.t);
        rem = rem - h.normal * (2.0 * rem.dot(h.normal));
        c = q + h.normal * nudge;
        d = rem;
        if (bounce == 7) return {pos, false, -1, true};
    }
    if (!contains(c)) return {pos, false, -1, true};
    return {c, false, -1, false};
}

Vec2 PlanarFunnelDomain::sample_interior(uint64_t seed, uint64_t idx) const {
    Xoshiro256pp rng(seed ^ 0xc0ffee1234567890ULL, idx);
    for (int tries = 0; tries < 100000; ++tries) {
        Vec2 p{(2 * rng.uniform() - 1) * head_R_, rng.uniform() * head_R_};
        if (contains(p)) return p;
    }
    throw std::runtime_error("sample_interior: rejection sampling failed");
}

bool contains(Vec2 p, const PlanarFunnelDomain& d) { return d.contains(p); }
PlanarFunnelDomain::StepResult reflect(Vec2 pos, Vec2 step, const PlanarFunnelDomain& d) {
    return d.advance(pos, step);
}

// ---------------------------------------------------------------------------
// RevolutionProfile

RevolutionProfile RevolutionProfile::sphere(double R, double delta) {
    if (!(R > 0) || !(delta > 0) || !(delta < kPi))
        throw std::invalid_argument("sphere: need R > 0 and delta in (0, pi)");
    RevolutionProfile p;
    p.Lambda = -R * (1 + std::cos(delta));
    p.a = R * std::sin(delta);
    p.ell = R;
    p.nu = 0;
    p.cone_slope = std::cos(delta) / std::sin(delta);
    p.k_top = std::sqrt(2 * R);
    p.x_join = p.Lambda;
    p.r = [R](double x) {
        const double u = -x * (2 * R + x);  // R^2 - (x+R)^2
        return u > 0 ? std::sqrt(u) : 0.0;
    };
    p.dr = [R, rf = p.r](double x) { return -(x + R) / rf(x); };
    p.ddr = [R, rf = p.r](double x) {
        const double rr = rf(x);
        return -R * R / (rr * rr * rr);
    };
    return p;
}

RevolutionProfile RevolutionProfile::funnel_bulb(double a, double ell, double head_R, double nu) {
    if (!(a > 0) || !(ell > 0) || !(head_R > a) || !(nu > 0))
        throw std::invalid_argument("funnel_bulb: need 0 < a < head_R, ell > 0, nu > 0");
    const double cx = -head_R;  // bulb center; far pole at x = 0
    auto rhead = [head_R, cx](double x) {
        const double u = head_R * head_R - (x - cx) * (x - cx);
        return u > 0 ? std::sqrt(u) : 0.0;
    };
    // join where the power wall meets the bulb tangentially
    const double cpow = 1.0 / (nu * (1.0 + nu) * std::pow(ell, nu));
    auto joint_gap = [&](double xj) {
        const double rj = rhead(xj);
        const double m = -(xj - cx) / rj;           // bulb slope, > 0 below the equator
        const double sj = std::pow(nu * std::pow(ell, nu) * m, 1.0 / nu);
        return a + std::pow(sj, 1.0 + nu) * cpow - rj;
    };
    double lo = -2 * head_R + 1e-12, hi = cx - 1e-12;
    if (joint_gap(hi) >= 0) throw std::invalid_argument("funnel_bulb: neck too wide for the bulb");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (joint_gap(mid) >= 0 ? lo : hi) = mid;
    }
    const double xj = 0.5 * (lo + hi);
    const double rj = rhead(xj);
    const double m = -(xj - cx) / rj;
    const double sj = std::pow(nu * std::pow(ell, nu) * m, 1.0 / nu);

    RevolutionProfile p;
    p.Lambda = xj - sj;
    p.a = a;
    p.ell = ell;
    p.nu = nu;
    p.k_top = std::sqrt(2 * head_R);
    p.x_join = xj;
    const double Lam = p.Lambda;
    p.r = [=](double x) {
        if (x >= xj) return rhead(x);
        const double s = x - Lam;
        return a + std::pow(s, 1.0 + nu) * cpow;
    };
    p.dr = [=](double x) {
        if (x >= xj) return -(x - cx) / rhead(x);
        const double s = x - Lam;
        return std::pow(s, nu) * cpow * (1.0 + nu);
    };
    p.ddr = [=](double x) {
        if (x >= xj) {
            const double rr = rhead(x);
            return -head_R * head_R / (rr * rr * rr);
        }
        const double s = x - Lam;
        return std::pow(s, nu - 1.0) * cpow * (1.0 + nu) * nu;
    };
    return p;
}

RevolutionProfile RevolutionProfile::cylinder(double radius, double len) {
    if (!(radius > 0) || !(len > 0))
        throw std::invalid_argument("cylinder: radius and length must be positive");
    RevolutionProfile p;
    p.Lambda = -len;
    p.a = radius;
    p.ell = 0;
    p.nu = 0;
    p.k_top = 0;
    p.x_join = -len;
    p.r = [radius](double) { return radius; };
    p.dr = [](double) { return 0.0; };
    p.ddr = [](double) { return 0.0; };
    return p;
}

RevolutionProfile RevolutionProfile::cone(double a, double slope, double len) {
    if (!(a > 0) || !(slope > 0) || !(len > 0))
        throw std::invalid_argument("cone: parameters must be positive");
    RevolutionProfile p;
    p.Lambda = -len;
    p.a = a;
    p.ell = 0;
    p.nu = 0;
    p.cone_slope = slope;
    p.k_top = 0;
    p.x_join = -len;
    const double Lam = p.Lambda;
    p.r = [=](double x) { return a + slope * (x - Lam); };
    p.dr = [slope](double) { return slope; };
    p.ddr = [](double) { return 0.0; };
    return p;
}

void RevolutionProfile::validate(double tol) const {
    if (!(Lambda < 0)) throw std::invalid_argument("RevolutionProfile: Lambda must be < 0");
    if (!(a > 0)) throw std::invalid_argument("RevolutionProfile: a must be > 0");
    if (std::abs(r(Lambda) - a) > 1e-9 * a)
        throw std::invalid_argument("RevolutionProfile: r(Lambda) != a");
    for (int i = 1; i < 512; ++i) {
        const double x = Lambda + (0.0 - Lambda) * double(i) / 512.0;
        if (!(r(x) > 0)) throw std::domain_error("RevolutionProfile: r <= 0 inside the interval");
    }
    if (nu > 0) {
        // neck shape must match a + s^{1+nu}/(nu(1+nu) ell^nu) near the end
        const double c = 1.0 / (nu * (1.0 + nu) * std::pow(ell, nu));
        for (double f : {1e-3, 1e-2}) {
            const double s = f * (x_join > Lambda ? x_join - Lambda : -Lambda);
            const double want = std::pow(s, 1.0 + nu) * c;
            const double got = r(Lambda + s) - a;
            if (std::abs(got - want) > tol * want + 1e-12)
                throw std::invalid_argument("RevolutionProfile: neck does not match the declared power law");
        }
    }
}

double profile_area(const RevolutionProfile& p, double t) {
    if (t < p.Lambda - 1e-12 || t > 1e-12)
        throw std::invalid_argument("profile_area: t outside [Lambda, 0]");
    if (t >= 0) return 0.0;
    auto g = [&](double s) {
        const double rr = p.r(s);
        if (!(rr > 0)) throw std::domain_error("profile_area: non-positive radius sample");
        const double d = p.dr(s);
        return rr * std::sqrt(1 + d * d);
    };
    double hi = 0.0, tail = 0.0;
    if (p.k_top > 0) {
        // r ~ k sqrt(-x): the arc element tends to k^2/2; peel the endpoint off
        const double eta = 1e-9 * (-p.Lambda);
        hi = -eta;
        tail = g(-eta) * eta;
    }
    return 2 * kPi * (adaptive_simpson(g, t, hi, 1e-10) + tail);
}

// ---------------------------------------------------------------------------
// Composite / dumbbell / needle

double CompositeSpec::absorbing_measure() const {
    return dim == 2 ? 2 * neck_radius : kPi * neck_radius * neck_radius;
}

void CompositeSpec::validate() const {
    if (!(head_volume > 0)) throw std::invalid_argument("CompositeSpec: head_volume must be > 0");
    if (!(neck_radius > 0)) throw std::invalid_argument("CompositeSpec: neck_radius must be > 0");
    if (neck_len < 0) throw std::invalid_argument("CompositeSpec: neck_len must be >= 0");
    if (dim != 2 && dim != 3) throw std::invalid_argument("CompositeSpec: dim must be 2 or 3");
}

void DumbbellSpec::validate() const {
    if (!(omega1_vol > 0) || !(omega3_vol > 0) || !(Rc1 > 0) || !(Rc3 > 0) || !(a > 0) ||
        !(L > 0) || !(D > 0))
        throw std::invalid_argument("DumbbellSpec: all parameters must be positive");
}

bool DumbbellSpec::is_asymptotic_regime(double ratio_threshold) const {
    return a <= ratio_threshold * std::min(Rc1, Rc3);
}

void NeedleStripSpec::validate() const {
    if (!(l > 0) || !(l < l0)) throw std::invalid_argument("NeedleStripSpec: need 0 < l < l0");
    if (!(DY > 0) || !(DX >= DY)) throw std::invalid_argument("NeedleStripSpec: need DX >= DY > 0");
    if (!(Dr > 0)) throw std::invalid_argument("NeedleStripSpec: need Dr > 0");
}

bool needle_contains(double theta, double y, const NeedleStripSpec& s) {
    return std::abs(y) < (s.l0 - s.l * std::sin(theta)) / 2;
}

// ---------------------------------------------------------------------------
// RevolutionSolid

RevolutionSolid::RevolutionSolid(const RevolutionProfile& p) : p_(p) {
    p_.validate();
    has_bulb_ = p_.k_top > 0;
    if (has_bulb_) {
        head_R_ = p_.k_top * p_.k_top / 2;
        head_cx_ = -head_R_;
        join_slope_ = p_.x_join > p_.Lambda ? p_.dr(p_.x_join) : 0.0;
    }
    slope_K_ = std::sqrt(1 + join_slope_ * join_slope_);
    auto r2 = [&](double x) {
        const double rr = p_.r(x);
        return rr * rr;
    };
    volume_ = kPi * adaptive_simpson(r2, p_.Lambda, 0.0, 1e-12);
}

bool RevolutionSolid::contains(const Vec3& q) const {
    if (q.x <= p_.Lambda || q.x >= 0) return false;
    if (has_bulb_ && q.x >= p_.x_join) {
        const double dx = q.x - head_cx_;
        return dx * dx + q.y * q.y + q.z * q.z < head_R_ * head_R_;
    }
    const double rr = p_.r(q.x);
    return q.y * q.y + q.z * q.z < rr * rr;
}

double RevolutionSolid::wall_gap(const Vec3& q) const {
    if (has_bulb_ && q.x >= p_.x_join) {
        const double dx = q.x - head_cx_;
        return head_R_ - std::sqrt(dx * dx + q.y * q.y + q.z * q.z);
    }
    return p_.r(q.x) - std::sqrt(q.y * q.y + q.z * q.z);
}

double RevolutionSolid::safe_distance(const Vec3& q) const {
    if (has_bulb_ && q.x >= p_.x_join) {
        const double dx = q.x - head_cx_;
        double d = head_R_ - std::sqrt(dx * dx + q.y * q.y + q.z * q.z);
        if (p_.x_join > p_.Lambda) d = std::min(d, q.x - p_.x_join);
        return d;
    }
    const double rho = std::sqrt(q.y * q.y + q.z * q.z);
    double d = std::min(q.x - p_.Lambda, (p_.r(q.x) - rho) / slope_K_);
    if (has_bulb_ && p_.x_join > p_.Lambda) d = std::min(d, p_.x_join - q.x);
    return d;
}

double RevolutionSolid::neck_distance(const Vec3& q) const {
    const double rho = std::sqrt(q.y * q.y + q.z * q.z);
    const double ax = q.x - p_.Lambda;
    const double ar = std::max(rho - p_.a, 0.0);
    return std::sqrt(ax * ax + ar * ar);
}

RevolutionSolid::StepResult RevolutionSolid::advance(Vec3 pos, Vec3 step) const {
    const double scale = has_bulb_ ? head_R_ : p_.a;
    const double nudge = 1e-9 * std::max(scale, -p_.Lambda);
    Vec3 c = pos, d = step;
    for (int bounce = 0; bounce < 8; ++bounce) {
        // best hit over the chord [c, c+d]
        double tbest = 2.0;
        Vec3 nbest;
        bool absorb = false;

        // absorbing end disk on the plane x = Lambda
        if (d.x < 0 && c.x + d.x < p_.Lambda) {
            const double t = (p_.Lambda - c.x) / d.x;
            if (t >= 0 && t <= 1 && t < tbest) {
                tbest = t;
                absorb = true;
                nbest = {1, 0, 0};
            }
        }

        // walls; split the chord at the funnel/bulb joint plane
        double tsplit = 2.0;
        if (has_bulb_ && p_.x_join > p_.Lambda && d.x != 0) {
            const double t = (p_.x_join - c.x) / d.x;
            if (t > 0 && t < 1) tsplit = t;
        }
        auto head_side = [&](double t) {
            return has_bulb_ && (c.x + t * d.x) >= p_.x_join;
        };
        auto scan_wall = [&](double ta, double tb) {
            if (ta >= tbest) return;
            tb = std::min(tb, tbest);
            if (tb <= ta) return;
            if (head_side(0.5 * (ta + tb))) {
                // exact sphere crossing within [ta, tb]
                const Vec3 f = {c.x - head_cx_, c.y, c.z};
                const double A = d.norm2(), B = 2 * f.dot(d), E = f.norm2() - head_R_ * head_R_;
                const double disc = B * B - 4 * A * E;
                if (A > 0 && disc > 0) {
                    const double t = (-B + std::sqrt(disc)) / (2 * A);
                    if (t >= ta && t <= tb && t < tbest) {
                        const Vec3 q = c + d * t;
                        const Vec3 n = {(head_cx_ - q.x) / head_R_, -q.y / head_R_,
                                        -q.z / head_R_};
                        tbest = t;
                        nbest = n;
                        absorb = false;
                    }
                }
                return;
            }
            // funnel wall: sampled sign scan + bisection on rho - r(x)
            const double len = (d * (tb - ta)).norm();
            const int M = std::min(16, std::max(2, int(len / (0.5 * p_.a)) + 1));
            double tp = ta;
            for (int i = 1; i <= M; ++i) {
                const double t = ta + (tb - ta) * double(i) / M;
                Vec3 q = c + d * t;
                if (wall_gap(q) < 0) {
                    double lo = tp, hi = t;
                    for (int it = 0; it < 60; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        (wall_gap(c + d * mid) < 0 ? hi : lo) = mid;
                    }
                    if (lo < tbest) {
                        const Vec3 qq = c + d * lo;
                        const double rho = std::sqrt(qq.y * qq.y + qq.z * qq.z);
                        const double rp = p_.dr(std::max(qq.x, p_.Lambda + 1e-15));
                        const double nn = std::sqrt(1 + rp * rp);
                        Vec3 n;
                        if (rho > 0)
                            n = {rp / nn, -qq.y / (rho * nn), -qq.z / (rho * nn)};
                        else
                            n = {1, 0, 0};
                        tbest = lo;
                        nbest = n;
                        absorb = false;
                    }
                    return;
                }
                tp = t;
            }
        };
        if (tsplit < 1.0) {
            scan_wall(0.0, tsplit);
            scan_wall(tsplit, 1.0);
        } else {
            scan_wall(0.0, 1.0);
        }

        if (tbest > 1.0) {
            c = c + d;
            break;
        }
        Vec3 q = c + d * tbest;
        if (absorb) {
            const double rho2 = q.y * q.y + q.z * q.z;
            if (rho2 <= p_.a * p_.a) return {q, true, false};
            // crossing the end plane outside the disk: a missed wall hit; reflect
        }
        Vec3 rem = d * (1.0 - tbest);
        rem = rem - nbest * (2.0 * rem.dot(nbest));
        c = q + nbest * nudge;
        d = rem;
        if (bounce == 7) return {pos, false, true};
    }
    if (!contains(c)) return {pos, false, true};
    return {c, false, false};
}

Vec3 RevolutionSolid::sample_interior(uint64_t seed, uint64_t idx) const {
    Xoshiro256pp rng(seed ^ 0xd1ce5eed00aa77ffULL, idx);
    double rmax = 0;
    for (int i = 1; i < 128; ++i)
        rmax = std::max(rmax, p_.r(p_.Lambda - p_.Lambda * double(i) / 128.0));
    for (int tries = 0; tries < 200000; ++tries) {
        Vec3 q{p_.Lambda * rng.uniform(), (2 * rng.uniform() - 1) * rmax,
               (2 * rng.uniform() - 1) * rmax};
        if (contains(q)) return q;
    }
    throw std::runtime_error("sample_interior: rejection sampling failed");
}

} // namespace netkit
