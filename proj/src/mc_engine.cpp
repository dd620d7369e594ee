#include "netkit/mc_engine.hpp"
#include "netkit/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace netkit {

static constexpr double kPi = 3.14159265358979323846;

void SimParams::validate() const {
    if (!(dt > 0)) throw std::invalid_argument("SimParams: dt must be positive");
    if (n_paths < 1) throw std::invalid_argument("SimParams: n_paths must be >= 1");
    if (!(max_time > 0)) throw std::invalid_argument("SimParams: max_time must be positive");
    if (refine_factor < 1) throw std::invalid_argument("SimParams: refine_factor must be >= 1");
}

double FptEstimate::metadata_value(const std::string& key) const {
    for (const auto& [k, v] : metadata)
        if (k == key) return v;
    throw std::out_of_range("FptEstimate: no metadata '" + key + "'");
}

int worker_count() {
    if (const char* env = std::getenv("NET_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return std::min(w, 256);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

namespace {

struct PathOutcome {
    double t = 0;
    int32_t neck = -1;
    uint8_t absorbed = 0;
};

template <typename Fn>
std::vector<PathOutcome> run_paths(uint64_t n, Fn&& fn) {
    std::vector<PathOutcome> out(n);
    const int w = worker_count();
    if (w <= 1 || n < 2) {
        for (uint64_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    const int nw = int(std::min<uint64_t>(uint64_t(w), n));
    pool.reserve(nw);
    for (int k = 0; k < nw; ++k)
        pool.emplace_back([&] {
            for (;;) {
                const uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) break;
                out[i] = fn(i);
            }
        });
    for (auto& th : pool) th.join();
    return out;
}

TailDiagnostic tail_fit(std::vector<double> times) {
    TailDiagnostic d;
    std::sort(times.begin(), times.end());
    const size_t n = times.size();
    const double median = times[n / 2];
    std::vector<double> s;
    for (size_t i = n / 2; i < n; ++i)
        if (times[i] > median) s.push_back(times[i] - median);
    d.n_tail = s.size();
    if (s.size() < 50) return d;  // not enough tail mass to test
    double m = 0;
    for (double v : s) m += v;
    m /= double(s.size());
    if (!(m > 0)) return d;
    std::sort(s.begin(), s.end());
    double D = 0;
    const double nn = double(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        const double F = 1.0 - std::exp(-s[i] / m);
        D = std::max(D, std::abs(F - double(i) / nn));
        D = std::max(D, std::abs(double(i + 1) / nn - F));
    }
    // Stephens' modification for an exponential with estimated rate
    d.ks_stat = (D - 0.2 / nn) * (std::sqrt(nn) + 0.26 + 0.5 / std::sqrt(nn));
    d.pass = d.ks_stat <= d.threshold;
    return d;
}

FptEstimate reduce(const std::vector<PathOutcome>& paths, double time_scale = 1.0) {
    FptEstimate e;
    std::vector<double> times;
    times.reserve(paths.size());
    for (const auto& p : paths) {
        if (p.absorbed)
            times.push_back(p.t);
        else
            ++e.n_censored;
    }
    e.n_absorbed = times.size();
    if (e.n_absorbed == 0)
        throw std::runtime_error("mc_engine: all paths censored, no estimate possible");
    double sum = 0;
    for (double t : times) sum += t;
    const double mean_raw = sum / double(e.n_absorbed);
    double ss = 0;
    for (double t : times) ss += (t - mean_raw) * (t - mean_raw);
    const double var = e.n_absorbed > 1 ? ss / double(e.n_absorbed - 1) : 0.0;
    e.mean = time_scale * mean_raw;
    e.std_error = time_scale * std::sqrt(var / double(e.n_absorbed));
    e.censor_flagged = 100 * e.n_censored >= paths.size();
    if (e.n_absorbed >= 200) e.tail = tail_fit(std::move(times));
    return e;
}

FptEstimate zero_estimate(uint64_t n_paths) {
    FptEstimate e;
    e.n_absorbed = n_paths;
    return e;
}

} // namespace

// ---------------------------------------------------------------------------
// calibration kernels: fully absorbing circle / sphere

FptEstimate simulate_disk_calibration(double R, double D, Vec2 start, const SimParams& prm) {
    prm.validate();
    if (!(R > 0) || !(D > 0))
        throw std::invalid_argument("simulate_disk_calibration: R, D must be positive");
    if (start.norm() >= R) return zero_estimate(prm.n_paths);
    const double sig = std::sqrt(2 * D * prm.dt);
    auto one = [&](uint64_t i) -> PathOutcome {
        Xoshiro256pp rng(prm.seed, i);
        Vec2 pos = start;
        double t = 0;
        while (t < prm.max_time) {
            const Vec2 step{sig * rng.gaussian(), sig * rng.gaussian()};
            const double safe = R - pos.norm();
            if (step.norm2() < safe * safe) {
                pos = pos + step;
                t += prm.dt;
                continue;
            }
            const double a = step.norm2(), b = 2 * pos.dot(step), c = pos.norm2() - R * R;
            const double disc = b * b - 4 * a * c;
            if (disc > 0) {
                const double u = (-b + std::sqrt(disc)) / (2 * a);
                if (u >= 0 && u <= 1) return {t + u * prm.dt, 0, 1};
            }
            pos = pos + step;
            t += prm.dt;
        }
        return {prm.max_time, -1, 0};
    };
    return reduce(run_paths(prm.n_paths, one));
}

FptEstimate simulate_ball_calibration(double R, double D, Vec3 start, const SimParams& prm) {
    prm.validate();
    if (!(R > 0) || !(D > 0))
        throw std::invalid_argument("simulate_ball_calibration: R, D must be positive");
    if (start.norm() >= R) return zero_estimate(prm.n_paths);
    const double sig = std::sqrt(2 * D * prm.dt);
    auto one = [&](uint64_t i) -> PathOutcome {
        Xoshiro256pp rng(prm.seed, i);
        Vec3 pos = start;
        double t = 0;
        while (t < prm.max_time) {
            const Vec3 step{sig * rng.gaussian(), sig * rng.gaussian(), sig * rng.gaussian()};
            const double safe = R - pos.norm();
            if (step.norm2() < safe * safe) {
                pos = pos + step;
                t += prm.dt;
                continue;
            }
            const double a = step.norm2(), b = 2 * pos.dot(step), c = pos.norm2() - R * R;
            const double disc = b * b - 4 * a * c;
            if (disc > 0) {
                const double u = (-b + std::sqrt(disc)) / (2 * a);
                if (u >= 0 && u <= 1) return {t + u * prm.dt, 0, 1};
            }
            pos = pos + step;
            t += prm.dt;
        }
        return {prm.max_time, -1, 0};
    };
    return reduce(run_paths(prm.n_paths, one));
}

// ---------------------------------------------------------------------------
// planar funnel domains

namespace {

bool on_absorbing_floor(const PlanarFunnelDomain& dom, Vec2 p) {
    if (std::abs(p.y) > 1e-12 * dom.head_radius()) return false;
    for (size_t j = 0; j < dom.n_necks(); ++j)
        if (std::abs(p.x - dom.neck(j).xc) <= dom.neck(j).eps / 2) return true;
    return false;
}

PathOutcome funnel_path_2d(const PlanarFunnelDomain& dom, const std::optional<Vec2>& start,
                           double D, const SimParams& prm, uint64_t i) {
    Xoshiro256pp rng(prm.seed, i);
    Vec2 pos = start ? *start : dom.sample_interior(prm.seed, i);
    const double trigger = 4 * std::sqrt(2 * D * prm.dt);
    double t = 0;
    while (t < prm.max_time) {
        double dt_eff = prm.dt;
        if (prm.adaptive && dom.neck_distance(pos) < trigger) dt_eff /= prm.refine_factor;
        const double sig = std::sqrt(2 * D * dt_eff);
        const double safe = dom.safe_distance(pos);
        for (int attempt = 0;; ++attempt) {
            const Vec2 step{sig * rng.gaussian(), sig * rng.gaussian()};
            if (step.norm2() < safe * safe) {
                pos = pos + step;
                break;
            }
            const auto res = dom.advance(pos, step);
            if (res.rejected) {
                if (attempt >= 100)
                    throw std::runtime_error("mc_engine: reflection resampling stuck");
                continue;
            }
            pos = res.pos;
            if (res.absorbed) return {t + dt_eff, res.neck, 1};
            break;
        }
        t += dt_eff;
    }
    return {prm.max_time, -1, 0};
}

} // namespace

FptEstimate simulate_mfpt_2d(const PlanarFunnelDomain& dom, std::optional<Vec2> start,
                             double D, const SimParams& prm) {
    prm.validate();
    if (!(D > 0)) throw std::invalid_argument("simulate_mfpt_2d: D must be positive");
    if (start) {
        if (on_absorbing_floor(dom, *start)) return zero_estimate(prm.n_paths);
        if (!dom.contains(*start))
            throw std::invalid_argument("simulate_mfpt_2d: start outside the domain");
    }
    auto one = [&](uint64_t i) { return funnel_path_2d(dom, start, D, prm, i); };
    return reduce(run_paths(prm.n_paths, one));
}

std::pair<ExitProbEstimate, FptEstimate> simulate_exit_probs(const PlanarFunnelDomain& dom,
                                                             std::optional<Vec2> start,
                                                             double D, const SimParams& prm) {
    prm.validate();
    if (dom.n_necks() < 2)
        throw std::invalid_argument("simulate_exit_probs: need at least two necks");
    if (!(D > 0)) throw std::invalid_argument("simulate_exit_probs: D must be positive");
    if (start && !dom.contains(*start) && !on_absorbing_floor(dom, *start))
        throw std::invalid_argument("simulate_exit_probs: start outside the domain");
    auto one = [&](uint64_t i) { return funnel_path_2d(dom, start, D, prm, i); };
    const auto paths = run_paths(prm.n_paths, one);
    FptEstimate est = reduce(paths);
    ExitProbEstimate probs;
    probs.p.assign(dom.n_necks(), 0.0);
    for (const auto& p : paths)
        if (p.absorbed && p.neck >= 0) probs.p[size_t(p.neck)] += 1.0;
    for (size_t j = 0; j < probs.p.size(); ++j) {
        const double pj = probs.p[j] / double(est.n_absorbed);
        probs.p[j] = pj;
        probs.std_error.push_back(std::sqrt(pj * (1 - pj) / double(est.n_absorbed)));
    }
    return {probs, est};
}

// ---------------------------------------------------------------------------
// solids of revolution

FptEstimate simulate_mfpt_3d(const RevolutionSolid& solid, std::optional<Vec3> start,
                             double D, const SimParams& prm) {
    prm.validate();
    if (!(D > 0)) throw std::invalid_argument("simulate_mfpt_3d: D must be positive");
    const auto& prof = solid.profile();
    if (start) {
        const double rho = std::sqrt(start->y * start->y + start->z * start->z);
        if (std::abs(start->x - prof.Lambda) < 1e-12 * (-prof.Lambda) && rho <= prof.a)
            return zero_estimate(prm.n_paths);
        if (!solid.contains(*start))
            throw std::invalid_argument("simulate_mfpt_3d: start outside the solid");
    }
    const double trigger = 4 * std::sqrt(2 * D * prm.dt);
    auto one = [&](uint64_t i) -> PathOutcome {
        Xoshiro256pp rng(prm.seed, i);
        Vec3 pos = start ? *start : solid.sample_interior(prm.seed, i);
        double t = 0;
        while (t < prm.max_time) {
            double dt_eff = prm.dt;
            if (prm.adaptive && solid.neck_distance(pos) < trigger) dt_eff /= prm.refine_factor;
            const double sig = std::sqrt(2 * D * dt_eff);
            const double safe = solid.safe_distance(pos);
            for (int attempt = 0;; ++attempt) {
                const Vec3 step{sig * rng.gaussian(), sig * rng.gaussian(),
                                sig * rng.gaussian()};
                if (step.norm2() < safe * safe) {
                    pos = pos + step;
                    break;
                }
                const auto res = solid.advance(pos, step);
                if (res.rejected) {
                    if (attempt >= 100)
                        throw std::runtime_error("mc_engine: reflection resampling stuck");
                    continue;
                }
                pos = res.pos;
                if (res.absorbed) return {t + dt_eff, 0, 1};
                break;
            }
            t += dt_eff;
        }
        return {prm.max_time, -1, 0};
    };
    return reduce(run_paths(prm.n_paths, one));
}

// ---------------------------------------------------------------------------
// projected 1D surface dynamics

FptEstimate simulate_surface_1d(const DriftField& field, double start_z, const SimParams& prm) {
    prm.validate();
    const size_t n = field.grid.size();
    if (n < 2) throw std::invalid_argument("simulate_surface_1d: empty drift field");
    const double Lam = field.grid.front();
    const double h = field.grid[1] - field.grid[0];
    if (start_z <= Lam) return zero_estimate(prm.n_paths);
    if (start_z > 0)
        throw std::invalid_argument("simulate_surface_1d: start outside (Lambda, 0]");
    auto lerp = [&](const std::vector<double>& v, double z) {
        const double u = (z - Lam) / h;
        const size_t j = std::min(size_t(std::max(u, 0.0)), n - 2);
        const double f = u - double(j);
        return v[j] * (1 - f) + v[j + 1] * f;
    };
    auto one = [&](uint64_t i) -> PathOutcome {
        Xoshiro256pp rng(prm.seed, i);
        double z = start_z, t = 0;
        const double sq_dt = std::sqrt(prm.dt);
        const double sq_dtr = std::sqrt(prm.dt / prm.refine_factor);
        while (t < prm.max_time) {
            const double a = lerp(field.a_of_z, z);
            const double b = lerp(field.b_of_z, z);
            const bool fine = prm.adaptive && (z - Lam) < 4 * b * sq_dt;
            const double dt_eff = fine ? prm.dt / prm.refine_factor : prm.dt;
            const double zn = z + a * dt_eff + b * (fine ? sq_dtr : sq_dt) * rng.gaussian();
            if (zn <= Lam) {
                const double frac = (z - Lam) / (z - zn);
                return {t + frac * dt_eff, 0, 1};
            }
            z = zn > 0 ? -zn : zn;  // reflect at the pole
            if (z <= Lam) return {t + dt_eff, 0, 1};
            t += dt_eff;
        }
        return {prm.max_time, -1, 0};
    };
    return reduce(run_paths(prm.n_paths, one));
}

// ---------------------------------------------------------------------------
// Brownian needle in a strip

FptEstimate simulate_needle(const NeedleStripSpec& spec, double theta0, double y0,
                            const SimParams& prm) {
    prm.validate();
    spec.validate();
    if (theta0 >= kPi / 2) return zero_estimate(prm.n_paths);
    if (!(theta0 >= 0) || !needle_contains(theta0, y0, spec))
        throw std::invalid_argument("simulate_needle: start outside the configuration domain");
    auto w = [&](double th) { return (spec.l0 - spec.l * std::sin(th)) / 2; };
    auto wp = [&](double th) { return -(spec.l / 2) * std::cos(th); };
    const double trigger = 4 * std::sqrt(2 * spec.Dr * prm.dt);
    const double nudge = 1e-12 * spec.l0;

    auto one = [&](uint64_t i) -> PathOutcome {
        Xoshiro256pp rng(prm.seed, i);
        double th = theta0, y = y0, t = 0;
        while (t < prm.max_time) {
            const bool fine = prm.adaptive && (kPi / 2 - th) < trigger;
            const double dt_eff = fine ? prm.dt / prm.refine_factor : prm.dt;
            const double Dy = spec.DX * std::sin(th) * std::sin(th) +
                              spec.DY * std::cos(th) * std::cos(th);
            const double sig_th = std::sqrt(2 * spec.Dr * dt_eff);
            const double sig_y = std::sqrt(2 * Dy * dt_eff);
            bool absorbed = false, resample = false;
            for (int attempt = 0;; ++attempt) {
                double cth = th, cy = y;
                double dth = sig_th * rng.gaussian(), dy = sig_y * rng.gaussian();
                resample = false;
                for (int bounce = 0; bounce < 8; ++bounce) {
                    double tb = 2.0;
                    int kind = 0;  // 1 absorb, 2 wall, 3 theta=0
                    double nx = 0, ny = 0;
                    if (dth > 0 && cth + dth >= kPi / 2) {
                        tb = (kPi / 2 - cth) / dth;
                        kind = 1;
                    }
                    if (dth < 0 && cth + dth <= 0) {
                        const double u = cth / (-dth);
                        if (u < tb) {
                            tb = u;
                            kind = 3;
                            nx = 1;
                            ny = 0;
                        }
                    }
                    // wall crossing scan over the candidate range
                    {
                        const double umax = std::min(1.0, tb);
                        auto g = [&](double u) {
                            return std::abs(cy + u * dy) - w(cth + u * dth);
                        };
                        double up = 0;
                        for (int j = 1; j <= 8; ++j) {
                            const double u = umax * double(j) / 8.0;
                            if (g(u) >= 0) {
                                double lo = up, hi = u;
                                for (int it = 0; it < 60; ++it) {
                                    const double mid = 0.5 * (lo + hi);
                                    (g(mid) >= 0 ? hi : lo) = mid;
                                }
                                if (lo < tb) {
                                    tb = lo;
                                    kind = 2;
                                    const double th_h = cth + lo * dth;
                                    const double sy = (cy + lo * dy) >= 0 ? 1.0 : -1.0;
                                    const double nn =
                                        std::sqrt(1.0 + wp(th_h) * wp(th_h));
                                    nx = wp(th_h) / nn;  // inward: toward smaller theta
                                    ny = -sy / nn;
                                }
                                break;
                            }
                            up = u;
                        }
                    }
                    if (kind == 0) {
                        cth += dth;
                        cy += dy;
                        if (!needle_contains(cth, cy, spec)) {
                            resample = true;  // crossing slipped through the scan
                            break;
                        }
                        th = cth;
                        y = cy;
                        break;
                    }
                    if (kind == 1) {
                        th = kPi / 2;
                        y = cy + tb * dy;
                        absorbed = true;
                        break;
                    }
                    // oblique reflection in the anisotropy-scaled frame
                    const double hth = cth + tb * dth, hy = cy + tb * dy;
                    double rth = (1 - tb) * dth, ry = (1 - tb) * dy;
                    const double denom = nx * nx * spec.Dr + ny * ny * Dy;
                    const double q = (nx * rth + ny * ry) / denom;
                    rth -= 2 * q * spec.Dr * nx;
                    ry -= 2 * q * Dy * ny;
                    cth = hth + nudge * nx;
                    cy = hy + nudge * ny;
                    dth = rth;
                    dy = ry;
                    if (bounce == 7) resample = true;
                }
                if (!resample) break;
                if (attempt >= 100)
                    throw std::runtime_error("simulate_needle: reflection resampling stuck");
            }
            if (absorbed) return {t + dt_eff, 0, 1};
            t += dt_eff;
        }
        return {prm.max_time, -1, 0};
    };
    auto paths = run_paths(prm.n_paths, one);
    FptEstimate est = reduce(paths, 2.0);  // full turnaround doubles the one-way time
    est.metadata.push_back({"mean_to_black", est.mean / 2});
    return est;
}

} // namespace netkit
