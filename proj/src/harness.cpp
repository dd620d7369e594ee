#include "netkit/harness.hpp"
#include "netkit/boundary_layer.hpp"
#include "netkit/coarse_markov.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace netkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    size_t used = 0;
    double x;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" + v + "'");
    }
    if (used != v.size())
        throw std::invalid_argument("config: key '" + key + "' has trailing junk in '" + v + "'");
    return x;
}

} // namespace

double ExperimentConfig::param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

double ExperimentConfig::require(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end())
        throw std::invalid_argument("case '" + case_id + "' needs parameter '" + key + "'");
    return it->second;
}

void ExperimentConfig::set_kv(const std::string& rawkey, const std::string& rawval) {
    const std::string key = trim(rawkey), val = trim(rawval);
    if (key.empty()) throw std::invalid_argument("config: empty key");
    if (key == "format_version") {
        const int v = int(to_double(key, val));
        if (v != 1) throw std::invalid_argument("config: unsupported format_version");
        format_version = v;
    } else if (key == "case") {
        case_id = val;
    } else if (key == "output") {
        output_path = val;
    } else if (key == "sweep.param") {
        sweep_param = val;
    } else if (key == "sweep.values") {
        sweep_values.clear();
        std::string item;
        std::istringstream in(val);
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) sweep_values.push_back(to_double(key, item));
        }
        std::sort(sweep_values.begin(), sweep_values.end());
    } else if (key == "sim.dt") {
        sim.dt = to_double(key, val);
    } else if (key == "sim.n_paths") {
        sim.n_paths = uint64_t(to_double(key, val));
    } else if (key == "sim.seed") {
        sim.seed = uint64_t(to_double(key, val));
    } else if (key == "sim.max_time") {
        sim.max_time = to_double(key, val);
    } else if (key == "sim.adaptive") {
        if (val == "true" || val == "1")
            sim.adaptive = true;
        else if (val == "false" || val == "0")
            sim.adaptive = false;
        else
            throw std::invalid_argument("config: sim.adaptive must be 0/1/true/false");
    } else if (key == "sim.refine_factor") {
        sim.refine_factor = int(to_double(key, val));
    } else {
        params[key] = to_double(key, val);
    }
}

std::string ExperimentConfig::serialize() const {
    std::string out;
    out += "format_version = " + std::to_string(format_version) + "\n";
    out += "case = " + case_id + "\n";
    if (!output_path.empty()) out += "output = " + output_path + "\n";
    if (!sweep_param.empty()) {
        out += "sweep.param = " + sweep_param + "\n";
        out += "sweep.values = ";
        for (size_t i = 0; i < sweep_values.size(); ++i)
            out += (i ? "," : "") + fmt(sweep_values[i]);
        out += "\n";
    }
    out += "sim.dt = " + fmt(sim.dt) + "\n";
    out += "sim.n_paths = " + std::to_string(sim.n_paths) + "\n";
    out += "sim.seed = " + std::to_string(sim.seed) + "\n";
    out += "sim.max_time = " + fmt(sim.max_time) + "\n";
    out += "sim.adaptive = " + std::string(sim.adaptive ? "1" : "0") + "\n";
    out += "sim.refine_factor = " + std::to_string(sim.refine_factor) + "\n";
    for (const auto& [k, v] : params) out += k + " = " + fmt(v) + "\n";
    return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        cfg.set_kv(t.substr(0, eq), t.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse(buf.str());
}

void ExperimentConfig::validate() const {
    if (case_id.empty()) throw std::invalid_argument("config: no case set");
    const auto names = known_cases();
    if (std::find(names.begin(), names.end(), case_id) == names.end()) {
        std::string msg = "config: unknown case '" + case_id + "'; known:";
        for (const auto& n : names) msg += " " + n;
        throw std::invalid_argument(msg);
    }
    for (double v : sweep_values)
        if (!std::isfinite(v) || v <= 0)
            throw std::invalid_argument("config: sweep values must be finite and positive");
    if (!std::is_sorted(sweep_values.begin(), sweep_values.end()))
        throw std::invalid_argument("config: sweep values must be sorted ascending");
    if (!sweep_param.empty() && sweep_values.empty())
        throw std::invalid_argument("config: sweep.param set but sweep.values empty");
    sim.validate();
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_header() {
    return "case,formula_id,param_json,epsilon_like,tau_pred,tau_mc,stderr,"
           "n_paths,n_censored,dt,seed,wall_time_s";
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string num_or_empty(double v) { return std::isfinite(v) ? fmt(v) : std::string(); }

} // namespace

std::string to_csv(const CaseRow& r) {
    std::string out;
    out += csv_escape(r.case_id);
    out += ',';
    out += csv_escape(r.formula_id);
    out += ',';
    out += csv_escape(r.param_json);
    out += ',';
    out += fmt(r.epsilon_like);
    out += ',';
    out += num_or_empty(r.tau_pred);
    out += ',';
    out += num_or_empty(r.tau_mc);
    out += ',';
    out += num_or_empty(r.std_error);
    out += ',';
    out += std::to_string(r.n_paths);
    out += ',';
    out += std::to_string(r.n_censored);
    out += ',';
    out += fmt(r.dt);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_time_s);
    out += buf;
    return out;
}

// ---------------------------------------------------------------------------
// case registry

std::vector<std::string> known_cases() {
    return {"disk",        "ball",          "window_2d",   "window_3d",  "funnel_2d",
            "funnel_2d_nu", "exit_2d",      "funnel_3d",   "funnel_3d_multi",
            "surface_funnel", "sphere_cap", "surface_cyl", "cone",       "composite",
            "dumbbell",    "needle",        "telegraph"};
}

namespace {

std::string params_json(const ExperimentConfig& cfg, int neck = -1) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : cfg.params) j[k] = v;
    if (neck >= 0) j["neck"] = neck;
    return j.dump();
}

CaseRow base_row(const ExperimentConfig& cfg, const std::string& fid, double eps_like,
                 int neck = -1) {
    CaseRow r;
    r.case_id = cfg.case_id;
    r.formula_id = fid;
    r.param_json = params_json(cfg, neck);
    r.epsilon_like = eps_like;
    r.dt = cfg.sim.dt;
    r.seed = cfg.sim.seed;
    return r;
}

void fill_mc(CaseRow& r, const FptEstimate& est, uint64_t n_paths) {
    r.tau_mc = est.mean;
    r.std_error = est.std_error;
    r.n_paths = n_paths;
    r.n_censored = est.n_censored;
}

std::optional<Vec2> start2(const ExperimentConfig& cfg) {
    if (cfg.has("start_x") && cfg.has("start_y"))
        return Vec2{cfg.require("start_x"), cfg.require("start_y")};
    return std::nullopt;
}

std::vector<std::pair<double, double>> neck_list(const ExperimentConfig& cfg,
                                                 const char* width_key) {
    std::vector<std::pair<double, double>> out;
    for (int k = 1;; ++k) {
        const std::string wk = width_key + std::to_string(k);
        if (!cfg.has(wk)) break;
        const std::string lk = "ell" + std::to_string(k);
        const double ell = cfg.has(lk) ? cfg.require(lk) : cfg.require("ell");
        out.push_back({cfg.require(wk), ell});
    }
    if (out.empty())
        throw std::invalid_argument("case '" + cfg.case_id + "' needs " + width_key +
                                    "1, " + width_key + "2, ...");
    return out;
}

// One case evaluation: fills `out` with one row (or one per neck for the
// splitting-probability cases). `want_mc` attaches the simulation columns.
void run_case(const ExperimentConfig& cfg, bool want_pred, bool want_mc,
              std::vector<CaseRow>& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const double D = cfg.param("D", 1.0);
    std::vector<CaseRow> rows;

    if (cfg.case_id == "disk" || cfg.case_id == "ball") {
        const bool is_disk = cfg.case_id == "disk";
        const double R = cfg.param("R", 1.0), r0 = cfg.param("start_r", 0.0);
        CaseRow r = base_row(cfg, is_disk ? "CAL_DISK" : "CAL_BALL", 0.0);
        if (want_pred) r.tau_pred = (R * R - r0 * r0) / ((is_disk ? 4.0 : 6.0) * D);
        if (want_mc) {
            const auto est = is_disk
                                 ? simulate_disk_calibration(R, D, {r0, 0}, cfg.sim)
                                 : simulate_ball_calibration(R, D, {r0, 0, 0}, cfg.sim);
            fill_mc(r, est, cfg.sim.n_paths);
        }
        rows.push_back(r);
    } else if (cfg.case_id == "window_2d") {
        if (want_mc) throw std::invalid_argument("case 'window_2d' has no simulator");
        const auto p = net_2d_window(cfg.require("area"), cfg.require("boundary_len"),
                                     cfg.require("window_len"), D);
        CaseRow r = base_row(cfg, to_string(p.id), cfg.require("window_len"));
        r.tau_pred = p.tau;
        rows.push_back(r);
    } else if (cfg.case_id == "window_3d") {
        if (want_mc) throw std::invalid_argument("case 'window_3d' has no simulator");
        const auto p = net_3d_window(cfg.require("volume"), cfg.require("a"), D,
                                     cfg.param("L_curv", 0.0), cfg.param("N_curv", 0.0));
        CaseRow r = base_row(cfg, to_string(p.id), cfg.require("a"));
        r.tau_pred = p.tau;
        rows.push_back(r);
    } else if (cfg.case_id == "funnel_2d" || cfg.case_id == "funnel_2d_nu") {
        const double eps = cfg.require("eps"), area = cfg.require("area");
        const PlanarFunnelSpec spec =
            cfg.case_id == "funnel_2d"
                ? PlanarFunnelSpec::tangent_circles(eps, cfg.require("Rc"),
                                                    cfg.require("rc"), area)
                : PlanarFunnelSpec::power_walls(eps, cfg.require("nu"), cfg.require("ell"),
                                                area);
        CaseRow r = base_row(cfg, "", eps);
        if (want_pred) {
            const auto p = net_2d_funnel(spec, D);
            r.formula_id = to_string(p.id);
            r.tau_pred = p.tau;
        }
        if (want_mc) {
            PlanarFunnelDomain dom(spec);
            fill_mc(r, simulate_mfpt_2d(dom, start2(cfg), D, cfg.sim), cfg.sim.n_paths);
        }
        rows.push_back(r);
    } else if (cfg.case_id == "exit_2d") {
        const auto necks = neck_list(cfg, "eps");
        const double area = cfg.require("area");
        const auto [pred, probs] = net_2d_multi_neck(necks, area, D);
        if (want_mc) {
            PlanarFunnelDomain dom(necks, area);
            const auto [mc_probs, est] = simulate_exit_probs(dom, start2(cfg), D, cfg.sim);
            for (size_t j = 0; j < necks.size(); ++j) {
                CaseRow r = base_row(cfg, to_string(pred.id), necks[j].first, int(j));
                if (want_pred) r.tau_pred = probs.probs[j];
                r.tau_mc = mc_probs.p[j];
                r.std_error = mc_probs.std_error[j];
                r.n_paths = cfg.sim.n_paths;
                r.n_censored = est.n_censored;
                rows.push_back(r);
            }
        } else {
            CaseRow tau_row = base_row(cfg, to_string(pred.id),
                                       std::min_element(necks.begin(), necks.end())->first);
            tau_row.tau_pred = pred.tau;
            rows.push_back(tau_row);
            for (size_t j = 0; j < necks.size(); ++j) {
                CaseRow r = base_row(cfg, to_string(pred.id), necks[j].first, int(j));
                r.tau_pred = probs.probs[j];
                rows.push_back(r);
            }
        }
    } else if (cfg.case_id == "funnel_3d") {
        const double a = cfg.require("a"), ell = cfg.require("ell");
        CaseRow r = base_row(cfg, to_string(FormulaId::SOLID_FUNNEL_3D), a);
        std::optional<RevolutionSolid> solid;
        if (want_mc || !cfg.has("volume"))
            solid.emplace(RevolutionProfile::funnel_bulb(a, ell, cfg.require("head_R"),
                                                         cfg.param("nu", 1.0)));
        if (want_pred) {
            // explicit volume serves formula-only queries; simulations always
            // compare against the realized solid's volume
            const double V = (want_mc || !cfg.has("volume")) ? solid->volume()
                                                             : cfg.require("volume");
            r.tau_pred = net_3d_funnel(V, ell, a, D).tau;
        }
        if (want_mc)
            fill_mc(r, simulate_mfpt_3d(*solid, std::nullopt, D, cfg.sim), cfg.sim.n_paths);
        rows.push_back(r);
    } else if (cfg.case_id == "funnel_3d_multi") {
        if (want_mc) throw std::invalid_argument("case 'funnel_3d_multi' has no simulator");
        const auto necks = neck_list(cfg, "a");
        const auto [pred, probs] = net_3d_multi_neck(necks, cfg.require("volume"), D);
        CaseRow tau_row = base_row(cfg, to_string(pred.id),
                                   std::min_element(necks.begin(), necks.end())->first);
        tau_row.tau_pred = pred.tau;
        rows.push_back(tau_row);
        for (size_t j = 0; j < necks.size(); ++j) {
            CaseRow r = base_row(cfg, to_string(pred.id), necks[j].first, int(j));
            r.tau_pred = probs.probs[j];
            rows.push_back(r);
        }
    } else if (cfg.case_id == "surface_funnel") {
        const double a = cfg.require("a"), ell = cfg.require("ell");
        const double nu = cfg.param("nu", 1.0);
        CaseRow r = base_row(cfg, "", a);
        std::optional<RevolutionProfile> prof;
        if (want_mc || !cfg.has("S"))
            prof = RevolutionProfile::funnel_bulb(a, ell, cfg.require("head_R"), nu);
        const double S = (want_mc || !cfg.has("S")) ? profile_area(*prof, prof->Lambda)
                                                    : cfg.require("S");
        if (want_pred) {
            const auto p = net_surface(S, a, ell, nu, D);
            r.formula_id = to_string(p.id);
            r.tau_pred = p.tau;
        } else {
            r.formula_id = to_string(FormulaId::SURFACE_FUNNEL);
        }
        if (want_mc) {
            const auto field = drift_field(*prof, D, int(cfg.param("n_samples", 4096)));
            fill_mc(r, simulate_surface_1d(field, 0.0, cfg.sim), cfg.sim.n_paths);
        }
        rows.push_back(r);
    } else if (cfg.case_id == "sphere_cap") {
        const double R = cfg.param("R", 1.0), delta = cfg.require("delta");
        const double theta = cfg.param("theta", kPi);
        CaseRow r = base_row(cfg, to_string(FormulaId::SPHERE_CAP), delta);
        if (want_pred) r.tau_pred = net_sphere_cap(R, theta, delta, D).tau;
        if (want_mc) {
            if (std::abs(theta - kPi) > 1e-12)
                throw std::invalid_argument(
                    "sphere_cap: the simulator starts at the far pole, so theta must be pi");
            const auto prof = RevolutionProfile::sphere(R, delta);
            const auto field = drift_field(prof, D, int(cfg.param("n_samples", 4096)));
            fill_mc(r, simulate_surface_1d(field, 0.0, cfg.sim), cfg.sim.n_paths);
        }
        rows.push_back(r);
    } else if (cfg.case_id == "surface_cyl") {
        if (want_mc) throw std::invalid_argument("case 'surface_cyl' has no simulator");
        const auto p = net_surface_with_cylinder(cfg.require("S"), cfg.require("a"),
                                                 cfg.require("ell"), cfg.param("nu", 1.0),
                                                 cfg.require("cyl_len"), D);
        CaseRow r = base_row(cfg, to_string(p.id), cfg.require("a"));
        r.tau_pred = p.tau;
        rows.push_back(r);
    } else if (cfg.case_id == "cone") {
        if (want_mc) throw std::invalid_argument("case 'cone' has no simulator");
        const auto p = net_cone(cfg.require("S"), cfg.require("a"), cfg.require("C"),
                                cfg.require("cone_len"), D, cfg.param("head_integral", 0.0));
        CaseRow r = base_row(cfg, to_string(p.id), cfg.require("a"));
        r.tau_pred = p.tau;
        rows.push_back(r);
    } else if (cfg.case_id == "composite") {
        if (want_mc) throw std::invalid_argument("case 'composite' has no simulator");
        CompositeSpec spec;
        spec.head_volume = cfg.require("head_volume");
        spec.neck_radius = cfg.require("neck_radius");
        spec.neck_len = cfg.require("neck_len");
        spec.dim = int(cfg.param("dim", 3));
        const auto p = net_composite(cfg.require("head_tau"), spec, D);
        CaseRow r = base_row(cfg, to_string(p.id), spec.neck_radius);
        r.tau_pred = p.tau;
        rows.push_back(r);
    } else if (cfg.case_id == "dumbbell") {
        DumbbellSpec spec;
        spec.omega1_vol = cfg.require("omega1");
        spec.omega3_vol = cfg.require("omega3");
        spec.Rc1 = cfg.require("Rc1");
        spec.Rc3 = cfg.require("Rc3");
        spec.a = cfg.require("a");
        spec.L = cfg.require("L");
        spec.D = D;
        const auto rates = dumbbell_rates(spec);
        CaseRow r = base_row(cfg, to_string(FormulaId::DUMBBELL_RATES), spec.a);
        if (want_pred) r.tau_pred = rates.eigenvalue;
        if (want_mc) {
            const double horizon =
                cfg.param("horizon", 2000.0 * (1 / rates.lambda_12 + 1 / rates.lambda_21));
            const auto sim = simulate_telegraph(rates.lambda_12, rates.lambda_21, horizon,
                                                cfg.sim.seed);
            r.tau_mc = sim.relaxation_rate;
            r.n_paths = sim.n_switches;
            r.dt = 0;  // jump process, no time discretization
        }
        rows.push_back(r);
    } else if (cfg.case_id == "needle") {
        NeedleStripSpec spec;
        spec.l0 = cfg.require("l0");
        spec.l = cfg.require("l");
        spec.DX = cfg.require("DX");
        spec.DY = cfg.require("DY");
        spec.Dr = cfg.require("Dr");
        CaseRow r = base_row(cfg, to_string(FormulaId::NEEDLE_TURNAROUND), spec.eps());
        const auto p = needle_turnaround(spec);
        // both sides count the full turnaround: the simulation mean doubles
        // the passage to the aligned state, the formula is the leading-order
        // turnaround estimate. an exact reference solve puts the formula at
        // ~1.3-1.4x the true turnaround for eps in [6e-4, 4e-2], so expect
        // ratio-level agreement only (pass ratio_tol=0.5 when gating).
        if (want_pred) r.tau_pred = p.tau;
        if (want_mc) {
            const auto est = simulate_needle(spec, cfg.param("theta0", 0.0),
                                             cfg.param("y0", 0.0), cfg.sim);
            fill_mc(r, est, cfg.sim.n_paths);
        }
        rows.push_back(r);
    } else if (cfg.case_id == "telegraph") {
        const double rab = cfg.require("rate_ab"), rba = cfg.require("rate_ba");
        CaseRow r = base_row(cfg, "TELEGRAPH_EIGEN", 0.0);
        if (want_pred) r.tau_pred = telegraph_eigen(rab, rba).eigenvalue;
        if (want_mc) {
            const double horizon = cfg.param("horizon", 2000.0 * (1 / rab + 1 / rba));
            const auto sim = simulate_telegraph(rab, rba, horizon, cfg.sim.seed);
            r.tau_mc = sim.relaxation_rate;
            r.n_paths = sim.n_switches;
            r.dt = 0;
        }
        rows.push_back(r);
    } else {
        throw std::invalid_argument("unknown case '" + cfg.case_id + "'");
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& r : rows) {
        r.wall_time_s = wall / double(rows.size());
        out.push_back(std::move(r));
    }
}

std::vector<CaseRow> run_all(const ExperimentConfig& cfg, bool want_pred, bool want_mc) {
    cfg.validate();
    std::vector<CaseRow> rows;
    if (cfg.sweep_param.empty() || cfg.sweep_values.empty()) {
        run_case(cfg, want_pred, want_mc, rows);
        return rows;
    }
    for (double v : cfg.sweep_values) {
        ExperimentConfig point = cfg;
        point.params[point.sweep_param] = v;
        point.sweep_param.clear();
        point.sweep_values.clear();
        run_case(point, want_pred, want_mc, rows);
    }
    return rows;
}

} // namespace

std::vector<CaseRow> predict(const ExperimentConfig& cfg) { return run_all(cfg, true, false); }

std::vector<CaseRow> simulate(const ExperimentConfig& cfg) { return run_all(cfg, false, true); }

CompareReport compare(const ExperimentConfig& cfg) {
    CompareReport rep;
    rep.rows = run_all(cfg, true, true);
    const double z_bound = cfg.param("z_bound", 3.0);
    const double ratio_tol = cfg.param("ratio_tol", 0.25);
    rep.ok = true;
    for (const auto& r : rep.rows) {
        double z = std::numeric_limits<double>::infinity();
        if (std::isfinite(r.std_error) && r.std_error > 0)
            z = (r.tau_mc - r.tau_pred) / r.std_error;
        double ratio_err = std::numeric_limits<double>::infinity();
        if (r.tau_pred != 0)
            ratio_err = std::abs(r.tau_mc / r.tau_pred - 1);
        else if (r.tau_mc == 0)
            ratio_err = 0;
        const bool row_ok = std::abs(z) <= z_bound || ratio_err <= ratio_tol;
        if (!row_ok) rep.ok = false;
        if (std::isfinite(z)) rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
        if (std::isfinite(ratio_err)) rep.max_ratio_err = std::max(rep.max_ratio_err, ratio_err);
    }
    return rep;
}

CompareReport sweep(const ExperimentConfig& cfg) {
    if (cfg.sweep_param.empty() || cfg.sweep_values.empty())
        throw std::invalid_argument("sweep: config has no sweep parameter/values");
    return compare(cfg);
}

} // namespace netkit
