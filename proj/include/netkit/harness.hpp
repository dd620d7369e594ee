#pragma once
// Batch experiment runner: a line-oriented config format, a registry of named
// cases that pair a closed-form prediction with a simulator, and fixed-schema
// CSV emission so runs are diffable across machines and seeds.

#include "netkit/asymptotics.hpp"
#include "netkit/mc_engine.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace netkit {

struct ExperimentConfig {
    int format_version = 1;
    std::string case_id;
    std::map<std::string, double> params;  // geometry and physics inputs
    SimParams sim;
    std::string sweep_param;  // empty when there is no sweep
    std::vector<double> sweep_values;
    std::string output_path;  // empty = standard output

    double param(const std::string& key, double fallback) const;
    double require(const std::string& key) const;
    bool has(const std::string& key) const { return params.count(key) != 0; }

    // "key = value" lines; parse(serialize()) is the identity
    std::string serialize() const;
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    void set_kv(const std::string& key, const std::string& value);
    void validate() const;
};

struct CaseRow {
    std::string case_id;
    std::string formula_id;
    std::string param_json;
    double epsilon_like = 0;
    double tau_pred = std::numeric_limits<double>::quiet_NaN();
    double tau_mc = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    uint64_t n_paths = 0;
    uint64_t n_censored = 0;
    double dt = 0;
    uint64_t seed = 0;
    double wall_time_s = 0;
};

// schema is frozen: case, formula_id, param_json, epsilon_like, tau_pred,
// tau_mc, stderr, n_paths, n_censored, dt, seed, wall_time_s
std::string csv_header();
std::string to_csv(const CaseRow& row);

std::vector<std::string> known_cases();

std::vector<CaseRow> predict(const ExperimentConfig& cfg);
std::vector<CaseRow> simulate(const ExperimentConfig& cfg);

struct CompareReport {
    std::vector<CaseRow> rows;
    bool ok = false;  // every row within the z bound or the ratio tolerance
    double max_abs_z = 0;
    double max_ratio_err = 0;
};

// Joint rows with both tau columns filled. A row passes when |z| <= z_bound
// (param "z_bound", default 3) or |tau_mc/tau_pred - 1| <= ratio_tol (param
// "ratio_tol", default 0.25); rows without a finite stderr use the ratio rule.
CompareReport compare(const ExperimentConfig& cfg);

// compare() over the sweep grid; an empty sweep list is an error here
CompareReport sweep(const ExperimentConfig& cfg);

} // namespace netkit
