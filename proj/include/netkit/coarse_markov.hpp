#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace netkit {

// Generator of a continuous-time Markov chain: off-diagonal entries are jump
// rates, each diagonal entry is minus its row sum.
struct RateMatrix {
    int n = 0;
    std::vector<double> q;  // row-major n*n

    double& at(int i, int j) { return q[size_t(i) * n + j]; }
    double at(int i, int j) const { return q[size_t(i) * n + j]; }

    static RateMatrix zero(int n);
    static RateMatrix two_state(double rate_ab, double rate_ba);
    // Nearest-neighbour chain on n = up.size()+1 states: up[i] is the rate
    // i -> i+1, down[i] the rate i+1 -> i.
    static RateMatrix chain(const std::vector<double>& up, const std::vector<double>& down);

    // Throws std::invalid_argument unless off-diagonals are non-negative and
    // every row sums to zero within 1e-14 (relative to the largest rate).
    void validate() const;

    // Plain triplet text: first line "n", then one "i j rate" line per
    // non-zero entry. Round-trips exactly.
    std::string to_triplets() const;
    static RateMatrix from_triplets(const std::string& text);
};

struct TelegraphResult {
    double eigenvalue = 0;                   // relaxation rate of the two-state chain
    std::array<double, 2> stationary{0, 0};  // occupation probabilities (a, b)
};

// Two-state chain a <-> b: the nonzero spectral gap is the sum of the rates
// and the stationary vector is the opposing rates, normalised.
TelegraphResult telegraph_eigen(double rate_ab, double rate_ba);

struct SpectrumResult {
    std::vector<double> eigenvalues;  // sorted descending; leading entry is 0
    double relaxation_rate = 0;       // negated slowest nonzero eigenvalue
    std::vector<double> stationary;   // invariant distribution, sums to 1
    bool reversible = false;          // detailed balance held for the stationary vector
};

// Full spectrum of a generator. Reversible chains (detected via detailed
// balance) are diagonalised through the symmetrised form, so their spectrum
// is exactly real; other generators fall back to a general eigensolver and
// report the real parts.
SpectrumResult network_eigen(const RateMatrix& rates);

struct TelegraphSim {
    double relaxation_rate = 0;   // log-linear fit of the state autocovariance
    double occupation_a = 0;      // fraction of time spent in state a
    double occupation_stderr = 0; // batch-means error on occupation_a
    uint64_t n_switches = 0;
};

// Exponential waiting-time jump simulation of the two-state chain over the
// given horizon. Throws std::runtime_error when fewer than 100 switching
// events occur (horizon too short to resolve the decay).
TelegraphSim simulate_telegraph(double rate_ab, double rate_ba, double horizon, uint64_t seed);

} // namespace netkit
