#include "netkit/coarse_markov.hpp"
#include "netkit/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace netkit {

RateMatrix RateMatrix::zero(int n) {
    if (n < 1) throw std::invalid_argument("RateMatrix: n must be >= 1");
    RateMatrix m;
    m.n = n;
    m.q.assign(size_t(n) * n, 0.0);
    return m;
}

RateMatrix RateMatrix::two_state(double rate_ab, double rate_ba) {
    RateMatrix m = zero(2);
    m.at(0, 1) = rate_ab;
    m.at(0, 0) = -rate_ab;
    m.at(1, 0) = rate_ba;
    m.at(1, 1) = -rate_ba;
    return m;
}

RateMatrix RateMatrix::chain(const std::vector<double>& up, const std::vector<double>& down) {
    if (up.empty() || up.size() != down.size())
        throw std::invalid_argument("RateMatrix::chain: up/down rate lists must match and be non-empty");
    const int n = int(up.size()) + 1;
    RateMatrix m = zero(n);
    for (int i = 0; i + 1 < n; ++i) {
        m.at(i, i + 1) = up[size_t(i)];
        m.at(i, i) -= up[size_t(i)];
        m.at(i + 1, i) = down[size_t(i)];
        m.at(i + 1, i + 1) -= down[size_t(i)];
    }
    return m;
}

void RateMatrix::validate() const {
    if (n < 1 || q.size() != size_t(n) * n)
        throw std::invalid_argument("RateMatrix: inconsistent dimensions");
    double scale = 0;
    for (double v : q) scale = std::max(scale, std::abs(v));
    const double tol = 1e-14 * std::max(1.0, scale);
    for (int i = 0; i < n; ++i) {
        double row = 0;
        for (int j = 0; j < n; ++j) {
            const double v = at(i, j);
            if (i != j && v < 0)
                throw std::invalid_argument("RateMatrix: negative off-diagonal rate");
            if (!std::isfinite(v))
                throw std::invalid_argument("RateMatrix: non-finite entry");
            row += v;
        }
        if (std::abs(row) > tol)
            throw std::invalid_argument("RateMatrix: row sums must vanish");
    }
}

std::string RateMatrix::to_triplets() const {
    std::string out = std::to_string(n) + "\n";
    char buf[64];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (at(i, j) != 0.0) {
                std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, j, at(i, j));
                out += buf;
            }
    return out;
}

RateMatrix RateMatrix::from_triplets(const std::string& text) {
    std::istringstream in(text);
    int n = 0;
    if (!(in >> n) || n < 1)
        throw std::invalid_argument("RateMatrix::from_triplets: bad dimension line");
    RateMatrix m = zero(n);
    int i, j;
    double v;
    while (in >> i >> j >> v) {
        if (i < 0 || i >= n || j < 0 || j >= n)
            throw std::invalid_argument("RateMatrix::from_triplets: index out of range");
        m.at(i, j) = v;
    }
    return m;
}

TelegraphResult telegraph_eigen(double rate_ab, double rate_ba) {
    if (!(rate_ab > 0) || !(rate_ba > 0))
        throw std::invalid_argument("telegraph_eigen: rates must be positive");
    TelegraphResult r;
    r.eigenvalue = rate_ab + rate_ba;
    r.stationary = {rate_ba / r.eigenvalue, rate_ab / r.eigenvalue};
    return r;
}

SpectrumResult network_eigen(const RateMatrix& rates) {
    rates.validate();
    const int n = rates.n;
    Eigen::MatrixXd Q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q(i, j) = rates.at(i, j);

    SpectrumResult res;

    // stationary vector: kernel of Q^T, normalised
    Eigen::MatrixXd Qt = Q.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Qt);
    lu.setThreshold(1e-12);
    Eigen::MatrixXd ker = lu.kernel();
    if (ker.cols() < 1)
        throw std::invalid_argument("network_eigen: generator has no stationary vector");
    Eigen::VectorXd pi = ker.col(0);
    if (pi.sum() < 0) pi = -pi;
    const double psum = pi.sum();
    if (!(psum > 0))
        throw std::invalid_argument("network_eigen: degenerate stationary vector");
    pi /= psum;

    double scale = Q.cwiseAbs().maxCoeff();
    if (scale <= 0) scale = 1;

    bool positive = true;
    for (int i = 0; i < n; ++i)
        if (pi(i) < -1e-12) positive = false;

    bool reversible = positive;
    for (int i = 0; reversible && i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(pi(i) * Q(i, j) - pi(j) * Q(j, i)) > 1e-10 * scale) {
                reversible = false;
                break;
            }

    std::vector<double> ev;
    if (reversible) {
        // similarity transform by diag(sqrt(pi)) makes the generator symmetric
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) s(i) = std::sqrt(std::max(pi(i), 0.0));
        Eigen::MatrixXd S(n, n);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            for (int j = 0; j < n; ++j) {
                if (s(j) <= 0 && Q(i, j) != 0) { ok = false; break; }
                S(i, j) = s(j) > 0 ? s(i) * Q(i, j) / s(j) : 0.0;
            }
        if (ok) {
            S = 0.5 * (S + S.transpose().eval());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
            for (int i = 0; i < n; ++i) ev.push_back(es.eigenvalues()(i));
        } else {
            reversible = false;
        }
    }
    if (!reversible) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(Q);
        for (int i = 0; i < n; ++i) ev.push_back(es.eigenvalues()(i).real());
    }

    std::sort(ev.begin(), ev.end(), std::greater<double>());
    // pin the conservation eigenvalue exactly
    if (!ev.empty() && std::abs(ev.front()) < 1e-9 * scale) ev.front() = 0.0;
    res.eigenvalues = ev;
    res.relaxation_rate = ev.size() > 1 ? -ev[1] : 0.0;
    res.stationary.assign(pi.data(), pi.data() + n);
    res.reversible = reversible;
    return res;
}

TelegraphSim simulate_telegraph(double rate_ab, double rate_ba, double horizon, uint64_t seed) {
    if (!(rate_ab > 0) || !(rate_ba > 0))
        throw std::invalid_argument("simulate_telegraph: rates must be positive");
    if (!(horizon > 0))
        throw std::invalid_argument("simulate_telegraph: horizon must be positive");

    Xoshiro256pp rng(seed, 0);
    const double lam = rate_ab + rate_ba;

    // jump process: record switch times, track time spent in state a
    std::vector<double> switch_times;
    switch_times.reserve(size_t(std::min(horizon * lam * 1.2 + 64, 5e8)));
    int state = 0;  // 0 = a, 1 = b
    double t = 0, time_a = 0;
    while (t < horizon) {
        const double rate = state == 0 ? rate_ab : rate_ba;
        const double wait = rng.exponential() / rate;
        const double seg = std::min(wait, horizon - t);
        if (state == 0) time_a += seg;
        t += wait;
        if (t < horizon) switch_times.push_back(t);
        state = 1 - state;
    }
    if (switch_times.size() < 100)
        throw std::runtime_error(
            "simulate_telegraph: fewer than 100 switching events; extend the horizon");

    TelegraphSim out;
    out.n_switches = switch_times.size();
    out.occupation_a = time_a / horizon;

    // batch means for the occupation error bar
    {
        const int nb = 32;
        const double bl = horizon / nb;
        std::vector<double> batch(nb, 0.0);
        int st = 0;
        double prev = 0;
        size_t k = 0;
        auto credit = [&](double a, double b) {  // add a..b in state st
            if (st != 0) return;
            int i0 = std::min(int(a / bl), nb - 1), i1 = std::min(int(b / bl), nb - 1);
            for (int i = i0; i <= i1; ++i) {
                const double lo = std::max(a, i * bl), hi = std::min(b, (i + 1) * bl);
                if (hi > lo) batch[size_t(i)] += hi - lo;
            }
        };
        while (k < switch_times.size()) {
            credit(prev, switch_times[k]);
            prev = switch_times[k];
            st = 1 - st;
            ++k;
        }
        credit(prev, horizon);
        double m = 0;
        for (double& b : batch) {
            b /= bl;
            m += b;
        }
        m /= nb;
        double ss = 0;
        for (double b : batch) ss += (b - m) * (b - m);
        out.occupation_stderr = std::sqrt(ss / (nb - 1) / nb);
    }

    // autocovariance of the state-a indicator on a uniform grid
    const double dt = 0.1 / lam;
    const size_t N = size_t(horizon / dt);
    if (N < 64)
        throw std::runtime_error("simulate_telegraph: horizon too short for the covariance grid");
    std::vector<uint8_t> X(N);
    {
        int st = 0;
        size_t k = 0;
        for (size_t i = 0; i < N; ++i) {
            const double ti = double(i) * dt;
            while (k < switch_times.size() && switch_times[k] <= ti) {
                st = 1 - st;
                ++k;
            }
            X[i] = st == 0 ? 1 : 0;
        }
    }
    double mean = 0;
    for (uint8_t x : X) mean += x;
    mean /= double(N);
    const size_t Lmax = std::min<size_t>(N / 4, size_t(40));
    std::vector<double> C(Lmax + 1, 0.0);
    for (size_t l = 0; l <= Lmax; ++l) {
        double c = 0;
        for (size_t i = 0; i + l < N; ++i)
            c += (double(X[i]) - mean) * (double(X[i + l]) - mean);
        C[l] = c / double(N - l);
    }
    if (!(C[0] > 0))
        throw std::runtime_error("simulate_telegraph: degenerate trajectory, no variance");

    // log-linear fit over lags where the signal is still well above noise
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t l = 1; l <= Lmax; ++l) {
        if (C[l] <= 0.2 * C[0]) break;
        const double x = double(l) * dt, y = std::log(C[l] / C[0]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3)
        throw std::runtime_error("simulate_telegraph: too few usable lags for the decay fit");
    const double slope = (double(m) * sxy - sx * sy) / (double(m) * sxx - sx * sx);
    out.relaxation_rate = -slope;
    return out;
}

} // namespace netkit
