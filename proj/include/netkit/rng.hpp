#pragma once
#include <cstdint>
#include <cmath>

// Self-contained RNG so that per-path streams are bit-reproducible across
// platforms and standard-library versions (std::normal_distribution is not).
// Generator: xoshiro256++ (Blackman & Vigna), passes BigCrush; streams are
// derived per path by running splitmix64 on (master_seed, path_index).

namespace netkit {

inline uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Xoshiro256pp {
  public:
    Xoshiro256pp() : Xoshiro256pp(0x853c49e6748fea9bULL, 0) {}
    // independent stream for one path: state seeded from (master, stream)
    Xoshiro256pp(uint64_t master, uint64_t stream) {
        uint64_t s = master ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
        for (int i = 0; i < 4; ++i) state_[i] = splitmix64(s);
        // avoid the all-zero state (cannot happen with splitmix64, but cheap to assert)
        if (!(state_[0] | state_[1] | state_[2] | state_[3])) state_[0] = 1;
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in (0,1); 53-bit mantissa, never exactly 0
    double uniform() { return ((next() >> 11) + 0.5) * (1.0 / 9007199254740992.0); }

    // standard normal, Marsaglia polar method; second value cached
    double gaussian() {
        if (have_spare_) { have_spare_ = false; return spare_; }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    // exponential with unit rate
    double exponential() { return -std::log(uniform()); }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace netkit
