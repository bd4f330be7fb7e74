#pragma once

#include <cmath>
#include <cstdint>

#include "straddle/types.hpp"

namespace straddle {

// Deterministic RNG with a fixed Gaussian recipe.  std::normal_distribution is
// implementation-defined, so seeded outputs would not be portable across
// standard libraries; this keeps generated states bit-stable.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
        next();  // discard first to decorrelate small seeds
    }

    uint64_t next() {
        // splitmix64
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller, one value per call (cache holds the second)
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(6.283185307179586476925286766559 * u2);
        have_cached_ = true;
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    cx complex_gaussian() {
        double re = gaussian();
        double im = gaussian();
        return {re, im};
    }

    uint64_t below(uint64_t n) { return next() % n; }

  private:
    uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Haar-ish random unitary via QR of a Gaussian matrix with phase fixing.
Matrix random_unitary(int dim, Rng& rng);

// Random normalized state vector.
Vector random_state_vector(int dim, Rng& rng);

}  // namespace straddle
