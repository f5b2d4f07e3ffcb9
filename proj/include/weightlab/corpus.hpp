#pragma once

#include "weightlab/grid.hpp"
#include "weightlab/space.hpp"

#include <cstdint>

namespace weightlab {

/// Fixed-algorithm 64-bit linear congruential generator so corpora reproduce
/// bit-for-bit across platforms and languages:
///   state <- state * 6364136223846793005 + 1442695040888963407  (mod 2^64),
/// uniforms from the top 53 bits of the new state. Never use a platform PRNG
/// for corpus generation.
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Cell averages of |x|^alpha on the grid: exact integrals for d = 1, midpoint
/// rule for d >= 2. Requires alpha > -d; alpha = 0 gives the constant one.
/// The constant grows without bound as alpha decreases toward -d.
ArrayXd power_weight(const DyadicGrid& g, double alpha);

/// Multiplicative cascade: each cube splits its value among its children by
/// uniform factors from [1/bound, bound], renormalized to preserve the parent
/// average. bound = 1 gives the constant one. Deterministic under seed.
ArrayXd cascade_weight(const DyadicGrid& g, double bound, std::uint64_t seed);

/// Cascade values on 2^depth points (a line of dyadic cells).
ArrayXd cascade_values(int depth, double bound, std::uint64_t seed);

/// Constant `base` with a single spike of value `height` at `position`.
ArrayXd spike_weight(Index n, Index position, double height, double base = 1.0);

/// Collinear points 0, 1, ..., n-1 with the given masses (default unit).
QuasiMetricSpace line_space(Index n, ArrayXd masses = ArrayXd());

/// n equally spaced points on [0,1] with d(x,y) = |x-y|^exponent. For
/// exponent > 1 the derived quasitriangle constant is 2^(exponent-1); the
/// constructor derives it instead of trusting the formula.
QuasiMetricSpace snowflake_space(Index n, double exponent, ArrayXd masses = ArrayXd());

}  // namespace weightlab
