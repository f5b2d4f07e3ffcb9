#include "weightlab/corpus.hpp"

#include <cmath>
#include <vector>

namespace weightlab {

ArrayXd power_weight(const DyadicGrid& g, double alpha) {
    const double d = static_cast<double>(g.dim());
    if (!(alpha > -d))
        throw PreconditionError("power weight requires alpha > -dim for integrability, got " +
                                std::to_string(alpha));
    const Index n = g.cellCount();
    if (alpha == 0.0) return ArrayXd::Ones(n);

    ArrayXd w(n);
    if (g.dim() == 1) {
        const double h = std::ldexp(1.0, -g.depth());
        for (Index j = 0; j < n; ++j) {
            const double a = static_cast<double>(j) * h;
            const double b = a + h;
            // exact cell average of x^alpha
            w[j] = (std::pow(b, 1.0 + alpha) - std::pow(a, 1.0 + alpha)) / ((1.0 + alpha) * h);
        }
    } else {
        for (Index j = 0; j < n; ++j) {
            const auto x = g.cellCenter(j);
            double norm2 = 0.0;
            for (double xi : x) norm2 += xi * xi;
            w[j] = std::pow(norm2, 0.5 * alpha);
        }
    }
    return w;
}

ArrayXd cascade_weight(const DyadicGrid& g, double bound, std::uint64_t seed) {
    if (!(bound >= 1.0))
        throw PreconditionError("cascade bound must be at least 1");
    if (bound == 1.0) return ArrayXd::Ones(g.cellCount());

    Lcg64 rng(seed);
    const int kids = g.childCount();
    ArrayXd level = ArrayXd::Ones(1);
    std::vector<double> u(static_cast<size_t>(kids));
    for (int depth = 0; depth < g.depth(); ++depth) {
        ArrayXd next(level.size() * kids);
        for (Index i = 0; i < level.size(); ++i) {
            double sum = 0.0;
            for (int c = 0; c < kids; ++c) {
                u[c] = rng.uniform(1.0 / bound, bound);
                sum += u[c];
            }
            const double mean = sum / kids;
            for (int c = 0; c < kids; ++c) next[i * kids + c] = level[i] * (u[c] / mean);
        }
        level = std::move(next);
    }
    return level;
}

ArrayXd cascade_values(int depth, double bound, std::uint64_t seed) {
    return cascade_weight(DyadicGrid::lebesgue(1, depth), bound, seed);
}

ArrayXd spike_weight(Index n, Index position, double height, double base) {
    if (position < 0 || position >= n)
        throw PreconditionError("spike position out of range");
    if (!(height > 0.0) || !(base > 0.0))
        throw PreconditionError("spike weight values must be positive");
    ArrayXd w = ArrayXd::Constant(n, base);
    w[position] = height;
    return w;
}

namespace {

QuasiMetricSpace collinear_space(Index n, double exponent, double spacing, ArrayXd masses) {
    if (n < 1)
        throw StructuralError("space needs at least one point");
    if (masses.size() == 0) masses = ArrayXd::Ones(n);
    MatrixXd dist(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const double gap = std::abs(static_cast<double>(i - j)) * spacing;
            dist(i, j) = (i == j) ? 0.0 : std::pow(gap, exponent);
        }
    return QuasiMetricSpace::fromDistanceMatrix(std::move(dist), std::move(masses));
}

}  // namespace

QuasiMetricSpace line_space(Index n, ArrayXd masses) {
    return collinear_space(n, 1.0, 1.0, std::move(masses));
}

QuasiMetricSpace snowflake_space(Index n, double exponent, ArrayXd masses) {
    if (!(exponent > 0.0))
        throw PreconditionError("snowflake exponent must be positive");
    const double spacing = n > 1 ? 1.0 / static_cast<double>(n - 1) : 1.0;
    return collinear_space(n, exponent, spacing, std::move(masses));
}

}  // namespace weightlab
