#include "weightlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace weightlab {

double smallest_kappa(const MatrixXd& dist) {
    const Index n = dist.rows();
    if (n != dist.cols())
        throw StructuralError("distance matrix must be square");
    for (Index i = 0; i < n; ++i) {
        if (dist(i, i) != 0.0)
            throw StructuralError("distance matrix diagonal must be zero at index " + std::to_string(i));
        for (Index j = 0; j < n; ++j) {
            const double d = dist(i, j);
            if (!(d >= 0.0) || !std::isfinite(d))
                throw StructuralError("distances must be finite and nonnegative");
            if (dist(j, i) != d)
                throw StructuralError("distance matrix must be symmetric");
            if (i != j && d == 0.0)
                throw StructuralError("distinct points at distance zero: (" + std::to_string(i) +
                                      ", " + std::to_string(j) + ")");
        }
    }
    double kappa = 1.0;
    for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < n; ++y) {
            if (x == y) continue;
            const double dxy = dist(x, y);
            for (Index z = 0; z < n; ++z) {
                const double denom = dist(x, z) + dist(z, y);
                // denom > 0 whenever x != y
                kappa = std::max(kappa, dxy / denom);
            }
        }
    return kappa;
}

QuasiMetricSpace QuasiMetricSpace::fromDistanceMatrix(MatrixXd dist, ArrayXd measure,
                                                      std::optional<double> kappa) {
    if (dist.rows() != measure.size())
        throw StructuralError("distance matrix and measure vector sizes disagree");
    if (measure.size() == 0)
        throw StructuralError("space must contain at least one point");
    for (Index i = 0; i < measure.size(); ++i)
        if (!(measure[i] > 0.0) || !std::isfinite(measure[i]))
            throw StructuralError("point measure must be strictly positive and finite at index " +
                                  std::to_string(i));

    const double derived = smallest_kappa(dist);

    QuasiMetricSpace s;
    s.dist_ = std::move(dist);
    s.measure_ = std::move(measure);
    s.totalMeasure_ = s.measure_.sum();
    if (kappa) {
        if (*kappa < derived)
            throw StructuralError("declared kappa " + std::to_string(*kappa) +
                                  " is below the derived value " + std::to_string(derived));
        s.kappa_ = *kappa;
    } else {
        s.kappa_ = derived;
    }
    s.buildTables();
    s.deriveDoubling();
    return s;
}

void QuasiMetricSpace::buildTables() {
    const Index n = size();
    tab_.resize(static_cast<size_t>(n));
    for (Index c = 0; c < n; ++c) {
        CenterTable& t = tab_[c];
        t.order.resize(n);
        std::iota(t.order.begin(), t.order.end(), Index{0});
        std::sort(t.order.begin(), t.order.end(), [&](Index a, Index b) {
            const double da = dist_(c, a), db = dist_(c, b);
            return da < db || (da == db && a < b);
        });
        t.sdist.resize(n);
        t.muPrefix.assign(static_cast<size_t>(n) + 1, 0.0);
        for (Index k = 0; k < n; ++k) {
            t.sdist[k] = dist_(c, t.order[k]);
            t.muPrefix[k + 1] = t.muPrefix[k] + measure_[t.order[k]];
        }
        // distinct-distance groups; group g ends where the distance strictly increases
        for (Index k = 0; k < n; ++k) {
            if (k + 1 == n || t.sdist[k + 1] > t.sdist[k]) {
                t.groupEnd.push_back(k + 1);
                t.groupDist.push_back(t.sdist[k]);
            }
        }
        t.groupOfRank.resize(n);
        {
            int g = 0;
            for (Index k = 0; k < n; ++k) {
                if (k >= t.groupEnd[g]) ++g;
                t.groupOfRank[k] = g;
            }
        }
        const int G = static_cast<int>(t.groupEnd.size());
        t.radius.resize(G);
        for (int g = 0; g < G; ++g) {
            t.radius[g] = (g + 1 < G) ? 0.5 * (t.groupDist[g] + t.groupDist[g + 1])
                                      : t.groupDist[g] + 1.0;
        }
        t.groupOfPoint.resize(n);
        for (Index k = 0; k < n; ++k)
            t.groupOfPoint[t.order[k]] = t.groupOfRank[k];
    }
}

void QuasiMetricSpace::deriveDoubling() {
    const auto [cmu, dmu] = doubling_constants(*this);
    cmu_ = cmu;
    dmu_ = dmu;
}

std::vector<double> QuasiMetricSpace::canonicalRadii(Index center) const {
    const CenterTable& t = tab_[center];
    return t.radius;
}

std::vector<double> QuasiMetricSpace::canonicalRadii() const {
    std::set<double> all;
    for (Index c = 0; c < size(); ++c)
        for (double r : tab_[c].radius) all.insert(r);
    return std::vector<double>(all.begin(), all.end());
}

std::vector<Ball> QuasiMetricSpace::canonicalBalls() const {
    std::vector<Ball> balls;
    for (Index c = 0; c < size(); ++c)
        for (int g = 0; g < groupCount(c); ++g)
            balls.push_back(Ball{c, canonicalRadius(c, g)});
    return balls;
}

Index QuasiMetricSpace::memberCount(const Ball& b) const {
    if (b.center < 0 || b.center >= size())
        throw StructuralError("ball center out of range");
    const auto& sd = tab_[b.center].sdist;
    return std::lower_bound(sd.begin(), sd.end(), b.radius) - sd.begin();
}

double QuasiMetricSpace::ballMeasure(const Ball& b) const {
    return tab_[b.center].muPrefix[memberCount(b)];
}

std::pair<double, double> doubling_constants(const QuasiMetricSpace& s) {
    const Index n = s.size();
    double cmu = 1.0;
    std::vector<double> breaks;
    for (Index c = 0; c < n; ++c) {
        const auto& sd = s.sortedDistances(c);
        const auto& mu = s.muPrefix(c);
        breaks.clear();
        for (double d : sd) {
            if (d > 0.0) {
                breaks.push_back(d);
                breaks.push_back(0.5 * d);
            }
        }
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        // one representative radius inside each interval between breakpoints
        auto ratioAt = [&](double r) {
            const Index inner = std::lower_bound(sd.begin(), sd.end(), r) - sd.begin();
            const Index outer = std::lower_bound(sd.begin(), sd.end(), 2.0 * r) - sd.begin();
            return mu[outer] / mu[inner];
        };
        double prev = 0.0;
        for (double b : breaks) {
            cmu = std::max(cmu, ratioAt(0.5 * (prev + b)));
            cmu = std::max(cmu, ratioAt(b));  // right endpoints realize their own member pair
            prev = b;
        }
        cmu = std::max(cmu, ratioAt(prev + 1.0));
    }
    return {cmu, std::log2(cmu)};
}

double ball_average(const ArrayXd& f, const Ball& b, const QuasiMetricSpace& s) {
    if (f.size() != s.size())
        throw StructuralError("function size does not match the space");
    if (!(b.radius > 0.0))
        throw PreconditionError("ball_average: radius must be positive");
    const Index m = s.memberCount(b);
    if (m == 0)
        throw PreconditionError("ball_average: empty ball");
    const auto& order = s.neighborOrder(b.center);
    double num = 0.0, den = 0.0;
    for (Index k = 0; k < m; ++k) {
        const Index y = order[k];
        num += f[y] * s.pointMeasure(y);
        den += s.pointMeasure(y);
    }
    return num / den;
}

LocalBasis make_local_basis(const QuasiMetricSpace& s, const Ball& base, double delta) {
    if (!(delta > 0.0))
        throw PreconditionError("local basis requires delta > 0");
    if (base.center < 0 || base.center >= s.size())
        throw StructuralError("base ball center out of range");
    if (!(base.radius > 0.0))
        throw PreconditionError("base ball radius must be positive");
    LocalBasis basis;
    basis.base = base;
    basis.delta = delta;
    basis.hat = Ball{base.center, (1.0 + delta) * s.kappa() * base.radius};
    return basis;
}

int basis_group_count(const QuasiMetricSpace& s, const LocalBasis& basis, Index center) {
    if (!(s.dist(basis.base.center, center) < basis.base.radius))
        return 0;  // center not in B0
    const double cap = basis.delta * basis.base.radius;
    int count = 0;
    const int G = s.groupCount(center);
    while (count < G && s.groupDistance(center, count) < cap) ++count;
    return count;
}

double basis_ball_radius(const QuasiMetricSpace& s, const LocalBasis& basis, Index center, int g) {
    return std::min(s.canonicalRadius(center, g), basis.delta * basis.base.radius);
}

std::vector<Ball> basis_balls(const QuasiMetricSpace& s, const LocalBasis& basis) {
    std::vector<Ball> balls;
    for (Index c = 0; c < s.size(); ++c) {
        const int count = basis_group_count(s, basis, c);
        for (int g = 0; g < count; ++g)
            balls.push_back(Ball{c, basis_ball_radius(s, basis, c, g)});
    }
    return balls;
}

}  // namespace weightlab
