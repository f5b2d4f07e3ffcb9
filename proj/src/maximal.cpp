#include "weightlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace weightlab {

namespace {

void require_nonnegative(const ArrayXd& f, Index expected, const char* where) {
    if (f.size() != expected)
        throw StructuralError(std::string(where) + ": function size does not match the domain");
    for (Index i = 0; i < f.size(); ++i)
        if (!(f[i] >= 0.0) || !std::isfinite(f[i]))
            throw StructuralError(std::string(where) + ": function must be finite and nonnegative");
}

}  // namespace

ArrayXd hl_maximal(const ArrayXd& f, const QuasiMetricSpace& s) {
    require_nonnegative(f, s.size(), "hl_maximal");
    const Index n = s.size();
    ArrayXd out = ArrayXd::Zero(n);
    std::vector<double> avg;
    for (Index c = 0; c < n; ++c) {
        const auto& order = s.neighborOrder(c);
        const auto& mu = s.muPrefix(c);
        const int G = s.groupCount(c);
        avg.assign(G, 0.0);
        double acc = 0.0;
        Index k = 0;
        for (int g = 0; g < G; ++g) {
            const Index end = s.groupEnd(c, g);
            for (; k < end; ++k) acc += f[order[k]] * s.pointMeasure(order[k]);
            avg[g] = acc / mu[end];
        }
        for (int g = G - 2; g >= 0; --g) avg[g] = std::max(avg[g], avg[g + 1]);
        // avg[g] now holds the best average among balls with index >= g;
        // point at rank k belongs exactly to the balls from its own group on.
        for (Index r = 0; r < n; ++r) {
            const Index y = order[r];
            const double cand = avg[s.groupOfRank(c, r)];
            if (cand > out[y]) out[y] = cand;
        }
    }
    return out;
}

ArrayXd dyadic_maximal(const ArrayXd& f, const Cube& q0, const DyadicGrid& g) {
    require_nonnegative(f, g.cellCount(), "dyadic_maximal");
    g.validate(q0);
    const auto fmu = g.aggregate(f * g.cellMeasure());

    ArrayXd out = ArrayXd::Zero(g.cellCount());
    // walk the subtree of q0, carrying the running maximum of ancestor averages
    struct Item {
        Cube q;
        double best;
    };
    std::vector<Item> stack;
    stack.push_back({q0, fmu[q0.level][q0.index] / g.cubeMeasure(q0)});
    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        if (it.q.level == g.depth()) {
            out[it.q.index] = it.best;
            continue;
        }
        const Index base = g.childrenBegin(it.q);
        for (int c = 0; c < g.childCount(); ++c) {
            const Cube child{it.q.level + 1, base + c};
            const double a = fmu[child.level][child.index] / g.cubeMeasure(child);
            stack.push_back({child, std::max(it.best, a)});
        }
    }
    return out;
}

ArrayXd local_maximal(const ArrayXd& f, const LocalBasis& basis, const QuasiMetricSpace& s) {
    if (f.size() != s.size())
        throw StructuralError("local_maximal: function size does not match the space");
    const ArrayXd g = f.abs();
    const Index n = s.size();
    ArrayXd out = ArrayXd::Zero(n);
    std::vector<double> avg;
    for (Index c = 0; c < n; ++c) {
        const int count = basis_group_count(s, basis, c);
        if (count == 0) continue;
        const auto& order = s.neighborOrder(c);
        const auto& mu = s.muPrefix(c);
        avg.assign(count, 0.0);
        double acc = 0.0;
        Index k = 0;
        for (int gi = 0; gi < count; ++gi) {
            const Index end = s.groupEnd(c, gi);
            for (; k < end; ++k) acc += g[order[k]] * s.pointMeasure(order[k]);
            avg[gi] = acc / mu[end];
        }
        for (int gi = count - 2; gi >= 0; --gi) avg[gi] = std::max(avg[gi], avg[gi + 1]);
        const Index covered = s.groupEnd(c, count - 1);
        for (Index r = 0; r < covered; ++r) {
            const Index y = order[r];
            const double cand = avg[s.groupOfRank(c, r)];
            if (cand > out[y]) out[y] = cand;
        }
    }
    return out;
}

namespace {

ArrayXd all_cube_maximal_1d(const ArrayXd& f, const DyadicGrid& g) {
    const Index n = g.cellCount();
    std::vector<double> fmu(n + 1, 0.0), mu(n + 1, 0.0);
    for (Index i = 0; i < n; ++i) {
        fmu[i + 1] = fmu[i] + f[i] * g.cellMeasure()[i];
        mu[i + 1] = mu[i] + g.cellMeasure()[i];
    }
    ArrayXd out(n);
    for (Index x = 0; x < n; ++x) {
        double best = 0.0;
        for (Index a = 0; a <= x; ++a)
            for (Index b = x + 1; b <= n; ++b)
                best = std::max(best, (fmu[b] - fmu[a]) / (mu[b] - mu[a]));
        out[x] = best;
    }
    return out;
}

ArrayXd all_cube_maximal_2d(const ArrayXd& f, const DyadicGrid& g) {
    const Index side = Index{1} << g.depth();
    // 2-d prefix sums over row-major coordinates
    std::vector<double> fmu((side + 1) * (side + 1), 0.0), mu((side + 1) * (side + 1), 0.0);
    auto at = [side](std::vector<double>& a, Index i, Index j) -> double& {
        return a[i * (side + 1) + j];
    };
    std::vector<Index> cellOf(side * side);
    for (Index cell = 0; cell < g.cellCount(); ++cell) {
        const auto c = g.cellCoordinates(cell);
        cellOf[c[0] * side + c[1]] = cell;
    }
    for (Index i = 0; i < side; ++i)
        for (Index j = 0; j < side; ++j) {
            const Index cell = cellOf[i * side + j];
            const double m = g.cellMeasure()[cell];
            at(fmu, i + 1, j + 1) = f[cell] * m + at(fmu, i, j + 1) + at(fmu, i + 1, j) - at(fmu, i, j);
            at(mu, i + 1, j + 1) = m + at(mu, i, j + 1) + at(mu, i + 1, j) - at(mu, i, j);
        }
    auto boxSum = [&](std::vector<double>& a, Index i0, Index j0, Index s) {
        return at(a, i0 + s, j0 + s) - at(a, i0, j0 + s) - at(a, i0 + s, j0) + at(a, i0, j0);
    };
    ArrayXd out = ArrayXd::Zero(g.cellCount());
    for (Index s = 1; s <= side; ++s)
        for (Index i0 = 0; i0 + s <= side; ++i0)
            for (Index j0 = 0; j0 + s <= side; ++j0) {
                const double a = boxSum(fmu, i0, j0, s) / boxSum(mu, i0, j0, s);
                for (Index i = i0; i < i0 + s; ++i)
                    for (Index j = j0; j < j0 + s; ++j) {
                        const Index cell = cellOf[i * side + j];
                        if (a > out[cell]) out[cell] = a;
                    }
            }
    return out;
}

}  // namespace

ArrayXd all_cube_maximal(const ArrayXd& f, const DyadicGrid& g) {
    require_nonnegative(f, g.cellCount(), "all_cube_maximal");
    if (g.dim() == 1) return all_cube_maximal_1d(f, g);
    if (g.dim() == 2) return all_cube_maximal_2d(f, g);
    throw StructuralError("all_cube_maximal supports dimensions 1 and 2 only");
}

RadiusBoundReport radius_bound_check(const LocalBasis& basis, const ArrayXd& f, double lambda,
                                     const QuasiMetricSpace& s,
                                     std::optional<double> selectionScale) {
    require_nonnegative(f, s.size(), "radius_bound_check");
    if (!(lambda > 0.0))
        throw PreconditionError("radius_bound_check: lambda must be positive");

    RadiusBoundReport rep;
    if (s.doublingOrder() == 0.0) {
        rep.vacuous = true;  // single-scale space, the bound carries no content
        return rep;
    }

    const double hatAvg = ball_average(f, basis.hat, s);
    if (!(hatAvg > 0.0))
        throw PreconditionError("radius_bound_check: f vanishes identically on the envelope ball");

    const double kappa = s.kappa();
    const double dmu = s.doublingOrder();
    const double r0 = basis.base.radius;
    const double bound =
        2.0 * kappa * kappa * (1.0 + basis.delta) * std::pow(hatAvg / lambda, 1.0 / dmu) * r0;

    bool scaleBoundActive = false;
    double scaleBound = 0.0;
    if (selectionScale) {
        const double gamma =
            std::pow(2.0 * kappa * kappa * (1.0 + basis.delta) * *selectionScale / basis.delta, dmu);
        if (lambda >= gamma * hatAvg) {
            scaleBoundActive = true;
            scaleBound = basis.delta / *selectionScale * r0;
        }
    }

    rep.worstSlack = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < s.size(); ++c) {
        const int count = basis_group_count(s, basis, c);
        double num = 0.0, den = 0.0;
        Index k = 0;
        for (int g = 0; g < count; ++g) {
            const Index end = s.groupEnd(c, g);
            for (; k < end; ++k) {
                const Index y = s.neighborOrder(c)[k];
                num += f[y] * s.pointMeasure(y);
                den += s.pointMeasure(y);
            }
            if (num / den > lambda) {
                ++rep.qualifying;
                const double r = basis_ball_radius(s, basis, c, g);
                double effective = bound;
                if (scaleBoundActive) effective = std::min(effective, scaleBound);
                const double slack = effective - r;
                if (slack < rep.worstSlack) {
                    rep.worstSlack = slack;
                    rep.binding = Ball{c, r};
                    rep.boundAtBinding = effective;
                }
                if (r > effective * (1.0 + 1e-9)) rep.pass = false;
            }
        }
    }
    if (rep.qualifying == 0) rep.vacuous = true;
    return rep;
}

}  // namespace weightlab
