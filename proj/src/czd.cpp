#include "weightlab/czd.hpp"

#include "weightlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weightlab {

CZConfig make_cz_config(const QuasiMetricSpace& s, double delta, double scale, double lambda) {
    if (!(delta > 0.0))
        throw PreconditionError("decomposition requires delta > 0");
    if (s.doublingOrder() == 0.0)
        throw PreconditionError(
            "single-scale space (doubling order 0): the level threshold degenerates, "
            "decomposition unsupported");
    const double kappa = s.kappa();
    if (!(scale >= 2.0 * kappa))
        throw PreconditionError("selection scale N must be at least 2*kappa = " +
                                std::to_string(2.0 * kappa));
    if (!(lambda > 0.0))
        throw PreconditionError("decomposition level lambda must be positive");
    CZConfig cfg;
    cfg.delta = delta;
    cfg.scale = scale;
    cfg.lambda = lambda;
    cfg.gamma = std::pow(2.0 * kappa * kappa * (1.0 + delta) * scale / delta, s.doublingOrder());
    cfg.theta = 4.0 * kappa * kappa + kappa;
    cfg.localization = std::pow(8.0 * kappa * kappa, s.doublingOrder());
    return cfg;
}

namespace {

struct Candidate {
    Index center;
    int group;
    Index memberEnd;
    double radius;
    double average;
};

}  // namespace

CZDecomposition cz_decompose(const ArrayXd& f, const LocalBasis& basis, const CZConfig& config,
                             const QuasiMetricSpace& s) {
    if (f.size() != s.size())
        throw StructuralError("cz_decompose: function size does not match the space");
    for (Index i = 0; i < f.size(); ++i)
        if (!(f[i] >= 0.0) || !std::isfinite(f[i]))
            throw StructuralError("cz_decompose: f must be finite and nonnegative");
    if (config.delta != basis.delta)
        throw PreconditionError("configuration delta disagrees with the basis delta");

    const double hatAvg = ball_average(f, basis.hat, s);
    const double threshold = config.gamma * hatAvg;
    if (config.lambda < threshold)
        throw PreconditionError("decomposition level " + std::to_string(config.lambda) +
                                " is below the required threshold gamma * avg(f, hat) = " +
                                std::to_string(threshold));

    CZDecomposition dec;
    dec.config = config;
    dec.basis = basis;

    const ArrayXd maximal = local_maximal(f, basis, s);
    for (Index x = 0; x < s.size(); ++x)
        if (maximal[x] > config.lambda) dec.omega.push_back(x);
    if (dec.omega.empty()) return dec;

    // candidate balls: members of the family whose average exceeds lambda
    const double lambda = config.lambda;
    std::vector<Candidate> all;
    std::vector<double> avg;
    for (Index c = 0; c < s.size(); ++c) {
        const int count = basis_group_count(s, basis, c);
        if (count == 0) continue;
        avg.assign(count, 0.0);
        double num = 0.0, den = 0.0;
        Index k = 0;
        for (int g = 0; g < count; ++g) {
            const Index end = s.groupEnd(c, g);
            for (; k < end; ++k) {
                const Index y = s.neighborOrder(c)[k];
                num += f[y] * s.pointMeasure(y);
                den += s.pointMeasure(y);
            }
            avg[g] = num / den;
        }
        const double cap = basis.delta * basis.base.radius;
        for (int g = 0; g < count; ++g) {
            if (!(avg[g] > lambda)) continue;
            const double r = basis_ball_radius(s, basis, c, g);
            // keep only dilation-maximal candidates: no same-center family
            // ball reachable by dilating the radius into [2r, cap] may still
            // average above lambda, otherwise postcondition iv would fail
            bool maximalCandidate = true;
            for (int g2 = g + 1; g2 < count && maximalCandidate; ++g2) {
                if (!(avg[g2] > lambda)) continue;
                const double upper =
                    (g2 + 1 < s.groupCount(c)) ? std::min(s.groupDistance(c, g2 + 1), cap) : cap;
                if (upper >= 2.0 * r) maximalCandidate = false;
            }
            if (maximalCandidate)
                all.push_back(Candidate{c, g, s.groupEnd(c, g), r, avg[g]});
        }
    }

    std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
        if (a.radius != b.radius) return a.radius > b.radius;
        if (a.center != b.center) return a.center < b.center;
        return a.group < b.group;
    });

    std::vector<char> taken(static_cast<size_t>(s.size()), 0);
    for (const Candidate& cand : all) {
        const auto& order = s.neighborOrder(cand.center);
        bool disjoint = true;
        for (Index k = 0; k < cand.memberEnd && disjoint; ++k)
            if (taken[order[k]]) disjoint = false;
        if (!disjoint) continue;
        for (Index k = 0; k < cand.memberEnd; ++k) taken[order[k]] = 1;
        dec.balls.push_back(CZBall{Ball{cand.center, cand.radius}, cand.memberEnd, cand.average});
    }

    // the theta-dilations must cover the level set; anything else is a bug
    for (Index x : dec.omega) {
        bool covered = false;
        for (const CZBall& b : dec.balls)
            if (s.dist(b.ball.center, x) < config.theta * b.ball.radius) {
                covered = true;
                break;
            }
        if (!covered)
            throw std::logic_error("selected balls fail to cover the level set at point " +
                                   std::to_string(x));
    }
    return dec;
}

namespace {

// distinct-member-set dilation factors eta >= 2 keeping the dilate inside the
// family; returns representative radii
std::vector<double> dilate_radii(const QuasiMetricSpace& s, const LocalBasis& basis,
                                 const CZBall& b) {
    std::vector<double> radii;
    const double cap = basis.delta * basis.base.radius;
    const double lo = 2.0 * b.ball.radius;
    if (lo > cap) return radii;
    const Index baseCount = s.memberCount(Ball{b.ball.center, lo});
    if (baseCount != b.memberCount)
        radii.push_back(lo);  // the factor-2 dilate already changed the member set
    // one representative just past each distance breakpoint in (lo, cap]
    const int G = s.groupCount(b.ball.center);
    for (int g = 0; g < G; ++g) {
        const double d = s.groupDistance(b.ball.center, g);
        if (d < lo || d >= cap) continue;
        const double next =
            (g + 1 < G) ? s.groupDistance(b.ball.center, g + 1) : std::numeric_limits<double>::infinity();
        radii.push_back(std::min(0.5 * (d + next), cap));
    }
    return radii;
}

}  // namespace

std::vector<CheckResult> verify_cz(const CZDecomposition& dec, const ArrayXd& f,
                                   const LocalBasis& basis, const QuasiMetricSpace& s,
                                   const std::string& instance) {
    std::vector<CheckResult> out;
    const double lambda = dec.config.lambda;
    const std::map<std::string, double> base{{"lambda", lambda},
                                             {"delta", dec.config.delta},
                                             {"N", dec.config.scale}};

    if (dec.balls.empty()) {
        for (const char* name : {"cz-i-inside", "cz-i-cover", "cz-ii-radius", "cz-iii-average",
                                 "cz-iv-dilates", "cz-disjoint"})
            out.push_back(make_check(name, instance, 0.0, 0.0, base, "vacuous: empty family"));
        return out;
    }

    const ArrayXd maximal = local_maximal(f, basis, s);

    std::vector<char> inOmega(static_cast<size_t>(s.size()), 0);
    for (Index x : dec.omega) inOmega[x] = 1;

    Index doublyCovered = 0;
    std::vector<char> seen(static_cast<size_t>(s.size()), 0);
    for (size_t i = 0; i < dec.balls.size(); ++i) {
        const CZBall& b = dec.balls[i];
        const auto& order = s.neighborOrder(b.ball.center);
        const std::string tag = "#" + std::to_string(i);
        auto params = base;
        params["center"] = static_cast<double>(b.ball.center);
        params["radius"] = b.ball.radius;

        // i) the ball sits inside the level set
        double minMax = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < b.memberCount; ++k) {
            const Index y = order[k];
            minMax = std::min(minMax, maximal[y]);
            if (seen[y]) ++doublyCovered;
            seen[y] = 1;
        }
        out.push_back(make_check("cz-i-inside", instance + tag, lambda, minMax, params));

        // ii) radius bound
        out.push_back(make_check("cz-ii-radius", instance + tag, b.ball.radius,
                                 dec.config.delta / dec.config.scale * basis.base.radius, params));

        // iii) the average exceeds the level
        double num = 0.0, den = 0.0;
        for (Index k = 0; k < b.memberCount; ++k) {
            const Index y = order[k];
            num += f[y] * s.pointMeasure(y);
            den += s.pointMeasure(y);
        }
        out.push_back(make_check("cz-iii-average", instance + tag, lambda, num / den, params));

        // iv) every admissible dilate averages at most lambda
        double worstDilate = 0.0;
        for (double r : dilate_radii(s, basis, b))
            worstDilate = std::max(worstDilate, ball_average(f, Ball{b.ball.center, r}, s));
        out.push_back(make_check("cz-iv-dilates", instance + tag, worstDilate, lambda, params,
                                 "vacuous when no dilate stays in the family"));
    }

    // level set covered by the theta-dilations
    Index uncovered = 0;
    for (Index x : dec.omega) {
        bool covered = false;
        for (const CZBall& b : dec.balls)
            if (s.dist(b.ball.center, x) < dec.config.theta * b.ball.radius) {
                covered = true;
                break;
            }
        if (!covered) ++uncovered;
    }
    out.push_back(make_check("cz-i-cover", instance, static_cast<double>(uncovered), 0.0, base));
    out.push_back(
        make_check("cz-disjoint", instance, static_cast<double>(doublyCovered), 0.0, base));
    return out;
}

}  // namespace weightlab
