// Brute-force reference implementations for oracle-equivalence tests. These
// deliberately avoid the library's sorted-prefix machinery: membership is
// decided straight off the distance matrix and every average is a direct sum,
// so they share no code path with what they check.
#pragma once

#include "weightlab/constants.hpp"
#include "weightlab/grid.hpp"
#include "weightlab/maximal.hpp"
#include "weightlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace weightlab::oracles {

inline std::vector<Index> members_of(const Ball& b, const QuasiMetricSpace& s) {
    std::vector<Index> out;
    for (Index y = 0; y < s.size(); ++y)
        if (s.dist(b.center, y) < b.radius) out.push_back(y);
    return out;
}

inline double direct_average(const ArrayXd& f, const std::vector<Index>& members,
                             const QuasiMetricSpace& s) {
    double num = 0.0, den = 0.0;
    for (Index y : members) {
        num += f[y] * s.pointMeasure(y);
        den += s.pointMeasure(y);
    }
    return num / den;
}

// all balls with pairwise distinct member sets, via radii straddling each
// distance value
inline std::vector<Ball> all_balls(const QuasiMetricSpace& s) {
    std::vector<Ball> out;
    for (Index c = 0; c < s.size(); ++c) {
        std::set<double> dists;
        for (Index y = 0; y < s.size(); ++y) dists.insert(s.dist(c, y));
        std::vector<double> sorted(dists.begin(), dists.end());
        std::set<std::vector<Index>> seen;
        for (size_t i = 0; i < sorted.size(); ++i) {
            const double r = (i + 1 < sorted.size()) ? 0.5 * (sorted[i] + sorted[i + 1])
                                                     : sorted[i] + 1.0;
            const Ball b{c, r};
            if (seen.insert(members_of(b, s)).second) out.push_back(b);
        }
    }
    return out;
}

inline ArrayXd hl_maximal(const ArrayXd& f, const QuasiMetricSpace& s) {
    const auto balls = all_balls(s);
    ArrayXd out = ArrayXd::Zero(s.size());
    for (const Ball& b : balls) {
        const auto members = members_of(b, s);
        const double avg = direct_average(f, members, s);
        for (Index y : members) out[y] = std::max(out[y], avg);
    }
    return out;
}

inline std::vector<Ball> local_family(const LocalBasis& basis, const QuasiMetricSpace& s) {
    // every member set realizable with center in B0 and radius <= delta r(B0)
    std::vector<Ball> out;
    const double cap = basis.delta * basis.base.radius;
    for (Index c = 0; c < s.size(); ++c) {
        if (!(s.dist(basis.base.center, c) < basis.base.radius)) continue;
        std::set<double> dists;
        for (Index y = 0; y < s.size(); ++y) {
            const double d = s.dist(c, y);
            if (d < cap) dists.insert(d);
        }
        std::vector<double> sorted(dists.begin(), dists.end());
        for (size_t i = 0; i < sorted.size(); ++i) {
            const double next = (i + 1 < sorted.size()) ? sorted[i + 1] : cap + 1.0;
            out.push_back(Ball{c, std::min(0.5 * (sorted[i] + next), cap)});
        }
    }
    return out;
}

inline ArrayXd local_maximal(const ArrayXd& f, const LocalBasis& basis,
                             const QuasiMetricSpace& s) {
    ArrayXd out = ArrayXd::Zero(s.size());
    const ArrayXd g = f.abs();
    for (const Ball& b : local_family(basis, s)) {
        const auto members = members_of(b, s);
        const double avg = direct_average(g, members, s);
        for (Index y : members) out[y] = std::max(out[y], avg);
    }
    return out;
}

inline ArrayXd dyadic_maximal(const ArrayXd& f, const Cube& q0, const DyadicGrid& g) {
    ArrayXd out = ArrayXd::Zero(g.cellCount());
    for (Index cell = g.cellBegin(q0); cell < g.cellEnd(q0); ++cell) {
        double best = 0.0;
        for (int level = q0.level; level <= g.depth(); ++level) {
            const Cube q{level, g.ancestorOfCell(cell, level)};
            double num = 0.0, den = 0.0;
            for (Index x = g.cellBegin(q); x < g.cellEnd(q); ++x) {
                num += f[x] * g.cellMeasure()[x];
                den += g.cellMeasure()[x];
            }
            best = std::max(best, num / den);
        }
        out[cell] = best;
    }
    return out;
}

inline double ap_constant(const ArrayXd& w, double p, const QuasiMetricSpace& s) {
    double best = 0.0;
    for (const Ball& b : all_balls(s)) {
        const auto members = members_of(b, s);
        const double a = direct_average(w, members, s);
        const double d = direct_average(w.pow(-1.0 / (p - 1.0)), members, s);
        best = std::max(best, a * std::pow(d, p - 1.0));
    }
    return best;
}

inline double exp_ainfty(const ArrayXd& w, const QuasiMetricSpace& s) {
    double best = 0.0;
    for (const Ball& b : all_balls(s)) {
        const auto members = members_of(b, s);
        best = std::max(best, direct_average(w, members, s) *
                                  std::exp(direct_average(-w.log(), members, s)));
    }
    return best;
}

// Fujii-Wilson over balls. The maximal function of the masked weight comes
// from the (separately oracle-checked) library operator; the family sweep,
// masking and integral are direct.
inline double fujii_wilson(const ArrayXd& w, const QuasiMetricSpace& s) {
    double best = 0.0;
    for (const Ball& b : all_balls(s)) {
        const auto members = members_of(b, s);
        ArrayXd masked = ArrayXd::Zero(s.size());
        for (Index y : members) masked[y] = w[y];
        const ArrayXd m = weightlab::hl_maximal(masked, s);
        double integral = 0.0, wB = 0.0;
        for (Index y : members) {
            integral += m[y] * s.pointMeasure(y);
            wB += w[y] * s.pointMeasure(y);
        }
        best = std::max(best, integral / wB);
    }
    return best;
}

// fully independent variant for tiny spaces: the inner maximal function is a
// direct double loop as well
inline double fujii_wilson_tiny(const ArrayXd& w, const QuasiMetricSpace& s) {
    double best = 0.0;
    for (const Ball& b : all_balls(s)) {
        const auto members = members_of(b, s);
        ArrayXd masked = ArrayXd::Zero(s.size());
        for (Index y : members) masked[y] = w[y];
        const ArrayXd m = oracles::hl_maximal(masked, s);  // oracle maximal
        double integral = 0.0, wB = 0.0;
        for (Index y : members) {
            integral += m[y] * s.pointMeasure(y);
            wB += w[y] * s.pointMeasure(y);
        }
        best = std::max(best, integral / wB);
    }
    return best;
}

inline double fujii_wilson_dyadic(const ArrayXd& w, const DyadicGrid& g, const Cube& q0) {
    double best = 0.0;
    for (int level = q0.level; level <= g.depth(); ++level)
        for (Index i = q0.index << (g.dim() * (level - q0.level));
             i < (q0.index + 1) << (g.dim() * (level - q0.level)); ++i) {
            const Cube q{level, i};
            ArrayXd masked = ArrayXd::Zero(g.cellCount());
            for (Index x = g.cellBegin(q); x < g.cellEnd(q); ++x) masked[x] = w[x];
            const ArrayXd m = oracles::dyadic_maximal(masked, q, g);
            double integral = 0.0, wQ = 0.0;
            for (Index x = g.cellBegin(q); x < g.cellEnd(q); ++x) {
                integral += m[x] * g.cellMeasure()[x];
                wQ += w[x] * g.cellMeasure()[x];
            }
            best = std::max(best, integral / wQ);
        }
    return best;
}

inline double ap_dyadic(const ArrayXd& w, double p, const DyadicGrid& g) {
    double best = 0.0;
    const ArrayXd dual = w.pow(-1.0 / (p - 1.0));
    for (int level = 0; level <= g.depth(); ++level)
        for (Index i = 0; i < g.cubeCount(level); ++i) {
            const Cube q{level, i};
            double a = 0.0, d = 0.0, den = 0.0;
            for (Index x = g.cellBegin(q); x < g.cellEnd(q); ++x) {
                a += w[x] * g.cellMeasure()[x];
                d += dual[x] * g.cellMeasure()[x];
                den += g.cellMeasure()[x];
            }
            best = std::max(best, (a / den) * std::pow(d / den, p - 1.0));
        }
    return best;
}

inline double exp_dyadic(const ArrayXd& w, const DyadicGrid& g) {
    double best = 0.0;
    for (int level = 0; level <= g.depth(); ++level)
        for (Index i = 0; i < g.cubeCount(level); ++i) {
            const Cube q{level, i};
            double a = 0.0, l = 0.0, den = 0.0;
            for (Index x = g.cellBegin(q); x < g.cellEnd(q); ++x) {
                a += w[x] * g.cellMeasure()[x];
                l += -std::log(w[x]) * g.cellMeasure()[x];
                den += g.cellMeasure()[x];
            }
            best = std::max(best, (a / den) * std::exp(l / den));
        }
    return best;
}

}  // namespace weightlab::oracles
