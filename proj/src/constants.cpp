#include "weightlab/constants.hpp"

#include "weightlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace weightlab {

namespace {

void require_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw PreconditionError("exponent p must satisfy 1 < p < infinity, got " + std::to_string(p));
}

void assert_at_least_one(double value, const char* what) {
    if (!(value >= 1.0 - 1e-9))
        throw std::logic_error(std::string(what) + " came out below 1: " + std::to_string(value));
}

}  // namespace

void validate_weight(const ArrayXd& w, Index expected) {
    if (w.size() != expected)
        throw StructuralError("weight has " + std::to_string(w.size()) + " entries, expected " +
                              std::to_string(expected));
    for (Index i = 0; i < w.size(); ++i)
        if (!(w[i] > 0.0) || !std::isfinite(w[i]))
            throw StructuralError("weight must be strictly positive and finite, offending index " +
                                  std::to_string(i));
}

ArrayXd dual_weight(const ArrayXd& w, double p) {
    require_p(p);
    validate_weight(w, w.size());
    const double exponent = -1.0 / (p - 1.0);  // 1 - p'
    return w.pow(exponent);
}

// ---------------------------------------------------------------------------
// ball families
// ---------------------------------------------------------------------------

namespace {

// Sweep every canonical ball, handing (center, group, memberEnd, averages...)
// to the visitor. Averages are ratios of prefix sums accumulated in the same
// neighbor order, so a constant function averages to exactly its value.
template <int Arity, class Visit>
void sweep_canonical_balls(const QuasiMetricSpace& s, const ArrayXd* values[Arity], Visit&& visit) {
    const Index n = s.size();
    double acc[Arity];
    double avg[Arity];
    for (Index c = 0; c < n; ++c) {
        const auto& order = s.neighborOrder(c);
        const auto& mu = s.muPrefix(c);
        for (int a = 0; a < Arity; ++a) acc[a] = 0.0;
        Index k = 0;
        const int G = s.groupCount(c);
        for (int g = 0; g < G; ++g) {
            const Index end = s.groupEnd(c, g);
            for (; k < end; ++k) {
                const Index y = order[k];
                const double m = s.pointMeasure(y);
                for (int a = 0; a < Arity; ++a) acc[a] += (*values[a])[y] * m;
            }
            for (int a = 0; a < Arity; ++a) avg[a] = acc[a] / mu[end];
            visit(c, g, end, avg);
        }
    }
}

}  // namespace

double ap_constant(const ArrayXd& w, double p, const QuasiMetricSpace& s) {
    require_p(p);
    validate_weight(w, s.size());
    const ArrayXd dual = w.pow(-1.0 / (p - 1.0));
    const ArrayXd* values[2] = {&w, &dual};
    double best = 0.0;
    sweep_canonical_balls<2>(s, values, [&](Index, int, Index, const double avg[2]) {
        best = std::max(best, avg[0] * std::pow(avg[1], p - 1.0));
    });
    assert_at_least_one(best, "[w]_{A_p}");
    return std::max(best, 1.0);
}

double exp_ainfty_constant(const ArrayXd& w, const QuasiMetricSpace& s) {
    validate_weight(w, s.size());
    const ArrayXd logInv = -w.log();
    const ArrayXd* values[2] = {&w, &logInv};
    double best = 0.0;
    sweep_canonical_balls<2>(s, values, [&](Index, int, Index, const double avg[2]) {
        best = std::max(best, avg[0] * std::exp(avg[1]));
    });
    assert_at_least_one(best, "exponential A_infty constant");
    return std::max(best, 1.0);
}

double fujii_wilson_constant(const ArrayXd& w, const QuasiMetricSpace& s) {
    validate_weight(w, s.size());
    const Index n = s.size();
    const ArrayXd wmu = w * s.measure();

    std::vector<int> stamp(n, -1);
    std::vector<double> maximal(n, 0.0);
    std::vector<double> avg;
    int epoch = 0;
    double best = 0.0;

    for (Index c0 = 0; c0 < n; ++c0) {
        const auto& members = s.neighborOrder(c0);
        for (int g0 = 0; g0 < s.groupCount(c0); ++g0) {
            const Index m = s.groupEnd(c0, g0);
            ++epoch;
            double wB = 0.0;
            for (Index k = 0; k < m; ++k) {
                const Index y = members[k];
                stamp[y] = epoch;
                maximal[y] = 0.0;
                wB += wmu[y];
            }
            // maximal function of w restricted to the ball, evaluated on it
            for (Index c = 0; c < n; ++c) {
                const auto& order = s.neighborOrder(c);
                const auto& mu = s.muPrefix(c);
                const int G = s.groupCount(c);
                avg.assign(G, 0.0);
                double acc = 0.0;
                Index k = 0;
                for (int g = 0; g < G; ++g) {
                    const Index end = s.groupEnd(c, g);
                    for (; k < end; ++k) {
                        const Index y = order[k];
                        if (stamp[y] == epoch) acc += wmu[y];
                    }
                    avg[g] = acc / mu[end];
                }
                for (int g = G - 2; g >= 0; --g) avg[g] = std::max(avg[g], avg[g + 1]);
                for (Index r = 0; r < n; ++r) {
                    const Index y = order[r];
                    if (stamp[y] != epoch) continue;
                    const double cand = avg[s.groupOfRank(c, r)];
                    if (cand > maximal[y]) maximal[y] = cand;
                }
            }
            double integral = 0.0;
            for (Index k = 0; k < m; ++k) {
                const Index y = members[k];
                integral += maximal[y] * s.pointMeasure(y);
            }
            best = std::max(best, integral / wB);
        }
    }
    assert_at_least_one(best, "Fujii-Wilson constant");
    return std::max(best, 1.0);
}

// ---------------------------------------------------------------------------
// cube families
// ---------------------------------------------------------------------------

namespace {

template <class Term>
double max_over_dyadic_cubes(const DyadicGrid& g, const std::vector<ArrayXd>& num1,
                             const std::vector<ArrayXd>& num2, Term&& term) {
    double best = 0.0;
    for (int level = 0; level <= g.depth(); ++level)
        for (Index i = 0; i < g.cubeCount(level); ++i) {
            const double m = g.cubeMeasure(Cube{level, i});
            best = std::max(best, term(num1[level][i] / m, num2[level][i] / m));
        }
    return best;
}

// integral over the cube (level, i) of the running maximum of ancestor
// averages, children combined in index order so the summation tree matches
// the measure aggregation exactly
double dyadic_maximal_integral(const DyadicGrid& g, const std::vector<ArrayXd>& wmu, int level,
                               Index i, double runningMax) {
    const double avg = wmu[level][i] / g.cubeMeasure(Cube{level, i});
    const double best = std::max(runningMax, avg);
    if (level == g.depth()) return best * g.cellMeasure()[i];
    double acc = 0.0;
    for (int c = 0; c < g.childCount(); ++c)
        acc += dyadic_maximal_integral(g, wmu, level + 1, (i << g.dim()) + c, best);
    return acc;
}

}  // namespace

double ap_constant(const ArrayXd& w, double p, const DyadicGrid& g) {
    require_p(p);
    validate_weight(w, g.cellCount());
    const auto wmu = g.aggregate(w * g.cellMeasure());
    const auto dualmu = g.aggregate(w.pow(-1.0 / (p - 1.0)) * g.cellMeasure());
    const double best = max_over_dyadic_cubes(
        g, wmu, dualmu, [&](double a, double b) { return a * std::pow(b, p - 1.0); });
    assert_at_least_one(best, "[w]_{A_p}");
    return std::max(best, 1.0);
}

double exp_ainfty_constant(const ArrayXd& w, const DyadicGrid& g) {
    validate_weight(w, g.cellCount());
    const auto wmu = g.aggregate(w * g.cellMeasure());
    const auto logmu = g.aggregate((-w.log()) * g.cellMeasure());
    const double best =
        max_over_dyadic_cubes(g, wmu, logmu, [](double a, double b) { return a * std::exp(b); });
    assert_at_least_one(best, "exponential A_infty constant");
    return std::max(best, 1.0);
}

double fujii_wilson_dyadic(const ArrayXd& w, const DyadicGrid& g, const Cube& q0) {
    validate_weight(w, g.cellCount());
    g.validate(q0);
    const auto wmu = g.aggregate(w * g.cellMeasure());
    double best = 0.0;
    for (int level = q0.level; level <= g.depth(); ++level) {
        const Index lo = q0.index << (g.dim() * (level - q0.level));
        const Index hi = (q0.index + 1) << (g.dim() * (level - q0.level));
        for (Index i = lo; i < hi; ++i) {
            const double integral = dyadic_maximal_integral(g, wmu, level, i, 0.0);
            best = std::max(best, integral / wmu[level][i]);
        }
    }
    assert_at_least_one(best, "Fujii-Wilson constant");
    return std::max(best, 1.0);
}

namespace {

double fujii_wilson_all_cubes(const ArrayXd& w, const DyadicGrid& g) {
    if (g.dim() > 2)
        throw StructuralError("the all-cubes family is implemented for dimensions 1 and 2 only");
    validate_weight(w, g.cellCount());
    double best = 0.0;
    if (g.dim() == 1) {
        const Index n = g.cellCount();
        std::vector<double> fmu(n + 1, 0.0), mu(n + 1, 0.0);
        for (Index i = 0; i < n; ++i) {
            fmu[i + 1] = fmu[i] + w[i] * g.cellMeasure()[i];
            mu[i + 1] = mu[i] + g.cellMeasure()[i];
        }
        std::vector<double> maximal;
        for (Index a = 0; a < n; ++a)
            for (Index b = a + 1; b <= n; ++b) {
                // M(w restricted to [a,b)) at x in [a,b): best subinterval through x
                maximal.assign(b - a, 0.0);
                for (Index u = a; u < b; ++u)
                    for (Index v = u + 1; v <= b; ++v) {
                        const double avg = (fmu[v] - fmu[u]) / (mu[v] - mu[u]);
                        for (Index x = u; x < v; ++x)
                            if (avg > maximal[x - a]) maximal[x - a] = avg;
                    }
                double integral = 0.0, wQ = 0.0;
                for (Index x = a; x < b; ++x) {
                    integral += maximal[x - a] * g.cellMeasure()[x];
                    wQ += w[x] * g.cellMeasure()[x];
                }
                best = std::max(best, integral / wQ);
            }
    } else {
        const Index side = Index{1} << g.depth();
        std::vector<Index> cellOf(side * side);
        for (Index cell = 0; cell < g.cellCount(); ++cell) {
            const auto c = g.cellCoordinates(cell);
            cellOf[c[0] * side + c[1]] = cell;
        }
        auto cellAt = [&](Index i, Index j) { return cellOf[i * side + j]; };
        std::vector<double> fmu((side + 1) * (side + 1), 0.0), mu((side + 1) * (side + 1), 0.0);
        auto at = [side](std::vector<double>& a, Index i, Index j) -> double& {
            return a[i * (side + 1) + j];
        };
        for (Index i = 0; i < side; ++i)
            for (Index j = 0; j < side; ++j) {
                const Index cell = cellAt(i, j);
                const double m = g.cellMeasure()[cell];
                at(fmu, i + 1, j + 1) =
                    w[cell] * m + at(fmu, i, j + 1) + at(fmu, i + 1, j) - at(fmu, i, j);
                at(mu, i + 1, j + 1) = m + at(mu, i, j + 1) + at(mu, i + 1, j) - at(mu, i, j);
            }
        auto box = [&](std::vector<double>& a, Index i0, Index j0, Index s) {
            return at(a, i0 + s, j0 + s) - at(a, i0, j0 + s) - at(a, i0 + s, j0) + at(a, i0, j0);
        };
        std::vector<double> maximal;
        for (Index s = 1; s <= side; ++s)
            for (Index i0 = 0; i0 + s <= side; ++i0)
                for (Index j0 = 0; j0 + s <= side; ++j0) {
                    maximal.assign(s * s, 0.0);
                    for (Index t = 1; t <= s; ++t)
                        for (Index u = i0; u + t <= i0 + s; ++u)
                            for (Index v = j0; v + t <= j0 + s; ++v) {
                                const double avg = box(fmu, u, v, t) / box(mu, u, v, t);
                                for (Index i = u; i < u + t; ++i)
                                    for (Index j = v; j < v + t; ++j) {
                                        double& slot = maximal[(i - i0) * s + (j - j0)];
                                        if (avg > slot) slot = avg;
                                    }
                            }
                    double integral = 0.0, wQ = 0.0;
                    for (Index i = i0; i < i0 + s; ++i)
                        for (Index j = j0; j < j0 + s; ++j) {
                            const Index cell = cellAt(i, j);
                            integral += maximal[(i - i0) * s + (j - j0)] * g.cellMeasure()[cell];
                            wQ += w[cell] * g.cellMeasure()[cell];
                        }
                    best = std::max(best, integral / wQ);
                }
    }
    assert_at_least_one(best, "Fujii-Wilson constant");
    return std::max(best, 1.0);
}

}  // namespace

double fujii_wilson_constant(const ArrayXd& w, const DyadicGrid& g, CubeFamily family) {
    if (family == CubeFamily::Dyadic) return fujii_wilson_dyadic(w, g, g.root());
    return fujii_wilson_all_cubes(w, g);
}

RExponent r_exponent(double ainfFw, double kappa, double dmu) {
    if (!(ainfFw >= 1.0) || !(kappa >= 1.0) || !(dmu >= 0.0))
        throw PreconditionError("r_exponent requires [w] >= 1, kappa >= 1, D_mu >= 0");
    const double theta = 4.0 * kappa * kappa + kappa;
    RExponent out;
    out.tau = 6.0 * std::pow(32.0 * kappa * kappa * theta * theta, dmu);
    out.r = 1.0 + 1.0 / (out.tau * ainfFw);
    return out;
}

// ---------------------------------------------------------------------------
// report rows
// ---------------------------------------------------------------------------

ConstantsReport constants_report(const ArrayXd& w, double p, const QuasiMetricSpace& s) {
    ConstantsReport rep;
    rep.family = "balls";
    rep.p = p;
    rep.ap = ap_constant(w, p, s);
    rep.ainfFw = fujii_wilson_constant(w, s);
    rep.ainfExp = exp_ainfty_constant(w, s);
    rep.sigmaAinf = fujii_wilson_constant(dual_weight(w, p), s);
    const RExponent re = r_exponent(rep.ainfFw, s.kappa(), s.doublingOrder());
    rep.tau = re.tau;
    rep.rW = re.r;
    rep.epsOpen = (p - 1.0) / (1.0 + re.tau * rep.sigmaAinf);
    return rep;
}

ConstantsReport constants_report(const ArrayXd& w, double p, const DyadicGrid& g,
                                 CubeFamily family) {
    ConstantsReport rep;
    rep.family = family == CubeFamily::Dyadic ? "dyadic" : "all-cubes";
    rep.p = p;
    rep.ap = ap_constant(w, p, g);
    rep.ainfFw = fujii_wilson_constant(w, g, family);
    rep.ainfExp = exp_ainfty_constant(w, g);
    rep.sigmaAinf = fujii_wilson_constant(dual_weight(w, p), g, family);
    // structural constants of the Euclidean model: kappa = 1, order = dim
    const RExponent re = r_exponent(rep.ainfFw, 1.0, static_cast<double>(g.dim()));
    rep.tau = re.tau;
    rep.rW = re.r;
    rep.epsOpen = (p - 1.0) / (1.0 + re.tau * rep.sigmaAinf);
    return rep;
}

}  // namespace weightlab
