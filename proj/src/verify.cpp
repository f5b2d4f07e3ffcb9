#include "weightlab/verify.hpp"

#include "weightlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace weightlab {

double tau_local(double kappa, double dmu, double delta) {
    const double theta = 4.0 * kappa * kappa + kappa;
    return 6.0 * std::pow(16.0 * kappa * kappa * theta * theta * (1.0 + 1.0 / delta), dmu);
}

double tau_structural(double kappa, double dmu) { return tau_local(kappa, dmu, 1.0); }

double admissible_eps_maximal(double ainf, int dim) {
    return 1.0 / (std::ldexp(1.0, dim + 1) * ainf);
}

double admissible_eps_sharp(double ainf, int dim) {
    return 1.0 / (std::ldexp(1.0, dim + 1) * ainf - 1.0);
}

namespace {

void require_eps(double eps, double epsMax, const char* what) {
    if (!(eps > 0.0) || eps > epsMax * (1.0 + 1e-12))
        throw PreconditionError(std::string(what) + ": exponent must lie in (0, " +
                                std::to_string(epsMax) + "], got " + std::to_string(eps));
}

void require_lebesgue(const DyadicGrid& g, const char* what) {
    if (!g.isLebesgue())
        throw PreconditionError(std::string(what) +
                                " requires Lebesgue cell measure (the dyadic parent carries "
                                "exactly 2^d times the child measure)");
}

double cube_average(const ArrayXd& values, const Cube& q, const DyadicGrid& g) {
    double num = 0.0, den = 0.0;
    for (Index cell = g.cellBegin(q); cell < g.cellEnd(q); ++cell) {
        num += values[cell] * g.cellMeasure()[cell];
        den += g.cellMeasure()[cell];
    }
    return num / den;
}

// both sides of the maximal-function display on a grid, no exponent gate
std::pair<double, double> rhi_maximal_dyadic_sides(const ArrayXd& w, const Cube& q0,
                                                   const DyadicGrid& g, double eps, double ainf) {
    const ArrayXd maximal = dyadic_maximal(w, q0, g);
    double lhsNum = 0.0, den = 0.0, wNum = 0.0;
    for (Index cell = g.cellBegin(q0); cell < g.cellEnd(q0); ++cell) {
        const double m = g.cellMeasure()[cell];
        lhsNum += std::pow(maximal[cell], 1.0 + eps) * m;
        wNum += w[cell] * m;
        den += m;
    }
    const double lhs = lhsNum / den;
    const double rhs = 2.0 * ainf * std::pow(wNum / den, 1.0 + eps);
    return {lhs, rhs};
}

}  // namespace

CheckResult check_rhi_maximal_dyadic(const ArrayXd& w, const Cube& q0, const DyadicGrid& g,
                                     double eps, const std::string& instance,
                                     std::optional<double> ainf) {
    require_lebesgue(g, "rhi-maximal-dyadic");
    const double A = ainf ? *ainf : fujii_wilson_dyadic(w, g, q0);
    const double epsMax = admissible_eps_maximal(A, g.dim());
    require_eps(eps, epsMax, "rhi-maximal-dyadic");
    const auto [lhs, rhs] = rhi_maximal_dyadic_sides(w, q0, g, eps, A);
    return make_check("rhi-maximal-dyadic", instance, lhs, rhs,
                      {{"eps", eps}, {"eps_admissible", epsMax}, {"ainf", A}},
                      "dyadic cube family");
}

CheckResult check_sharp_rhi_cubes(const ArrayXd& w, const Cube& q0, const DyadicGrid& g,
                                  double eps, const std::string& instance,
                                  std::optional<double> ainf) {
    require_lebesgue(g, "sharp-rhi-cubes");
    const double A = ainf ? *ainf : fujii_wilson_dyadic(w, g, q0);
    const double epsMax = admissible_eps_sharp(A, g.dim());
    require_eps(eps, epsMax, "sharp-rhi-cubes");
    double lhsNum = 0.0, den = 0.0, wNum = 0.0;
    for (Index cell = g.cellBegin(q0); cell < g.cellEnd(q0); ++cell) {
        const double m = g.cellMeasure()[cell];
        lhsNum += std::pow(w[cell], 1.0 + eps) * m;
        wNum += w[cell] * m;
        den += m;
    }
    const double lhs = lhsNum / den;
    const double rhs = 2.0 * std::pow(wNum / den, 1.0 + eps);
    return make_check("sharp-rhi-cubes", instance, lhs, rhs,
                      {{"eps", eps}, {"eps_admissible", epsMax}, {"ainf", A}},
                      "dyadic cube family");
}

ProbeResult probe_rhi_maximal_dyadic(const ArrayXd& w, const Cube& q0, const DyadicGrid& g,
                                     std::optional<double> ainf, double cap) {
    require_lebesgue(g, "probe");
    const double A = ainf ? *ainf : fujii_wilson_dyadic(w, g, q0);
    auto passes = [&](double eps) {
        const auto [lhs, rhs] = rhi_maximal_dyadic_sides(w, q0, g, eps, A);
        return lhs <= rhs * (1.0 + kCheckRelTol);
    };
    double lo = admissible_eps_maximal(A, g.dim());
    if (!passes(lo))
        throw std::logic_error("display fails at its admissible exponent; implementation bug");
    double hi = lo;
    while (hi < cap) {
        hi = std::min(2.0 * hi, cap);
        if (!passes(hi)) break;
        lo = hi;
    }
    if (lo == cap) return ProbeResult{cap, true};
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-12 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? lo : hi) = mid;
    }
    return ProbeResult{lo, false};
}

// ---------------------------------------------------------------------------
// space side
// ---------------------------------------------------------------------------

CheckResult check_rhi_maximal_local(const ArrayXd& w, const LocalBasis& basis,
                                    const QuasiMetricSpace& s, double eps,
                                    const std::string& instance, std::optional<double> ainf) {
    validate_weight(w, s.size());
    const double A = ainf ? *ainf : fujii_wilson_constant(w, s);
    const double tau = tau_local(s.kappa(), s.doublingOrder(), basis.delta);
    const double epsMax = 1.0 / (tau * A);
    require_eps(eps, epsMax, "rhi-maximal-local");

    // only the values on the envelope ball matter
    ArrayXd localized = ArrayXd::Zero(s.size());
    const auto& order = s.neighborOrder(basis.hat.center);
    const Index hatCount = s.memberCount(basis.hat);
    for (Index k = 0; k < hatCount; ++k) localized[order[k]] = w[order[k]];

    const ArrayXd maximal = local_maximal(localized, basis, s);
    double lhsNum = 0.0, den = 0.0, wNum = 0.0;
    for (Index k = 0; k < hatCount; ++k) {
        const Index y = order[k];
        const double m = s.pointMeasure(y);
        lhsNum += std::pow(maximal[y], 1.0 + eps) * m;
        wNum += w[y] * m;
        den += m;
    }
    const double lhs = lhsNum / den;
    const double rhs = 3.0 * A * std::pow(wNum / den, 1.0 + eps);
    return make_check("rhi-maximal-local", instance, lhs, rhs,
                      {{"eps", eps},
                       {"eps_admissible", epsMax},
                       {"ainf", A},
                       {"tau", tau},
                       {"delta", basis.delta}},
                      "ball family");
}

CheckResult check_weak_rhi(const ArrayXd& w, const Ball& b, const QuasiMetricSpace& s,
                           const std::string& instance, std::optional<double> ainf) {
    validate_weight(w, s.size());
    const double A = ainf ? *ainf : fujii_wilson_constant(w, s);
    const RExponent re = r_exponent(A, s.kappa(), s.doublingOrder());
    const ArrayXd wr = w.pow(re.r);
    const double lhs = std::pow(ball_average(wr, b, s), 1.0 / re.r);
    const Ball outer = dilate(b, 2.0 * s.kappa());
    const double rhs =
        2.0 * std::pow(4.0 * s.kappa(), s.doublingOrder()) * ball_average(w, outer, s);
    return make_check("weak-rhi", instance, lhs, rhs,
                      {{"r", re.r}, {"tau", re.tau}, {"ainf", A}, {"radius", b.radius},
                       {"center", static_cast<double>(b.center)}});
}

SweepSummary check_weak_rhi_all(const ArrayXd& w, const QuasiMetricSpace& s,
                                const std::string& instance, std::optional<double> ainf) {
    validate_weight(w, s.size());
    const double A = ainf ? *ainf : fujii_wilson_constant(w, s);
    const RExponent re = r_exponent(A, s.kappa(), s.doublingOrder());
    const ArrayXd wr = w.pow(re.r);
    const double factor = 2.0 * std::pow(4.0 * s.kappa(), s.doublingOrder());

    SweepSummary sum;
    sum.worst.slack = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < s.size(); ++c) {
        const auto& order = s.neighborOrder(c);
        const auto& mu = s.muPrefix(c);
        const auto& sd = s.sortedDistances(c);
        double accR = 0.0, accW = 0.0;
        Index k = 0;
        std::vector<double> wAvgAt(s.groupCount(c));
        std::vector<double> rAvgAt(s.groupCount(c));
        for (int g = 0; g < s.groupCount(c); ++g) {
            const Index end = s.groupEnd(c, g);
            for (; k < end; ++k) {
                const Index y = order[k];
                accR += wr[y] * s.pointMeasure(y);
                accW += w[y] * s.pointMeasure(y);
            }
            rAvgAt[g] = accR / mu[end];
            wAvgAt[g] = accW / mu[end];
        }
        for (int g = 0; g < s.groupCount(c); ++g) {
            const double radius = s.canonicalRadius(c, g);
            const double outerRadius = 2.0 * s.kappa() * radius;
            const Index outerCount = std::lower_bound(sd.begin(), sd.end(), outerRadius) - sd.begin();
            // outerCount >= 1 always; find its group to reuse the averages
            int og = s.groupOfRank(c, outerCount - 1);
            const double lhs = std::pow(rAvgAt[g], 1.0 / re.r);
            const double rhs = factor * wAvgAt[og];
            ++sum.total;
            const bool pass = lhs <= rhs * (1.0 + kCheckRelTol);
            if (pass) ++sum.passed;
            const double slack = (rhs - lhs) / rhs;
            if (slack < sum.worst.slack) {
                sum.worst = make_check("weak-rhi", instance, lhs, rhs,
                                       {{"r", re.r},
                                        {"tau", re.tau},
                                        {"ainf", A},
                                        {"radius", radius},
                                        {"center", static_cast<double>(c)}});
            }
        }
    }
    return sum;
}

SweepSummary check_rhi_maximal_local_all(const ArrayXd& w, const QuasiMetricSpace& s, double delta,
                                         const std::string& instance, std::optional<double> ainf) {
    validate_weight(w, s.size());
    const double A = ainf ? *ainf : fujii_wilson_constant(w, s);
    const double tau = tau_local(s.kappa(), s.doublingOrder(), delta);
    const double eps = 1.0 / (tau * A);

    SweepSummary sum;
    sum.worst.slack = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < s.size(); ++c) {
        for (int g = 0; g < s.groupCount(c); ++g) {
            const Ball base{c, s.canonicalRadius(c, g)};
            const LocalBasis basis = make_local_basis(s, base, delta);
            CheckResult r = check_rhi_maximal_local(w, basis, s, eps,
                                                    instance + "/ball(" + std::to_string(c) + "," +
                                                        std::to_string(g) + ")",
                                                    A);
            ++sum.total;
            if (r.pass) ++sum.passed;
            if (r.slack < sum.worst.slack) sum.worst = std::move(r);
        }
    }
    return sum;
}

OpenPropertyResult open_property(const ArrayXd& w, double p, const QuasiMetricSpace& s,
                                 const std::string& instance, std::optional<double> sigmaAinf) {
    validate_weight(w, s.size());
    const ArrayXd sigma = dual_weight(w, p);
    const double sAinf = sigmaAinf ? *sigmaAinf : fujii_wilson_constant(sigma, s);
    const double tau = tau_structural(s.kappa(), s.doublingOrder());
    const double eps = (p - 1.0) / (1.0 + tau * sAinf);
    if (!(p - eps > 1.0))
        throw std::logic_error("self-improvement exponent failed to stay above 1");

    const double lhs = ap_constant(w, p - eps, s);
    const double rhs = std::pow(2.0, p - 1.0) *
                       std::pow(4.0 * s.kappa(), p * s.doublingOrder()) * ap_constant(w, p, s);
    OpenPropertyResult out;
    out.epsilon = eps;
    out.sigmaAinf = sAinf;
    out.check = make_check("open-property", instance, lhs, rhs,
                           {{"p", p}, {"eps", eps}, {"sigma_ainf", sAinf}, {"tau", tau}});
    return out;
}

// ---------------------------------------------------------------------------
// operator-norm lower estimates
// ---------------------------------------------------------------------------

namespace {

// enumerate the default test functions into `f`, calling visit(label) per one
template <class Visit>
void for_each_test_function(const ArrayXd& w, double exponent, const QuasiMetricSpace& s,
                            const TestFamilySpec& family, Visit&& visit) {
    const Index n = s.size();
    ArrayXd f(n);
    if (family.ballIndicators || family.dualWeighted) {
        const ArrayXd sigma = family.dualWeighted ? dual_weight(w, exponent) : ArrayXd();
        for (Index c = 0; c < n; ++c) {
            const auto& order = s.neighborOrder(c);
            for (int g = 0; g < s.groupCount(c); ++g) {
                const Index end = s.groupEnd(c, g);
                if (family.ballIndicators) {
                    f.setZero();
                    for (Index k = 0; k < end; ++k) f[order[k]] = 1.0;
                    visit(f);
                }
                if (family.dualWeighted) {
                    f.setZero();
                    for (Index k = 0; k < end; ++k) f[order[k]] = sigma[order[k]];
                    visit(f);
                }
            }
        }
    }
    if (family.pointMasses) {
        for (Index x = 0; x < n; ++x) {
            f.setZero();
            f[x] = 1.0;
            visit(f);
        }
    }
}

}  // namespace

CheckResult weak_type_bound(const ArrayXd& w, double q, const QuasiMetricSpace& s,
                            const TestFamilySpec& family, const std::string& instance) {
    validate_weight(w, s.size());
    if (!(q > 1.0) || !std::isfinite(q))
        throw PreconditionError("weak_type_bound requires 1 < q < infinity");
    const double apq = ap_constant(w, q, s);
    const double theta = 4.0 * s.kappa() * s.kappa() + s.kappa();
    const double rhs = std::pow(2.0 * theta, s.doublingOrder()) * std::pow(apq, 1.0 / q);

    const ArrayXd wmu = w * s.measure();
    const Index n = s.size();
    std::vector<Index> byMf(n);
    double lhs = 0.0;
    for_each_test_function(w, q, s, family, [&](const ArrayXd& f) {
        double norm = 0.0;
        for (Index i = 0; i < n; ++i)
            if (f[i] > 0.0) norm += std::pow(f[i], q) * wmu[i];
        if (norm == 0.0) return;  // zero test function skipped
        norm = std::pow(norm, 1.0 / q);

        const ArrayXd mf = hl_maximal(f, s);
        std::iota(byMf.begin(), byMf.end(), Index{0});
        std::sort(byMf.begin(), byMf.end(), [&](Index a, Index b) { return mf[a] > mf[b]; });
        std::vector<double> prefix(static_cast<size_t>(n) + 1, 0.0);
        for (Index k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + wmu[byMf[k]];
        auto levelSetWeight = [&](double lam) {
            // first position with Mf <= lam in the descending order
            Index lo = 0, hi = n;
            while (lo < hi) {
                const Index mid = (lo + hi) / 2;
                if (mf[byMf[mid]] > lam)
                    lo = mid + 1;
                else
                    hi = mid;
            }
            return prefix[lo];
        };
        // every level of Mf sampled once from both sides
        for (Index k = 0; k < n; ++k) {
            const double level = mf[byMf[k]];
            if (level <= 0.0) break;
            if (k > 0 && mf[byMf[k - 1]] == level) continue;
            for (const double lam : {level * (1.0 - 1e-6), level * (1.0 + 1e-6)})
                lhs = std::max(lhs, lam * std::pow(levelSetWeight(lam), 1.0 / q) / norm);
        }
    });
    return make_check("weak-type", instance, lhs, rhs, {{"q", q}, {"ap", apq}},
                      "lower-estimate");
}

CheckResult buckley_mixed_bound(const ArrayXd& w, double p, const QuasiMetricSpace& s,
                                const TestFamilySpec& family, const std::string& instance,
                                std::optional<double> sigmaAinf) {
    validate_weight(w, s.size());
    if (!(p > 1.0) || !std::isfinite(p))
        throw PreconditionError("buckley_mixed_bound requires 1 < p < infinity");
    const ArrayXd sigma = dual_weight(w, p);
    const double sAinf = sigmaAinf ? *sigmaAinf : fujii_wilson_constant(sigma, s);
    const double tau = tau_structural(s.kappa(), s.doublingOrder());
    const double eps = (p - 1.0) / (1.0 + tau * sAinf);
    const double ap = ap_constant(w, p, s);
    const double kappa = s.kappa();
    const double dmu = s.doublingOrder();
    const double theta = 4.0 * kappa * kappa + kappa;

    const double rhsPow = p * std::pow(2.0, 2.0 * p - 1.0) * std::pow(4.0 * kappa, p * dmu) *
                          std::pow(2.0 * theta, dmu * (p - eps)) * ap * (1.0 + tau * sAinf) /
                          (p - 1.0);
    const double rhs = std::pow(rhsPow, 1.0 / p);
    const double classical = p / (p - 1.0) * std::pow(ap, 1.0 / (p - 1.0));

    const ArrayXd wmu = w * s.measure();
    double lhs = 0.0;
    for_each_test_function(w, p, s, family, [&](const ArrayXd& f) {
        double norm = 0.0;
        for (Index i = 0; i < s.size(); ++i)
            if (f[i] > 0.0) norm += std::pow(f[i], p) * wmu[i];
        if (norm == 0.0) return;
        const ArrayXd mf = hl_maximal(f, s);
        double mnorm = 0.0;
        for (Index i = 0; i < s.size(); ++i) mnorm += std::pow(mf[i], p) * wmu[i];
        lhs = std::max(lhs, std::pow(mnorm / norm, 1.0 / p));
    });
    return make_check(
        "buckley", instance, lhs, rhs,
        {{"p", p},
         {"eps", eps},
         {"ap", ap},
         {"sigma_ainf", sAinf},
         {"classical", classical},
         {"mixed_over_classical", rhs / classical}},
        "lower-estimate; bound assembled as (p*2^(2p-1)*(4*kappa)^(p*Dmu)*(2*theta)^(Dmu*(p-eps))"
        "*[w]_{Ap}*(1+tau*[sigma]_{Ainf})/(p-1))^(1/p) with eps=(p-1)/(1+tau*[sigma]_{Ainf})");
}

std::vector<CheckResult> check_localization(const ArrayXd& f, const LocalBasis& basis,
                                            const CZConfig& config, const QuasiMetricSpace& s,
                                            const std::string& instance) {
    const CZDecomposition dec = cz_decompose(f, basis, config, s);
    std::vector<CheckResult> out;
    const std::map<std::string, double> base{
        {"lambda", config.lambda}, {"L", config.localization}, {"N", config.scale}};
    if (dec.balls.empty()) {
        out.push_back(make_check("localization", instance, 0.0, 0.0, base, "vacuous: empty family"));
        return out;
    }
    const ArrayXd maximal = local_maximal(f, basis, s);
    const double jump = config.localization * config.lambda;
    for (size_t i = 0; i < dec.balls.size(); ++i) {
        const CZBall& b = dec.balls[i];
        // f restricted to the theta^2-dilate
        const Ball wide = dilate(b.ball, config.theta * config.theta);
        ArrayXd masked = ArrayXd::Zero(s.size());
        const auto& order = s.neighborOrder(wide.center);
        const Index wideCount = s.memberCount(wide);
        for (Index k = 0; k < wideCount; ++k) masked[order[k]] = f[order[k]];
        const ArrayXd maskedMax = local_maximal(masked, basis, s);

        auto params = base;
        params["center"] = static_cast<double>(b.ball.center);
        params["radius"] = b.ball.radius;
        const Index starCount = s.memberCount(dilate(b.ball, config.theta));
        double lhs = 0.0, rhs = 0.0;
        bool any = false;
        double worst = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < starCount; ++k) {
            const Index x = order[k];
            if (!(maximal[x] > jump)) continue;
            any = true;
            const double slack = maskedMax[x] - maximal[x];
            if (slack < worst) {
                worst = slack;
                lhs = maximal[x];
                rhs = maskedMax[x];
            }
        }
        out.push_back(make_check("localization", instance + "#" + std::to_string(i), lhs, rhs,
                                 params, any ? "" : "vacuous: no point above the jump level"));
    }
    return out;
}

}  // namespace weightlab
