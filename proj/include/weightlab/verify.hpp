#pragma once

#include "weightlab/check.hpp"
#include "weightlab/constants.hpp"
#include "weightlab/czd.hpp"
#include "weightlab/grid.hpp"
#include "weightlab/space.hpp"

#include <optional>
#include <string>
#include <vector>

namespace weightlab {

// ---------------------------------------------------------------------------
// structural constants
// ---------------------------------------------------------------------------

/// 6 (16 kappa^2 (4 kappa^2 + kappa)^2 (1 + 1/delta))^D_mu -- the local sharp
/// exponent denominator; at delta = 1 this is the structural tau of
/// r_exponent.
double tau_local(double kappa, double dmu, double delta);
double tau_structural(double kappa, double dmu);  // delta = 1

/// Largest admissible exponent for the maximal-function reverse Holder bound
/// over a grid: 1 / (2^{d+1} A).
double admissible_eps_maximal(double ainf, int dim);
/// Largest admissible exponent for the sharp reverse Holder bound over cubes:
/// 1 / (2^{d+1} A - 1).
double admissible_eps_sharp(double ainf, int dim);

// ---------------------------------------------------------------------------
// grid-side checks (Lebesgue cell measure required)
// ---------------------------------------------------------------------------

/// avg over q0 of (M_dyadic w)^(1+eps)  <=  2 A (avg over q0 of w)^(1+eps),
/// with A the dyadic Fujii-Wilson constant of w restricted to q0.
/// eps must lie in (0, 1/(2^{d+1} A)]; the error names the admissible max.
CheckResult check_rhi_maximal_dyadic(const ArrayXd& w, const Cube& q0, const DyadicGrid& g,
                                     double eps, const std::string& instance,
                                     std::optional<double> ainf = std::nullopt);

/// avg over q0 of w^(1+eps)  <=  2 (avg over q0 of w)^(1+eps),
/// for eps in (0, 1/(2^{d+1} A - 1)].
CheckResult check_sharp_rhi_cubes(const ArrayXd& w, const Cube& q0, const DyadicGrid& g,
                                  double eps, const std::string& instance,
                                  std::optional<double> ainf = std::nullopt);

/// Empirically largest eps keeping the maximal-function display valid
/// (upward doubling from the admissible maximum, then bisection). `capped`
/// marks weights for which the display never fails below the cap.
struct ProbeResult {
    double epsilon = 0.0;
    bool capped = false;
};
ProbeResult probe_rhi_maximal_dyadic(const ArrayXd& w, const Cube& q0, const DyadicGrid& g,
                                     std::optional<double> ainf = std::nullopt,
                                     double cap = 1e6);

// ---------------------------------------------------------------------------
// space-side checks
// ---------------------------------------------------------------------------

/// avg over hat of (M_local w)^(1+eps)  <=  3 A (avg over hat of w)^(1+eps),
/// A the ball Fujii-Wilson constant, eps in (0, 1/(tau_local A)].
CheckResult check_rhi_maximal_local(const ArrayXd& w, const LocalBasis& basis,
                                    const QuasiMetricSpace& s, double eps,
                                    const std::string& instance,
                                    std::optional<double> ainf = std::nullopt);

/// (avg over B of w^r)^(1/r)  <=  2 (4 kappa)^D_mu avg over (2 kappa B) of w,
/// r = 1 + 1/(tau A).
CheckResult check_weak_rhi(const ArrayXd& w, const Ball& b, const QuasiMetricSpace& s,
                           const std::string& instance,
                           std::optional<double> ainf = std::nullopt);

/// Aggregate of a per-ball sweep: how many balls passed and the result with
/// the smallest slack.
struct SweepSummary {
    Index total = 0;
    Index passed = 0;
    CheckResult worst;
};

/// check_weak_rhi over every canonical ball.
SweepSummary check_weak_rhi_all(const ArrayXd& w, const QuasiMetricSpace& s,
                                const std::string& instance,
                                std::optional<double> ainf = std::nullopt);

/// check_rhi_maximal_local over every canonical ball as the base ball, at the
/// given delta and the maximal admissible eps per ball family.
SweepSummary check_rhi_maximal_local_all(const ArrayXd& w, const QuasiMetricSpace& s, double delta,
                                         const std::string& instance,
                                         std::optional<double> ainf = std::nullopt);

/// Self-improvement exponent eps = (p-1)/(1 + tau [sigma]) and the constant
/// bound [w]_{A_{p-eps}} <= 2^{p-1} (4 kappa)^{p D_mu} [w]_{A_p}.
struct OpenPropertyResult {
    double epsilon = 0.0;
    double sigmaAinf = 1.0;
    CheckResult check;
};
OpenPropertyResult open_property(const ArrayXd& w, double p, const QuasiMetricSpace& s,
                                 const std::string& instance,
                                 std::optional<double> sigmaAinf = std::nullopt);

/// Which test functions enter the operator-norm lower estimates.
struct TestFamilySpec {
    bool ballIndicators = true;
    bool dualWeighted = true;  // sigma restricted to balls
    bool pointMasses = true;
};

/// Lower estimate of the weak-type operator norm against
/// (2 theta)^D_mu [w]_{A_q}^{1/q}. The left side maximizes
/// lambda w({Mf > lambda})^{1/q} / ||f||_{L^q(w)} over the family and a
/// sweep of lambda through every level of Mf.
CheckResult weak_type_bound(const ArrayXd& w, double q, const QuasiMetricSpace& s,
                            const TestFamilySpec& family, const std::string& instance);

/// Lower estimate of ||M||_{L^p(w)} against the assembled mixed bound
///   ( p 2^{2p-1} (4k)^{pD} (2th)^{D(p-eps)} [w]_{A_p} (1+tau[sigma]) / (p-1) )^{1/p},
/// eps = (p-1)/(1 + tau [sigma]). Also records the classical form
/// p' [w]_{A_p}^{1/(p-1)} and the ratio of the two.
CheckResult buckley_mixed_bound(const ArrayXd& w, double p, const QuasiMetricSpace& s,
                                const TestFamilySpec& family, const std::string& instance,
                                std::optional<double> sigmaAinf = std::nullopt);

/// Localization of the family maximal function on a decomposition: for every
/// selected ball and every x in (theta-dilate intersect higher level set),
/// M f(x) <= M (f restricted to the theta^2-dilate)(x). One result per ball.
std::vector<CheckResult> check_localization(const ArrayXd& f, const LocalBasis& basis,
                                            const CZConfig& config, const QuasiMetricSpace& s,
                                            const std::string& instance);

}  // namespace weightlab
