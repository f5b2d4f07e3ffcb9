#pragma once

#include "weightlab/check.hpp"
#include "weightlab/space.hpp"

#include <string>
#include <vector>

namespace weightlab {

/// Parameters of a local decomposition run. All derived constants come from
/// the space's kappa and doubling order:
///   gamma        = ((2 kappa^2 (1+delta) N) / delta)^D_mu   (level threshold)
///   theta        = 4 kappa^2 + kappa                        (covering dilation)
///   localization = (8 kappa^2)^D_mu                         (level jump L)
/// The selection scale N must be at least 2 kappa; the proofs that consume the
/// decomposition use N >= (4 kappa^2 + kappa)^2 or N >= kappa (4 kappa + 1).
struct CZConfig {
    double delta = 1.0;
    double scale = 0.0;  // N
    double lambda = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    double localization = 0.0;
};

/// Throws on a single-scale space (D_mu = 0) or N < 2 kappa.
CZConfig make_cz_config(const QuasiMetricSpace& s, double delta, double scale, double lambda);

struct CZBall {
    Ball ball;
    Index memberCount = 0;
    double average = 0.0;
};

/// Disjoint family of local-basis balls covering the level set after the
/// theta-dilation. Satisfies, on every valid run:
///   i)   every selected ball lies in the level set, and the level set lies
///        in the union of the theta-dilations;
///   ii)  r(B_i) <= (delta/N) r(B0);
///   iii) the f-average of each selected ball exceeds lambda;
///   iv)  every same-center dilate by eta >= 2 that stays in the family has
///        f-average at most lambda.
struct CZDecomposition {
    std::vector<CZBall> balls;
    std::vector<Index> omega;  // members of the level set, ascending
    CZConfig config;
    LocalBasis basis;
};

/// Requires lambda >= gamma * (average of f over the envelope ball); the
/// error message names the required threshold. Empty level set gives the
/// empty family.
CZDecomposition cz_decompose(const ArrayXd& f, const LocalBasis& basis, const CZConfig& config,
                             const QuasiMetricSpace& s);

/// Evaluate the four postconditions (one CheckResult per condition per ball)
/// plus the global covering and disjointness checks. All pass on any
/// decomposition produced by cz_decompose; a corrupted one fails the
/// corresponding item.
std::vector<CheckResult> verify_cz(const CZDecomposition& dec, const ArrayXd& f,
                                   const LocalBasis& basis, const QuasiMetricSpace& s,
                                   const std::string& instance);

}  // namespace weightlab
