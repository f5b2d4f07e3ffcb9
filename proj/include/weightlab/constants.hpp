#pragma once

#include "weightlab/grid.hpp"
#include "weightlab/space.hpp"

#include <string>

namespace weightlab {

/// Weights must be strictly positive and finite everywhere (the dual weight
/// and the logarithmic constant are undefined otherwise). Throws
/// StructuralError naming the first offending index.
void validate_weight(const ArrayXd& w, Index expected);

/// Dual weight sigma = w^(1-p'), 1/p + 1/p' = 1. Dualizing sigma with p'
/// recovers w. Requires 1 < p < infinity and a strictly positive w.
ArrayXd dual_weight(const ArrayXd& w, double p);

/// Muckenhoupt constant: max over the family of
///   (avg of w) * (avg of w^(-1/(p-1)))^(p-1).
/// Always >= 1; exact maximum over the canonical family, no sampling.
double ap_constant(const ArrayXd& w, double p, const QuasiMetricSpace& s);
double ap_constant(const ArrayXd& w, double p, const DyadicGrid& g);  // dyadic cubes

/// Logarithmic (exponential) constant: max over the family of
///   (avg of w) * exp(avg of log(1/w)).
double exp_ainfty_constant(const ArrayXd& w, const QuasiMetricSpace& s);
double exp_ainfty_constant(const ArrayXd& w, const DyadicGrid& g);  // dyadic cubes

enum class CubeFamily { Dyadic, AllCubes };

/// Fujii-Wilson constant over balls: max over canonical balls B of
///   (1/w(B)) * integral over B of M(w restricted to B),
/// with M the uncentered maximal operator of the space.
double fujii_wilson_constant(const ArrayXd& w, const QuasiMetricSpace& s);

/// Fujii-Wilson constant over cubes. The dyadic family pairs with the dyadic
/// maximal operator, the all-cubes family with the lattice-cube maximal
/// operator (d <= 2). Reports should label which family was used.
double fujii_wilson_constant(const ArrayXd& w, const DyadicGrid& g,
                             CubeFamily family = CubeFamily::Dyadic);

/// Dyadic Fujii-Wilson constant localized to q0: the supremum runs over the
/// dyadic subcubes of q0 and only reads w inside q0 (i.e. the constant of
/// w restricted to q0).
double fujii_wilson_dyadic(const ArrayXd& w, const DyadicGrid& g, const Cube& q0);

/// Sharp self-improvement exponent: tau = 6 (32 kappa^2 (4 kappa^2 + kappa)^2)^D_mu
/// and r = 1 + 1/(tau * [w]). r decreases to 1 as the constant grows.
struct RExponent {
    double tau = 0.0;
    double r = 1.0;
};
RExponent r_exponent(double ainfFw, double kappa, double dmu);

/// One row of the constants report for a (weight, p) pair.
struct ConstantsReport {
    std::string instance;
    std::string weight;
    std::string family;    // "balls", "dyadic" or "all-cubes"
    double p = 2.0;
    double ap = 1.0;       // [w]_{A_p}
    double ainfFw = 1.0;   // Fujii-Wilson constant
    double ainfExp = 1.0;  // exponential constant
    double sigmaAinf = 1.0;
    double tau = 0.0;
    double rW = 1.0;       // 1 + 1/(tau * ainfFw)
    double epsOpen = 0.0;  // (p-1)/(1 + tau * sigmaAinf)
};

ConstantsReport constants_report(const ArrayXd& w, double p, const QuasiMetricSpace& s);
/// Grid reports use the Euclidean structural constants (kappa 1, order = dim).
ConstantsReport constants_report(const ArrayXd& w, double p, const DyadicGrid& g,
                                 CubeFamily family = CubeFamily::Dyadic);

}  // namespace weightlab
