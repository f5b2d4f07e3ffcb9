#pragma once

#include "weightlab/grid.hpp"
#include "weightlab/space.hpp"

#include <optional>

namespace weightlab {

/// Uncentered Hardy-Littlewood maximal function: per point the maximum of the
/// mu-averages of f over every canonical ball containing it. Requires f >= 0.
/// O(n^2) per call after the space's per-center tables (prefix sums along each
/// distance-sorted order plus a suffix maximum per center).
ArrayXd hl_maximal(const ArrayXd& f, const QuasiMetricSpace& s);

/// Dyadic maximal function associated to the cube q0: on each cell of q0 the
/// maximum of the averages of f over the dyadic cubes between the cell and q0.
/// Zero outside q0.
ArrayXd dyadic_maximal(const ArrayXd& f, const Cube& q0, const DyadicGrid& g);

/// Maximal function over the local ball family: sup of |f|-averages over
/// family balls containing the point, zero at points covered by no family
/// ball. The level sets lie inside basis.hat.
ArrayXd local_maximal(const ArrayXd& f, const LocalBasis& basis, const QuasiMetricSpace& s);

/// Maximal function over all lattice-aligned cubes inside [0,1]^d (any
/// position, side length a whole number of cells). Implemented for d <= 2.
ArrayXd all_cube_maximal(const ArrayXd& f, const DyadicGrid& g);

/// Outcome of the radius bound for qualifying local-family balls: any ball B
/// in the family with f-average above lambda must satisfy
///     r(B) <= 2 kappa^2 (1+delta) (avg(f, hat) / lambda)^(1/D_mu) r(B0),
/// and once lambda >= (2 kappa^2 (1+delta) N / delta)^(D_mu) avg(f, hat) also
/// r(B) <= (delta/N) r(B0). Single-scale spaces (D_mu = 0) make the bound
/// inapplicable; that is reported as a vacuous pass.
struct RadiusBoundReport {
    bool pass = true;
    bool vacuous = false;
    Index qualifying = 0;        // number of balls with average > lambda
    double worstSlack = 0.0;     // min over qualifying balls of bound - r(B)
    Ball binding{};              // ball attaining the worst slack
    double boundAtBinding = 0.0;
};

RadiusBoundReport radius_bound_check(const LocalBasis& basis, const ArrayXd& f, double lambda,
                                     const QuasiMetricSpace& s,
                                     std::optional<double> selectionScale = std::nullopt);

}  // namespace weightlab
