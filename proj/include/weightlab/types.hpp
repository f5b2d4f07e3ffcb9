#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace weightlab {

using Index = Eigen::Index;
using ArrayXd = Eigen::ArrayXd;
using MatrixXd = Eigen::MatrixXd;

/// Invalid input data: asymmetric distance matrix, nonpositive measure,
/// weight with a zero entry, malformed grid, and the like.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quantitative precondition of an operation fails: exponent outside its
/// admissible range, level below a decomposition threshold, p <= 1, ...
/// The message names the violated bound.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Open ball: center index plus positive radius. Membership is always strict,
/// members(B) = { y : d(center, y) < radius }.
struct Ball {
    Index center = 0;
    double radius = 0.0;
};

/// Same center, radius scaled by `factor`.
inline Ball dilate(const Ball& b, double factor) {
    if (!(factor > 0.0))
        throw PreconditionError("dilate: factor must be positive, got " + std::to_string(factor));
    return Ball{b.center, b.radius * factor};
}

/// Dyadic cube: level 0 is the root, level K are the cells.
struct Cube {
    int level = 0;
    Index index = 0;
};

}  // namespace weightlab
