#include "weightlab/grid.hpp"

#include <cmath>

namespace weightlab {

DyadicGrid::DyadicGrid(int dim, int depth, ArrayXd cellMeasure) : dim_(dim), depth_(depth) {
    if (dim < 1)
        throw StructuralError("grid dimension must be positive");
    if (depth < 0)
        throw StructuralError("grid depth must be nonnegative");
    if (dim * depth >= 40)
        throw StructuralError("grid too large: dim*depth must stay below 40");
    const Index cells = Index{1} << (dim_ * depth_);
    if (cellMeasure.size() != cells)
        throw StructuralError("cell_measure has " + std::to_string(cellMeasure.size()) +
                              " entries, expected " + std::to_string(cells));
    for (Index i = 0; i < cells; ++i)
        if (!(cellMeasure[i] > 0.0) || !std::isfinite(cellMeasure[i]))
            throw StructuralError("cell measure must be strictly positive and finite at cell " +
                                  std::to_string(i));
    cellMeasure_ = std::move(cellMeasure);

    const double lebesgueCell = std::ldexp(1.0, -dim_ * depth_);
    lebesgue_ = (cellMeasure_ == lebesgueCell).all();

    levelMeasure_ = aggregate(cellMeasure_);
}

DyadicGrid DyadicGrid::lebesgue(int dim, int depth) {
    if (dim < 1 || depth < 0 || dim * depth >= 40)
        throw StructuralError("invalid grid shape");
    const Index cells = Index{1} << (dim * depth);
    return DyadicGrid(dim, depth, ArrayXd::Constant(cells, std::ldexp(1.0, -dim * depth)));
}

void DyadicGrid::validate(const Cube& q) const {
    if (q.level < 0 || q.level > depth_ || q.index < 0 || q.index >= cubeCount(q.level))
        throw StructuralError("cube (level " + std::to_string(q.level) + ", index " +
                              std::to_string(q.index) + ") lies outside the grid");
}

Cube DyadicGrid::parent(const Cube& q) const {
    validate(q);
    if (q.level == 0)
        throw StructuralError("the root cube has no parent");
    return Cube{q.level - 1, q.index >> dim_};
}

bool DyadicGrid::contains(const Cube& outer, const Cube& inner) const {
    if (outer.level > inner.level) return false;
    return (inner.index >> (dim_ * (inner.level - outer.level))) == outer.index;
}

std::vector<Index> DyadicGrid::cellCoordinates(Index cell) const {
    std::vector<Index> coord(static_cast<size_t>(dim_), 0);
    // each level contributes one bit per axis, most significant level first
    for (int level = 0; level < depth_; ++level) {
        const Index chunk = (cell >> (dim_ * (depth_ - 1 - level))) & ((Index{1} << dim_) - 1);
        for (int j = 0; j < dim_; ++j)
            coord[j] = (coord[j] << 1) | ((chunk >> j) & 1);
    }
    return coord;
}

std::vector<double> DyadicGrid::cellCenter(Index cell) const {
    const auto coord = cellCoordinates(cell);
    const double h = std::ldexp(1.0, -depth_);
    std::vector<double> x(static_cast<size_t>(dim_));
    for (int j = 0; j < dim_; ++j)
        x[j] = (static_cast<double>(coord[j]) + 0.5) * h;
    return x;
}

std::vector<ArrayXd> DyadicGrid::aggregate(const ArrayXd& cellValues) const {
    if (cellValues.size() != cellCount())
        throw StructuralError("per-cell vector has the wrong size");
    std::vector<ArrayXd> levels(static_cast<size_t>(depth_) + 1);
    levels[depth_] = cellValues;
    for (int level = depth_ - 1; level >= 0; --level) {
        const ArrayXd& child = levels[level + 1];
        ArrayXd sums = ArrayXd::Zero(cubeCount(level));
        const int kids = childCount();
        for (Index i = 0; i < sums.size(); ++i) {
            double acc = 0.0;
            for (int c = 0; c < kids; ++c) acc += child[(i << dim_) + c];
            sums[i] = acc;
        }
        levels[level] = std::move(sums);
    }
    return levels;
}

}  // namespace weightlab
