#pragma once

#include "weightlab/types.hpp"

#include <vector>

namespace weightlab {

/// Dyadic decomposition of the unit cube [0,1]^d down to a fixed depth K.
/// Cubes live on levels 0 (the root) through K (the cells). Cell indices are
/// bit-interleaved (Morton order), so the descendants of the cube (level, i)
/// are exactly the contiguous index range [i << d(K-level), (i+1) << d(K-level));
/// for d = 1 this is the natural left-to-right order.
///
/// The cell measure defaults to Lebesgue (2^{-dK} per cell); any strictly
/// positive vector is accepted. Cube measures are additive over children.
class DyadicGrid {
public:
    DyadicGrid(int dim, int depth, ArrayXd cellMeasure);
    static DyadicGrid lebesgue(int dim, int depth);

    int dim() const { return dim_; }
    int depth() const { return depth_; }
    Index cellCount() const { return Index{1} << (dim_ * depth_); }
    Index cubeCount(int level) const { return Index{1} << (dim_ * level); }
    bool isLebesgue() const { return lebesgue_; }

    const ArrayXd& cellMeasure() const { return cellMeasure_; }
    double totalMeasure() const { return levelMeasure_[0][0]; }
    double cubeMeasure(const Cube& q) const { return levelMeasure_[q.level][q.index]; }

    Cube root() const { return Cube{0, 0}; }
    void validate(const Cube& q) const;
    Cube parent(const Cube& q) const;
    /// First child cube index at level q.level + 1; children occupy
    /// [childrenBegin, childrenBegin + 2^d).
    Index childrenBegin(const Cube& q) const { return q.index << dim_; }
    int childCount() const { return 1 << dim_; }

    Index cellBegin(const Cube& q) const { return q.index << (dim_ * (depth_ - q.level)); }
    Index cellEnd(const Cube& q) const { return (q.index + 1) << (dim_ * (depth_ - q.level)); }
    bool contains(const Cube& outer, const Cube& inner) const;

    /// Ancestor of a cell at the given level.
    Index ancestorOfCell(Index cell, int level) const { return cell >> (dim_ * (depth_ - level)); }

    /// Integer coordinates of a cell (each in [0, 2^K)), Morton-decoded.
    std::vector<Index> cellCoordinates(Index cell) const;
    /// Geometric center of a cell in [0,1]^d.
    std::vector<double> cellCenter(Index cell) const;

    /// Per-level aggregates of a per-cell quantity (summed over descendants):
    /// result[level][i] = sum of cellValues over the cells of cube (level, i).
    std::vector<ArrayXd> aggregate(const ArrayXd& cellValues) const;

private:
    int dim_ = 1;
    int depth_ = 0;
    bool lebesgue_ = false;
    ArrayXd cellMeasure_;
    std::vector<ArrayXd> levelMeasure_;
};

}  // namespace weightlab
