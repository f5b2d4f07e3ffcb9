#pragma once

#include "weightlab/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace weightlab {

/// Smallest admissible quasitriangle constant of a distance matrix: the
/// maximum over ordered triples (x, y, z), x != y, of
/// d(x,y) / (d(x,z) + d(z,y)), clamped below at 1.
/// Throws StructuralError on degenerate input (distinct points at distance 0,
/// asymmetry, nonzero diagonal, negative entries).
double smallest_kappa(const MatrixXd& dist);

/// A finite quasimetric measure space: a symmetric distance matrix together
/// with strictly positive point masses. The quasitriangle constant kappa, the
/// doubling constant C_mu and its dyadic order D_mu = log2(C_mu) are derived
/// exactly from the data at construction. Immutable once built.
///
/// Averages over a ball depend only on its member set; per center the member
/// sets are nested prefixes of the distance-sorted point order, so one
/// representative radius per distinct prefix (the "canonical" radius: the
/// midpoint between consecutive distinct distances, or largest distance + 1
/// past the diameter) turns every supremum over "all balls" into an exact
/// finite maximum.
class QuasiMetricSpace {
public:
    /// Build from raw data. A user-supplied kappa is accepted only if it is
    /// at least the derived one.
    static QuasiMetricSpace fromDistanceMatrix(MatrixXd dist, ArrayXd measure,
                                               std::optional<double> kappa = std::nullopt);

    Index size() const { return measure_.size(); }
    double dist(Index i, Index j) const { return dist_(i, j); }
    const MatrixXd& distances() const { return dist_; }
    const ArrayXd& measure() const { return measure_; }
    double pointMeasure(Index i) const { return measure_[i]; }
    double totalMeasure() const { return totalMeasure_; }

    double kappa() const { return kappa_; }
    double doublingConstant() const { return cmu_; }
    double doublingOrder() const { return dmu_; }

    // ---- canonical ball machinery ------------------------------------------

    /// Points sorted by distance from `center`, ties by index.
    const std::vector<Index>& neighborOrder(Index center) const { return tab_[center].order; }
    /// Distances aligned with neighborOrder(center).
    const std::vector<double>& sortedDistances(Index center) const { return tab_[center].sdist; }
    /// muPrefix(center)[k] = measure of the first k points of neighborOrder(center).
    const std::vector<double>& muPrefix(Index center) const { return tab_[center].muPrefix; }

    /// Number of distinct member sets of balls centered at `center`.
    int groupCount(Index center) const { return static_cast<int>(tab_[center].groupEnd.size()); }
    /// Member count of the g-th canonical ball at `center`.
    Index groupEnd(Index center, int g) const { return tab_[center].groupEnd[g]; }
    /// Largest distance realized inside the g-th canonical ball.
    double groupDistance(Index center, int g) const { return tab_[center].groupDist[g]; }
    /// Representative radius of the g-th canonical ball.
    double canonicalRadius(Index center, int g) const { return tab_[center].radius[g]; }
    /// Index of the smallest canonical ball at `center` containing `point`.
    int groupOf(Index center, Index point) const { return tab_[center].groupOfPoint[point]; }
    /// Group of the ball whose member prefix covers sorted rank `k`.
    int groupOfRank(Index center, Index k) const { return tab_[center].groupOfRank[k]; }

    std::vector<double> canonicalRadii(Index center) const;
    /// Union of the per-center families, sorted and deduplicated.
    std::vector<double> canonicalRadii() const;
    std::vector<Ball> canonicalBalls() const;

    /// Number of points y with d(center, y) < radius.
    Index memberCount(const Ball& b) const;
    double ballMeasure(const Ball& b) const;

private:
    struct CenterTable {
        std::vector<Index> order;
        std::vector<double> sdist;
        std::vector<double> muPrefix;    // size n+1
        std::vector<Index> groupEnd;     // one entry per distinct member set
        std::vector<double> groupDist;
        std::vector<double> radius;
        std::vector<int> groupOfPoint;   // indexed by point id
        std::vector<int> groupOfRank;    // indexed by sorted rank
    };

    QuasiMetricSpace() = default;
    void buildTables();
    void deriveDoubling();

    MatrixXd dist_;
    ArrayXd measure_;
    double totalMeasure_ = 0.0;
    double kappa_ = 1.0;
    double cmu_ = 1.0;
    double dmu_ = 0.0;
    std::vector<CenterTable> tab_;
};

/// Exact doubling data of the space: the supremum over every center x and
/// every real radius r > 0 of mu(B(x,2r)) / mu(B(x,r)), and its log2. The
/// ratio is piecewise constant in r with breakpoints at the distances from x
/// and their halves, so the supremum is an exact finite maximum.
std::pair<double, double> doubling_constants(const QuasiMetricSpace& s);

/// mu-average of f over the members of b. Throws on an empty ball.
double ball_average(const ArrayXd& f, const Ball& b, const QuasiMetricSpace& s);

/// Local ball family over a base ball B0: all balls with center inside B0 and
/// radius at most delta * r(B0). Canonical representatives: one ball per
/// realizable member set, radius capped at the bound so every admissible
/// member set appears exactly once. `hat` is the envelope (1+delta)*kappa*B0;
/// every family member is contained in it.
struct LocalBasis {
    Ball base;
    double delta = 1.0;
    Ball hat;
};

LocalBasis make_local_basis(const QuasiMetricSpace& s, const Ball& base, double delta = 1.0);

/// Basis balls at one center: group indices g with groupDistance < delta*r(B0)
/// form a prefix [0, count); the representative radius of group g is
/// min(canonicalRadius, delta*r(B0)).
int basis_group_count(const QuasiMetricSpace& s, const LocalBasis& basis, Index center);
double basis_ball_radius(const QuasiMetricSpace& s, const LocalBasis& basis, Index center, int g);

/// All canonical balls of the local family.
std::vector<Ball> basis_balls(const QuasiMetricSpace& s, const LocalBasis& basis);

}  // namespace weightlab
