#pragma once

#include <array>
#include <vector>

#include "trom/types.hpp"

namespace trom::delaunay {

/// Delaunay triangulation of a point set in dimension 1, 2 or 3, built by
/// incremental insertion (Bowyer-Watson) with epsilon-guarded determinant
/// predicates. Intended for small scattered sets (hundreds of points).
class Triangulation {
public:
    /// points: dim x count, dim in {1,2,3}, at least dim+1 affinely
    /// independent points required for dim >= 2.
    explicit Triangulation(const Matrix& points);

    int dim() const { return dim_; }

    struct Location {
        std::vector<Index> vertices;  // dim+1 point indices
        Vector coords;                // matching barycentric coordinates
    };

    /// Containing-simplex lookup; throws OutOfHullError when mu lies outside
    /// the convex hull of the points.
    Location locate(const Vector& mu) const;

    /// Simplices as (dim+1)-tuples of point indices (super vertices removed).
    const std::vector<std::array<Index, 4>>& simplices() const { return cells_; }

private:
    void build_1d(const Matrix& points);
    void build_nd(const Matrix& points);

    int dim_ = 0;
    Matrix points_;                            // original points
    std::vector<Index> order_;                 // 1d: sorted point order
    std::vector<std::array<Index, 4>> cells_;  // nd: vertex ids per simplex
};

}  // namespace trom::delaunay
