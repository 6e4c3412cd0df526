#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trom/types.hpp"

namespace trom {

/// Training parameter samples, one column per sample ([Q]_{is} = [mu_s]_i).
class ParameterSet {
public:
    explicit ParameterSet(Matrix q);  // rejects duplicate columns

    Index dim() const { return q_.rows(); }    // p
    Index count() const { return q_.cols(); }  // P
    const Matrix& matrix() const { return q_; }
    Vector sample(Index s) const { return q_.col(s); }

    static ParameterSet from_csv(const std::string& path);
    void to_csv(const std::string& path) const;

private:
    Matrix q_;
};

/// Sparse weight vector e(mu) of length P blending parameter slices.
struct GeneralizedIndex {
    Index length = 0;
    std::vector<std::pair<Index, double>> weights;  // ascending slice index
    bool rank_deficient = false;  // set when a least-squares system lost rank

    static GeneralizedIndex unit(Index length, Index s);

    Vector dense() const;
    double sum() const;
};

struct GrbfConfig {
    double shape_param = 1.0;               // eps in phi(r) = exp(-(eps r)^2)
    std::optional<Index> neighbors;         // nullopt = global
    std::optional<double> nugget;           // nullopt = default scaling rule

    static GrbfConfig global(double shape_param, std::optional<double> nugget = std::nullopt) {
        return GrbfConfig{shape_param, std::nullopt, nugget};
    }
    static GrbfConfig local(double shape_param, Index k,
                            std::optional<double> nugget = std::nullopt) {
        return GrbfConfig{shape_param, k, nugget};
    }
};

/// Indices of the k nearest training samples, ascending by Euclidean distance;
/// ties resolved toward the lower slice index.
std::vector<Index> knn(const ParameterSet& ps, const Vector& mu, Index k);

/// Piecewise-linear barycentric weights from the Delaunay triangulation of the
/// training samples (p <= 3). Throws OutOfHullError outside the convex hull.
GeneralizedIndex barycentric_index(const ParameterSet& ps, const Vector& mu);

/// Distance-weighted local least-squares weights over k > p nearest
/// neighbors; weights sum to one. Exact hits return the unit vector.
GeneralizedIndex mo_index(const ParameterSet& ps, const Vector& mu, Index k);

/// Gaussian-RBF weights: solves (K + nugget I) e_loc = k(mu) over the
/// neighbor set (or all samples in global mode) and embeds into length P.
GeneralizedIndex grbf_index(const ParameterSet& ps, const Vector& mu, const GrbfConfig& cfg);

/// Index of the training sample equal to mu (within tol), if any.
std::optional<Index> exact_hit(const ParameterSet& ps, const Vector& mu);

}  // namespace trom
