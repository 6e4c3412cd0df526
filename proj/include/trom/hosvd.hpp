#pragma once

#include <array>
#include <memory>

#include "trom/linalg.hpp"
#include "trom/tensor.hpp"
#include "trom/types.hpp"

namespace trom {

/// Tucker factorization X ~ core x1 W x2 T x3 S with a truncation
/// certificate: delta^2 is the sum of squared discarded singular values of
/// the three mode unfoldings (of R X in the weighted case) and
/// epsilon = delta / |X| in the matching norm.
struct TuckerFactors {
    Tensor3 core;  // (Nbar, Tbar, Pbar)
    Matrix w;      // N x Nbar, W^T M W = I (or W^T W = I unweighted)
    Matrix t;      // T x Tbar
    Matrix s;      // P x Pbar
    double delta = 0.0;
    double epsilon = 0.0;
    std::shared_ptr<const SpdOperator> weighting;  // null = Euclidean

    std::array<Index, 3> ranks() const { return core.dims(); }
    std::array<Index, 3> data_dims() const { return {w.rows(), t.rows(), s.rows()}; }
    bool weighted() const { return weighting != nullptr; }
};

TuckerFactors hosvd(const Tensor3& x, std::array<Index, 3> ranks);

TuckerFactors weighted_hosvd(const Tensor3& x, std::shared_ptr<const SpdOperator> m,
                             std::array<Index, 3> ranks);

Tensor3 reconstruct(const TuckerFactors& f);

/// |X - reconstruct(f)| in the Frobenius norm, or the M-weighted norm when f
/// carries a weighting.
double reconstruction_error(const Tensor3& x, const TuckerFactors& f);

}  // namespace trom
