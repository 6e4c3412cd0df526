#pragma once

#include <array>
#include <vector>

#include "trom/types.hpp"

namespace trom {

class SpdOperator;
struct GeneralizedIndex;

/// Dense order-3 snapshot array, dims (N, T, P) = (state, time, parameter),
/// stored column-major (first index fastest). Immutable after construction;
/// construction validates that every entry is finite.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(Index n, Index t, Index p);  // zero-filled
    Tensor3(Index n, Index t, Index p, std::vector<double> data);

    Index n() const { return n_; }
    Index t() const { return t_; }
    Index p() const { return p_; }
    std::array<Index, 3> dims() const { return {n_, t_, p_}; }
    Index size() const { return n_ * t_ * p_; }

    double operator()(Index i, Index alpha, Index s) const {
        return data_[i + n_ * alpha + n_ * t_ * s];
    }

    const std::vector<double>& data() const { return data_; }

    /// Zero-copy mode-1 unfolding, N x (T*P); column j = alpha + s*T.
    Eigen::Map<const Matrix> unfold1_view() const {
        return Eigen::Map<const Matrix>(data_.data(), n_, t_ * p_);
    }

    /// Zero-copy view of parameter slice s as an N x T matrix.
    Eigen::Map<const Matrix> slice(Index s) const;

private:
    Index n_ = 0, t_ = 0, p_ = 0;
    std::vector<double> data_;
};

/// Mode-k matricization of a Tensor3.
struct Unfolding {
    int mode = 0;
    Matrix matrix;
};

Unfolding mode_k_unfold(const Tensor3& x, int mode);
Tensor3 mode_k_fold(const Matrix& m, int mode, std::array<Index, 3> dims);

/// Contract mode k with a (transposed-factor style): result_(k) = a * x_(k).
Tensor3 mode_product(const Tensor3& x, const Matrix& a, int mode);

/// result[i, alpha] = sum_s x[i, alpha, s] * e_s.
Matrix contract_parameter(const Tensor3& x, const GeneralizedIndex& e);

double frobenius_norm(const Tensor3& x);

/// |X|_M with the weight applied along the state mode: equals the Frobenius
/// norm of X with the Cholesky factor R of M applied along mode 1.
double weighted_frobenius_norm(const Tensor3& x, const SpdOperator& m);

}  // namespace trom
