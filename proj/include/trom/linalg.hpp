#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "trom/types.hpp"

namespace trom {

/// Upper-triangular Cholesky factor R with positive diagonal, M = R^T R.
/// A diagonal mass matrix keeps a diagonal factor (O(N) applies/solves).
class CholeskyFactor {
public:
    static CholeskyFactor from_dense(Matrix r);
    static CholeskyFactor from_diagonal(Vector sqrt_diag);

    Index dim() const;
    bool is_diagonal() const { return diagonal_.size() > 0; }
    Matrix dense() const;

    Matrix apply(const Matrix& x) const;           // R * x
    Matrix solve(const Matrix& b) const;           // R y = b
    Matrix solve_transpose(const Matrix& b) const; // R^T y = b
    Matrix apply_from_right_inverse(const Matrix& a) const;  // a * R^{-1}

private:
    Matrix upper_;    // empty when diagonal
    Vector diagonal_; // sqrt of the diagonal mass entries
};

/// Symmetric positive definite weight (mass) matrix. Construction certifies
/// symmetry and positive definiteness (the Cholesky factorization is kept).
class SpdOperator {
public:
    static SpdOperator dense(Matrix m);
    static SpdOperator diagonal(Vector d);
    static SpdOperator identity(Index n);

    Index dim() const { return dim_; }
    bool is_diagonal() const { return diag_.size() > 0; }
    bool is_identity() const;

    Matrix full() const;
    Vector apply(const Vector& x) const;
    Matrix apply(const Matrix& x) const;
    const CholeskyFactor& cholesky() const { return chol_; }

    /// x^T M y inner product.
    double inner(const Vector& x, const Vector& y) const;

private:
    SpdOperator() = default;
    Index dim_ = 0;
    Matrix dense_;
    Vector diag_;
    CholeskyFactor chol_;
};

CholeskyFactor cholesky(const SpdOperator& m);

/// Deterministic thin SVD: orthonormal u/v columns, nonincreasing sigma, and
/// a fixed sign convention (largest-magnitude entry of each left vector is
/// positive, ties broken by lowest index).
struct ThinSvd {
    Matrix u;
    Vector sigma;
    Matrix v;
};

ThinSvd thin_svd(const Matrix& a, std::optional<Index> rank_limit = std::nullopt);

/// M-orthonormalize the columns of a (two-pass Gram-Schmidt in the M inner
/// product). Numerically dependent columns are dropped; throws EmptyBasisError
/// when nothing survives.
Matrix m_orthonormalize(const Matrix& a, const SpdOperator& m);

struct PivotedQr {
    Matrix q;
    Matrix r;
    std::vector<Index> pivots;  // selected columns in pivot order
};

PivotedQr pivoted_qr(const Matrix& a);

/// |A|_{M,2} = largest singular value of R A R^{-1}.
double weighted_spectral_norm(const Matrix& a, const SpdOperator& m);

/// Best rank-r approximation of A in the M-weighted Frobenius norm:
/// R^{-1} * truncate_r(svd(R A)).
Matrix weighted_best_rank_r(const Matrix& a, Index r, const SpdOperator& m);

/// Numerical-rank tolerance used everywhere truncation meets tiny singular
/// values: max(rows, cols) * eps * sigma_1.
double rank_tolerance(Index rows, Index cols, double sigma1);

}  // namespace trom
