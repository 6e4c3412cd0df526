#include "trom/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "trom/errors.hpp"

namespace trom {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void apply_sign_convention(Matrix& u, Matrix* v) {
    for (Index j = 0; j < u.cols(); ++j) {
        Index imax = 0;
        double amax = -1.0;
        for (Index i = 0; i < u.rows(); ++i) {
            const double a = std::abs(u(i, j));
            if (a > amax) {  // strict: lowest index wins ties
                amax = a;
                imax = i;
            }
        }
        if (u(imax, j) < 0.0) {
            u.col(j) = -u.col(j);
            if (v) v->col(j) = -v->col(j);
        }
    }
}

}  // namespace

double rank_tolerance(Index rows, Index cols, double sigma1) {
    return static_cast<double>(std::max(rows, cols)) * kEps * sigma1;
}

// ---------------------------------------------------------------------------
// CholeskyFactor

CholeskyFactor CholeskyFactor::from_dense(Matrix r) {
    CholeskyFactor f;
    f.upper_ = std::move(r);
    return f;
}

CholeskyFactor CholeskyFactor::from_diagonal(Vector sqrt_diag) {
    CholeskyFactor f;
    f.diagonal_ = std::move(sqrt_diag);
    return f;
}

Index CholeskyFactor::dim() const {
    return is_diagonal() ? diagonal_.size() : upper_.rows();
}

Matrix CholeskyFactor::dense() const {
    if (is_diagonal()) return Matrix(diagonal_.asDiagonal());
    return upper_;
}

Matrix CholeskyFactor::apply(const Matrix& x) const {
    if (is_diagonal()) return diagonal_.asDiagonal() * x;
    return upper_.triangularView<Eigen::Upper>() * x;
}

Matrix CholeskyFactor::solve(const Matrix& b) const {
    if (is_diagonal()) return diagonal_.cwiseInverse().asDiagonal() * b;
    return upper_.triangularView<Eigen::Upper>().solve(b);
}

Matrix CholeskyFactor::solve_transpose(const Matrix& b) const {
    if (is_diagonal()) return diagonal_.cwiseInverse().asDiagonal() * b;
    return upper_.transpose().triangularView<Eigen::Lower>().solve(b);
}

Matrix CholeskyFactor::apply_from_right_inverse(const Matrix& a) const {
    if (is_diagonal()) return a * diagonal_.cwiseInverse().asDiagonal();
    // solve z R = a  <=>  R^T z^T = a^T
    Matrix zt = upper_.transpose().triangularView<Eigen::Lower>().solve(Matrix(a.transpose()));
    return zt.transpose();
}

// ---------------------------------------------------------------------------
// SpdOperator

SpdOperator SpdOperator::dense(Matrix m) {
    if (m.rows() != m.cols()) throw UsageError("SPD operator must be square");
    const Index n = m.rows();
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > 1e-12 * scale)
        throw InvalidDataError("SPD operator is not symmetric (relative asymmetry " +
                               std::to_string(asym / scale) + ")");
    // symmetrize exactly so the factorization sees one consistent matrix
    m = 0.5 * (m + m.transpose());

    // row-oriented upper Cholesky, failing pivot reported
    Matrix r = Matrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
        double d = m(k, k);
        for (Index i = 0; i < k; ++i) d -= r(i, k) * r(i, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NotPositiveDefiniteError(k, "Cholesky pivot " + std::to_string(k) +
                                                  " is not positive (" + std::to_string(d) + ")");
        r(k, k) = std::sqrt(d);
        for (Index j = k + 1; j < n; ++j) {
            double v = m(k, j);
            for (Index i = 0; i < k; ++i) v -= r(i, k) * r(i, j);
            r(k, j) = v / r(k, k);
        }
    }

    SpdOperator op;
    op.dim_ = n;
    op.dense_ = std::move(m);
    op.chol_ = CholeskyFactor::from_dense(std::move(r));
    return op;
}

SpdOperator SpdOperator::diagonal(Vector d) {
    for (Index i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0) || !std::isfinite(d[i]))
            throw NotPositiveDefiniteError(i, "diagonal entry " + std::to_string(i) +
                                                  " is not positive");
    }
    SpdOperator op;
    op.dim_ = d.size();
    op.chol_ = CholeskyFactor::from_diagonal(d.cwiseSqrt());
    op.diag_ = std::move(d);
    return op;
}

SpdOperator SpdOperator::identity(Index n) { return diagonal(Vector::Ones(n)); }

bool SpdOperator::is_identity() const {
    return is_diagonal() && (diag_.array() == 1.0).all();
}

Matrix SpdOperator::full() const {
    if (is_diagonal()) return Matrix(diag_.asDiagonal());
    return dense_;
}

Vector SpdOperator::apply(const Vector& x) const {
    if (is_diagonal()) return diag_.asDiagonal() * x;
    return dense_ * x;
}

Matrix SpdOperator::apply(const Matrix& x) const {
    if (is_diagonal()) return diag_.asDiagonal() * x;
    return dense_ * x;
}

double SpdOperator::inner(const Vector& x, const Vector& y) const {
    return x.dot(apply(y));
}

CholeskyFactor cholesky(const SpdOperator& m) { return m.cholesky(); }

// ---------------------------------------------------------------------------
// SVD / QR

ThinSvd thin_svd(const Matrix& a, std::optional<Index> rank_limit) {
    if (!a.allFinite()) throw InvalidDataError("thin_svd input has non-finite entries");
    const Index full = std::min(a.rows(), a.cols());
    if (rank_limit && (*rank_limit < 1 || *rank_limit > full))
        throw UsageError("rank_limit " + std::to_string(*rank_limit) +
                         " outside [1, " + std::to_string(full) + "]");

    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("SVD did not converge (rows=" + std::to_string(a.rows()) +
                             ", cols=" + std::to_string(a.cols()) + ")");

    ThinSvd out;
    const Index keep = rank_limit.value_or(full);
    out.u = svd.matrixU().leftCols(keep);
    out.v = svd.matrixV().leftCols(keep);
    out.sigma = svd.singularValues().head(keep);
    apply_sign_convention(out.u, &out.v);
    return out;
}

Matrix m_orthonormalize(const Matrix& a, const SpdOperator& m) {
    if (a.rows() != m.dim()) throw UsageError("m_orthonormalize dimension mismatch");
    if (a.cols() == 0) throw EmptyBasisError("m_orthonormalize called with no columns");

    double max_norm = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        max_norm = std::max(max_norm, std::sqrt(m.inner(a.col(j), a.col(j))));
    const double drop_tol = rank_tolerance(a.rows(), a.cols(), max_norm);

    std::vector<Index> kept;
    Matrix q(a.rows(), a.cols());
    Index nq = 0;
    for (Index j = 0; j < a.cols(); ++j) {
        Vector v = a.col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (Index i = 0; i < nq; ++i) v -= m.inner(q.col(i), v) * q.col(i);
        const double norm = std::sqrt(m.inner(v, v));
        if (norm <= drop_tol) continue;  // numerically dependent column
        q.col(nq) = v / norm;
        kept.push_back(j);
        ++nq;
    }
    if (nq == 0) throw EmptyBasisError("all columns are numerically zero in the M norm");
    return q.leftCols(nq);
}

PivotedQr pivoted_qr(const Matrix& a) {
    if (!a.allFinite()) throw InvalidDataError("pivoted_qr input has non-finite entries");
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    const Index k = std::min(a.rows(), a.cols());

    PivotedQr out;
    out.q = Matrix(qr.householderQ()).leftCols(k);
    out.r = qr.matrixR().topRows(k).triangularView<Eigen::Upper>();
    // (A*P).col(j) = A.col(indices[j]), so indices lists columns in pivot order
    const auto& perm = qr.colsPermutation().indices();
    out.pivots.reserve(static_cast<size_t>(k));
    for (Index j = 0; j < k; ++j) out.pivots.push_back(perm[j]);
    return out;
}

double weighted_spectral_norm(const Matrix& a, const SpdOperator& m) {
    if (a.rows() != a.cols()) throw UsageError("weighted_spectral_norm needs a square matrix");
    if (a.rows() != m.dim()) throw UsageError("weighted_spectral_norm dimension mismatch");
    const CholeskyFactor& r = m.cholesky();
    const Matrix z = r.apply_from_right_inverse(r.apply(a));  // R A R^{-1}
    Eigen::BDCSVD<Matrix> svd(z);
    return svd.singularValues()(0);
}

Matrix weighted_best_rank_r(const Matrix& a, Index r, const SpdOperator& m) {
    if (r < 0 || r > std::min(a.rows(), a.cols()))
        throw UsageError("weighted_best_rank_r rank out of range");
    if (a.rows() != m.dim()) throw UsageError("weighted_best_rank_r dimension mismatch");
    if (r == 0) return Matrix::Zero(a.rows(), a.cols());
    const CholeskyFactor& chol = m.cholesky();
    const ThinSvd svd = thin_svd(chol.apply(a), r);
    const Matrix br = svd.u * svd.sigma.asDiagonal() * svd.v.transpose();
    return chol.solve(br);
}

}  // namespace trom
