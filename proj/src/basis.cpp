#include "trom/basis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "trom/errors.hpp"

namespace trom {

Matrix local_core(const TuckerFactors& f, const GeneralizedIndex& e) {
    if (e.length != f.s.rows())
        throw UsageError("generalized index length " + std::to_string(e.length) +
                         " does not match parameter count " + std::to_string(f.s.rows()));
    // S^T e through the sparse support, then contract the core's third mode
    Vector se = Vector::Zero(f.s.cols());
    for (const auto& [s, w] : e.weights) se += w * f.s.row(s).transpose();
    const auto [nbar, tbar, pbar] = f.core.dims();
    Matrix c_mu = Matrix::Zero(nbar, tbar);
    for (Index r = 0; r < pbar; ++r) c_mu += se[r] * f.core.slice(r);
    return c_mu;
}

LocalBasis local_basis(const TuckerFactors& f, const GeneralizedIndex& e, Index n, Vector mu) {
    const auto [nbar, tbar, pbar] = f.core.dims();
    if (n < 1 || n > std::min(nbar, tbar))
        throw UsageError("local basis size " + std::to_string(n) + " outside [1, " +
                         std::to_string(std::min(nbar, tbar)) + "]");

    const Matrix c_mu = local_core(f, e);
    ThinSvd svd = thin_svd(c_mu, n);

    // rank-deficient local cores are truncated at numerical rank
    Index keep = 0;
    const double tol = rank_tolerance(nbar, tbar, svd.sigma.size() ? svd.sigma[0] : 0.0);
    while (keep < n && svd.sigma[keep] > tol) ++keep;
    if (keep == 0) keep = 1;  // degenerate core: keep the leading direction

    LocalBasis basis;
    basis.u_core = svd.u.leftCols(keep);
    basis.sigma = svd.sigma.head(keep);
    basis.v = f.t * svd.v.leftCols(keep);
    basis.u = f.w * basis.u_core;  // the only N-dimensional operation
    basis.mu = std::move(mu);
    basis.weighting = f.weighting;
    basis.achieved_rank = keep;
    return basis;
}

MonolithicBasis monolithic_basis(const Tensor3& x, std::shared_ptr<const SpdOperator> m,
                                 Index n) {
    const Index cols = x.t() * x.p();
    if (n < 1 || n > std::min(x.n(), cols))
        throw UsageError("monolithic basis size out of range");

    const bool weighted = m && !m->is_identity();
    Matrix rx;
    if (weighted) {
        if (m->dim() != x.n()) throw UsageError("weight dimension mismatch");
        rx = m->cholesky().apply(x.unfold1_view());
    } else {
        rx = x.unfold1_view();
    }

    MonolithicBasis basis;
    if (cols > 4 * x.n()) {
        // Gram route: eigen-decomposition of the small N x N matrix
        const Matrix gram = rx * rx.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
        if (es.info() != Eigen::Success)
            throw NumericalError("eigendecomposition of the Gram matrix failed");
        const Index nn = x.n();
        basis.sigma = Vector(nn);
        Matrix ubar(nn, nn);
        for (Index i = 0; i < nn; ++i) {  // ascending -> descending
            basis.sigma[i] = std::sqrt(std::max(es.eigenvalues()[nn - 1 - i], 0.0));
            ubar.col(i) = es.eigenvectors().col(nn - 1 - i);
        }
        // same deterministic sign convention as thin_svd
        for (Index j = 0; j < ubar.cols(); ++j) {
            Index imax = 0;
            double amax = -1.0;
            for (Index i = 0; i < ubar.rows(); ++i)
                if (std::abs(ubar(i, j)) > amax) {
                    amax = std::abs(ubar(i, j));
                    imax = i;
                }
            if (ubar(imax, j) < 0.0) ubar.col(j) = -ubar.col(j);
        }
        basis.u = ubar.leftCols(n);
    } else {
        const ThinSvd svd = thin_svd(rx);
        basis.sigma = svd.sigma;
        basis.u = svd.u.leftCols(n);
    }
    if (weighted) {
        basis.u = m->cholesky().solve(basis.u);
        basis.weighting = std::move(m);
    }
    return basis;
}

double projection_error(const Matrix& q, const Matrix& u, const SpdOperator& m) {
    if (q.rows() != m.dim()) throw UsageError("trajectory dimension mismatch");
    if (u.cols() == 0) {
        const Matrix rq = m.cholesky().apply(q);
        return rq.norm();
    }
    if (u.rows() != q.rows()) throw UsageError("basis dimension mismatch");
    const Matrix mu_ = m.apply(u);
    const double ortho = (u.transpose() * mu_ - Matrix::Identity(u.cols(), u.cols()))
                             .cwiseAbs()
                             .maxCoeff();
    if (ortho > 1e-8)
        throw NumericalError("basis is not M-orthonormal (deviation " + std::to_string(ortho) +
                             ")");
    const Matrix resid = q - u * (mu_.transpose() * q);
    return m.cholesky().apply(resid).norm();
}

Matrix cotangent_lift_snapshots(const Matrix& q_snaps, const Matrix& p_snaps) {
    if (q_snaps.rows() != p_snaps.rows() || q_snaps.cols() != p_snaps.cols())
        throw UsageError("cotangent lift requires matching snapshot shapes");
    Matrix lifted(q_snaps.rows(), 2 * q_snaps.cols());
    lifted.leftCols(q_snaps.cols()) = q_snaps;
    lifted.rightCols(p_snaps.cols()) = p_snaps;
    return lifted;
}

std::pair<Matrix, Matrix> curl_enrich(const Matrix& u_e, const Matrix& u_b,
                                      const Matrix& delta, const SpdOperator& m_e,
                                      const SpdOperator& m_b) {
    if (delta.cols() != u_e.rows() || delta.rows() != u_b.rows())
        throw UsageError("curl operator shape does not match the bases");

    Matrix cat_e(u_e.rows(), u_e.cols() + u_b.cols());
    cat_e.leftCols(u_e.cols()) = u_e;
    cat_e.rightCols(u_b.cols()) = delta.transpose() * m_b.apply(u_b);

    Matrix cat_b(u_b.rows(), u_b.cols() + u_e.cols());
    cat_b.leftCols(u_b.cols()) = u_b;
    cat_b.rightCols(u_e.cols()) = delta * u_e;

    return {m_orthonormalize(cat_e, m_e), m_orthonormalize(cat_b, m_b)};
}

}  // namespace trom
