#pragma once

#include <memory>
#include <utility>

#include "trom/hosvd.hpp"
#include "trom/interp.hpp"
#include "trom/linalg.hpp"

namespace trom {

/// Parameter-adapted basis U = W U_c with inherited (M-)orthonormality.
/// u_core is kept so reduced operators can be assembled without touching any
/// N-dimensional quantity beyond the single product W U_c.
struct LocalBasis {
    Matrix u;       // N x n
    Vector sigma;   // n local singular values, nonincreasing
    Matrix v;       // Tbar-level right factor lift, T x n
    Matrix u_core;  // Nbar x n
    Vector mu;      // query parameter (may be empty)
    std::shared_ptr<const SpdOperator> weighting;  // null = Euclidean
    Index achieved_rank = 0;  // = n unless the local core was rank-deficient
};

/// Parameter-independent basis from the (weighted) SVD of the mode-1
/// unfolding. sigma keeps the full singular value list of the unfolding.
struct MonolithicBasis {
    Matrix u;      // N x n
    Vector sigma;  // all singular values
    std::shared_ptr<const SpdOperator> weighting;
};

/// C_mu = core x3 (S^T e), an Nbar x Tbar matrix.
Matrix local_core(const TuckerFactors& f, const GeneralizedIndex& e);

LocalBasis local_basis(const TuckerFactors& f, const GeneralizedIndex& e, Index n,
                       Vector mu = Vector());

/// m == nullptr means the Euclidean inner product. When the trailing dimension
/// T*P is much larger than N the SVD is computed through the N x N Gram
/// matrix of the weighted unfolding.
MonolithicBasis monolithic_basis(const Tensor3& x, std::shared_ptr<const SpdOperator> m,
                                 Index n);

/// || (I - U U^T M) q ||_M over the trajectory columns. u may have zero
/// columns (returns the full trajectory norm).
double projection_error(const Matrix& q, const Matrix& u, const SpdOperator& m);

/// Horizontal concatenation [Q | P]; one shared basis then serves both
/// canonical fields block-diagonally.
Matrix cotangent_lift_snapshots(const Matrix& q_snaps, const Matrix& p_snaps);

/// Enrich each field basis with the discrete curl image of the other and
/// re-orthonormalize against the respective mass matrices.
std::pair<Matrix, Matrix> curl_enrich(const Matrix& u_e, const Matrix& u_b,
                                      const Matrix& delta, const SpdOperator& m_e,
                                      const SpdOperator& m_b);

}  // namespace trom
