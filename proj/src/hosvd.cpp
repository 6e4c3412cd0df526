#include "trom/hosvd.hpp"

#include <cmath>

#include "trom/errors.hpp"

namespace trom {

namespace {

void check_ranks(const Tensor3& x, std::array<Index, 3> ranks) {
    const std::array<Index, 3> dims = x.dims();
    const char* names[3] = {"state", "time", "parameter"};
    for (int k = 0; k < 3; ++k) {
        if (ranks[k] < 1 || ranks[k] > dims[k])
            throw UsageError(std::string("Tucker rank for the ") + names[k] +
                             " mode must lie in [1, " + std::to_string(dims[k]) +
                             "], got " + std::to_string(ranks[k]));
    }
}

// HOSVD core shared by the plain and weighted variants: one SVD per mode,
// factors from the top left singular vectors, delta^2 from the tails.
TuckerFactors hosvd_of(const Tensor3& x, std::array<Index, 3> ranks) {
    TuckerFactors f;
    double tail_sq = 0.0;
    Matrix* factors[3] = {&f.w, &f.t, &f.s};
    for (int mode = 1; mode <= 3; ++mode) {
        const Unfolding unf = mode_k_unfold(x, mode);
        const ThinSvd svd = thin_svd(unf.matrix);
        const Index keep = ranks[static_cast<size_t>(mode - 1)];
        *factors[mode - 1] = svd.u.leftCols(keep);
        for (Index i = keep; i < svd.sigma.size(); ++i) tail_sq += svd.sigma[i] * svd.sigma[i];
    }
    Tensor3 y = mode_product(x, f.w.transpose(), 1);
    y = mode_product(y, f.t.transpose(), 2);
    f.core = mode_product(y, f.s.transpose(), 3);
    f.delta = std::sqrt(tail_sq);
    const double xnorm = frobenius_norm(x);
    f.epsilon = (xnorm > 0.0) ? f.delta / xnorm : 0.0;
    return f;
}

}  // namespace

TuckerFactors hosvd(const Tensor3& x, std::array<Index, 3> ranks) {
    check_ranks(x, ranks);
    return hosvd_of(x, ranks);
}

TuckerFactors weighted_hosvd(const Tensor3& x, std::shared_ptr<const SpdOperator> m,
                             std::array<Index, 3> ranks) {
    check_ranks(x, ranks);
    if (!m) throw UsageError("weighted_hosvd requires a weight operator");
    if (m->dim() != x.n())
        throw UsageError("weight dimension " + std::to_string(m->dim()) +
                         " does not match state dim " + std::to_string(x.n()));

    const CholeskyFactor& r = m->cholesky();
    const Tensor3 rx = mode_product(x, r.dense(), 1);
    TuckerFactors f = hosvd_of(rx, ranks);
    // Re-weight the state factor: solve R W = Wtilde, making W M-orthonormal.
    f.w = r.solve(f.w);
    f.weighting = std::move(m);
    return f;
}

Tensor3 reconstruct(const TuckerFactors& f) {
    Tensor3 y = mode_product(f.core, f.w, 1);
    y = mode_product(y, f.t, 2);
    return mode_product(y, f.s, 3);
}

double reconstruction_error(const Tensor3& x, const TuckerFactors& f) {
    if (x.dims() != f.data_dims())
        throw UsageError("tensor dims do not match the factorization");
    const Tensor3 xt = reconstruct(f);
    std::vector<double> diff(x.data().size());
    for (size_t q = 0; q < diff.size(); ++q) diff[q] = x.data()[q] - xt.data()[q];
    Tensor3 d(x.n(), x.t(), x.p(), std::move(diff));
    return f.weighted() ? weighted_frobenius_norm(d, *f.weighting) : frobenius_norm(d);
}

}  // namespace trom
