#include "trom/tensor.hpp"

#include <cmath>
#include <cstring>

#include "trom/errors.hpp"
#include "trom/interp.hpp"
#include "trom/kernels.hpp"
#include "trom/linalg.hpp"

namespace trom {

namespace {

void check_dims(Index n, Index t, Index p) {
    if (n <= 0 || t <= 0 || p <= 0)
        throw UsageError("Tensor3 dims must be positive, got (" + std::to_string(n) +
                         ", " + std::to_string(t) + ", " + std::to_string(p) + ")");
}

}  // namespace

Tensor3::Tensor3(Index n, Index t, Index p) : n_(n), t_(t), p_(p) {
    check_dims(n, t, p);
    data_.assign(static_cast<size_t>(n * t * p), 0.0);
}

Tensor3::Tensor3(Index n, Index t, Index p, std::vector<double> data)
    : n_(n), t_(t), p_(p), data_(std::move(data)) {
    check_dims(n, t, p);
    if (static_cast<Index>(data_.size()) != n * t * p)
        throw UsageError("Tensor3 data length " + std::to_string(data_.size()) +
                         " does not match dims product " + std::to_string(n * t * p));
    for (size_t q = 0; q < data_.size(); ++q) {
        if (!std::isfinite(data_[q]))
            throw InvalidDataError("Tensor3 entry " + std::to_string(q) + " is not finite");
    }
}

Eigen::Map<const Matrix> Tensor3::slice(Index s) const {
    if (s < 0 || s >= p_) throw UsageError("slice index out of range");
    return Eigen::Map<const Matrix>(data_.data() + n_ * t_ * s, n_, t_);
}

Unfolding mode_k_unfold(const Tensor3& x, int mode) {
    Unfolding out;
    out.mode = mode;
    const Index n = x.n(), t = x.t(), p = x.p();
    switch (mode) {
        case 1:
            out.matrix = x.unfold1_view();
            break;
        case 2:
            out.matrix.resize(t, n * p);
            kernels::unfold2_omp(x.data().data(), n, t, p, out.matrix.data());
            break;
        case 3:
            out.matrix.resize(p, n * t);
            kernels::unfold3_omp(x.data().data(), n, t, p, out.matrix.data());
            break;
        default:
            throw UsageError("unfold mode must be 1, 2 or 3, got " + std::to_string(mode));
    }
    return out;
}

Tensor3 mode_k_fold(const Matrix& m, int mode, std::array<Index, 3> dims) {
    const Index n = dims[0], t = dims[1], p = dims[2];
    check_dims(n, t, p);
    const Index expect_rows = (mode == 1) ? n : (mode == 2) ? t : p;
    const Index expect_cols = n * t * p / expect_rows;
    if (mode < 1 || mode > 3)
        throw UsageError("fold mode must be 1, 2 or 3, got " + std::to_string(mode));
    if (m.rows() != expect_rows || m.cols() != expect_cols)
        throw UsageError("fold shape mismatch: got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " +
                         std::to_string(expect_rows) + "x" + std::to_string(expect_cols));
    std::vector<double> data(static_cast<size_t>(n * t * p));
    switch (mode) {
        case 1:
            std::memcpy(data.data(), m.data(), sizeof(double) * data.size());
            break;
        case 2:
            kernels::fold2_omp(m.data(), n, t, p, data.data());
            break;
        case 3:
            kernels::fold3_omp(m.data(), n, t, p, data.data());
            break;
    }
    return Tensor3(n, t, p, std::move(data));
}

Tensor3 mode_product(const Tensor3& x, const Matrix& a, int mode) {
    if (mode < 1 || mode > 3)
        throw UsageError("mode_product mode must be 1, 2 or 3, got " + std::to_string(mode));
    const Index dim_k = (mode == 1) ? x.n() : (mode == 2) ? x.t() : x.p();
    if (a.cols() != dim_k)
        throw UsageError("mode_product dimension mismatch: factor has " +
                         std::to_string(a.cols()) + " columns, mode-" +
                         std::to_string(mode) + " dim is " + std::to_string(dim_k));
    const Index r = a.rows();
    std::array<Index, 3> odims = x.dims();
    odims[static_cast<size_t>(mode - 1)] = r;
    std::vector<double> data(static_cast<size_t>(odims[0] * odims[1] * odims[2]));
    kernels::mode_product_omp(x.data().data(), x.n(), x.t(), x.p(), mode, a.data(), r,
                              data.data());
    return Tensor3(odims[0], odims[1], odims[2], std::move(data));
}

Matrix contract_parameter(const Tensor3& x, const GeneralizedIndex& e) {
    if (e.length != x.p())
        throw UsageError("generalized index length " + std::to_string(e.length) +
                         " does not match parameter count " + std::to_string(x.p()));
    std::vector<Index> support;
    std::vector<double> weights;
    support.reserve(e.weights.size());
    weights.reserve(e.weights.size());
    for (const auto& [s, w] : e.weights) {
        if (s < 0 || s >= x.p()) throw UsageError("generalized index support out of range");
        support.push_back(s);
        weights.push_back(w);
    }
    Matrix out(x.n(), x.t());
    kernels::contract_parameter_omp(x.data().data(), x.n(), x.t(), x.p(), support.data(),
                                    weights.data(), static_cast<Index>(support.size()),
                                    out.data());
    return out;
}

double frobenius_norm(const Tensor3& x) {
    return std::sqrt(kernels::sumsq_omp(x.data().data(), x.n(), x.t(), x.p()));
}

double weighted_frobenius_norm(const Tensor3& x, const SpdOperator& m) {
    if (m.dim() != x.n())
        throw UsageError("weight dimension " + std::to_string(m.dim()) +
                         " does not match state dim " + std::to_string(x.n()));
    if (m.is_identity()) return frobenius_norm(x);
    if (m.is_diagonal()) {
        // row scaling by sqrt(d_i); per-slice partials combined in order
        const Vector r = m.cholesky().dense().diagonal();
        double total = 0.0;
        const Index nt = x.n() * x.t();
        for (Index s = 0; s < x.p(); ++s) {
            double partial = 0.0;
            const double* xs = x.data().data() + nt * s;
            for (Index q = 0; q < nt; ++q) {
                const double v = r[q % x.n()] * xs[q];
                partial += v * v;
            }
            total += partial;
        }
        return std::sqrt(total);
    }
    const Tensor3 rx = mode_product(x, m.cholesky().dense(), 1);
    return frobenius_norm(rx);
}

}  // namespace trom
