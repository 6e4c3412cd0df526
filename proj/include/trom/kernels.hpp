#pragma once

#include "trom/types.hpp"

// Low-level dense kernels over the flat column-major (first-index-fastest)
// snapshot layout data[i + n*alpha + n*t*s]. Each kernel comes in a serial
// reference flavor and an OpenMP flavor. The OpenMP flavors parallelize over
// independent output blocks and combine partial sums in a fixed order, so
// serial and parallel results are bit-identical for any thread count.

namespace trom::kernels {

// X_(2): T x (N*P), element (alpha, i + s*N).
void unfold2_serial(const double* x, Index n, Index t, Index p, double* out);
void unfold2_omp(const double* x, Index n, Index t, Index p, double* out);

// X_(3): P x (N*T), element (s, i + alpha*N).
void unfold3_serial(const double* x, Index n, Index t, Index p, double* out);
void unfold3_omp(const double* x, Index n, Index t, Index p, double* out);

// Inverses of the unfoldings above (mode 1 is a plain memcpy).
void fold2_serial(const double* m, Index n, Index t, Index p, double* out);
void fold2_omp(const double* m, Index n, Index t, Index p, double* out);
void fold3_serial(const double* m, Index n, Index t, Index p, double* out);
void fold3_omp(const double* m, Index n, Index t, Index p, double* out);

// Mode-k product: out_(k) = a * x_(k), where a is r x I_k (row-major access
// is avoided; a is column-major as everywhere else). out has I_k replaced by r.
void mode_product_serial(const double* x, Index n, Index t, Index p, int mode,
                         const double* a, Index r, double* out);
void mode_product_omp(const double* x, Index n, Index t, Index p, int mode,
                      const double* a, Index r, double* out);

// out[i + alpha*n] = sum_s x[i,alpha,s] * w_s over the sparse support
// (support indices ascending; summation in that order).
void contract_parameter_serial(const double* x, Index n, Index t, Index p,
                               const Index* support, const double* weights,
                               Index nnz, double* out);
void contract_parameter_omp(const double* x, Index n, Index t, Index p,
                            const Index* support, const double* weights,
                            Index nnz, double* out);

// Sum of squares with per-slice partials combined serially in slice order.
double sumsq_serial(const double* x, Index n, Index t, Index p);
double sumsq_omp(const double* x, Index n, Index t, Index p);

}  // namespace trom::kernels
