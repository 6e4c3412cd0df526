#include "trom/kernels.hpp"

#include <cstring>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace trom::kernels {

namespace {

inline void unfold2_cols(const double* x, Index n, Index t, Index p, double* out,
                         Index s_begin, Index s_end) {
    (void)p;
    for (Index s = s_begin; s < s_end; ++s) {
        for (Index i = 0; i < n; ++i) {
            const Index col = i + s * n;
            for (Index alpha = 0; alpha < t; ++alpha) {
                out[alpha + col * t] = x[i + n * alpha + n * t * s];
            }
        }
    }
}

inline void unfold3_cols(const double* x, Index n, Index t, Index p, double* out,
                         Index alpha_begin, Index alpha_end) {
    for (Index alpha = alpha_begin; alpha < alpha_end; ++alpha) {
        for (Index i = 0; i < n; ++i) {
            const Index col = i + alpha * n;
            for (Index s = 0; s < p; ++s) {
                out[s + col * p] = x[i + n * alpha + n * t * s];
            }
        }
    }
}

inline void fold2_cols(const double* m, Index n, Index t, Index p, double* out,
                       Index s_begin, Index s_end) {
    (void)p;
    for (Index s = s_begin; s < s_end; ++s) {
        for (Index i = 0; i < n; ++i) {
            const Index col = i + s * n;
            for (Index alpha = 0; alpha < t; ++alpha) {
                out[i + n * alpha + n * t * s] = m[alpha + col * t];
            }
        }
    }
}

inline void fold3_cols(const double* m, Index n, Index t, Index p, double* out,
                       Index alpha_begin, Index alpha_end) {
    for (Index alpha = alpha_begin; alpha < alpha_end; ++alpha) {
        for (Index i = 0; i < n; ++i) {
            const Index col = i + alpha * n;
            for (Index s = 0; s < p; ++s) {
                out[i + n * alpha + n * t * s] = m[s + col * p];
            }
        }
    }
}

// One (alpha, s) column of the mode-1 product: out(:, alpha, s) = a * x(:, alpha, s).
inline void mode1_col(const double* x, Index n, const double* a, Index r,
                      const double* xcol, double* ocol) {
    (void)x;
    for (Index k = 0; k < r; ++k) ocol[k] = 0.0;
    for (Index j = 0; j < n; ++j) {
        const double xj = xcol[j];
        const double* acol = a + j * r;
        for (Index k = 0; k < r; ++k) ocol[k] += acol[k] * xj;
    }
}

inline void mode_product_slices(const double* x, Index n, Index t, Index p, int mode,
                                const double* a, Index r, double* out,
                                Index s_begin, Index s_end) {
    switch (mode) {
        case 1:
            for (Index s = s_begin; s < s_end; ++s) {
                for (Index alpha = 0; alpha < t; ++alpha) {
                    mode1_col(x, n, a, r, x + n * alpha + n * t * s,
                              out + r * alpha + r * t * s);
                }
            }
            break;
        case 2:
            // out[i, k, s] = sum_alpha a[k, alpha] * x[i, alpha, s]
            for (Index s = s_begin; s < s_end; ++s) {
                double* oslice = out + n * r * s;
                const double* xslice = x + n * t * s;
                for (Index k = 0; k < r; ++k)
                    for (Index i = 0; i < n; ++i) oslice[i + n * k] = 0.0;
                for (Index alpha = 0; alpha < t; ++alpha) {
                    const double* xcol = xslice + n * alpha;
                    for (Index k = 0; k < r; ++k) {
                        const double w = a[k + r * alpha];
                        double* ocol = oslice + n * k;
                        for (Index i = 0; i < n; ++i) ocol[i] += w * xcol[i];
                    }
                }
            }
            break;
        case 3:
            // out[i, alpha, k] = sum_s a[k, s] * x[i, alpha, s]; parallel range
            // runs over output slices k here.
            for (Index k = s_begin; k < s_end; ++k) {
                double* oslice = out + n * t * k;
                for (Index q = 0; q < n * t; ++q) oslice[q] = 0.0;
                for (Index s = 0; s < p; ++s) {
                    const double w = a[k + r * s];
                    const double* xslice = x + n * t * s;
                    for (Index q = 0; q < n * t; ++q) oslice[q] += w * xslice[q];
                }
            }
            break;
    }
}

}  // namespace

void unfold2_serial(const double* x, Index n, Index t, Index p, double* out) {
    unfold2_cols(x, n, t, p, out, 0, p);
}

void unfold2_omp(const double* x, Index n, Index t, Index p, double* out) {
#pragma omp parallel for schedule(static)
    for (Index s = 0; s < p; ++s) unfold2_cols(x, n, t, p, out, s, s + 1);
}

void unfold3_serial(const double* x, Index n, Index t, Index p, double* out) {
    unfold3_cols(x, n, t, p, out, 0, t);
}

void unfold3_omp(const double* x, Index n, Index t, Index p, double* out) {
#pragma omp parallel for schedule(static)
    for (Index alpha = 0; alpha < t; ++alpha) unfold3_cols(x, n, t, p, out, alpha, alpha + 1);
}

void fold2_serial(const double* m, Index n, Index t, Index p, double* out) {
    fold2_cols(m, n, t, p, out, 0, p);
}

void fold2_omp(const double* m, Index n, Index t, Index p, double* out) {
#pragma omp parallel for schedule(static)
    for (Index s = 0; s < p; ++s) fold2_cols(m, n, t, p, out, s, s + 1);
}

void fold3_serial(const double* m, Index n, Index t, Index p, double* out) {
    fold3_cols(m, n, t, p, out, 0, t);
}

void fold3_omp(const double* m, Index n, Index t, Index p, double* out) {
#pragma omp parallel for schedule(static)
    for (Index alpha = 0; alpha < t; ++alpha) fold3_cols(m, n, t, p, out, alpha, alpha + 1);
}

void mode_product_serial(const double* x, Index n, Index t, Index p, int mode,
                         const double* a, Index r, double* out) {
    const Index range = (mode == 3) ? r : p;
    mode_product_slices(x, n, t, p, mode, a, r, out, 0, range);
}

void mode_product_omp(const double* x, Index n, Index t, Index p, int mode,
                      const double* a, Index r, double* out) {
    const Index range = (mode == 3) ? r : p;
#pragma omp parallel for schedule(static)
    for (Index s = 0; s < range; ++s)
        mode_product_slices(x, n, t, p, mode, a, r, out, s, s + 1);
}

void contract_parameter_serial(const double* x, Index n, Index t, Index p,
                               const Index* support, const double* weights,
                               Index nnz, double* out) {
    (void)p;
    const Index nt = n * t;
    for (Index q = 0; q < nt; ++q) out[q] = 0.0;
    for (Index k = 0; k < nnz; ++k) {
        const double w = weights[k];
        const double* xslice = x + nt * support[k];
        for (Index q = 0; q < nt; ++q) out[q] += w * xslice[q];
    }
}

void contract_parameter_omp(const double* x, Index n, Index t, Index p,
                            const Index* support, const double* weights,
                            Index nnz, double* out) {
    (void)p;
    const Index nt = n * t;
#pragma omp parallel for schedule(static)
    for (Index q = 0; q < nt; ++q) {
        double acc = 0.0;
        for (Index k = 0; k < nnz; ++k) acc += weights[k] * x[q + nt * support[k]];
        out[q] = acc;
    }
}

double sumsq_serial(const double* x, Index n, Index t, Index p) {
    double total = 0.0;
    const Index nt = n * t;
    for (Index s = 0; s < p; ++s) {
        double partial = 0.0;
        const double* xslice = x + nt * s;
        for (Index q = 0; q < nt; ++q) partial += xslice[q] * xslice[q];
        total += partial;
    }
    return total;
}

double sumsq_omp(const double* x, Index n, Index t, Index p) {
    const Index nt = n * t;
    std::vector<double> partials(static_cast<size_t>(p), 0.0);
#pragma omp parallel for schedule(static)
    for (Index s = 0; s < p; ++s) {
        double partial = 0.0;
        const double* xslice = x + nt * s;
        for (Index q = 0; q < nt; ++q) partial += xslice[q] * xslice[q];
        partials[static_cast<size_t>(s)] = partial;
    }
    // combine in slice order so the result matches the serial reference
    double total = 0.0;
    for (Index s = 0; s < p; ++s) total += partials[static_cast<size_t>(s)];
    return total;
}

}  // namespace trom::kernels
