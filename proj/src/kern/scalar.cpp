#include "tcat/kern/kernels.hpp"

#include <cmath>

// Reference implementations. Plain sequential loops; the dispatch layer and
// the AVX2 variants are measured against these.

namespace tcat::kern::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_squares(const double* x, std::size_t n) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy(std::size_t n, double alpha, const double* x, double* y) noexcept {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(std::size_t n, double alpha, double* x) noexcept {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sparse_dense_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                        const double* dense) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < nnz; ++i) acc += val[i] * dense[idx[i]];
    return acc;
}

void adam_update(std::size_t n, double* p, double* m, double* v, const double* g, double lr,
                 double beta1, double beta2, double eps, double corr1, double corr2) noexcept {
    const double om1 = 1.0 - beta1;
    const double om2 = 1.0 - beta2;
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = g[i];
        m[i] = beta1 * m[i] + om1 * gi;
        v[i] = beta2 * v[i] + om2 * (gi * gi);
        const double mhat = m[i] / corr1;
        const double vhat = v[i] / corr2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace tcat::kern::scalar
