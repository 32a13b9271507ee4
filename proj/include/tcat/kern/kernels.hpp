#pragma once

#include <cstddef>
#include <cstdint>

// Double-precision arithmetic kernels behind the numeric hot loops (TF-IDF
// row scaling, KNN distances, LSTM mat-vec products, Adam updates).
//
// Every kernel exists as a scalar reference implementation and, on x86-64,
// an AVX2 variant. The top-level functions dispatch once at startup based on
// CPU support; TCAT_KERNELS=scalar|avx2 overrides the choice. The two
// backends are equivalence-tested against each other: elementwise kernels
// (axpy, scale, adam_update) produce bit-identical results, reductions (dot,
// sum_squares, sparse_dense_dot) agree to a tight relative tolerance because
// the SIMD variants accumulate in four lanes.

namespace tcat::kern {

enum class Backend { scalar, avx2 };

/// Backend selected for this process.
Backend active_backend();
const char* backend_name(Backend b);

/// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

/// sum_i x[i]^2
double sum_squares(const double* x, std::size_t n);

/// y[i] += alpha * x[i]
void axpy(std::size_t n, double alpha, const double* x, double* y);

/// x[i] *= alpha
void scale(std::size_t n, double alpha, double* x);

/// sum_i val[i] * dense[idx[i]] — one sparse row against a dense vector.
double sparse_dense_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                        const double* dense);

/// Fused Adam update over one parameter array:
///   m = beta1*m + (1-beta1)*g
///   v = beta2*v + (1-beta2)*g^2
///   p -= lr * (m/corr1) / (sqrt(v/corr2) + eps)
/// corr1 = 1-beta1^t and corr2 = 1-beta2^t are the bias-correction terms,
/// precomputed by the caller.
void adam_update(std::size_t n, double* p, double* m, double* v, const double* g, double lr,
                 double beta1, double beta2, double eps, double corr1, double corr2);

// Direct access to both backends, used by the equivalence tests.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
void axpy(std::size_t n, double alpha, const double* x, double* y) noexcept;
void scale(std::size_t n, double alpha, double* x) noexcept;
double sparse_dense_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                        const double* dense) noexcept;
void adam_update(std::size_t n, double* p, double* m, double* v, const double* g, double lr,
                 double beta1, double beta2, double eps, double corr1, double corr2) noexcept;
} // namespace scalar

#if defined(TCAT_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
void axpy(std::size_t n, double alpha, const double* x, double* y) noexcept;
void scale(std::size_t n, double alpha, double* x) noexcept;
double sparse_dense_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                        const double* dense) noexcept;
void adam_update(std::size_t n, double* p, double* m, double* v, const double* g, double lr,
                 double beta1, double beta2, double eps, double corr1, double corr2) noexcept;
} // namespace avx2
#endif

} // namespace tcat::kern
