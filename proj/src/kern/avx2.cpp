// AVX2 kernel variants. This translation unit is compiled with -mavx2 and is
// only entered after the dispatcher has confirmed CPU support.
//
// Elementwise kernels replay the scalar rounding sequence exactly (mul/add/
// sub/div/sqrt, no FMA), so they are bit-identical to the reference. The
// reductions accumulate in four lanes and differ from the sequential sum
// only by reassociation.

#include "tcat/kern/kernels.hpp"

#if defined(TCAT_HAVE_AVX2) && defined(__AVX2__)

#include <immintrin.h>

namespace tcat::kern::avx2 {

namespace {

inline double hsum(__m256d v) noexcept {
    double lane[4];
    _mm256_storeu_pd(lane, v);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) noexcept {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_squares(const double* x, std::size_t n) noexcept {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

void axpy(std::size_t n, double alpha, const double* x, double* y) noexcept {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(std::size_t n, double alpha, double* x) noexcept {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

double sparse_dense_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                        const double* dense) noexcept {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= nnz; i += 4) {
        const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
        const __m256d vd = _mm256_i32gather_pd(dense, vi, 8);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(val + i), vd));
    }
    double s = hsum(acc);
    for (; i < nnz; ++i) s += val[i] * dense[idx[i]];
    return s;
}

void adam_update(std::size_t n, double* p, double* m, double* v, const double* g, double lr,
                 double beta1, double beta2, double eps, double corr1, double corr2) noexcept {
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d vo1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d vo2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vc1 = _mm256_set1_pd(corr1);
    const __m256d vc2 = _mm256_set1_pd(corr2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vg = _mm256_loadu_pd(g + i);
        __m256d vm = _mm256_loadu_pd(m + i);
        __m256d vv = _mm256_loadu_pd(v + i);
        vm = _mm256_add_pd(_mm256_mul_pd(vb1, vm), _mm256_mul_pd(vo1, vg));
        vv = _mm256_add_pd(_mm256_mul_pd(vb2, vv), _mm256_mul_pd(vo2, _mm256_mul_pd(vg, vg)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_div_pd(vm, vc1);
        const __m256d vhat = _mm256_div_pd(vv, vc2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
    }
    if (i < n) scalar::adam_update(n - i, p + i, m + i, v + i, g + i, lr, beta1, beta2, eps, corr1, corr2);
}

} // namespace tcat::kern::avx2

#endif // TCAT_HAVE_AVX2 && __AVX2__
