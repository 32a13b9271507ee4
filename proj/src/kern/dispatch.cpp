#include "tcat/kern/cpu.hpp"
#include "tcat/kern/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace tcat::kern {

namespace {

struct Table {
    Backend backend;
    double (*dot)(const double*, const double*, std::size_t) noexcept;
    double (*sum_squares)(const double*, std::size_t) noexcept;
    void (*axpy)(std::size_t, double, const double*, double*) noexcept;
    void (*scale)(std::size_t, double, double*) noexcept;
    double (*sparse_dense_dot)(const std::uint32_t*, const double*, std::size_t,
                               const double*) noexcept;
    void (*adam_update)(std::size_t, double*, double*, double*, const double*, double, double,
                        double, double, double, double) noexcept;
};

constexpr Table kScalarTable{Backend::scalar,    scalar::dot,   scalar::sum_squares,
                             scalar::axpy,       scalar::scale, scalar::sparse_dense_dot,
                             scalar::adam_update};

#if defined(TCAT_HAVE_AVX2)
constexpr Table kAvx2Table{Backend::avx2, avx2::dot,   avx2::sum_squares,     avx2::axpy,
                           avx2::scale,   avx2::sparse_dense_dot, avx2::adam_update};
#endif

Table select() {
    bool use_avx2 = cpu_has_avx2();
    if (const char* e = std::getenv("TCAT_KERNELS")) {
        if (!std::strcmp(e, "scalar")) use_avx2 = false;
        // "avx2" keeps the CPU-capability requirement; it cannot force an
        // unsupported path.
    }
#if defined(TCAT_HAVE_AVX2)
    if (use_avx2) return kAvx2Table;
#else
    (void)use_avx2;
#endif
    return kScalarTable;
}

const Table& table() {
    static const Table t = select();
    return t;
}

} // namespace

Backend active_backend() { return table().backend; }

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }

double sum_squares(const double* x, std::size_t n) { return table().sum_squares(x, n); }

void axpy(std::size_t n, double alpha, const double* x, double* y) {
    table().axpy(n, alpha, x, y);
}

void scale(std::size_t n, double alpha, double* x) { table().scale(n, alpha, x); }

double sparse_dense_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                        const double* dense) {
    return table().sparse_dense_dot(idx, val, nnz, dense);
}

void adam_update(std::size_t n, double* p, double* m, double* v, const double* g, double lr,
                 double beta1, double beta2, double eps, double corr1, double corr2) {
    table().adam_update(n, p, m, v, g, lr, beta1, beta2, eps, corr1, corr2);
}

} // namespace tcat::kern
