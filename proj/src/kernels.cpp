#include "pdsplit/kernels.hpp"

#include <atomic>

namespace pdsplit::kernels {

namespace scalar_ref {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = dot(a + i * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i) axpy(x[i], a + i * cols, y, cols);
}

}  // namespace scalar_ref

#if defined(__x86_64__) || defined(_M_X64)
#define PDSPLIT_HAVE_AVX2_TU 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scal(double alpha, double* x, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace avx2
#endif

namespace {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    void (*gemv)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*gemv_t)(const double*, std::size_t, std::size_t, const double*, double*);
};

constexpr KernelTable kScalarTable{scalar_ref::dot, scalar_ref::axpy, scalar_ref::scal,
                                   scalar_ref::gemv, scalar_ref::gemv_t};

#ifdef PDSPLIT_HAVE_AVX2_TU
constexpr KernelTable kAvx2Table{avx2::dot, avx2::axpy, avx2::scal, avx2::gemv, avx2::gemv_t};
#endif

bool cpu_has_avx2() {
#ifdef PDSPLIT_HAVE_AVX2_TU
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};

const KernelTable* table() {
    const KernelTable* t = g_table.load(std::memory_order_acquire);
    if (t) return t;
#ifdef PDSPLIT_HAVE_AVX2_TU
    if (cpu_has_avx2()) {
        g_backend.store(Backend::Avx2, std::memory_order_relaxed);
        g_table.store(&kAvx2Table, std::memory_order_release);
        return &kAvx2Table;
    }
#endif
    g_backend.store(Backend::Scalar, std::memory_order_relaxed);
    g_table.store(&kScalarTable, std::memory_order_release);
    return &kScalarTable;
}

}  // namespace

Backend active_backend() {
    table();
    return g_backend.load(std::memory_order_relaxed);
}

bool backend_available(Backend b) {
    switch (b) {
        case Backend::Scalar: return true;
        case Backend::Avx2: return cpu_has_avx2();
    }
    return false;
}

bool set_backend(Backend b) {
    if (!backend_available(b)) return false;
    switch (b) {
        case Backend::Scalar: g_table.store(&kScalarTable); break;
#ifdef PDSPLIT_HAVE_AVX2_TU
        case Backend::Avx2: g_table.store(&kAvx2Table); break;
#else
        case Backend::Avx2: return false;
#endif
    }
    g_backend.store(b);
    return true;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

double dot(const double* a, const double* b, std::size_t n) { return table()->dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { table()->axpy(alpha, x, y, n); }
void scal(double alpha, double* x, std::size_t n) { table()->scal(alpha, x, n); }
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    table()->gemv(a, rows, cols, x, y);
}
void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    table()->gemv_t(a, rows, cols, x, y);
}

}  // namespace pdsplit::kernels
