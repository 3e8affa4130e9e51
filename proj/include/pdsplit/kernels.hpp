#pragma once

#include <cstddef>

// Dense inner-loop kernels. Every kernel has a scalar reference implementation
// and, on x86-64, an AVX2 variant selected once at startup. The active backend
// can be forced (e.g. to cross-check the two implementations).

namespace pdsplit::kernels {

enum class Backend { Scalar, Avx2 };

/// Backend currently used by the dispatching entry points.
Backend active_backend();

/// Force a backend. Returns false (and leaves the selection unchanged) if the
/// CPU does not support it.
bool set_backend(Backend b);

const char* backend_name(Backend b);

/// True if this build/CPU can run the given backend.
bool backend_available(Backend b);

double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);  // y += alpha*x
void scal(double alpha, double* x, std::size_t n);                   // x *= alpha
/// y = A x, A row-major (rows x cols), x of length cols, y of length rows.
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
/// y = A^T x, A row-major (rows x cols), x of length rows, y of length cols.
void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

// Scalar reference path, always available; the equivalence tests compare the
// dispatched kernels against these.
namespace scalar_ref {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scal(double alpha, double* x, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace scalar_ref

}  // namespace pdsplit::kernels
