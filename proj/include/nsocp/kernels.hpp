#pragma once

#include <cstddef>
#include <string_view>

// Dense inner loops shared by the cone and model code. Each kernel has a
// scalar reference version and, where the CPU supports it, a vectorised one.
// The variant is picked once at first use; NSOCP_SIMD=scalar forces the
// reference path.
namespace nsocp::kernels {

enum class Isa { Scalar, Avx2, Neon };

double dot(const double* a, const double* b, std::size_t n);
double nrm2(const double* a, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y[0..cols) += sum_i v[i] * A[i, :] for row-major A (rows x cols)
void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y);

Isa active_isa();
std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
// Testing hook. Returns false if the requested variant is not available.
bool set_isa(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y);
}  // namespace scalar

#if defined(NSOCP_HAVE_AVX2_TU)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y);
}  // namespace avx2
#endif

#if defined(NSOCP_HAVE_NEON_TU)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y);
}  // namespace neon
#endif

}  // namespace nsocp::kernels
