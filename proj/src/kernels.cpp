#include "nsocp/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace nsocp::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* row = A + i * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += vi * row[c];
  }
}

}  // namespace scalar

namespace {

struct Table {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*gemv_t)(const double*, std::size_t, std::size_t, const double*, double*);
};

Table scalar_table() { return {Isa::Scalar, scalar::dot, scalar::axpy, scalar::gemv_t}; }

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(NSOCP_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(NSOCP_HAVE_NEON_TU)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Table table_for(Isa isa) {
#if defined(NSOCP_HAVE_AVX2_TU)
  if (isa == Isa::Avx2) return {Isa::Avx2, avx2::dot, avx2::axpy, avx2::gemv_t};
#endif
#if defined(NSOCP_HAVE_NEON_TU)
  if (isa == Isa::Neon) return {Isa::Neon, neon::dot, neon::axpy, neon::gemv_t};
#endif
  (void)isa;
  return scalar_table();
}

Table pick_default() {
  const char* env = std::getenv("NSOCP_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_table();
  if (cpu_has(Isa::Avx2)) return table_for(Isa::Avx2);
  if (cpu_has(Isa::Neon)) return table_for(Isa::Neon);
  return scalar_table();
}

Table& active() {
  static Table t = pick_default();
  return t;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }

double nrm2(const double* a, std::size_t n) { return std::sqrt(active().dot(a, a, n)); }

void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }

void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y) {
  active().gemv_t(A, rows, cols, v, y);
}

Isa active_isa() { return active().isa; }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return cpu_has(isa); }

bool set_isa(Isa isa) {
  if (!cpu_has(isa)) return false;
  active() = table_for(isa);
  return true;
}

}  // namespace nsocp::kernels
