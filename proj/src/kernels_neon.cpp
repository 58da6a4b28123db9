#include <arm_neon.h>

#include "nsocp/kernels.hpp"

namespace nsocp::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  float64x2_t acc = vdupq_n_f64(0.0);
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  const float64x2_t va = vdupq_n_f64(alpha);
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (v[r] == 0.0) continue;
    axpy(v[r], A + r * cols, y, cols);
  }
}

}  // namespace nsocp::kernels::neon
