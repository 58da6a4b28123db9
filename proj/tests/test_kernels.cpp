#include <cmath>
#include <vector>

#include "doctest.h"
#include "nsocp/kernels.hpp"
#include "nsocp/rng.hpp"

using namespace nsocp;
namespace k = nsocp::kernels;

TEST_SUITE("kernels") {
  TEST_CASE("vector variants match the scalar reference") {
    Rng rng(8);
    const k::Isa before = k::active_isa();
    for (k::Isa isa : {k::Isa::Avx2, k::Isa::Neon}) {
      if (!k::isa_available(isa)) continue;
      REQUIRE(k::set_isa(isa));
      for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 1001u}) {
        const Vec a = rng.normal_vec(static_cast<int>(n)), b = rng.normal_vec(static_cast<int>(n));
        const double ref = k::scalar::dot(a.data(), b.data(), n);
        const double got = k::dot(a.data(), b.data(), n);
        CHECK(std::abs(got - ref) <= 1e-13 * (1 + a.norm() * b.norm()));

        std::vector<double> y1(b.data(), b.data() + n), y2 = y1;
        k::scalar::axpy(0.7, a.data(), y1.data(), n);
        k::axpy(0.7, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (1 + std::abs(y1[i])));

        const std::size_t rows = 3, cols = n;
        const Vec A = rng.normal_vec(static_cast<int>(rows * cols)), v = rng.normal_vec(rows);
        std::vector<double> z1(cols, 0.5), z2 = z1;
        k::scalar::gemv_t(A.data(), rows, cols, v.data(), z1.data());
        k::gemv_t(A.data(), rows, cols, v.data(), z2.data());
        for (std::size_t i = 0; i < cols; ++i) CHECK(std::abs(z1[i] - z2[i]) <= 1e-13 * (1 + std::abs(z1[i])));
      }
    }
    k::set_isa(before);
  }

  TEST_CASE("scalar path can always be selected") {
    const k::Isa before = k::active_isa();
    CHECK(k::set_isa(k::Isa::Scalar));
    CHECK(k::active_isa() == k::Isa::Scalar);
    const double a[3] = {1, 2, 3};
    CHECK(k::dot(a, a, 3) == 14.0);
    CHECK(k::nrm2(a, 3) == doctest::Approx(std::sqrt(14.0)));
    k::set_isa(before);
  }
}
