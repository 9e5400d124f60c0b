#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "das/kernels.hpp"

using namespace das::kernels;

namespace {

std::vector<Isa> supported() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (isa_supported(isa)) out.push_back(isa);
  return out;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar is always available and selectable") {
  CHECK(isa_supported(Isa::scalar));
  const Isa before = active().isa;
  CHECK(set_active(Isa::scalar));
  CHECK(active().isa == Isa::scalar);
  CHECK(set_active(before));
}

TEST_CASE("detected ISA is supported") { CHECK(isa_supported(detect_isa())); }

TEST_CASE("scalar kernels on small hand-computed inputs") {
  const auto& k = scalar_table();
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  CHECK(k.dot(a, b, 3) == doctest::Approx(12.0));
  CHECK(k.sum_squares(a, 3) == doctest::Approx(14.0));
  CHECK(k.squared_distance(a, b, 3) == doctest::Approx(9.0 + 49.0 + 9.0));
  double out[3];
  k.axpy_into(out, a, 2.0, b, 3);
  CHECK(out[0] == 9.0);
  CHECK(out[1] == -8.0);
  CHECK(out[2] == 15.0);
  CHECK(k.dot(a, b, 0) == 0.0);
}

TEST_CASE("every supported backend matches the scalar reference") {
  std::mt19937_64 rng(7);
  const auto& ref = scalar_table();
  for (Isa isa : supported()) {
    CAPTURE(to_string(isa));
    const auto& k = table_for(isa);
    CHECK(k.isa == isa);
    for (std::size_t n = 0; n <= 67; ++n) {
      CAPTURE(n);
      const auto a = random_vector(n, rng);
      const auto b = random_vector(n, rng);
      double mag_ab = 0.0, mag_aa = 0.0, mag_d = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        mag_ab += std::abs(a[i] * b[i]);
        mag_aa += a[i] * a[i];
        mag_d += (a[i] - b[i]) * (a[i] - b[i]);
      }
      const double eps = 4.0 * static_cast<double>(n + 1) * 1.2e-16;
      CHECK(std::abs(k.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= eps * mag_ab);
      CHECK(std::abs(k.sum_squares(a.data(), n) - ref.sum_squares(a.data(), n)) <= eps * mag_aa);
      CHECK(std::abs(k.squared_distance(a.data(), b.data(), n) -
                     ref.squared_distance(a.data(), b.data(), n)) <= eps * mag_d);

      std::vector<double> x(n), y(n);
      k.axpy_into(x.data(), a.data(), -0.37, b.data(), n);
      ref.axpy_into(y.data(), a.data(), -0.37, b.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(x[i] - y[i]) <= 2.5e-16 * (std::abs(a[i]) + std::abs(0.37 * b[i])));
    }
  }
}

TEST_CASE("span wrappers route through the active table") {
  const std::vector<double> a{1.0, 1.0, 1.0, 1.0, 1.0};
  const std::vector<double> b{2.0, 2.0, 2.0, 2.0, 2.0};
  CHECK(dot(a, b) == doctest::Approx(10.0));
  CHECK(sum_squares(b) == doctest::Approx(20.0));
  CHECK(squared_distance(a, b) == doctest::Approx(5.0));
  std::vector<double> out(5);
  axpy_into(out, a, 0.5, b);
  for (double v : out) CHECK(v == 2.0);
}
