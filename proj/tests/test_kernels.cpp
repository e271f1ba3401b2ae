#include <random>
#include <vector>

#include "doctest.h"
#include "fdsec/kernels.hpp"

using namespace fdsec::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return v;
}

std::vector<const Table*> variants() {
  std::vector<const Table*> v;
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (const Table* t = table_for(isa)) v.push_back(t);
  return v;
}

}  // namespace

TEST_CASE("scalar reference is always present") {
  REQUIRE(table_for(Isa::scalar) != nullptr);
  CHECK(reference().isa == Isa::scalar);
  MESSAGE("active kernels: " << isa_name(active().isa));
}

TEST_CASE("vector dot matches the reference") {
  for (const Table* t : variants()) {
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 31, 64, 129, 1000}) {
      const auto x = random_vec(n, 1 + n), y = random_vec(n, 1000 + n);
      const double ref = scalar::dot(x.data(), y.data(), n);
      double mag = 0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
      // reordered summation: error bounded by n ulps of the absolute sum
      CHECK(std::abs(t->dot(x.data(), y.data(), n) - ref) <= (n + 1) * 2.3e-16 * mag);
    }
  }
}

TEST_CASE("vector axpy matches the reference") {
  for (const Table* t : variants()) {
    for (std::size_t n : {0, 1, 3, 4, 9, 16, 33, 250}) {
      const auto x = random_vec(n, 7 + n);
      auto y1 = random_vec(n, 70 + n);
      auto y2 = y1;
      scalar::axpy(-0.37, x.data(), y1.data(), n);
      t->axpy(-0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);
    }
  }
}

TEST_CASE("unaligned pointers") {
  for (const Table* t : variants()) {
    const auto x = random_vec(40, 5), y = random_vec(40, 6);
    for (std::size_t off = 0; off < 4; ++off) {
      const double ref = scalar::dot(x.data() + off, y.data() + off, 33);
      CHECK(t->dot(x.data() + off, y.data() + off, 33) == doctest::Approx(ref).epsilon(1e-13));
    }
  }
}
