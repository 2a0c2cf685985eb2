#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "elixa/kernels.hpp"

using namespace elixa::kernels;

namespace {

std::vector<float> random_vec(std::mt19937_64& rng, size_t n) {
  std::uniform_real_distribution<float> dist(-10.0f, 10.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar reference kernels compute the expected values") {
  std::vector<float> a{1.0f, 2.0f, 3.0f};
  std::vector<float> b{4.0f, 0.0f, 3.0f};
  CHECK(ref::squared_l2(a.data(), b.data(), 3) == doctest::Approx(13.0).epsilon(1e-6));

  std::vector<float> y{1.0f, 1.0f, 1.0f};
  ref::axpy(y.data(), 2.0f, a.data(), 3);
  CHECK(y[0] == doctest::Approx(3.0f));
  CHECK(y[2] == doctest::Approx(7.0f));

  ref::scale(y.data(), 0.5f, 3);
  CHECK(y[0] == doctest::Approx(1.5f));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!avx2::supported()) {
    MESSAGE("AVX2 unavailable; equivalence suite skipped");
    return;
  }
  std::mt19937_64 rng(99);
  // Lengths around the 8-lane boundary exercise the tail handling.
  for (size_t n : {1, 3, 7, 8, 9, 15, 16, 17, 64, 100, 1000}) {
    for (int trial = 0; trial < 20; ++trial) {
      auto a = random_vec(rng, n);
      auto b = random_vec(rng, n);
      float rs = ref::squared_l2(a.data(), b.data(), n);
      float vs = avx2::squared_l2(a.data(), b.data(), n);
      CHECK(std::abs(rs - vs) <= 1e-4f * (1.0f + std::abs(rs)));

      auto y1 = random_vec(rng, n);
      auto y2 = y1;
      ref::axpy(y1.data(), 1.5f, a.data(), n);
      avx2::axpy(y2.data(), 1.5f, a.data(), n);
      for (size_t i = 0; i < n; ++i) {
        CHECK(std::abs(y1[i] - y2[i]) <= 1e-5f * (1.0f + std::abs(y1[i])));
      }

      ref::scale(y1.data(), 0.25f, n);
      avx2::scale(y2.data(), 0.25f, n);
      for (size_t i = 0; i < n; ++i) {
        CHECK(std::abs(y1[i] - y2[i]) <= 1e-5f * (1.0f + std::abs(y1[i])));
      }
    }
  }
}

TEST_CASE("backend selection falls back when unsupported") {
  Backend prev = active_backend();

  Backend got = select_backend(Backend::Scalar);
  CHECK(got == Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  CHECK(std::string(backend_name()) == "scalar");

  got = select_backend(Backend::Avx2);
  if (avx2::supported()) {
    CHECK(got == Backend::Avx2);
    CHECK(std::string(backend_name()) == "avx2");
  } else {
    CHECK(got == Backend::Scalar);
  }

  got = select_backend(Backend::Auto);
  CHECK(got == (avx2::supported() ? Backend::Avx2 : Backend::Scalar));

  // Dispatched calls match the reference regardless of backend.
  std::mt19937_64 rng(7);
  auto a = random_vec(rng, 37);
  auto b = random_vec(rng, 37);
  float rs = ref::squared_l2(a.data(), b.data(), 37);
  float ds = squared_l2(a.data(), b.data(), 37);
  CHECK(std::abs(rs - ds) <= 1e-4f * (1.0f + std::abs(rs)));

  select_backend(prev);
}
