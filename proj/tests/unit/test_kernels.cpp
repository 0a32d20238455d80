#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "hyperocc/kernels.hpp"

using namespace hyperocc::kernels;

namespace {

std::vector<float> randv(std::mt19937& gen, std::size_t n) {
  std::uniform_real_distribution<float> d(-2.0f, 2.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

bool same_bits(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

// Sizes straddle the 8-lane width and its tails.
const std::size_t kSizes[] = {1, 3, 7, 8, 9, 15, 16, 17, 31, 64, 100, 257};

}  // namespace

TEST_CASE("scalar reference computes textbook values") {
  const auto& k = scalar();
  const float a[] = {1, 2, 3}, b[] = {4, -5, 6};
  CHECK(k.dot(a, b, 3) == 12.0f);
  CHECK(k.squared_distance(a, b, 3) == 9.0f + 49.0f + 9.0f);

  const float w[] = {1, 1, 0, 2}, x[] = {1, 1}, bias[] = {1, 0};
  float y[2];
  k.matvec_bias(w, x, bias, y, 2, 2);
  CHECK(y[0] == 3.0f);
  CHECK(y[1] == 2.0f);
  k.matvec_bias(w, x, nullptr, y, 2, 2);
  CHECK(y[0] == 2.0f);

  float m[4] = {0, 0, 0, 0};
  const float u[] = {1, 2}, v[] = {3, 4};
  k.rank1_update(m, u, v, 0.5f, 2, 2);
  CHECK(m[0] == 1.5f);
  CHECK(m[3] == 4.0f);

  float acc[] = {1, 1};
  k.axpy(2.0f, u, acc, 2);
  CHECK(acc[1] == 5.0f);
}

TEST_CASE("adam update: one step from zero moments moves by lr") {
  float p = 0.0f, g = 1.0f, m = 0.0f, v = 0.0f;
  const AdamCoefficients c{1e-4f, 0.9f, 0.999f, 1e-8f, 0.0f, 1.0f - 0.9f, 1.0f - 0.999f};
  scalar().adam_update(&p, &g, &m, &v, 1, c);
  CHECK(p == doctest::Approx(-1e-4).epsilon(1e-5));
}

TEST_CASE("active table honours availability") {
  const auto& a = active();
  if (avx2()) CHECK((a.name == avx2()->name || a.name == scalar().name));
  else CHECK(a.name == scalar().name);
}

TEST_CASE("avx2 elementwise kernels match scalar bit for bit") {
  const KernelTable* simd = avx2();
  if (!simd) {
    MESSAGE("AVX2 kernels unavailable on this CPU; skipped");
    return;
  }
  const auto& ref = scalar();
  std::mt19937 gen(7);
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto x = randv(gen, n);
    auto y1 = randv(gen, n), y2 = y1;
    ref.axpy(0.37f, x.data(), y1.data(), n);
    simd->axpy(0.37f, x.data(), y2.data(), n);
    CHECK(same_bits(y1, y2));

    const std::size_t rows = n % 5 + 1;
    const auto u = randv(gen, rows);
    auto w1 = randv(gen, rows * n), w2 = w1;
    ref.rank1_update(w1.data(), u.data(), x.data(), -1.3f, rows, n);
    simd->rank1_update(w2.data(), u.data(), x.data(), -1.3f, rows, n);
    CHECK(same_bits(w1, w2));

    auto p1 = randv(gen, n), p2 = p1;
    const auto g = randv(gen, n);
    std::vector<float> m1(n, 0.0f), v1(n, 0.0f), m2(n, 0.0f), v2(n, 0.0f);
    for (int t = 1; t <= 5; ++t) {
      const AdamCoefficients c{1e-3f, 0.9f, 0.999f, 1e-8f, 5e-4f, 1.0f - std::pow(0.9f, float(t)),
                               1.0f - std::pow(0.999f, float(t))};
      ref.adam_update(p1.data(), g.data(), m1.data(), v1.data(), n, c);
      simd->adam_update(p2.data(), g.data(), m2.data(), v2.data(), n, c);
    }
    CHECK(same_bits(p1, p2));
    CHECK(same_bits(m1, m2));
    CHECK(same_bits(v1, v2));
  }
}

TEST_CASE("avx2 reductions match scalar within summation rounding") {
  const KernelTable* simd = avx2();
  if (!simd) {
    MESSAGE("AVX2 kernels unavailable on this CPU; skipped");
    return;
  }
  const auto& ref = scalar();
  std::mt19937 gen(11);
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto a = randv(gen, n), b = randv(gen, n);
    // Bound: n * eps * sum|a_i b_i|.
    double mag = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mag += std::abs(double{a[i]} * b[i]);
      sq += (double{a[i]} - b[i]) * (double{a[i]} - b[i]);
    }
    const double tol = 2.0 * n * 1.2e-7;
    CHECK(std::abs(ref.dot(a.data(), b.data(), n) - simd->dot(a.data(), b.data(), n)) <= tol * mag + 1e-30);
    CHECK(std::abs(ref.squared_distance(a.data(), b.data(), n) - simd->squared_distance(a.data(), b.data(), n)) <=
          tol * sq + 1e-30);

    const std::size_t rows = n % 7 + 1;
    const auto w = randv(gen, rows * n), bias = randv(gen, rows);
    std::vector<float> y1(rows), y2(rows);
    ref.matvec_bias(w.data(), a.data(), bias.data(), y1.data(), rows, n);
    simd->matvec_bias(w.data(), a.data(), bias.data(), y2.data(), rows, n);
    for (std::size_t r = 0; r < rows; ++r) {
      double row_mag = std::abs(bias[r]);
      for (std::size_t i = 0; i < n; ++i) row_mag += std::abs(double{w[r * n + i]} * a[i]);
      CHECK(std::abs(y1[r] - y2[r]) <= tol * row_mag + 1e-30);
    }
  }
}
