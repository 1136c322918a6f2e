#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lael/wick.hpp"

using namespace lael;
using namespace lael::wick;

namespace {

double max_coeff_diff(const ChaosExpansion& a, const ChaosExpansion& b) {
  double m = 0.0;
  for (const auto& [k, v] : a.coeffs()) m = std::max(m, std::abs(v - b.coeff(k)));
  for (const auto& [k, v] : b.coeffs()) m = std::max(m, std::abs(v - a.coeff(k)));
  return m;
}

} // namespace

TEST_CASE("MultiIndex") {
  CHECK(MultiIndex({1, 0, 0}) == MultiIndex({1}));
  CHECK(MultiIndex({0, 0}).empty());
  CHECK(MultiIndex::unit(2, 3) == MultiIndex({0, 0, 3}));
  CHECK(MultiIndex({2, 3}).order() == 5);
  CHECK(MultiIndex({2, 3}).factorial() == 12.0);
  CHECK(MultiIndex({1}) + MultiIndex({0, 2}) == MultiIndex({1, 2}));
  CHECK(MultiIndex({1, 2})[5] == 0);
  CHECK_THROWS_AS(MultiIndex({-1}), Error);
  CHECK_THROWS_AS(MultiIndex::unit(-1), Error);
}

TEST_CASE("Hermite polynomials") {
  for (double x : {-1.7, 0.0, 0.4, 2.5}) {
    CHECK(hermite(0, x) == 1.0);
    CHECK(hermite(1, x) == x);
    CHECK(hermite(2, x) == doctest::Approx(x * x - 1));
    CHECK(hermite(3, x) == doctest::Approx(x * x * x - 3 * x));
    CHECK(hermite(4, x) == doctest::Approx(x * x * x * x - 6 * x * x + 3));
  }
  CHECK_THROWS_AS(hermite(-1, 0.0), Error);
}

TEST_CASE("Hermite orthogonality by Gauss-Hermite quadrature") {
  // Nodes and weights of the 5-point rule for the weight exp(-x^2/2)/sqrt(2 pi).
  const double a = std::sqrt(5.0 - std::sqrt(10.0)), b = std::sqrt(5.0 + std::sqrt(10.0));
  const double nodes[] = {-b, -a, 0.0, a, b};
  const double wa = (7.0 + 2.0 * std::sqrt(10.0)) / 60.0,
               wb = (7.0 - 2.0 * std::sqrt(10.0)) / 60.0;
  const double weights[] = {wb, wa, 8.0 / 15.0, wa, wb};
  for (int j = 0; j <= 4; ++j)
    for (int k = 0; k <= 4; ++k) {
      if (j + k > 9) continue;
      double s = 0.0;
      for (int q = 0; q < 5; ++q) s += weights[q] * hermite(j, nodes[q]) * hermite(k, nodes[q]);
      const double expected = j == k ? std::tgamma(j + 1.0) : 0.0;
      CHECK(s == doctest::Approx(expected).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ChaosExpansion bookkeeping") {
  ChaosExpansion s(2, 4);
  s.set(MultiIndex({1, 1}), 2.0);
  CHECK(s.coeff(MultiIndex({1, 1})) == 2.0);
  CHECK(s.order() == 2);
  s.set(MultiIndex({1, 1}), 0.0);
  CHECK(s.coeffs().empty());
  CHECK(s.deterministic());
  CHECK_THROWS_AS(s.set(MultiIndex({5}), 1.0), Error);
  CHECK_THROWS_AS(s.set(MultiIndex({0, 0, 1}), 1.0), ShapeError);
  CHECK(ChaosExpansion::constant(3.0).deterministic());
  CHECK_THROWS_AS(ChaosExpansion(0), Error);
}

TEST_CASE("Wick square of a Gaussian") {
  const auto x = ChaosExpansion::basis(MultiIndex::unit(0), 1);
  const auto x2 = wick_product(x, x);
  CHECK(x2.coeffs().size() == 1);
  CHECK(x2.coeff(MultiIndex::unit(0, 2)) == 1.0);
  CHECK(expectation(x2) == 0.0);
  CHECK(variance(x2) == 2.0);
  for (double w : {-1.0, 0.3, 2.0}) CHECK(sample(x2, {w}) == doctest::Approx(w * w - 1));
}

TEST_CASE("Wick exponential matches exp(x - 1/2)") {
  ChaosExpansion e(1, 40);
  for (int k = 0; k <= 40; ++k) e.set(MultiIndex::unit(0, k), 1.0 / std::tgamma(k + 1.0));
  for (double x : {-1.0, 0.0, 0.5, 1.5})
    CHECK(sample(e, {x}) == doctest::Approx(std::exp(x - 0.5)).epsilon(1e-12));
  CHECK(expectation(e) == 1.0);
  CHECK(variance(e) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("expectation factorizes over the Wick product") {
  for (std::uint32_t trial = 0; trial < 50; ++trial) {
    const auto s = random_expansion(3, 4, 6, 7, 2 * trial);
    const auto t = random_expansion(3, 4, 6, 7, 2 * trial + 1);
    CHECK(expectation(wick_product(s, t)) ==
          doctest::Approx(expectation(s) * expectation(t)).scale(1.0).epsilon(1e-14));
  }
}

TEST_CASE("Wick product algebra") {
  const auto a = random_expansion(2, 3, 5, 9, 0);
  const auto b = random_expansion(2, 3, 5, 9, 1);
  const auto c = random_expansion(2, 3, 5, 9, 2);
  CHECK(max_coeff_diff(wick_product(a, b), wick_product(b, a)) <= 1e-15);
  CHECK(max_coeff_diff(wick_product(wick_product(a, b), c),
                       wick_product(a, wick_product(b, c))) <= 1e-14);
  CHECK(max_coeff_diff(wick_product(a, b + c),
                       wick_product(a, b) + wick_product(a, c)) <= 1e-14);
  const auto one = ChaosExpansion::constant(1.0, 2);
  CHECK(max_coeff_diff(wick_product(one, a), a) == 0.0);
  CHECK(max_coeff_diff(wick_product(2.5 * one, a), 2.5 * a) <= 1e-15);
}

TEST_CASE("Wick product respects the order bound") {
  const auto x = ChaosExpansion::basis(MultiIndex::unit(0, 3), 1, 4);
  CHECK_THROWS_AS(wick_product(x, x), Error);
  CHECK(wick_product(x, ChaosExpansion::basis(MultiIndex::unit(0), 1, 4)).order() == 4);
}

TEST_CASE("variance agrees with Monte Carlo") {
  const auto s = random_expansion(2, 3, 6, 17, 0);
  const int n = 20000;
  std::mt19937_64 gen(123);
  std::normal_distribution<double> nd;
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = sample(s, {nd(gen), nd(gen)});
    m1 += v;
    m2 += v * v;
  }
  m1 /= n;
  const double var = m2 / n - m1 * m1;
  CHECK(var == doctest::Approx(variance(s)).epsilon(0.1));
}

TEST_CASE("mc_expectation brackets the exact mean") {
  int failures = 0;
  for (std::uint32_t trial = 0; trial < 40; ++trial) {
    const auto s = random_expansion(3, 4, 5, 31, trial);
    const auto e = mc_expectation(s, 2000, 1000 + trial);
    if (std::abs(e.mean - expectation(s)) > 4.0 * e.std_error) ++failures;
    CHECK(e.std_error > 0.0);
  }
  CHECK(failures <= 1);
  CHECK_THROWS_AS(mc_expectation(ChaosExpansion::constant(1.0), 10, 1), Error);

  const auto a = mc_expectation(random_expansion(2, 2, 3, 5, 0), 500, 42);
  const auto b = mc_expectation(random_expansion(2, 2, 3, 5, 0), 500, 42);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("sample checks dimension") {
  const auto s = ChaosExpansion::basis(MultiIndex::unit(1), 2);
  CHECK_THROWS_AS(sample(s, {0.0}), ShapeError);
}
