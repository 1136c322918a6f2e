#include "lael/wick.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lael/philox.hpp"

namespace lael::wick {

MultiIndex::MultiIndex(std::vector<int> exponents) : e_(std::move(exponents)) {
  for (int v : e_)
    if (v < 0) throw Error("multi-index exponents must be non-negative");
  while (!e_.empty() && e_.back() == 0) e_.pop_back();
}

MultiIndex MultiIndex::unit(int i, int power) {
  if (i < 0) throw Error("multi-index coordinate must be non-negative");
  std::vector<int> e(std::size_t(i) + 1, 0);
  e[std::size_t(i)] = power;
  return MultiIndex(std::move(e));
}

int MultiIndex::order() const {
  int s = 0;
  for (int v : e_) s += v;
  return s;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int v : e_)
    for (int k = 2; k <= v; ++k) f *= k;
  return f;
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  std::vector<int> e(std::max(a.length(), b.length()), 0);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = a[i] + b[i];
  return MultiIndex(std::move(e));
}

ChaosExpansion::ChaosExpansion(int dim, int max_order)
    : dim_(dim), max_order_(max_order) {
  if (dim < 1) throw Error("chaos expansion needs at least one coordinate");
  if (max_order < 0) throw Error("chaos max order must be non-negative");
}

ChaosExpansion ChaosExpansion::constant(double c0, int dim, int max_order) {
  ChaosExpansion s(dim, max_order);
  s.set(MultiIndex(), c0);
  return s;
}

ChaosExpansion ChaosExpansion::basis(const MultiIndex& alpha, int dim,
                                     int max_order) {
  ChaosExpansion s(dim, max_order);
  s.set(alpha, 1.0);
  return s;
}

void ChaosExpansion::check_index(const MultiIndex& alpha) const {
  if (alpha.length() > std::size_t(dim_))
    throw ShapeError("multi-index has more coordinates than the expansion");
  if (alpha.order() > max_order_)
    throw Error("chaos order " + std::to_string(alpha.order()) +
                " exceeds configured maximum " + std::to_string(max_order_));
}

void ChaosExpansion::set(const MultiIndex& alpha, double value) {
  check_index(alpha);
  if (value == 0.0)
    c_.erase(alpha);
  else
    c_[alpha] = value;
}

double ChaosExpansion::coeff(const MultiIndex& alpha) const {
  const auto it = c_.find(alpha);
  return it == c_.end() ? 0.0 : it->second;
}

int ChaosExpansion::order() const {
  int m = 0;
  for (const auto& [a, v] : c_) m = std::max(m, a.order());
  return m;
}

bool ChaosExpansion::deterministic() const {
  return c_.empty() || (c_.size() == 1 && c_.begin()->first.empty());
}

ChaosExpansion& ChaosExpansion::operator+=(const ChaosExpansion& o) {
  if (o.dim_ > dim_) dim_ = o.dim_;
  for (const auto& [a, v] : o.c_) set(a, coeff(a) + v);
  return *this;
}

ChaosExpansion& ChaosExpansion::operator*=(double s) {
  if (s == 0.0) {
    c_.clear();
    return *this;
  }
  for (auto& [a, v] : c_) v *= s;
  return *this;
}

ChaosExpansion wick_product(const ChaosExpansion& s, const ChaosExpansion& t) {
  ChaosExpansion out(std::max(s.dim(), t.dim()),
                     std::min(s.max_order(), t.max_order()));
  // Accumulate per gamma in map order so the sum order is deterministic.
  std::map<MultiIndex, double> acc;
  for (const auto& [a, ca] : s.coeffs())
    for (const auto& [b, cb] : t.coeffs()) acc[a + b] += ca * cb;
  for (const auto& [g, v] : acc) out.set(g, v);
  return out;
}

double expectation(const ChaosExpansion& s) { return s.coeff(MultiIndex()); }

double variance(const ChaosExpansion& s) {
  double v = 0.0;
  for (const auto& [a, c] : s.coeffs())
    if (!a.empty()) v += a.factorial() * c * c;
  return v;
}

double hermite(int k, double x) {
  if (k < 0) throw Error("Hermite degree must be non-negative");
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double sample(const ChaosExpansion& s, const std::vector<double>& omega) {
  if (omega.size() != std::size_t(s.dim()))
    throw ShapeError("sample point has wrong dimension");
  double v = 0.0;
  for (const auto& [a, c] : s.coeffs()) {
    double h = c;
    for (std::size_t i = 0; i < a.length(); ++i) h *= hermite(a[i], omega[i]);
    v += h;
  }
  return v;
}

McEstimate mc_expectation(const ChaosExpansion& s, int n_samples,
                          std::uint64_t seed) {
  if (n_samples < 100) throw Error("mc_expectation needs at least 100 samples");
  rng::Stream gen(seed, 0);
  std::vector<double> omega(std::size_t(s.dim()));
  double mean = 0.0, m2 = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    for (auto& w : omega) w = gen.normal();
    const double x = sample(s, omega);
    const double d = x - mean;
    mean += d / (k + 1);
    m2 += d * (x - mean);
  }
  const double var = m2 / (n_samples - 1);
  return {mean, std::sqrt(var / n_samples)};
}

ChaosExpansion random_expansion(int dim, int order, int terms,
                                std::uint64_t seed, std::uint32_t stream) {
  ChaosExpansion s(dim, std::max(order, ChaosExpansion::default_max_order));
  rng::Stream gen(seed, stream);
  for (int t = 0; t < terms; ++t) {
    const int total = int(gen.uniform() * (order + 1));
    std::vector<int> e(std::size_t(dim), 0);
    for (int k = 0; k < total; ++k) e[std::size_t(gen.uniform() * dim)]++;
    s.set(MultiIndex(e), 2.0 * gen.uniform() - 1.0);
  }
  return s;
}

} // namespace lael::wick
