#pragma once

// Finite Wiener chaos over K Gaussian coordinates.
//
// A random variable is sum_alpha c_alpha H_alpha(omega) with probabilists'
// Hermite polynomials H_alpha = prod_i He_{alpha_i}(omega_i), so
// E[H_alpha H_beta] = alpha! delta_{alpha beta}.

#include <cstdint>
#include <map>
#include <vector>

#include "lael/common.hpp"

namespace lael::wick {

class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  /// Index with a single exponent `power` at coordinate `i`.
  static MultiIndex unit(int i, int power = 1);

  const std::vector<int>& exponents() const { return e_; }
  int operator[](std::size_t i) const { return i < e_.size() ? e_[i] : 0; }
  /// Number of coordinates up to the last nonzero exponent.
  std::size_t length() const { return e_.size(); }
  int order() const;
  bool empty() const { return e_.empty(); }
  /// alpha! = prod alpha_i!.
  double factorial() const;

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

private:
  std::vector<int> e_;
};

class ChaosExpansion {
public:
  static constexpr int default_max_order = 12;

  explicit ChaosExpansion(int dim = 1, int max_order = default_max_order);

  static ChaosExpansion constant(double c0, int dim = 1,
                                 int max_order = default_max_order);
  /// H_alpha with unit coefficient.
  static ChaosExpansion basis(const MultiIndex& alpha, int dim,
                              int max_order = default_max_order);

  int dim() const { return dim_; }
  int max_order() const { return max_order_; }
  const std::map<MultiIndex, double>& coeffs() const { return c_; }

  /// Sets c_alpha (zero removes the entry).
  void set(const MultiIndex& alpha, double value);
  double coeff(const MultiIndex& alpha) const;
  /// Highest |alpha| with a nonzero coefficient, 0 for the zero expansion.
  int order() const;
  bool deterministic() const;

  ChaosExpansion& operator+=(const ChaosExpansion& o);
  ChaosExpansion& operator*=(double s);
  friend ChaosExpansion operator+(ChaosExpansion a, const ChaosExpansion& b) {
    return a += b;
  }
  friend ChaosExpansion operator*(double s, ChaosExpansion a) { return a *= s; }

private:
  void check_index(const MultiIndex& alpha) const;

  int dim_;
  int max_order_;
  std::map<MultiIndex, double> c_;
};

/// Cauchy product c_gamma = sum_{alpha + beta = gamma} a_alpha b_beta. The
/// result lives in max(dim) coordinates; its order bound is the smaller of
/// the two operand bounds.
ChaosExpansion wick_product(const ChaosExpansion& s, const ChaosExpansion& t);

/// Coefficient of the empty index.
double expectation(const ChaosExpansion& s);

/// E[S^2] - E[S]^2 = sum_{alpha != 0} alpha! c_alpha^2.
double variance(const ChaosExpansion& s);

/// Probabilists' Hermite polynomial He_k(x).
double hermite(int k, double x);

/// Evaluates S at a point omega of length dim().
double sample(const ChaosExpansion& s, const std::vector<double>& omega);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean of S over n_samples standard normal draws with its
/// standard error.
McEstimate mc_expectation(const ChaosExpansion& s, int n_samples,
                          std::uint64_t seed);

/// Random expansion with `terms` nonzero coefficients in U(-1, 1), orders
/// up to `order`, over `dim` coordinates.
ChaosExpansion random_expansion(int dim, int order, int terms,
                                std::uint64_t seed, std::uint32_t stream);

} // namespace lael::wick
