#pragma once

// Finite-dimensional matrix Lie group oracle for the Magnus-expansion
// fluctuation formulas. Matrix convention: ad is the plain commutator.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "lael/common.hpp"

namespace lael::lie {

template <class Scalar>
using AlgebraElement = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using GroupElement = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Algebra = AlgebraElement<double>;
using Group = GroupElement<double>;

namespace detail {

template <class Derived>
void require_square(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols())
    throw ShapeError("algebra element must be square");
}

template <class A, class B>
void require_same_shape(const Eigen::MatrixBase<A>& a,
                        const Eigen::MatrixBase<B>& b) {
  require_square(a);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("algebra elements have different dimensions");
}

template <class Derived>
double one_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

} // namespace detail

/// Commutator XY - YX.
template <class A, class B>
auto ad(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  detail::require_same_shape(x, y);
  using Scalar = typename A::Scalar;
  AlgebraElement<Scalar> out = x * y - y * x;
  return out;
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
/// The argument is scaled by 2^-s so that its 1-norm is at most 0.5, the
/// series is summed to machine precision, then squared s times.
template <class Derived>
auto expm(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Mat = GroupElement<Scalar>;
  detail::require_square(x);
  if (!x.allFinite()) throw Error("expm: non-finite entries");
  const double norm = detail::one_norm(x);
  if (norm > 700.0) throw Error("expm: norm too large, result would overflow");

  int s = 0;
  if (norm > 0.5) s = int(std::ceil(std::log2(norm / 0.5)));
  const Mat y = x / Scalar(std::ldexp(1.0, s));

  const auto n = x.rows();
  Mat sum = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k < 60; ++k) {
    term = (term * y) / Scalar(double(k));
    sum += term;
    if (detail::one_norm(term) <=
        std::numeric_limits<double>::epsilon() * detail::one_norm(sum))
      break;
  }
  for (int i = 0; i < s; ++i) sum = (sum * sum).eval();
  return sum;
}

/// d/dt expm(Omega(t)) given Omega and its time derivative, read off the
/// upper-right block of expm([[Omega, dOmega], [0, Omega]]).
template <class A, class B>
auto expm_derivative(const Eigen::MatrixBase<A>& omega,
                     const Eigen::MatrixBase<B>& domega) {
  detail::require_same_shape(omega, domega);
  using Scalar = typename A::Scalar;
  const auto n = omega.rows();
  AlgebraElement<Scalar> block = AlgebraElement<Scalar>::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = omega;
  block.topRightCorner(n, n) = domega;
  block.bottomRightCorner(n, n) = omega;
  AlgebraElement<Scalar> e = expm(block);
  AlgebraElement<Scalar> out = e.topRightCorner(n, n);
  return out;
}

/// Bernoulli numbers with the B_1 = -1/2 convention, k <= 20.
inline double bernoulli(int k) {
  if (k < 0 || k > 20) throw Error("bernoulli: k must be in [0, 20]");
  std::array<double, 21> b{};
  b[0] = 1.0;
  for (int m = 1; m <= k; ++m) {
    // sum_{j<=m} C(m+1, j) B_j = 0
    double acc = 0.0;
    double binom = 1.0; // C(m+1, 0)
    for (int j = 0; j < m; ++j) {
      acc += binom * b[j];
      binom = binom * double(m + 1 - j) / double(j + 1);
    }
    b[m] = -acc / double(m + 1);
    if (m > 1 && m % 2 == 1) b[m] = 0.0;
  }
  return b[k];
}

/// Truncated right-trivialized derivative of the exponential:
/// sum_{k=0}^{K} ad_Omega^k(dOmega) / (k+1)!.
template <class A, class B>
auto dexp_rt(const Eigen::MatrixBase<A>& omega,
             const Eigen::MatrixBase<B>& domega, int order) {
  detail::require_same_shape(omega, domega);
  if (order < 0) throw Error("dexp_rt: order must be non-negative");
  using Scalar = typename A::Scalar;
  AlgebraElement<Scalar> term = domega;
  AlgebraElement<Scalar> sum = term;
  for (int k = 1; k <= order; ++k) {
    term = ad(omega, term);
    sum += term / Scalar(detail::factorial(k + 1));
  }
  return sum;
}

/// Truncated inverse series: sum_{k=0}^{K} (B_k / k!) ad_Omega^k(V).
template <class A, class B>
auto magnus_rhs(const Eigen::MatrixBase<A>& omega,
                const Eigen::MatrixBase<B>& velocity, int order) {
  detail::require_same_shape(omega, velocity);
  if (order < 0) throw Error("magnus_rhs: order must be non-negative");
  using Scalar = typename A::Scalar;
  AlgebraElement<Scalar> term = velocity;
  AlgebraElement<Scalar> sum = term;
  for (int k = 1; k <= order; ++k) {
    term = ad(omega, term);
    const double bk = bernoulli(k);
    if (bk != 0.0) sum += term * Scalar(bk / detail::factorial(k));
  }
  return sum;
}

/// so(3) hat map with (e_i)_{jk} = -epsilon_{ijk}.
inline Algebra so3_hat(const Eigen::Vector3d& v) {
  Algebra m(3, 3);
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

/// Smooth deterministic paths of a fluctuation family. `chi` is the second
/// eps-derivative of Xi at eps = 0, so the fluctuation map is
/// Xi^eps = expm(eps w + eps^2/2 (chi - w^2)).
template <class Scalar = double>
struct FlowFamily {
  using Path = std::function<AlgebraElement<Scalar>(double)>;
  Path w;
  Path chi;
  Path ubar;
  std::vector<double> t_grid;

  void validate() const {
    if (!w || !chi || !ubar) throw Error("FlowFamily: missing path");
    if (t_grid.size() < 3)
      throw Error("FlowFamily: t_grid needs at least one interior point");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
      if (!(t_grid[i] > t_grid[i - 1]))
        throw Error("FlowFamily: t_grid must be strictly increasing");
    const auto a = w(t_grid[0]);
    detail::require_same_shape(a, chi(t_grid[0]));
    detail::require_same_shape(a, ubar(t_grid[0]));
  }
};

/// Path values and central-difference time derivatives at one time.
template <class Scalar>
struct PathSample {
  AlgebraElement<Scalar> w, w_dot, chi, chi_dot, ubar;
};

template <class Scalar>
PathSample<Scalar> sample_paths(const FlowFamily<Scalar>& family,
                                std::size_t t_index, double h_t) {
  if (t_index == 0 || t_index + 1 >= family.t_grid.size())
    throw Error("t_index must be interior to t_grid");
  if (!(h_t > 0.0)) throw Error("h_t must be positive");
  const double t = family.t_grid[t_index];
  PathSample<Scalar> s;
  s.w = family.w(t);
  s.chi = family.chi(t);
  s.ubar = family.ubar(t);
  s.w_dot = (family.w(t + h_t) - family.w(t - h_t)) / Scalar(2.0 * h_t);
  s.chi_dot = (family.chi(t + h_t) - family.chi(t - h_t)) / Scalar(2.0 * h_t);
  return s;
}

/// V^eps = (d/dt Xi^eps) Xi^{eps,-1} + Ad_{Xi^eps} ubar at t_grid[t_index].
template <class Scalar>
AlgebraElement<Scalar> composite_velocity(const PathSample<Scalar>& s,
                                          double eps) {
  using Mat = AlgebraElement<Scalar>;
  const Scalar e(eps);
  const Scalar half_e2(0.5 * eps * eps);
  const Mat omega = e * s.w + half_e2 * (s.chi - s.w * s.w);
  const Mat omega_dot =
      e * s.w_dot + half_e2 * (s.chi_dot - s.w_dot * s.w - s.w * s.w_dot);
  const Mat xi = expm(omega);
  const Mat xi_inv = expm((-omega).eval());
  const Mat xi_dot = expm_derivative(omega, omega_dot);
  return xi_dot * xi_inv + xi * s.ubar * xi_inv;
}

template <class Scalar>
AlgebraElement<Scalar> composite_velocity(const FlowFamily<Scalar>& family,
                                          double eps, std::size_t t_index,
                                          double h_t) {
  return composite_velocity(sample_paths(family, t_index, h_t), eps);
}

/// First-order fluctuation dv' = w_dot + ad_w ubar.
template <class Scalar>
AlgebraElement<Scalar> first_order_target(const PathSample<Scalar>& s) {
  return s.w_dot + ad(s.w, s.ubar);
}

/// Collapsed matrix form chi_dot + ad_chi ubar - 2 dv' w.
template <class Scalar>
AlgebraElement<Scalar> second_order_target(const PathSample<Scalar>& s) {
  const AlgebraElement<Scalar> v1 = first_order_target(s);
  return s.chi_dot + ad(s.chi, s.ubar) - Scalar(2.0) * v1 * s.w;
}

/// Uncollapsed form ad_w ad_w u + ad_{d2Omega} u + d(d2Omega)/dt + ad_w w_dot
/// with d2Omega = chi - w^2.
template <class Scalar>
AlgebraElement<Scalar>
second_order_target_expanded(const PathSample<Scalar>& s) {
  using Mat = AlgebraElement<Scalar>;
  const Mat d2omega = s.chi - s.w * s.w;
  const Mat d2omega_dot = s.chi_dot - s.w_dot * s.w - s.w * s.w_dot;
  return ad(s.w, ad(s.w, s.ubar)) + ad(d2omega, s.ubar) + d2omega_dot +
         ad(s.w, s.w_dot);
}

struct LadderOptions {
  int levels = 8;
  double ratio = 0.5;
  int richardson_levels = 4;
};

namespace detail {

template <class Scalar>
double max_abs(const AlgebraElement<Scalar>& m) {
  return m.size() == 0 ? 0.0 : double(m.cwiseAbs().maxCoeff());
}

// Richardson table for a central-difference estimate with error in even
// powers of h and a ladder ratio r.
template <class Scalar>
AlgebraElement<Scalar>
richardson(std::vector<AlgebraElement<Scalar>> d, double ratio) {
  const double q = 1.0 / (ratio * ratio);
  double factor = q;
  for (std::size_t level = 1; level < d.size(); ++level) {
    for (std::size_t i = d.size() - 1; i >= level; --i)
      d[i] = (Scalar(factor) * d[i] - d[i - 1]) / Scalar(factor - 1.0);
    factor *= q;
  }
  return d.back();
}

enum class Order { first, second };

template <class Scalar>
ConvergenceReport verify(const FlowFamily<Scalar>& family, double h_eps,
                         double h_t, Order order, const LadderOptions& opt) {
  family.validate();
  if (!(h_eps > 0.0) || !(h_t > 0.0))
    throw Error("verify: h_eps and h_t must be positive");
  ConvergenceReport rep;
  std::vector<double> floors;
  for (int l = 0; l < opt.levels; ++l)
    rep.step.push_back(h_eps * std::pow(opt.ratio, l));
  rep.residual.assign(rep.step.size(), 0.0);
  floors.assign(rep.step.size(), 0.0);

  for (std::size_t ti = 1; ti + 1 < family.t_grid.size(); ++ti) {
    const auto s = sample_paths(family, ti, h_t);
    const AlgebraElement<Scalar> target =
        order == Order::first ? first_order_target(s) : second_order_target(s);
    const AlgebraElement<Scalar> v0 = composite_velocity(s, 0.0);
    const double scale = std::max(1.0, max_abs(v0));
    std::vector<AlgebraElement<Scalar>> estimates;
    for (std::size_t l = 0; l < rep.step.size(); ++l) {
      const double h = rep.step[l];
      const auto vp = composite_velocity(s, h);
      const auto vm = composite_velocity(s, -h);
      AlgebraElement<Scalar> est =
          order == Order::first ? AlgebraElement<Scalar>((vp - vm) / Scalar(2.0 * h))
                                : AlgebraElement<Scalar>((vp - Scalar(2.0) * v0 + vm) /
                                                         Scalar(h * h));
      rep.residual[l] = std::max(rep.residual[l], max_abs<Scalar>(est - target));
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                           scale / std::pow(h, order == Order::first ? 1 : 2);
      floors[l] = std::max(floors[l], 100.0 * noise);
      if (int(l) < opt.richardson_levels) estimates.push_back(std::move(est));
    }
    const auto extrapolated = richardson<Scalar>(estimates, opt.ratio);
    rep.extrapolated_residual =
        std::max(rep.extrapolated_residual, max_abs<Scalar>(extrapolated - target));
  }
  fit_order(rep, floors);
  return rep;
}

} // namespace detail

/// Residual of the eps-derivative of V^eps against w_dot + ad_w ubar on a
/// geometric h_eps ladder, maximized over interior t_grid points.
template <class Scalar>
ConvergenceReport verify_first_order(const FlowFamily<Scalar>& family,
                                     double h_eps, double h_t,
                                     const LadderOptions& opt = {}) {
  return detail::verify(family, h_eps, h_t, detail::Order::first, opt);
}

/// As verify_first_order for the second eps-derivative against
/// chi_dot + ad_chi ubar - 2 dv' w.
template <class Scalar>
ConvergenceReport verify_second_order(const FlowFamily<Scalar>& family,
                                      double h_eps, double h_t,
                                      const LadderOptions& opt = {}) {
  return detail::verify(family, h_eps, h_t, detail::Order::second, opt);
}

} // namespace lael::lie
