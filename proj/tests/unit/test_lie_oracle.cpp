#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lael/experiments.hpp"
#include "lael/lie_oracle.hpp"

using namespace lael;
using lie::Algebra;
using lie::so3_hat;

namespace {

Algebra random_matrix(std::mt19937& gen, int d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Algebra m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = u(gen);
  return m;
}

Algebra random_so3(std::mt19937& gen, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return so3_hat({u(gen), u(gen), u(gen)});
}

// Rodrigues: exp(hat(w)) = I + sin(t)/t K + (1 - cos t)/t^2 K^2, t = |w|.
Algebra rodrigues(const Eigen::Vector3d& w) {
  const double t = w.norm();
  const Algebra k = so3_hat(w);
  return Algebra::Identity(3, 3) + std::sin(t) / t * k +
         (1.0 - std::cos(t)) / (t * t) * k * k;
}

double max_abs(const Algebra& m) { return m.cwiseAbs().maxCoeff(); }

lie::FlowFamily<double> family(lie::FlowFamily<double>::Path w,
                               lie::FlowFamily<double>::Path chi,
                               lie::FlowFamily<double>::Path u) {
  return {std::move(w), std::move(chi), std::move(u), {0.0, 0.3, 0.6, 0.9}};
}

} // namespace

TEST_CASE("ad is the commutator") {
  std::mt19937 gen(1);
  const Algebra x = random_matrix(gen, 4);
  CHECK(max_abs(lie::ad(x, x)) == 0.0);

  const Algebra e1 = so3_hat({1, 0, 0}), e2 = so3_hat({0, 1, 0}),
                e3 = so3_hat({0, 0, 1});
  CHECK(max_abs(lie::ad(e1, e2) - e3) == 0.0);

  Algebra a = Algebra::Zero(2, 2), b = Algebra::Zero(2, 2);
  a.diagonal() << 1, 2;
  b.diagonal() << 3, 4;
  CHECK(max_abs(lie::ad(a, b)) == 0.0);

  CHECK_THROWS_AS(lie::ad(Algebra::Zero(2, 2), Algebra::Zero(3, 3)), ShapeError);
}

TEST_CASE("ad satisfies bilinearity and the Jacobi identity") {
  std::mt19937 gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Algebra x = random_matrix(gen, 5), y = random_matrix(gen, 5),
                  z = random_matrix(gen, 5);
    const Algebra jac = lie::ad(x, lie::ad(y, z)) + lie::ad(y, lie::ad(z, x)) +
                        lie::ad(z, lie::ad(x, y));
    CHECK(max_abs(jac) <= 1e-12);
    const Algebra lin = lie::ad((2.0 * x + y).eval(), z) -
                        (2.0 * lie::ad(x, z) + lie::ad(y, z));
    CHECK(max_abs(lin) <= 1e-13);
  }
}

TEST_CASE("expm basics and Rodrigues oracle") {
  CHECK(max_abs(lie::expm(Algebra::Zero(3, 3)) - Algebra::Identity(3, 3)) == 0.0);

  Algebra d = Algebra::Zero(2, 2);
  d.diagonal() << 0.7, -1.3;
  const Algebra ed = lie::expm(d);
  CHECK(ed(0, 0) == doctest::Approx(std::exp(0.7)).epsilon(1e-15));
  CHECK(ed(1, 1) == doctest::Approx(std::exp(-1.3)).epsilon(1e-15));
  CHECK(ed(0, 1) == 0.0);

  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector3d w(u(gen), u(gen), u(gen));
    const Algebra r = lie::expm(so3_hat(w));
    CHECK(max_abs(r - rodrigues(w)) <= 1e-12);
    CHECK(max_abs(r.transpose() * r - Algebra::Identity(3, 3)) <= 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("expm(X) expm(-X) is the identity") {
  std::mt19937 gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    Algebra x = random_matrix(gen, 4);
    x *= 5.0 / x.operatorNorm();
    const Algebra p = lie::expm(x) * lie::expm((-x).eval());
    CHECK(max_abs(p - Algebra::Identity(4, 4)) <= 1e-12);
  }
}

TEST_CASE("expm rejects non-finite and overflowing input") {
  Algebra x = Algebra::Zero(2, 2);
  x(0, 0) = std::nan("");
  CHECK_THROWS_AS(lie::expm(x), Error);
  CHECK_THROWS_AS(lie::expm((1e4 * Algebra::Identity(2, 2)).eval()), Error);
}

TEST_CASE("Bernoulli numbers") {
  CHECK(lie::bernoulli(0) == 1.0);
  CHECK(lie::bernoulli(1) == -0.5);
  CHECK(lie::bernoulli(2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(lie::bernoulli(3) == 0.0);
  CHECK(lie::bernoulli(4) == doctest::Approx(-1.0 / 30.0).epsilon(1e-14));
  CHECK(lie::bernoulli(12) == doctest::Approx(-691.0 / 2730.0).epsilon(1e-12));
  CHECK_THROWS_AS(lie::bernoulli(21), Error);
  CHECK_THROWS_AS(lie::bernoulli(-1), Error);
}

TEST_CASE("dexp_rt") {
  std::mt19937 gen(5);
  const Algebra dom = random_so3(gen);
  CHECK(max_abs(lie::dexp_rt(Algebra::Zero(3, 3), dom, 8) - dom) == 0.0);

  const Algebra om = so3_hat({0.2, 0.0, 0.0});
  const Algebra comm = so3_hat({-0.5, 0.0, 0.0});
  CHECK(max_abs(lie::dexp_rt(om, comm, 8) - comm) == 0.0);

  // Central difference of (expm(Omega(t + h)) - expm(Omega(t - h))) Xi^-1.
  const Algebra a = random_so3(gen), b = random_so3(gen);
  auto omega = [&](double t) { return Algebra(a + t * b + t * t * a * 0.3); };
  const double t = 0.4;
  const Algebra om_t = omega(t);
  const Algebra dom_t = b + 0.6 * t * a;
  const Algebra v = lie::dexp_rt(om_t, dom_t, 12);
  double prev = 0.0;
  for (double h : {1e-2, 5e-3}) {
    const Algebra fd = (lie::expm(omega(t + h)) - lie::expm(omega(t - h))) /
                       (2.0 * h) * lie::expm((-om_t).eval());
    const double err = max_abs(fd - v);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
  CHECK(prev <= 1e-4);
}

TEST_CASE("magnus_rhs inverts dexp_rt") {
  std::mt19937 gen(6);
  const Algebra v = random_so3(gen);
  CHECK(max_abs(lie::magnus_rhs(Algebra::Zero(3, 3), v, 6) - v) == 0.0);

  const Algebra om = random_so3(gen, 0.3);
  CHECK(max_abs(lie::magnus_rhs(om, v, 1) - (v - 0.5 * lie::ad(om, v))) <= 1e-16);

  for (double scale : {0.2, 0.1, 0.05}) {
    const Algebra o = scale * random_so3(gen);
    for (int k : {2, 4, 6}) {
      const Algebra back = lie::dexp_rt(o, lie::magnus_rhs(o, v, k), k);
      const double bound =
          4.0 * std::pow(2.0 * o.operatorNorm(), k + 1) * v.operatorNorm() + 1e-15;
      CHECK(max_abs(back - v) <= bound);
    }
  }
}

TEST_CASE("composite_velocity special cases") {
  const auto fam = lab::so3_generic_family();
  const Algebra u = fam.ubar(fam.t_grid[2]);
  CHECK(max_abs(lie::composite_velocity(fam, 0.0, 2, 1e-3) - u) <= 1e-15);

  const Algebra w = so3_hat({0.4, -0.2, 0.1}), chi = so3_hat({0.0, 0.3, 0.2}),
                u0 = so3_hat({1.0, 0.5, -0.5});
  const auto frozen = family([&](double) { return w; },
                             [&](double) { return chi; },
                             [&](double) { return u0; });
  const double eps = 0.3;
  const Algebra om = eps * w + 0.5 * eps * eps * (chi - w * w);
  const Algebra xi = lie::expm(om);
  const Algebra expected = xi * u0 * lie::expm((-om).eval());
  CHECK(max_abs(lie::composite_velocity(frozen, eps, 1, 1e-3) - expected) <= 1e-14);

  CHECK_THROWS_AS(lie::composite_velocity(frozen, eps, 0, 1e-3), Error);
  CHECK_THROWS_AS(lie::composite_velocity(frozen, eps, 3, 1e-3), Error);
  CHECK_THROWS_AS(lie::composite_velocity(frozen, eps, 1, 0.0), Error);
}

TEST_CASE("composite_velocity second-order Taylor model") {
  const auto fam = lab::so3_generic_family();
  const auto s = lie::sample_paths(fam, 2, 1e-3);
  const Algebra v1 = lie::first_order_target(s);
  const Algebra v2 = lie::second_order_target(s);
  double prev = 0.0;
  for (double eps : {2e-2, 1e-2}) {
    const Algebra model = s.ubar + eps * v1 + 0.5 * eps * eps * v2;
    const double err = max_abs(lie::composite_velocity(s, eps) - model);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(8.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("collapsed and expanded second-order forms agree") {
  const auto fam = lab::so3_generic_family();
  for (std::size_t i = 1; i + 1 < fam.t_grid.size(); ++i) {
    const auto s = lie::sample_paths(fam, i, 1e-3);
    CHECK(max_abs(lie::second_order_target(s) -
                  lie::second_order_target_expanded(s)) <= 1e-14);
  }
}

TEST_CASE("verify_first_order examples") {
  const Algebra e1 = so3_hat({1, 0, 0}), e2 = so3_hat({0, 1, 0});
  const Algebra zero = Algebra::Zero(3, 3);

  const auto still = family([&](double) { return e1; }, [&](double) { return zero; },
                            [&](double) { return zero; });
  const auto r0 = lie::verify_first_order(still, 1e-2, 1e-3);
  for (double r : r0.residual) CHECK(r <= 1e-10);

  const auto lin = family([&](double t) { return Algebra(t * e1); },
                          [&](double) { return zero; },
                          [&](double) { return e2; });
  const auto r1 = lie::verify_first_order(lin, 1e-2, 1e-3);
  CHECK(r1.observed_order >= 1.9);
  CHECK(r1.monotone);

  const Algebra a = so3_hat({0.3, 0, 0});
  const auto comm = family([&](double) { return a; }, [&](double) { return zero; },
                           [&](double) { return e1; });
  const auto r2 = lie::verify_first_order(comm, 1e-2, 1e-3);
  for (double r : r2.residual) CHECK(r <= 1e-10);

  const auto rg = lie::verify_first_order(lab::so3_generic_family(), 1e-2, 1e-3);
  CHECK(rg.observed_order >= 1.9);
  CHECK(rg.extrapolated_residual <= 1e-8);
}

TEST_CASE("verify_second_order examples") {
  const Algebra zero = Algebra::Zero(3, 3);
  const Algebra e3 = so3_hat({0, 0, 1});

  const auto no_w = family([&](double) { return zero; },
                           [](double t) { return so3_hat({t, 0.5, -t * t}); },
                           [&](double) { return e3; });
  const auto r0 = lie::verify_second_order(no_w, 1e-2, 1e-3);
  CHECK(r0.extrapolated_residual <= 1e-8);

  // chi = 0, u = 0: second derivative is -2 wdot w.
  const auto pure = family([](double t) { return so3_hat({std::sin(t), t, 0.2}); },
                           [&](double) { return zero; },
                           [&](double) { return zero; });
  const auto r1 = lie::verify_second_order(pure, 1e-2, 1e-3);
  CHECK(r1.observed_order >= 1.9);
  const auto s = lie::sample_paths(pure, 1, 1e-3);
  CHECK(max_abs(lie::second_order_target(s) + 2.0 * s.w_dot * s.w) <= 1e-15);

  const auto rg = lie::verify_second_order(lab::so3_generic_family(), 1e-2, 1e-3);
  CHECK(rg.observed_order >= 1.9);
  CHECK(rg.extrapolated_residual <= 1e-8);
}

TEST_CASE("FlowFamily validation") {
  auto fam = lab::so3_generic_family();
  fam.t_grid = {0.0, 0.5, 0.5};
  CHECK_THROWS_AS(fam.validate(), Error);
  fam.t_grid = {0.0, 1.0};
  CHECK_THROWS_AS(fam.validate(), Error);
}

TEST_CASE("lie oracle is usable in long double") {
  using L = long double;
  lie::AlgebraElement<L> x(2, 2);
  x << 0, -1, 1, 0;
  const auto e = lie::expm(x);
  CHECK(double(e(0, 0)) == doctest::Approx(std::cos(1.0)).epsilon(1e-15));
  CHECK(double(e(1, 0)) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
}
