#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lael/experiments.hpp"
#include "lael/field_calculus.hpp"

using namespace lael;
using namespace lael::field;
using std::cos;
using std::sin;

namespace {

const double pi = std::numbers::pi;

double diff(const ScalarField& a, const Array2& b) {
  return (a.values() - b).abs().maxCoeff();
}

template <std::size_t N, class Tag>
double diff(const ComponentField<N, Tag>& a, const ComponentField<N, Tag>& b) {
  return sup_norm(a - b);
}

} // namespace

TEST_CASE("GridSpec validation") {
  CHECK_THROWS_AS(GridSpec(12), Error);
  CHECK_THROWS_AS(GridSpec(4), Error);
  CHECK_THROWS_AS(GridSpec(16, 0.0), Error);
  CHECK(GridSpec(32).spacing() == doctest::Approx(2 * pi / 32));
}

TEST_CASE("derivatives of trigonometric polynomials are exact") {
  const GridSpec g(32);
  const auto f = scalar_from(g, [](double x, double y) { return sin(2 * x) * cos(y); });
  CHECK(diff(partial(f, 0), sample(g, [](double x, double y) { return 2 * cos(2 * x) * cos(y); })) <= 1e-12);
  CHECK(diff(partial(f, 1), sample(g, [](double x, double y) { return -sin(2 * x) * sin(y); })) <= 1e-12);
  CHECK(diff(laplacian(f), (-5.0 * f.values()).eval()) <= 1e-12);

  const auto v = vector_from(g, [](double x, double y) { return sin(x) * cos(3 * y); },
                             [](double x, double) { return cos(2 * x); });
  CHECK(diff(divergence(v), sample(g, [](double x, double y) { return cos(x) * cos(3 * y); })) <= 1e-12);

  const Tensor2Field j = jacobian(v);
  CHECK((j(0, 0) - sample(g, [](double x, double y) { return cos(x) * cos(3 * y); })).abs().maxCoeff() <= 1e-12);
  CHECK((j(0, 1) - sample(g, [](double x, double y) { return -3 * sin(x) * sin(3 * y); })).abs().maxCoeff() <= 1e-12);
  CHECK((j(1, 0) - sample(g, [](double x, double) { return -2 * sin(2 * x); })).abs().maxCoeff() <= 1e-12);
  CHECK(j(1, 1).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("spectral accuracy on a non-polynomial field") {
  double prev = 1.0;
  for (int n : {16, 32}) {
    const GridSpec g(n);
    const auto f = scalar_from(g, [](double x, double) { return std::exp(sin(x)); });
    const double err = diff(partial(f, 0), sample(g, [](double x, double) {
                              return cos(x) * std::exp(sin(x));
                            }));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-12);
}

TEST_CASE("inverse_laplacian returns the zero-mean solution") {
  const GridSpec g(32);
  const auto f = lab::random_scalar(g, 6, 11, 0);
  const auto p = inverse_laplacian(f);
  CHECK(std::abs(integral(p)) <= 1e-12);
  const double mean = integral(f) / (g.length * g.length);
  CHECK(diff(laplacian(p), (f.values() - mean).eval()) <= 1e-11);

  const auto c = scalar_from(g, [](double, double) { return 3.0; });
  CHECK(sup_norm(inverse_laplacian(c)) <= 1e-14);
}

TEST_CASE("integral and inner products") {
  const GridSpec g(32);
  const auto s = scalar_from(g, [](double x, double) { return sin(x); });
  CHECK(integral(s) == doctest::Approx(0.0).scale(1.0));
  CHECK(inner_product(s, s) == doctest::Approx(2 * pi * pi).epsilon(1e-13));
  const auto v = vector_from(g, [](double x, double) { return sin(x); },
                             [](double, double y) { return cos(y); });
  CHECK(inner_product(v, v) == doctest::Approx(4 * pi * pi).epsilon(1e-13));
  CHECK(inner_product(flat(v), v) == doctest::Approx(4 * pi * pi).epsilon(1e-13));
  const auto id = Tensor2Field::identity(g);
  CHECK(inner_product(id, id) == doctest::Approx(8 * pi * pi).epsilon(1e-13));
}

TEST_CASE("brackets") {
  const GridSpec g(32);
  const auto x = vector_from(g, [](double, double y) { return sin(y); },
                             [](double, double) { return 0.0; });
  const auto y = vector_from(g, [](double, double) { return 0.0; },
                             [](double x_, double) { return cos(x_); });
  // grad_x y = sin(y) d_x (0, cos x) = (0, -sin y sin x); grad_y x = (cos x cos y, 0).
  const auto expected = vector_from(g, [](double x_, double y_) { return -cos(x_) * cos(y_); },
                                    [](double x_, double y_) { return -sin(y_) * sin(x_); });
  CHECK(diff(jacobi_bracket(x, y), expected) <= 1e-12);
  CHECK(diff(ad_field(x, y), -expected) <= 1e-12);
  CHECK(sup_norm(jacobi_bracket(x, x)) <= 1e-12);

  const auto a = lab::random_vector(g, 3, 5, 0);
  const auto b = lab::random_vector(g, 3, 5, 1);
  const auto c = lab::random_vector(g, 3, 5, 2);
  const auto jac = jacobi_bracket(a, jacobi_bracket(b, c)) +
                   jacobi_bracket(b, jacobi_bracket(c, a)) +
                   jacobi_bracket(c, jacobi_bracket(a, b));
  CHECK(sup_norm(jac) <= 1e-10 * sup_norm(a) * sup_norm(b) * sup_norm(c));
}

TEST_CASE("Lie derivatives") {
  const GridSpec g(32);
  const auto m = flat(lab::random_vector(g, 4, 7, 0));
  const auto ex = vector_from(g, [](double, double) { return 1.0; },
                              [](double, double) { return 0.0; });
  const auto lm = lie_deriv_oneform(ex, m);
  CHECK((lm.c[0] - partial(ScalarField(g, m.c[0]), 0).values()).abs().maxCoeff() <= 1e-12);

  // Shear u = (sin y, 0) on the identity tensor.
  const auto u = vector_from(g, [](double, double y) { return sin(y); },
                             [](double, double) { return 0.0; });
  const auto lf = lie_deriv_tensor2(u, Tensor2Field::identity(g));
  const Array2 cy = sample(g, [](double, double y) { return cos(y); });
  CHECK(lf(0, 0).abs().maxCoeff() <= 1e-12);
  CHECK(lf(1, 1).abs().maxCoeff() <= 1e-12);
  CHECK((lf(0, 1) + cy).abs().maxCoeff() <= 1e-12);
  CHECK(lf.is_symmetric());

  // L_u m for the same shear and m = (0, x-independent b(y)).
  const auto my = CovectorField(g, Array2::Zero(g.n, g.n),
                                sample(g, [](double, double y) { return cos(2 * y); }));
  const auto lmy = lie_deriv_oneform(u, my);
  // (grad u)^T m has x-component d_x u^j m_j = 0 and y-component d_y u^x m_x = 0.
  CHECK(sup_norm(lmy) <= 1e-12);

  // <L_u m, v> = -<m, [u, v]> for divergence-free u.
  const auto ud = lab::random_divfree(g, 3, 9, 0);
  const auto v = lab::random_vector(g, 3, 9, 1);
  const auto mm = flat(lab::random_vector(g, 3, 9, 2));
  const double lhs = inner_product(lie_deriv_oneform(ud, mm), v);
  const double rhs = -inner_product(mm, jacobi_bracket(ud, v));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("Hessians and the C operator") {
  const GridSpec g(32);
  const auto u = lab::random_vector(g, 4, 13, 0);
  const auto id = Tensor2Field::identity(g);
  VectorField lu(g);
  for (int i = 0; i < 2; ++i) lu.c[i] = laplacian(ScalarField(g, u.c[i])).values();
  CHECK(diff(hessian_contract(u, id), lu) <= 1e-10);
  CHECK(diff(c_operator(u, id), lu) <= 1e-10);

  // d_x((1 + cos(x)/2) d_x sin x) = -sin x - sin(2x)/2.
  Tensor2Field f = id;
  f(0, 0) = sample(g, [](double x, double) { return 1.0 + 0.5 * cos(x); });
  const auto q = vector_from(g, [](double x, double) { return sin(x); },
                             [](double, double) { return 0.0; });
  const auto cq = c_operator(q, f);
  CHECK((cq.c[0] - sample(g, [](double x, double) { return -sin(x) - 0.5 * sin(2 * x); }))
            .abs().maxCoeff() <= 1e-12);
  CHECK(cq.c[1].abs().maxCoeff() <= 1e-12);

  // Symmetric, non-positive for SPD F.
  const auto fs = lab::random_spd(g, 2, 0.5, 13, 1);
  const auto a = lab::random_vector(g, 3, 13, 2);
  const auto b = lab::random_vector(g, 3, 13, 3);
  CHECK(inner_product(c_operator(a, fs), b) ==
        doctest::Approx(inner_product(a, c_operator(b, fs))).epsilon(1e-10));
  CHECK(inner_product(c_operator(a, fs), a) < 0.0);

  const auto x = lab::random_vector(g, 2, 13, 4);
  const auto y = lab::random_vector(g, 2, 13, 5);
  const auto hxy = hessian_apply(u, x, y);
  const auto hyx = hessian_apply(u, y, x);
  CHECK(diff(hxy, hyx) <= 1e-10);
  CHECK(diff(hessian_apply(u, x, x), hessian_contract(u, outer(x, x))) <= 1e-10);
}

TEST_CASE("Leray projection") {
  const GridSpec g(32);
  const auto d = lab::random_divfree(g, 5, 17, 0);
  CHECK(diff(leray_project(d), d) <= 1e-12);
  CHECK(max_divergence(d) <= 1e-11);

  const auto grad = gradient(lab::random_scalar(g, 5, 17, 1));
  CHECK(sup_norm(leray_project(grad)) <= 1e-12);

  const auto v = lab::random_vector(g, 5, 17, 2);
  const auto pv = leray_project(v);
  CHECK(max_divergence(pv) <= 1e-11);
  CHECK(diff(leray_project(pv), pv) <= 1e-12);
  CHECK(inner_product(pv, v - pv) == doctest::Approx(0.0).scale(inner_product(v, v)));

  const auto w = lab::random_vector(g, 5, 17, 3);
  CHECK(inner_product(leray_project(v), w) ==
        doctest::Approx(inner_product(v, leray_project(w))).epsilon(1e-12));

  const auto c = vector_from(g, [](double, double) { return 0.3; },
                             [](double, double) { return -1.0; });
  CHECK(diff(leray_project(c), c) <= 1e-14);
}

TEST_CASE("dealias removes the top third of the spectrum") {
  const GridSpec g(64);
  const auto low = scalar_from(g, [](double x, double y) { return cos(20 * x) * sin(3 * y); });
  const auto high = scalar_from(g, [](double x, double) { return cos(30 * x); });
  CHECK(diff(dealias(low), low.values()) <= 1e-12);
  CHECK(sup_norm(dealias(high)) <= 1e-12);
}

TEST_CASE("grid mismatch is a ShapeError") {
  const ScalarField a(GridSpec(16)), b(GridSpec(32));
  CHECK_THROWS_AS(a + b, ShapeError);
  CHECK_THROWS_AS(directional_derivative(VectorField(GridSpec(16)), VectorField(GridSpec(32))),
                  ShapeError);
}

TEST_CASE("first-order fluctuation closed form") {
  const GridSpec g(32);
  FluctuationFields in{
      vector_from(g, [](double, double) { return 1.0; }, [](double, double) { return 0.0; }),
      vector_from(g, [](double, double) { return 0.0; }, [](double x, double) { return sin(x); }),
      VectorField(g), VectorField(g), VectorField(g)};
  const auto dv = first_order_fluctuation(in);
  CHECK(dv.c[0].abs().maxCoeff() <= 1e-12);
  CHECK((dv.c[1] - sample(g, [](double x, double) { return cos(x); })).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("second-order fluctuation forms agree") {
  const GridSpec g(64);
  for (std::uint32_t trial = 0; trial < 10; ++trial) {
    const auto in = lab::random_fluctuation(g, 5, 3, trial);
    CHECK(lemma2_check(in) <= 1e-8);
  }
  const auto in = lab::random_fluctuation(g, 5, 3, 0);
  CHECK_THROWS_AS(second_order_fluctuation_alt(in, Geometry::curved), UnsupportedGeometry);
  CHECK_THROWS_AS(lemma2_check(in, Geometry::curved), UnsupportedGeometry);

  // w = 0 reduces both forms to chi_dot + ad_chi u.
  auto zero_w = in;
  zero_w.w = VectorField(g);
  zero_w.w_dot = VectorField(g);
  const auto expected = zero_w.chi_dot + ad_field(zero_w.chi, zero_w.ubar);
  CHECK(diff(second_order_fluctuation(zero_w), expected) <= 1e-10);
}

TEST_CASE("advected expansion matches the pullback to second order") {
  const GridSpec g(64);
  const auto a = lab::random_scalar(g, 2, 21, 0);
  const auto w = lab::random_vector(g, 2, 21, 1);
  const auto chi = lab::random_vector(g, 2, 21, 2);
  std::vector<double> eps{0.08, 0.04, 0.02};
  std::vector<double> err;
  for (double e : eps)
    err.push_back(diff(advected_expansion(a, w, chi, e), advected_pullback(a, w, chi, e)));
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double order = std::log(err[i - 1] / err[i]) / std::log(2.0);
    CHECK(order >= 2.7);
  }
  CHECK(diff(advected_expansion(a, w, chi, 0.0), a.values()) == 0.0);
}
