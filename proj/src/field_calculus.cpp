#include "lael/field_calculus.hpp"

#include <cmath>

#include "lael/interpolation.hpp"

namespace lael::field {
namespace {

using spectral::Spectrum;

template <class A, class B>
void same_grid(const A& a, const B& b) {
  if (!(a.grid == b.grid)) throw ShapeError("fields live on different grids");
}

Array2 d_axis(const Array2& a, int axis, double k0) {
  auto s = spectral::forward(a);
  spectral::differentiate(s, axis, k0);
  return spectral::inverse(s);
}

// Both first derivatives from one forward transform.
std::array<Array2, 2> grad_of(const Array2& a, double k0) {
  const auto s = spectral::forward(a);
  auto sx = s;
  spectral::differentiate(sx, 0, k0);
  auto sy = s;
  spectral::differentiate(sy, 1, k0);
  return {spectral::inverse(sx), spectral::inverse(sy)};
}

// Second derivatives as compositions of first derivatives, so they share
// the Nyquist convention: {d_xx, d_xy, d_yy}.
std::array<Array2, 3> hess_of(const Array2& a, double k0) {
  const auto s = spectral::forward(a);
  auto sx = s;
  spectral::differentiate(sx, 0, k0);
  auto sy = s;
  spectral::differentiate(sy, 1, k0);
  auto sxx = sx;
  spectral::differentiate(sxx, 0, k0);
  auto sxy = sx;
  spectral::differentiate(sxy, 1, k0);
  auto syy = sy;
  spectral::differentiate(syy, 1, k0);
  return {spectral::inverse(sxx), spectral::inverse(sxy),
          spectral::inverse(syy)};
}

// d_j (F^{jk} d_k a) for one scalar component.
Array2 c_component(const Array2& a, const Tensor2Field& f) {
  const double k0 = f.grid.k0();
  const auto g = grad_of(a, k0);
  const Array2 flux_x = f(0, 0) * g[0] + f(0, 1) * g[1];
  const Array2 flux_y = f(1, 0) * g[0] + f(1, 1) * g[1];
  return d_axis(flux_x, 0, k0) + d_axis(flux_y, 1, k0);
}

} // namespace

ScalarField partial(const ScalarField& f, int axis) {
  if (axis != 0 && axis != 1) throw Error("partial: axis must be 0 or 1");
  return ScalarField(f.grid, d_axis(f.values(), axis, f.grid.k0()));
}

VectorField gradient(const ScalarField& f) {
  auto g = grad_of(f.values(), f.grid.k0());
  return VectorField(f.grid, std::move(g[0]), std::move(g[1]));
}

ScalarField divergence(const VectorField& x) {
  const double k0 = x.grid.k0();
  auto sx = spectral::forward(x.c[0]);
  auto sy = spectral::forward(x.c[1]);
  spectral::differentiate(sx, 0, k0);
  spectral::differentiate(sy, 1, k0);
  return ScalarField(x.grid, spectral::inverse(Spectrum(sx + sy)));
}

Tensor2Field jacobian(const VectorField& x) {
  Tensor2Field j(x.grid);
  for (int i = 0; i < 2; ++i) {
    auto g = grad_of(x.c[i], x.grid.k0());
    j(i, 0) = std::move(g[0]);
    j(i, 1) = std::move(g[1]);
  }
  return j;
}

ScalarField laplacian(const ScalarField& f) {
  const auto h = hess_of(f.values(), f.grid.k0());
  return ScalarField(f.grid, h[0] + h[2]);
}

ScalarField inverse_laplacian(const ScalarField& f) {
  const int n = f.grid.n;
  const double k0 = f.grid.k0();
  auto s = spectral::forward(f.values());
  for (int i = 0; i < n; ++i) {
    const double kx = spectral::derivative_symbol(spectral::wavenumber_x(i, n), n, k0);
    for (int j = 0; j < s.cols(); ++j) {
      const double ky = spectral::derivative_symbol(j, n, k0);
      const double k2 = kx * kx + ky * ky;
      s(i, j) = k2 > 0.0 ? -s(i, j) / k2 : 0.0;
    }
  }
  return ScalarField(f.grid, spectral::inverse(s));
}

VectorField directional_derivative(const VectorField& x, const VectorField& y) {
  same_grid(x, y);
  const auto jy = jacobian(y);
  VectorField out(x.grid);
  for (int i = 0; i < 2; ++i)
    out.c[i] = x.c[0] * jy(i, 0) + x.c[1] * jy(i, 1);
  return out;
}

VectorField jacobi_bracket(const VectorField& x, const VectorField& y) {
  return directional_derivative(x, y) - directional_derivative(y, x);
}

VectorField ad_field(const VectorField& x, const VectorField& y) {
  return directional_derivative(y, x) - directional_derivative(x, y);
}

CovectorField lie_deriv_oneform(const VectorField& u, const CovectorField& m) {
  same_grid(u, m);
  const auto ju = jacobian(u);
  const auto jm = jacobian(sharp(m));
  CovectorField out(u.grid);
  for (int i = 0; i < 2; ++i)
    out.c[i] = u.c[0] * jm(i, 0) + u.c[1] * jm(i, 1) + ju(0, i) * m.c[0] +
               ju(1, i) * m.c[1];
  return out;
}

Tensor2Field lie_deriv_tensor2(const VectorField& u, const Tensor2Field& f) {
  same_grid(u, f);
  const double k0 = u.grid.k0();
  const auto ju = jacobian(u);
  const bool symmetric = f.is_symmetric();
  Tensor2Field out(u.grid);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (symmetric && i == 1 && j == 0) continue;
      const auto g = grad_of(f(i, j), k0);
      out(i, j) = u.c[0] * g[0] + u.c[1] * g[1] -
                  (f(0, j) * ju(i, 0) + f(1, j) * ju(i, 1)) -
                  (f(i, 0) * ju(j, 0) + f(i, 1) * ju(j, 1));
    }
  }
  if (symmetric) out(1, 0) = out(0, 1);
  return out;
}

VectorField hessian_contract(const VectorField& u, const Tensor2Field& f) {
  same_grid(u, f);
  VectorField out(u.grid);
  for (int i = 0; i < 2; ++i) {
    const auto h = hess_of(u.c[i], u.grid.k0());
    out.c[i] = f(0, 0) * h[0] + (f(0, 1) + f(1, 0)) * h[1] + f(1, 1) * h[2];
  }
  return out;
}

VectorField hessian_apply(const VectorField& u, const VectorField& x,
                          const VectorField& y) {
  same_grid(u, x);
  same_grid(u, y);
  VectorField out(u.grid);
  for (int i = 0; i < 2; ++i) {
    const auto h = hess_of(u.c[i], u.grid.k0());
    out.c[i] = x.c[0] * y.c[0] * h[0] +
               (x.c[0] * y.c[1] + x.c[1] * y.c[0]) * h[1] +
               x.c[1] * y.c[1] * h[2];
  }
  return out;
}

VectorField div_tensor(const Tensor2Field& t) {
  const double k0 = t.grid.k0();
  VectorField out(t.grid);
  for (int k = 0; k < 2; ++k)
    out.c[k] = d_axis(t(0, k), 0, k0) + d_axis(t(1, k), 1, k0);
  return out;
}

VectorField c_operator(const VectorField& q, const Tensor2Field& f) {
  same_grid(q, f);
  VectorField out(q.grid);
  for (int i = 0; i < 2; ++i) out.c[i] = c_component(q.c[i], f);
  return out;
}

CovectorField c_operator(const CovectorField& q, const Tensor2Field& f) {
  return flat(c_operator(sharp(q), f));
}

VectorField leray_project(const VectorField& x) {
  const int n = x.grid.n;
  const double k0 = x.grid.k0();
  auto sx = spectral::forward(x.c[0]);
  auto sy = spectral::forward(x.c[1]);
  for (int i = 0; i < n; ++i) {
    const double kx = spectral::derivative_symbol(spectral::wavenumber_x(i, n), n, k0);
    for (int j = 0; j < sx.cols(); ++j) {
      const double ky = spectral::derivative_symbol(j, n, k0);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const auto kdot = (kx * sx(i, j) + ky * sy(i, j)) / k2;
      sx(i, j) -= kx * kdot;
      sy(i, j) -= ky * kdot;
    }
  }
  return VectorField(x.grid, spectral::inverse(sx), spectral::inverse(sy));
}

Tensor2Field outer(const VectorField& x, const VectorField& y) {
  same_grid(x, y);
  Tensor2Field t(x.grid);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t(i, j) = x.c[i] * y.c[j];
  return t;
}

double integral(const ScalarField& f) {
  return f.values().sum() * f.grid.cell_area();
}

double inner_product(const ScalarField& a, const ScalarField& b) {
  same_grid(a, b);
  return (a.values() * b.values()).sum() * a.grid.cell_area();
}

namespace {
template <class A, class B>
double pair2(const A& a, const B& b) {
  same_grid(a, b);
  return ((a.c[0] * b.c[0]).sum() + (a.c[1] * b.c[1]).sum()) *
         a.grid.cell_area();
}
} // namespace

double inner_product(const VectorField& a, const VectorField& b) {
  return pair2(a, b);
}
double inner_product(const CovectorField& a, const CovectorField& b) {
  return pair2(a, b);
}
double inner_product(const CovectorField& m, const VectorField& v) {
  return pair2(m, v);
}

double inner_product(const Tensor2Field& a, const Tensor2Field& b) {
  same_grid(a, b);
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += (a.c[k] * b.c[k]).sum();
  return s * a.grid.cell_area();
}

double max_divergence(const VectorField& x) {
  return divergence(x).values().abs().maxCoeff();
}

VectorField first_order_fluctuation(const FluctuationFields& in) {
  return in.w_dot + ad_field(in.w, in.ubar);
}

VectorField second_order_fluctuation(const FluctuationFields& in) {
  const VectorField grad_ww = directional_derivative(in.w, in.w);
  const VectorField grad_ww_dot =
      directional_derivative(in.w_dot, in.w) +
      directional_derivative(in.w, in.w_dot);
  const VectorField second = in.chi - grad_ww;
  return ad_field(in.w, ad_field(in.w, in.ubar)) + ad_field(second, in.ubar) +
         (in.chi_dot - grad_ww_dot) + ad_field(in.w, in.w_dot);
}

VectorField second_order_fluctuation_alt(const FluctuationFields& in,
                                         Geometry geometry) {
  require_flat(geometry); // R(u, w) w vanishes identically
  const VectorField v1 = first_order_fluctuation(in);
  return in.chi_dot + ad_field(in.chi, in.ubar) -
         hessian_apply(in.ubar, in.w, in.w) -
         2.0 * directional_derivative(in.w, v1);
}

double lemma2_check(const FluctuationFields& in, Geometry geometry) {
  return sup_norm(second_order_fluctuation(in) -
                  second_order_fluctuation_alt(in, geometry));
}

ScalarField advected_expansion(const ScalarField& abar, const VectorField& w,
                               const VectorField& chi, double eps) {
  same_grid(abar, w);
  same_grid(abar, chi);
  auto lie = [](const VectorField& x, const ScalarField& a) {
    const VectorField g = gradient(a);
    return ScalarField(a.grid, x.c[0] * g.c[0] + x.c[1] * g.c[1]);
  };
  const VectorField second = chi - directional_derivative(w, w);
  const ScalarField lw = lie(w, abar);
  return abar - eps * lw +
         (0.5 * eps * eps) * (lie(w, lw) - lie(second, abar));
}

ScalarField advected_pullback(const ScalarField& abar, const VectorField& w,
                              const VectorField& chi, double eps,
                              int substeps) {
  same_grid(abar, w);
  same_grid(abar, chi);
  if (substeps < 1) throw Error("advected_pullback: substeps must be >= 1");
  const GridSpec& g = abar.grid;
  const VectorInterpolant wi(w);
  const VectorInterpolant ci(chi - directional_derivative(w, w));
  const BicubicInterpolant ai(abar);

  auto velocity = [&](double x, double y, double s) {
    const auto a = wi(x, y);
    const auto b = ci(x, y);
    return std::array<double, 2>{a[0] + s * b[0], a[1] + s * b[1]};
  };

  ScalarField out(g);
  const double ds = -eps / substeps;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      double x = g.coord(i), y = g.coord(j), s = eps;
      for (int k = 0; k < substeps; ++k) {
        const auto k1 = velocity(x, y, s);
        const auto k2 = velocity(x + 0.5 * ds * k1[0], y + 0.5 * ds * k1[1], s + 0.5 * ds);
        const auto k3 = velocity(x + 0.5 * ds * k2[0], y + 0.5 * ds * k2[1], s + 0.5 * ds);
        const auto k4 = velocity(x + ds * k3[0], y + ds * k3[1], s + ds);
        x += ds / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        y += ds / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
        s += ds;
      }
      out.values()(i, j) = ai(x, y);
    }
  }
  return out;
}

} // namespace lael::field
