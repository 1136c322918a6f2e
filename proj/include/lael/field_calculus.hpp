#pragma once

// Spectral differential geometry on the flat 2-torus.
//
// Conventions (flat metric, Euclidean connection):
//   grad_X Y   = X^j d_j Y^i
//   [X, Y]     = grad_X Y - grad_Y X          (Jacobi-Lie bracket)
//   ad_X Y     = -[X, Y]
//   (div T)^k  = d_j T^{jk}                   (first index contracted)
//   C_F(q)_i   = d_j (F^{jk} d_k q_i)
//
// None of the operators here filter their products. Identities that rely on
// the Leibniz rule are exact to roundoff whenever every differentiated
// product stays below the Nyquist band; the time steppers apply the 2/3 rule
// themselves.

#include "lael/fields.hpp"
#include "lael/spectral.hpp"

namespace lael::field {

ScalarField partial(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& x);
/// (i, j) entry is d_j X^i.
Tensor2Field jacobian(const VectorField& x);
ScalarField laplacian(const ScalarField& f);
/// Zero-mean solution of lap(p) = f - mean(f).
ScalarField inverse_laplacian(const ScalarField& f);

VectorField directional_derivative(const VectorField& x, const VectorField& y);
VectorField jacobi_bracket(const VectorField& x, const VectorField& y);
VectorField ad_field(const VectorField& x, const VectorField& y);

/// L_u m = grad_u m + (grad u)^T m.
CovectorField lie_deriv_oneform(const VectorField& u, const CovectorField& m);
/// L_u F = u^k d_k F^{ij} - F^{kj} d_k u^i - F^{ik} d_k u^j.
Tensor2Field lie_deriv_tensor2(const VectorField& u, const Tensor2Field& f);

/// F^{jk} d_j d_k u^i.
VectorField hessian_contract(const VectorField& u, const Tensor2Field& f);
/// Flat covariant Hessian grad grad u (X, Y) = X^j Y^k d_j d_k u.
VectorField hessian_apply(const VectorField& u, const VectorField& x,
                          const VectorField& y);

VectorField div_tensor(const Tensor2Field& t);
VectorField c_operator(const VectorField& q, const Tensor2Field& f);
CovectorField c_operator(const CovectorField& q, const Tensor2Field& f);

/// Fourier-space Helmholtz projection onto divergence-free fields; the mean
/// mode is left unchanged.
VectorField leray_project(const VectorField& x);

Tensor2Field outer(const VectorField& x, const VectorField& y);

/// 2/3-rule filter applied componentwise.
template <std::size_t N, class Tag>
ComponentField<N, Tag> dealias(ComponentField<N, Tag> f) {
  for (auto& a : f.c) {
    auto s = spectral::forward(a);
    spectral::dealias(s);
    a = spectral::inverse(s);
  }
  return f;
}

double integral(const ScalarField& f);
double inner_product(const ScalarField& a, const ScalarField& b);
double inner_product(const VectorField& a, const VectorField& b);
double inner_product(const CovectorField& a, const CovectorField& b);
/// Duality pairing <m, v> = integral of m_i v^i.
double inner_product(const CovectorField& m, const VectorField& v);
double inner_product(const Tensor2Field& a, const Tensor2Field& b);

double max_divergence(const VectorField& x);

/// Deterministic inputs for the second-order fluctuation identities:
/// stochastic differentials are replaced by time derivatives.
struct FluctuationFields {
  VectorField ubar;
  VectorField w;
  VectorField chi;
  VectorField w_dot;
  VectorField chi_dot;
};

/// dv' = w_dot + ad_w ubar.
VectorField first_order_fluctuation(const FluctuationFields& in);
/// ad_w ad_w u + ad_{chi - grad_w w} u + d/dt (chi - grad_w w) + ad_w w_dot.
VectorField second_order_fluctuation(const FluctuationFields& in);
/// chi_dot + ad_chi u - grad grad u (w, w) + R(u, w) w - 2 grad_w dv'.
/// The curvature term exists only as the flat-geometry assertion.
VectorField second_order_fluctuation_alt(const FluctuationFields& in,
                                         Geometry geometry = Geometry::flat);
/// Sup-norm difference of the two forms above.
double lemma2_check(const FluctuationFields& in,
                    Geometry geometry = Geometry::flat);

/// Second-order model of the pushforward of a scalar by Xi^eps:
/// a - eps L_w a + eps^2/2 (-L_{chi - grad_w w} a + L_w L_w a).
ScalarField advected_expansion(const ScalarField& abar, const VectorField& w,
                               const VectorField& chi, double eps);

/// Reference pushforward a o (Xi^eps)^-1: each grid point is carried back
/// along the eps-flow generated by w + s (chi - grad_w w) with RK4 and the
/// field is read off by bicubic interpolation.
ScalarField advected_pullback(const ScalarField& abar, const VectorField& w,
                              const VectorField& chi, double eps,
                              int substeps = 32);

} // namespace lael::field
