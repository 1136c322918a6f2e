#pragma once

// Transport of the fluctuation correlation tensor
//
//   dF/dt + L_u F = sum_i xi_i (x) xi_i,
//
// driven by a prescribed mean flow u and a fixed divergence-free noise basis.

#include <cstdint>
#include <functional>
#include <vector>

#include "lael/fields.hpp"

namespace lael::corr {

struct NoiseBasis {
  std::vector<VectorField> xi;

  /// Throws unless every field is finite, on one grid, divergence free to
  /// 1e-10 and band limited below n/4.
  void validate() const;
  bool empty() const { return xi.empty(); }
};

/// n_noise random fields xi = (d_y psi, -d_x psi) with psi a trigonometric
/// polynomial on the modes 0 < |k|_inf <= kmax. Coefficients are standard
/// normals keyed by (seed, field, mode); each field is scaled so that
/// mean |xi_i|^2 = 1 / n_noise.
NoiseBasis make_noise_basis(const GridSpec& g, int n_noise, int kmax,
                            std::uint64_t seed);

struct CorrelationState {
  Tensor2Field F;
  double t = 0.0;

  static CorrelationState zero(const GridSpec& g) {
    return {Tensor2Field(g), 0.0};
  }
};

/// sum_i xi_i (x) xi_i; throws on an empty basis.
Tensor2Field forcing(const NoiseBasis& basis);

/// -L_u F (2/3 dealiased) plus the forcing; an empty basis contributes
/// nothing.
Tensor2Field f_rhs(const VectorField& ubar, const Tensor2Field& F,
                   const NoiseBasis& basis);

/// Largest stable step 0.5 h / |u|_inf (infinite for u = 0).
double cfl_limit(const VectorField& u);
/// Throws CflError when dt exceeds cfl_limit(u).
void check_cfl(const VectorField& u, double dt);

using VelocityOfTime = std::function<VectorField(double)>;

/// One classical RK4 step.
CorrelationState step_f(const CorrelationState& state,
                        const VelocityOfTime& ubar_of_t,
                        const NoiseBasis& basis, double dt);

/// Pointwise smallest eigenvalue of a symmetric F.
double min_eigenvalue(const Tensor2Field& F);
/// Integral of tr F.
double trace_integral(const Tensor2Field& F);
/// min_eigenvalue(F) >= -rel_tol * |F|_inf.
bool psd_within(const Tensor2Field& F, double rel_tol = 1e-8);

} // namespace lael::corr
