#pragma once

// Forced anisotropic Lagrangian-averaged Euler equations on the flat torus.
//
// State (u, F) with div u = 0. Momentum m = u - eps^2 C_F(u). The stepped
// ("resolved") form solves for a = du/dt
//
//   (1 - eps^2 C_F) a = eps^2 sum_j (C_F u)_j grad u^j + eps^2 C_G(u)
//                       - (1 - eps^2 C_F)(u . grad u) - grad p,
//
// with G = sum_i xi_i (x) xi_i, alongside dF/dt + L_u F = G. The momentum
// form dm/dt + grad_u m + (grad u)^T m = -grad p is kept as a residual check.

#include <functional>

#include "lael/common.hpp"
#include "lael/correlation.hpp"
#include "lael/fields.hpp"

namespace lael::lae {

struct ModelParams {
  double eps = 0.1;
  GridSpec grid;
  double dt = 1e-3;
  double t_end = 1.0;
  double linsolve_tol = 1e-10;
  int linsolve_maxit = 500;
  Geometry geometry = Geometry::flat;

  void validate() const;
};

struct FlowState {
  VectorField ubar;
  corr::CorrelationState F;
  double t = 0.0;
};

struct Diagnostics {
  double action = 0.0;
  double kinetic = 0.0;
  double div_norm = 0.0;
  int linsolve_iters = 0;
  ScalarField pressure;
};

struct SolveInfo {
  int iterations = 0;
  double residual = 0.0;
};

/// m = u - eps^2 C_F(u).
CovectorField momentum_map(const VectorField& ubar, const Tensor2Field& F,
                           double eps, Geometry geometry = Geometry::flat);

/// Solves P (1 - eps^2 C_F) P x = P m by preconditioned conjugate gradients
/// on divergence-free fields. The preconditioner is the isotropic symbol
/// 1 / (1 + eps^2 fbar |k|^2) with fbar the mean of tr F / 2. When |P m|
/// is at roundoff level of |m| the preconditioner alone is applied. Throws
/// SolveError when maxit is reached before |r| <= tol |P m|.
VectorField invert_momentum(const CovectorField& m, const Tensor2Field& F,
                            double eps, double tol, int maxit,
                            SolveInfo* info = nullptr);

struct ResolvedRhs {
  VectorField dubar_dt;
  ScalarField pressure; // zero mean
  int iterations = 0;
};

ResolvedRhs resolved_rhs(const FlowState& state, const ModelParams& params,
                         const corr::NoiseBasis& basis);

/// Sup norm of P(dm/dt + grad_u m + (grad u)^T m) with dm/dt obtained from
/// the supplied du/dt and dF/dt by the chain rule.
double ep_residual(const FlowState& state, const ModelParams& params,
                   const VectorField& dubar_dt, const Tensor2Field& dF_dt);

/// One RK4 step of the coupled system. The velocity is Leray projected and
/// F symmetrized on output. `diag` receives action, kinetic energy,
/// divergence and the largest stage iteration count (no pressure). Throws
/// CflError or SolveError.
FlowState step_system(const FlowState& state, const ModelParams& params,
                      const corr::NoiseBasis& basis,
                      Diagnostics* diag = nullptr);

enum class ActionForm {
  gradient, // 1/2 <u, u> + eps^2 / 2 int F^{jk} d_j u^i d_k u^i
  operator_ // 1/2 <u, u> - eps^2 / 2 <C_F u, u>
};

double evaluate_action(const VectorField& ubar, const Tensor2Field& F,
                       double eps, ActionForm form = ActionForm::gradient);

/// 1/2 <u, u>.
double kinetic_energy(const VectorField& ubar);

/// Full diagnostics including the pressure of the current state.
Diagnostics diagnose(const FlowState& state, const ModelParams& params,
                     const corr::NoiseBasis& basis);

/// (sin x cos y, -cos x sin y).
VectorField taylor_green(const GridSpec& g);

using VectorOfTime = std::function<VectorField(double)>;
using TensorOfTime = std::function<Tensor2Field(double)>;

struct CommutationOptions {
  int levels = 6;
  double ratio = 0.5;
};

/// Residual of [d/dt + grad_u, C_F] q - C_G q at time t0, with the time
/// derivatives taken by central differences of step h on a geometric
/// ladder starting at h_t. G must equal dF/dt + L_u F. The extrapolated
/// residual uses three-level Richardson on the leading steps.
ConvergenceReport verify_commutation(const VectorOfTime& ubar_of_t,
                                     const TensorOfTime& F_of_t,
                                     const TensorOfTime& G_of_t,
                                     const VectorOfTime& q_of_t, double h_t,
                                     double t0,
                                     const CommutationOptions& opt = {});

} // namespace lael::lae
