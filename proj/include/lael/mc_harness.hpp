#pragma once

// Monte Carlo ensembles for the additive fluctuation closure
//
//   dw = [w, u] dt + sum_i xi_i dW^i,
//
// their first and second moments, and a particle simulator for the
// Stratonovich flow dX = u(X) dt + eps sum_i xi_i(X) o dW^i.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "lael/correlation.hpp"
#include "lael/fields.hpp"

namespace lael::mc {

struct EnsembleState {
  std::vector<VectorField> members;
  double t = 0.0;
  std::uint64_t rng_seed = 0;
  double dt = 1e-3;
  std::uint32_t step = 0;
  /// Members (2j, 2j + 1) share increments with opposite signs.
  bool antithetic = false;

  void validate() const;
};

/// n_members copies of w0 (zero when omitted).
EnsembleState make_ensemble(const GridSpec& g, int n_members,
                            std::uint64_t seed, double dt,
                            bool antithetic = false,
                            const VectorField* w0 = nullptr);

/// Euler-Maruyama step; the increment of member k on channel i at step s is
/// sqrt(dt) N(seed, k, i, s), with the drift 2/3 dealiased.
EnsembleState step_w_ensemble(const EnsembleState& ens, const VectorField& ubar,
                              const corr::NoiseBasis& basis);

struct MeanEstimate {
  VectorField mean;
  VectorField variance; // variance of the estimator, pointwise
};

struct SecondMomentEstimate {
  Tensor2Field F; // uncentered E[w (x) w]
  Tensor2Field variance;
};

MeanEstimate estimate_mean(const EnsembleState& ens);
SecondMomentEstimate estimate_F(const EnsembleState& ens);

struct EnsembleSample {
  double t = 0.0;
  MeanEstimate mean;
  SecondMomentEstimate F;
};

struct ErrorReport {
  std::vector<double> t;
  std::vector<double> e_mean; // relative L2 (absolute when the reference is 0)
  std::vector<double> e_F;
  std::vector<double> se_mean; // predicted sampling error on the same scale
  std::vector<double> se_F;
  bool pass = true;
};

/// Pass iff every error is within 4 predicted standard errors plus
/// bias_allowance.
ErrorReport compare_with_pde(const std::vector<EnsembleSample>& ens_series,
                             const std::vector<VectorField>& pde_mean_series,
                             const std::vector<Tensor2Field>& pde_F_series,
                             double bias_allowance = 0.0);

/// Integrand evaluated on a full Brownian path W[0..K] at left endpoint k.
/// Adapted integrands read only W[0..k].
using Integrand = std::function<double(const std::vector<double>& W, int k)>;

struct MartingaleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  bool pass() const;
};

/// Sample mean of sum_k zeta(W, k) (W_{k+1} - W_k) over n_paths paths.
MartingaleEstimate martingale_check(const Integrand& zeta, int n_paths,
                                    double dt, double t_end,
                                    std::uint64_t seed);

struct ParticleCloud {
  std::vector<std::array<double, 2>> positions;
  double t = 0.0;
};

/// Drift u + eps^2/2 sum_i grad_{xi_i} xi_i advanced by RK4, plus the
/// Euler-Maruyama noise eps sum_i xi_i(X_n) dW^i. Fields are read by
/// bicubic interpolation; positions stay wrapped into [0, L)^2.
ParticleCloud simulate_particles(const ParticleCloud& cloud,
                                 const VectorField& ubar,
                                 const corr::NoiseBasis& basis, double eps,
                                 double dt, int n_steps, std::uint64_t seed);

} // namespace lael::mc
