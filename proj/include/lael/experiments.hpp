#pragma once

// Reference families and the subcommand runners behind lae-lab.

#include <cstdint>
#include <string>

#include "lael/config.hpp"
#include "lael/correlation.hpp"
#include "lael/field_calculus.hpp"
#include "lael/lae_solver.hpp"
#include "lael/lie_oracle.hpp"

namespace lael::lab {

/// Smooth non-commuting so(3) paths on t in [0, 1] (five grid points).
lie::FlowFamily<double> so3_generic_family();

/// Trigonometric polynomial with random coefficients on the modes
/// |k|_inf <= kmax, keyed by (seed, stream).
ScalarField random_scalar(const GridSpec& g, int kmax, std::uint64_t seed,
                          std::uint32_t stream);
VectorField random_vector(const GridSpec& g, int kmax, std::uint64_t seed,
                          std::uint32_t stream);
/// Divergence-free: (d_y psi, -d_x psi) of a random streamfunction.
VectorField random_divfree(const GridSpec& g, int kmax, std::uint64_t seed,
                           std::uint32_t stream);
/// Pointwise positive definite: a0 I + B B^T with B random.
Tensor2Field random_spd(const GridSpec& g, int kmax, double a0,
                        std::uint64_t seed, std::uint32_t stream);

field::FluctuationFields random_fluctuation(const GridSpec& g, int kmax,
                                            std::uint64_t seed,
                                            std::uint32_t trial);

struct CommutationFamily {
  lae::VectorOfTime ubar;
  lae::TensorOfTime F;
  lae::TensorOfTime G;
  lae::VectorOfTime q;
  double t0 = 0.0;
  double h_t = 0.0;
};

/// Time-dependent u, F = F0 + sin(t) F1 and G = dF/dt + L_u F.
CommutationFamily commutation_generic(const GridSpec& g);
/// Steady shear u = (sin y, 0) with F and q transported exactly (G = 0).
CommutationFamily commutation_frozen(const GridSpec& g);
/// u = 0, F = F0 + t G with constant G and q linear in t.
CommutationFamily commutation_constant_g(const GridSpec& g);

/// Initial data from [model].preset.
lae::FlowState initial_state(const cli::Config& cfg);
lae::ModelParams model_params(const cli::Config& cfg);
corr::NoiseBasis noise_basis(const cli::Config& cfg);

int run_lae(const cli::Config& cfg);
int run_mc(const cli::Config& cfg);
int verify_magnus(const cli::Config& cfg);
int verify_lemma2(const cli::Config& cfg);
int verify_wick(const cli::Config& cfg);
int verify_commutation(const cli::Config& cfg);

/// Exit codes: 0 pass, 1 numerical failure, 2 usage or configuration error.
int dispatch(const std::string& subcommand, const cli::Config& cfg);

} // namespace lael::lab
