#include "lael/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lael/field_calculus.hpp"
#include "lael/philox.hpp"
#include "lael/spectral.hpp"

namespace lael::corr {

void NoiseBasis::validate() const {
  if (xi.empty()) return;
  const GridSpec& g = xi.front().grid;
  for (const auto& f : xi) {
    if (!(f.grid == g)) throw ShapeError("noise fields live on different grids");
    if (!f.all_finite()) throw Error("noise field has non-finite values");
    if (field::max_divergence(f) > 1e-10)
      throw Error("noise field is not divergence free");
    const double scale = std::max(1.0, sup_norm(f));
    for (const auto& a : f.c)
      if (!spectral::band_limited(spectral::forward(a), g.n / 4, 1e-12 * scale))
        throw Error("noise field is not band limited below n/4");
  }
}

NoiseBasis make_noise_basis(const GridSpec& g, int n_noise, int kmax,
                            std::uint64_t seed) {
  if (n_noise < 0) throw Error("n_noise must be non-negative");
  if (kmax < 1 || kmax >= g.n / 4)
    throw Error("xi_kmax must lie in [1, n/4)");
  NoiseBasis b;
  for (int i = 0; i < n_noise; ++i) {
    Array2 ux = Array2::Zero(g.n, g.n), uy = Array2::Zero(g.n, g.n);
    std::uint32_t mode = 0;
    for (int kx = 0; kx <= kmax; ++kx) {
      for (int ky = -kmax; ky <= kmax; ++ky) {
        if (kx == 0 && ky <= 0) continue;
        const auto [a, c] = rng::normal_pair(seed, std::uint32_t(i), mode++, 7u);
        const double k2 = double(kx * kx + ky * ky);
        const double amp = 1.0 / k2; // smooth spectrum
        // psi = amp (a cos(k.x) + c sin(k.x)), xi = (d_y psi, -d_x psi)
        const double k0 = g.k0();
        for (int ix = 0; ix < g.n; ++ix) {
          for (int iy = 0; iy < g.n; ++iy) {
            const double ph = k0 * (kx * g.coord(ix) + ky * g.coord(iy));
            const double dpsi = amp * (-a * std::sin(ph) + c * std::cos(ph));
            ux(ix, iy) += k0 * ky * dpsi;
            uy(ix, iy) -= k0 * kx * dpsi;
          }
        }
      }
    }
    VectorField f(g, std::move(ux), std::move(uy));
    const double ms =
        field::inner_product(f, f) / (g.length * g.length);
    f *= std::sqrt(1.0 / (n_noise * ms));
    b.xi.push_back(std::move(f));
  }
  b.validate();
  return b;
}

Tensor2Field forcing(const NoiseBasis& basis) {
  if (basis.empty()) throw Error("forcing needs a nonempty noise basis");
  Tensor2Field out(basis.xi.front().grid);
  for (const auto& x : basis.xi) out += field::outer(x, x);
  out(1, 0) = out(0, 1);
  return out;
}

Tensor2Field f_rhs(const VectorField& ubar, const Tensor2Field& F,
                   const NoiseBasis& basis) {
  Tensor2Field r = -field::dealias(field::lie_deriv_tensor2(ubar, F));
  if (!basis.empty()) r += forcing(basis);
  r(1, 0) = r(0, 1);
  return r;
}

double cfl_limit(const VectorField& u) {
  const double umax = sup_norm(u);
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * u.grid.spacing() / umax;
}

void check_cfl(const VectorField& u, double dt) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const double lim = cfl_limit(u);
  if (dt > lim) throw CflError(dt, lim);
}

CorrelationState step_f(const CorrelationState& s, const VelocityOfTime& u,
                        const NoiseBasis& basis, double dt) {
  const double t = s.t;
  const VectorField u0 = u(t), uh = u(t + 0.5 * dt), u1 = u(t + dt);
  check_cfl(u0, dt);
  const Tensor2Field k1 = f_rhs(u0, s.F, basis);
  const Tensor2Field k2 = f_rhs(uh, s.F + (0.5 * dt) * k1, basis);
  const Tensor2Field k3 = f_rhs(uh, s.F + (0.5 * dt) * k2, basis);
  const Tensor2Field k4 = f_rhs(u1, s.F + dt * k3, basis);
  CorrelationState out{s.F + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
                       t + dt};
  out.F(1, 0) = out.F(0, 1);
  return out;
}

double min_eigenvalue(const Tensor2Field& F) {
  const Array2 mid = 0.5 * (F(0, 0) + F(1, 1));
  const Array2 half = 0.5 * (F(0, 0) - F(1, 1));
  const Array2 rad = (half.square() + F(0, 1).square()).sqrt();
  return (mid - rad).minCoeff();
}

double trace_integral(const Tensor2Field& F) {
  return (F(0, 0) + F(1, 1)).sum() * F.grid.cell_area();
}

bool psd_within(const Tensor2Field& F, double rel_tol) {
  return min_eigenvalue(F) >= -rel_tol * sup_norm(F);
}

} // namespace lael::corr
