#include "lael/mc_harness.hpp"

#include <cmath>

#include "lael/field_calculus.hpp"
#include "lael/interpolation.hpp"
#include "lael/parallel.hpp"
#include "lael/philox.hpp"

namespace lael::mc {
namespace {

// Increment normal for (member, channel, step); antithetic partners reuse
// the stream of the even member with the sign flipped.
double increment(const EnsembleState& ens, std::size_t k, std::size_t i) {
  if (ens.antithetic) {
    const double z = rng::normal(ens.rng_seed, std::uint32_t(k / 2),
                                 std::uint32_t(i), ens.step);
    return (k % 2 == 0) ? z : -z;
  }
  return rng::normal(ens.rng_seed, std::uint32_t(k), std::uint32_t(i), ens.step);
}

template <std::size_t N, class Tag>
double l2(const ComponentField<N, Tag>& f) {
  double s = 0.0;
  for (const auto& a : f.c) s += a.square().sum();
  return std::sqrt(s);
}

template <std::size_t N, class Tag>
double sum_all(const ComponentField<N, Tag>& f) {
  double s = 0.0;
  for (const auto& a : f.c) s += a.sum();
  return s;
}

} // namespace

void EnsembleState::validate() const {
  if (members.size() < 2) throw Error("ensemble needs at least two members");
  for (const auto& m : members)
    if (!(m.grid == members.front().grid))
      throw ShapeError("ensemble members live on different grids");
  if (!(dt > 0.0)) throw Error("ensemble dt must be positive");
  if (antithetic && members.size() % 2 != 0)
    throw Error("antithetic ensembles need an even member count");
}

EnsembleState make_ensemble(const GridSpec& g, int n_members,
                            std::uint64_t seed, double dt, bool antithetic,
                            const VectorField* w0) {
  EnsembleState e;
  e.members.assign(std::size_t(std::max(n_members, 0)),
                   w0 ? *w0 : VectorField(g));
  e.rng_seed = seed;
  e.dt = dt;
  e.antithetic = antithetic;
  e.validate();
  return e;
}

EnsembleState step_w_ensemble(const EnsembleState& ens, const VectorField& ubar,
                              const corr::NoiseBasis& basis) {
  ens.validate();
  corr::check_cfl(ubar, ens.dt);
  const bool has_drift = sup_norm(ubar) > 0.0;
  const Tensor2Field ju = has_drift ? field::jacobian(ubar) : Tensor2Field();
  const double sdt = std::sqrt(ens.dt);

  EnsembleState out = ens;
  parallel_for(ens.members.size(), [&](std::size_t k) {
    const VectorField& w = ens.members[k];
    VectorField& next = out.members[k];
    if (has_drift) {
      // [w, u] = grad_w u - grad_u w
      const Tensor2Field jw = field::jacobian(w);
      VectorField drift(w.grid);
      for (int i = 0; i < 2; ++i)
        drift.c[i] = w.c[0] * ju(i, 0) + w.c[1] * ju(i, 1) -
                     ubar.c[0] * jw(i, 0) - ubar.c[1] * jw(i, 1);
      next += ens.dt * field::dealias(std::move(drift));
    }
    for (std::size_t i = 0; i < basis.xi.size(); ++i)
      next += (sdt * increment(ens, k, i)) * basis.xi[i];
  });
  out.t = ens.t + ens.dt;
  out.step = ens.step + 1;
  return out;
}

MeanEstimate estimate_mean(const EnsembleState& ens) {
  ens.validate();
  const GridSpec& g = ens.members.front().grid;
  const double n = double(ens.members.size());
  VectorField s(g), s2(g);
  for (const auto& w : ens.members) {
    for (int i = 0; i < 2; ++i) {
      s.c[i] += w.c[i];
      s2.c[i] += w.c[i].square();
    }
  }
  MeanEstimate r{(1.0 / n) * s, VectorField(g)};
  for (int i = 0; i < 2; ++i)
    r.variance.c[i] =
        ((s2.c[i] / n - r.mean.c[i].square()) * (n / (n - 1.0))).max(0.0) / n;
  return r;
}

SecondMomentEstimate estimate_F(const EnsembleState& ens) {
  ens.validate();
  const GridSpec& g = ens.members.front().grid;
  const double n = double(ens.members.size());
  Tensor2Field s(g), s2(g);
  for (const auto& w : ens.members) {
    for (int i = 0; i < 2; ++i) {
      for (int j = i; j < 2; ++j) {
        const Array2 p = w.c[i] * w.c[j];
        s(i, j) += p;
        s2(i, j) += p.square();
      }
    }
  }
  s(1, 0) = s(0, 1);
  s2(1, 0) = s2(0, 1);
  SecondMomentEstimate r{(1.0 / n) * s, Tensor2Field(g)};
  for (int k = 0; k < 4; ++k)
    r.variance.c[k] =
        ((s2.c[k] / n - r.F.c[k].square()) * (n / (n - 1.0))).max(0.0) / n;
  return r;
}

ErrorReport compare_with_pde(const std::vector<EnsembleSample>& ens_series,
                             const std::vector<VectorField>& pde_mean_series,
                             const std::vector<Tensor2Field>& pde_F_series,
                             double bias_allowance) {
  if (ens_series.size() != pde_mean_series.size() ||
      ens_series.size() != pde_F_series.size())
    throw ShapeError("ensemble and PDE series have different time grids");
  ErrorReport rep;
  for (std::size_t k = 0; k < ens_series.size(); ++k) {
    const auto& e = ens_series[k];
    const double nm = l2(pde_mean_series[k]);
    const double nf = l2(pde_F_series[k]);
    const double sm = nm > 0.0 ? nm : 1.0;
    const double sf = nf > 0.0 ? nf : 1.0;
    rep.t.push_back(e.t);
    rep.e_mean.push_back(l2(e.mean.mean - pde_mean_series[k]) / sm);
    rep.e_F.push_back(l2(e.F.F - pde_F_series[k]) / sf);
    rep.se_mean.push_back(std::sqrt(sum_all(e.mean.variance)) / sm);
    rep.se_F.push_back(std::sqrt(sum_all(e.F.variance)) / sf);
    if (rep.e_mean.back() > 4.0 * rep.se_mean.back() + bias_allowance ||
        rep.e_F.back() > 4.0 * rep.se_F.back() + bias_allowance)
      rep.pass = false;
  }
  return rep;
}

bool MartingaleEstimate::pass() const {
  return std::abs(mean) <= 4.0 * std_error;
}

MartingaleEstimate martingale_check(const Integrand& zeta, int n_paths,
                                    double dt, double t_end,
                                    std::uint64_t seed) {
  if (n_paths < 2) throw Error("martingale_check needs at least two paths");
  if (!(dt > 0.0) || !(t_end > 0.0))
    throw Error("martingale_check needs positive dt and t_end");
  const int steps = int(std::lround(t_end / dt));
  const double sdt = std::sqrt(dt);
  std::vector<double> values(static_cast<std::size_t>(n_paths));
  parallel_for(values.size(), [&](std::size_t p) {
    rng::Stream gen(seed, std::uint32_t(p));
    std::vector<double> W(std::size_t(steps) + 1, 0.0);
    for (int k = 0; k < steps; ++k) W[k + 1] = W[k] + sdt * gen.normal();
    double s = 0.0;
    for (int k = 0; k < steps; ++k) s += zeta(W, k) * (W[k + 1] - W[k]);
    values[p] = s;
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n_paths;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (n_paths - 1);
  return {mean, std::sqrt(var / n_paths)};
}

ParticleCloud simulate_particles(const ParticleCloud& cloud,
                                 const VectorField& ubar,
                                 const corr::NoiseBasis& basis, double eps,
                                 double dt, int n_steps, std::uint64_t seed) {
  if (!(dt > 0.0) || n_steps < 0)
    throw Error("simulate_particles needs dt > 0 and n_steps >= 0");
  const GridSpec& g = ubar.grid;
  VectorField drift = ubar;
  for (const auto& x : basis.xi)
    drift += (0.5 * eps * eps) * field::directional_derivative(x, x);
  const VectorInterpolant b(drift);
  std::vector<VectorInterpolant> xi;
  for (const auto& x : basis.xi) xi.emplace_back(x);

  ParticleCloud out = cloud;
  const double sdt = std::sqrt(dt);
  parallel_for(out.positions.size(), [&](std::size_t p) {
    double x = out.positions[p][0], y = out.positions[p][1];
    for (int s = 0; s < n_steps; ++s) {
      const auto k1 = b(x, y);
      const auto k2 = b(x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1]);
      const auto k3 = b(x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1]);
      const auto k4 = b(x + dt * k3[0], y + dt * k3[1]);
      double nx = x + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      double ny = y + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      if (eps != 0.0) {
        for (std::size_t i = 0; i < xi.size(); ++i) {
          const double dw = sdt * rng::normal(seed, std::uint32_t(p),
                                              std::uint32_t(i), std::uint32_t(s));
          const auto v = xi[i](x, y);
          nx += eps * v[0] * dw;
          ny += eps * v[1] * dw;
        }
      }
      x = wrap_periodic(nx, g.length);
      y = wrap_periodic(ny, g.length);
    }
    out.positions[p] = {x, y};
  });
  out.t = cloud.t + n_steps * dt;
  return out;
}

} // namespace lael::mc
