#include "lael/lae_solver.hpp"

#include <cmath>
#include <limits>

#include "lael/field_calculus.hpp"
#include "lael/spectral.hpp"

namespace lael::lae {
namespace {

using field::c_operator;
using field::dealias;
using field::leray_project;

double dot(const VectorField& a, const VectorField& b) {
  return (a.c[0] * b.c[0]).sum() + (a.c[1] * b.c[1]).sum();
}

// x - eps^2 C_F x, projected.
VectorField apply_operator(const VectorField& x, const Tensor2Field& F,
                           double eps2) {
  return leray_project(x - eps2 * c_operator(x, F));
}

// P (1 + eps^2 fbar |k|^2)^-1 r, one transform pair per component.
VectorField precondition(const VectorField& r, double eps2, double fbar) {
  const int n = r.grid.n;
  const double k0 = r.grid.k0();
  auto sx = spectral::forward(r.c[0]);
  auto sy = spectral::forward(r.c[1]);
  for (int i = 0; i < n; ++i) {
    const double kx =
        spectral::derivative_symbol(spectral::wavenumber_x(i, n), n, k0);
    for (int j = 0; j < sx.cols(); ++j) {
      const double ky = spectral::derivative_symbol(j, n, k0);
      const double k2 = kx * kx + ky * ky;
      const double d = 1.0 / (1.0 + eps2 * fbar * k2);
      auto px = sx(i, j) * d, py = sy(i, j) * d;
      if (k2 > 0.0) {
        const auto kdot = (kx * px + ky * py) / k2;
        px -= kx * kdot;
        py -= ky * kdot;
      }
      sx(i, j) = px;
      sy(i, j) = py;
    }
  }
  return VectorField(r.grid, spectral::inverse(sx), spectral::inverse(sy));
}

VectorField advect(const VectorField& u, const VectorField& q) {
  return field::directional_derivative(u, q);
}

// sum_j (C u)_j grad u^j.
VectorField weighted_gradient(const VectorField& cu, const VectorField& u) {
  const Tensor2Field j = field::jacobian(u);
  VectorField out(u.grid);
  for (int i = 0; i < 2; ++i) out.c[i] = cu.c[0] * j(0, i) + cu.c[1] * j(1, i);
  return out;
}

} // namespace

void ModelParams::validate() const {
  grid.validate();
  if (!(eps >= 0.0 && eps < 1.0)) throw Error("[model].eps must lie in [0, 1)");
  if (!(dt > 0.0)) throw Error("[time].dt must be positive");
  if (!(t_end >= 0.0)) throw Error("[time].t_end must be non-negative");
  if (!(linsolve_tol > 0.0 && linsolve_tol <= 1e-4))
    throw Error("[model].linsolve_tol must lie in (0, 1e-4]");
  if (linsolve_maxit < 1) throw Error("[model].linsolve_maxit must be >= 1");
}

CovectorField momentum_map(const VectorField& ubar, const Tensor2Field& F,
                           double eps, Geometry geometry) {
  require_flat(geometry); // R(u, .) : F vanishes
  return flat(ubar - (eps * eps) * c_operator(ubar, F));
}

VectorField invert_momentum(const CovectorField& m, const Tensor2Field& F,
                            double eps, double tol, int maxit,
                            SolveInfo* info) {
  const double eps2 = eps * eps;
  const VectorField b = leray_project(sharp(m));
  if (info) *info = {};
  if (eps2 == 0.0) return b;

  const double bnorm = std::sqrt(dot(b, b));
  const double fbar = 0.5 * (F(0, 0) + F(1, 1)).mean();
  // A projected right-hand side at roundoff level of m has nothing to solve.
  const double mnorm = std::sqrt(dot(sharp(m), sharp(m)));
  if (bnorm <= 64.0 * std::numeric_limits<double>::epsilon() * mnorm)
    return leray_project(precondition(b, eps2, fbar));

  VectorField x(b.grid);
  VectorField r = b;
  VectorField z = precondition(r, eps2, fbar);
  VectorField p = z;
  double rz = dot(r, z);
  double rel = 1.0;
  for (int it = 1; it <= maxit; ++it) {
    const VectorField ap = apply_operator(p, F, eps2);
    const double alpha = rz / dot(p, ap);
    x += alpha * p;
    r -= alpha * ap;
    rel = std::sqrt(dot(r, r)) / bnorm;
    if (rel <= tol) {
      if (info) *info = {it, rel};
      return leray_project(x);
    }
    z = precondition(r, eps2, fbar);
    const double rz_new = dot(r, z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolveError(maxit, rel);
}

ResolvedRhs resolved_rhs(const FlowState& s, const ModelParams& params,
                         const corr::NoiseBasis& basis) {
  require_flat(params.geometry);
  const double eps2 = params.eps * params.eps;
  const VectorField& u = s.ubar;
  const Tensor2Field& F = s.F.F;

  const VectorField adv = advect(u, u);
  VectorField b = -adv;
  if (eps2 > 0.0) {
    const VectorField cu = c_operator(u, F);
    b += eps2 * (weighted_gradient(cu, u) + c_operator(adv, F));
    if (!basis.empty()) b += eps2 * c_operator(u, corr::forcing(basis));
  }
  b = dealias(b);

  ResolvedRhs out;
  SolveInfo info;
  out.dubar_dt = invert_momentum(flat(b), F, params.eps, params.linsolve_tol,
                                 params.linsolve_maxit, &info);
  out.iterations = info.iterations;

  // Whatever the projected solve removed is the pressure gradient.
  VectorField grad_p = b - out.dubar_dt;
  if (eps2 > 0.0) grad_p += eps2 * c_operator(out.dubar_dt, F);
  out.pressure = field::inverse_laplacian(field::divergence(grad_p));
  return out;
}

double ep_residual(const FlowState& s, const ModelParams& params,
                   const VectorField& a, const Tensor2Field& dF) {
  require_flat(params.geometry);
  const double eps2 = params.eps * params.eps;
  const VectorField& u = s.ubar;
  const Tensor2Field& F = s.F.F;
  const VectorField m = sharp(momentum_map(u, F, params.eps, params.geometry));
  const VectorField dm = a - eps2 * (c_operator(a, F) + c_operator(u, dF));
  const VectorField r = dm + sharp(field::lie_deriv_oneform(u, flat(m)));
  return sup_norm(leray_project(r));
}

FlowState step_system(const FlowState& s, const ModelParams& params,
                      const corr::NoiseBasis& basis, Diagnostics* diag) {
  corr::check_cfl(s.ubar, params.dt);
  const double dt = params.dt;
  int iters = 0;

  auto stage = [&](const FlowState& st) {
    ResolvedRhs r = resolved_rhs(st, params, basis);
    iters = std::max(iters, r.iterations);
    return std::pair{std::move(r.dubar_dt),
                     corr::f_rhs(st.ubar, st.F.F, basis)};
  };
  auto shifted = [&](double h, const std::pair<VectorField, Tensor2Field>& k) {
    return FlowState{s.ubar + h * k.first,
                     {s.F.F + h * k.second, s.t + h}, s.t + h};
  };

  const auto k1 = stage(s);
  const auto k2 = stage(shifted(0.5 * dt, k1));
  const auto k3 = stage(shifted(0.5 * dt, k2));
  const auto k4 = stage(shifted(dt, k3));

  FlowState out;
  out.t = s.t + dt;
  out.ubar = leray_project(
      s.ubar + (dt / 6.0) * (k1.first + 2.0 * k2.first + 2.0 * k3.first +
                             k4.first));
  out.F.F = s.F.F + (dt / 6.0) * (k1.second + 2.0 * k2.second +
                                  2.0 * k3.second + k4.second);
  out.F.F(1, 0) = out.F.F(0, 1);
  out.F.t = out.t;
  if (diag) {
    diag->kinetic = kinetic_energy(out.ubar);
    diag->action = evaluate_action(out.ubar, out.F.F, params.eps);
    diag->div_norm = field::max_divergence(out.ubar);
    diag->linsolve_iters = iters;
  }
  return out;
}

double kinetic_energy(const VectorField& ubar) {
  return 0.5 * field::inner_product(ubar, ubar);
}

double evaluate_action(const VectorField& u, const Tensor2Field& F,
                       double eps, ActionForm form) {
  const double eps2 = eps * eps;
  const double ke = kinetic_energy(u);
  if (eps2 == 0.0) return ke;
  if (form == ActionForm::operator_)
    return ke - 0.5 * eps2 * field::inner_product(c_operator(u, F), u);
  const Tensor2Field j = field::jacobian(u);
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) s += (F(a, b) * j(i, a) * j(i, b)).sum();
  return ke + 0.5 * eps2 * s * u.grid.cell_area();
}

Diagnostics diagnose(const FlowState& s, const ModelParams& params,
                     const corr::NoiseBasis& basis) {
  Diagnostics d;
  d.kinetic = kinetic_energy(s.ubar);
  d.action = evaluate_action(s.ubar, s.F.F, params.eps);
  d.div_norm = field::max_divergence(s.ubar);
  const ResolvedRhs r = resolved_rhs(s, params, basis);
  d.linsolve_iters = r.iterations;
  d.pressure = r.pressure;
  return d;
}

VectorField taylor_green(const GridSpec& g) {
  return vector_from(
      g, [](double x, double y) { return std::sin(x) * std::cos(y); },
      [](double x, double y) { return -std::cos(x) * std::sin(y); });
}

ConvergenceReport verify_commutation(const VectorOfTime& ubar_of_t,
                                     const TensorOfTime& F_of_t,
                                     const TensorOfTime& G_of_t,
                                     const VectorOfTime& q_of_t, double h_t,
                                     double t0,
                                     const CommutationOptions& opt) {
  if (!(h_t > 0.0)) throw Error("verify_commutation: h_t must be positive");
  if (opt.levels < 3) throw Error("verify_commutation: need at least 3 levels");

  const VectorField u = ubar_of_t(t0);
  const Tensor2Field F = F_of_t(t0);
  const VectorField q = q_of_t(t0);
  const VectorField cq = c_operator(q, F);
  // h-independent part of the commutator minus the right-hand side.
  const VectorField fixed = advect(u, cq) - c_operator(advect(u, q), F) -
                            c_operator(q, G_of_t(t0));
  auto dynamic = [&](double h) {
    const double tp = t0 + h, tm = t0 - h;
    const VectorField qp = q_of_t(tp), qm = q_of_t(tm);
    const VectorField dcq =
        (1.0 / (2.0 * h)) * (c_operator(qp, F_of_t(tp)) - c_operator(qm, F_of_t(tm)));
    return dcq - c_operator((1.0 / (2.0 * h)) * (qp - qm), F);
  };

  ConvergenceReport rep;
  std::vector<VectorField> d;
  std::vector<double> floors;
  const double scale = sup_norm(cq) + sup_norm(c_operator(q, F_of_t(t0 + h_t)));
  double h = h_t;
  for (int l = 0; l < opt.levels; ++l, h *= opt.ratio) {
    d.push_back(dynamic(h));
    rep.step.push_back(h);
    rep.residual.push_back(sup_norm(d.back() + fixed));
    floors.push_back(100.0 * std::numeric_limits<double>::epsilon() * scale / h);
  }
  fit_order(rep, floors);

  const double r2 = 1.0 / (opt.ratio * opt.ratio);
  const VectorField e0 = (1.0 / (r2 - 1.0)) * (r2 * d[1] - d[0]);
  const VectorField e1 = (1.0 / (r2 - 1.0)) * (r2 * d[2] - d[1]);
  const double r4 = r2 * r2;
  rep.extrapolated_residual =
      sup_norm((1.0 / (r4 - 1.0)) * (r4 * e1 - e0) + fixed);
  return rep;
}

} // namespace lael::lae
