#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lael {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different grids or have mismatched dimensions.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// A time step violates the advective CFL bound dt <= 0.5 h / |u|_inf.
class CflError : public Error {
public:
  CflError(double dt, double dt_max)
      : Error("CFL violation: dt=" + std::to_string(dt) +
              " exceeds bound " + std::to_string(dt_max)),
        dt_(dt), dt_max_(dt_max) {}
  double dt() const { return dt_; }
  double dt_max() const { return dt_max_; }

private:
  double dt_;
  double dt_max_;
};

/// Iterative solve hit its iteration cap.
class SolveError : public Error {
public:
  SolveError(int iterations, double residual)
      : Error("linear solve did not converge after " +
              std::to_string(iterations) + " iterations (relative residual " +
              std::to_string(residual) + ")"),
        iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

private:
  int iterations_;
  double residual_;
};

/// Curved geometry requested; only the flat torus is implemented.
class UnsupportedGeometry : public Error {
public:
  using Error::Error;
};

enum class Geometry { flat, curved };

inline void require_flat(Geometry g) {
  if (g != Geometry::flat)
    throw UnsupportedGeometry(
        "curvature terms are only implemented as identically zero; "
        "geometry must be flat");
}

/// Residuals measured on a geometric step ladder.
struct ConvergenceReport {
  std::vector<double> step;      // h at each level, decreasing
  std::vector<double> residual;  // residual at each level
  double observed_order = 0.0;   // least-squares slope of log r vs log h
  double extrapolated_residual = 0.0;
  bool monotone = true;          // false if a fitted residual grew
  std::size_t fitted_levels = 0; // levels above the roundoff floor
};

/// Fills observed_order / monotone / fitted_levels from step and residual.
/// The fit runs over the leading levels whose residual stays above the
/// matching entry of `floors` (a per-level roundoff estimate); everything
/// from the first level at or below its floor onward is excluded.
inline void fit_order(ConvergenceReport& r, const std::vector<double>& floors) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r.residual.size(); ++i) {
    if (r.residual[i] <= floors[i]) break;
    lx.push_back(std::log(r.step[i]));
    ly.push_back(std::log(r.residual[i]));
  }
  r.fitted_levels = lx.size();
  // Growth inside the roundoff-dominated tail is expected and not flagged.
  r.monotone = true;
  for (std::size_t i = 1; i < r.fitted_levels; ++i)
    if (r.residual[i] > r.residual[i - 1]) r.monotone = false;
  if (lx.size() < 2) {
    r.observed_order = 0.0;
    return;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(lx.size());
  my /= double(lx.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  r.observed_order = sxy / sxx;
}

inline void fit_order(ConvergenceReport& r, double floor) {
  fit_order(r, std::vector<double>(r.residual.size(), floor));
}

} // namespace lael
