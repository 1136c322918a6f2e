#include "lael/interpolation.hpp"

#include <cmath>

#include "lael/field_calculus.hpp"

namespace lael {

double wrap_periodic(double x, double length) {
  double r = std::fmod(x, length);
  if (r < 0.0) r += length;
  if (r >= length) r -= length;
  return r;
}

BicubicInterpolant::BicubicInterpolant(const ScalarField& f) : grid_(f.grid) {
  const double k0 = grid_.k0();
  auto s = spectral::forward(f.values());
  auto sx = s;
  spectral::differentiate(sx, 0, k0);
  auto sy = s;
  spectral::differentiate(sy, 1, k0);
  auto sxy = sx;
  spectral::differentiate(sxy, 1, k0);
  f_ = f.values();
  fx_ = spectral::inverse(sx);
  fy_ = spectral::inverse(sy);
  fxy_ = spectral::inverse(sxy);
}

double BicubicInterpolant::operator()(double x, double y) const {
  const int n = grid_.n;
  const double h = grid_.spacing();
  const double gx = wrap_periodic(x, grid_.length) / h;
  const double gy = wrap_periodic(y, grid_.length) / h;
  int i0 = int(std::floor(gx));
  int j0 = int(std::floor(gy));
  const double s = gx - i0;
  const double t = gy - j0;
  i0 %= n;
  j0 %= n;
  const int i1 = (i0 + 1) % n;
  const int j1 = (j0 + 1) % n;

  // Cubic Hermite basis: value at node 0/1 and slope at node 0/1.
  auto basis = [](double u) {
    const double u2 = u * u, u3 = u2 * u;
    return std::array<double, 4>{2 * u3 - 3 * u2 + 1, -2 * u3 + 3 * u2,
                                 u3 - 2 * u2 + u, u3 - u2};
  };
  const auto bs = basis(s);
  const auto bt = basis(t);
  const int ii[2] = {i0, i1};
  const int jj[2] = {j0, j1};

  double acc = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const int i = ii[a], j = jj[b];
      acc += f_(i, j) * bs[a] * bt[b] + h * fx_(i, j) * bs[2 + a] * bt[b] +
             h * fy_(i, j) * bs[a] * bt[2 + b] +
             h * h * fxy_(i, j) * bs[2 + a] * bt[2 + b];
    }
  }
  return acc;
}

} // namespace lael
