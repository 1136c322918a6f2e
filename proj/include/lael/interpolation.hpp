#pragma once

#include <array>

#include "lael/fields.hpp"

namespace lael {

/// Periodic tensor-product cubic Hermite interpolant. Nodal derivatives
/// f_x, f_y, f_xy come from spectral differentiation, so the interpolant is
/// fourth-order accurate and C^1 across cells.
class BicubicInterpolant {
public:
  explicit BicubicInterpolant(const ScalarField& f);
  double operator()(double x, double y) const;

private:
  GridSpec grid_;
  Array2 f_, fx_, fy_, fxy_;
};

class VectorInterpolant {
public:
  explicit VectorInterpolant(const VectorField& v)
      : x_(ScalarField(v.grid, v.c[0])), y_(ScalarField(v.grid, v.c[1])) {}
  std::array<double, 2> operator()(double x, double y) const {
    return {x_(x, y), y_(x, y)};
  }

private:
  BicubicInterpolant x_;
  BicubicInterpolant y_;
};

/// Wraps a coordinate into [0, length).
double wrap_periodic(double x, double length);

} // namespace lael
