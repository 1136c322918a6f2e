#pragma once

// Grid fields on the flat periodic square [0, L)^2.
//
// Every field stores its components as n x n row-major arrays indexed
// (ix, iy) with x = ix * h, y = iy * h. The flat metric makes the musical
// isomorphisms component-identity maps, so vectors and covectors share a
// layout but are kept as distinct types.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>

#include <Eigen/Core>

#include "lael/common.hpp"

namespace lael {

using Array2 =
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GridSpec {
  int n = 64;
  double length = 2.0 * std::numbers::pi;

  GridSpec() = default;
  GridSpec(int n_, double length_ = 2.0 * std::numbers::pi)
      : n(n_), length(length_) {
    validate();
  }

  void validate() const {
    if (n < 8 || (n & (n - 1)) != 0)
      throw Error("grid n must be a power of two and at least 8");
    if (!(length > 0.0)) throw Error("grid length must be positive");
  }

  double spacing() const { return length / n; }
  double coord(int i) const { return i * spacing(); }
  double cell_area() const { return spacing() * spacing(); }
  /// Wavenumber unit 2 pi / L.
  double k0() const { return 2.0 * std::numbers::pi / length; }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.n == b.n && a.length == b.length;
  }
};

namespace tag {
struct scalar {};
struct vector {};
struct covector {};
struct tensor2 {};
} // namespace tag

/// N component arrays on a shared grid. The tag keeps physically different
/// objects (vector vs covector) from mixing in arithmetic.
template <std::size_t N, class Tag>
struct ComponentField {
  static constexpr std::size_t components = N;

  GridSpec grid;
  std::array<Array2, N> c;

  ComponentField() = default;
  explicit ComponentField(const GridSpec& g) : grid(g) {
    for (auto& a : c) a = Array2::Zero(g.n, g.n);
  }

  static ComponentField zero(const GridSpec& g) { return ComponentField(g); }

  bool all_finite() const {
    for (const auto& a : c)
      if (!a.allFinite()) return false;
    return true;
  }

  ComponentField& operator+=(const ComponentField& o) {
    check(o);
    for (std::size_t i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  ComponentField& operator-=(const ComponentField& o) {
    check(o);
    for (std::size_t i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  ComponentField& operator*=(double s) {
    for (auto& a : c) a *= s;
    return *this;
  }

  friend ComponentField operator+(ComponentField a, const ComponentField& b) {
    return a += b;
  }
  friend ComponentField operator-(ComponentField a, const ComponentField& b) {
    return a -= b;
  }
  friend ComponentField operator-(ComponentField a) { return a *= -1.0; }
  friend ComponentField operator*(double s, ComponentField a) { return a *= s; }
  friend ComponentField operator*(ComponentField a, double s) { return a *= s; }

  void check(const ComponentField& o) const {
    if (!(grid == o.grid)) throw ShapeError("fields live on different grids");
  }
};

struct ScalarField : ComponentField<1, tag::scalar> {
  using ComponentField::ComponentField;
  ScalarField(const ComponentField& f) : ComponentField(f) {}
  ScalarField(const GridSpec& g, Array2 v) : ComponentField(g) {
    c[0] = std::move(v);
  }
  Array2& values() { return c[0]; }
  const Array2& values() const { return c[0]; }
};

struct VectorField : ComponentField<2, tag::vector> {
  using ComponentField::ComponentField;
  VectorField(const ComponentField& f) : ComponentField(f) {}
  VectorField(const GridSpec& g, Array2 x, Array2 y) : ComponentField(g) {
    c[0] = std::move(x);
    c[1] = std::move(y);
  }
};

struct CovectorField : ComponentField<2, tag::covector> {
  using ComponentField::ComponentField;
  CovectorField(const ComponentField& f) : ComponentField(f) {}
  CovectorField(const GridSpec& g, Array2 x, Array2 y) : ComponentField(g) {
    c[0] = std::move(x);
    c[1] = std::move(y);
  }
};

/// Rank-2 contravariant tensor, component (i, j) stored at c[2 i + j].
struct Tensor2Field : ComponentField<4, tag::tensor2> {
  using ComponentField::ComponentField;
  Tensor2Field(const ComponentField& f) : ComponentField(f) {}

  Array2& operator()(int i, int j) { return c[2 * i + j]; }
  const Array2& operator()(int i, int j) const { return c[2 * i + j]; }

  /// Exact symmetry: off-diagonal entries bitwise equal.
  bool is_symmetric() const { return ((*this)(0, 1) == (*this)(1, 0)).all(); }
  static Tensor2Field identity(const GridSpec& g, double scale = 1.0) {
    Tensor2Field t(g);
    t(0, 0).setConstant(scale);
    t(1, 1).setConstant(scale);
    return t;
  }
};

/// Samples f(x, y) on the grid.
inline Array2 sample(const GridSpec& g,
                     const std::function<double(double, double)>& f) {
  Array2 a(g.n, g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) a(i, j) = f(g.coord(i), g.coord(j));
  return a;
}

inline ScalarField scalar_from(const GridSpec& g,
                               const std::function<double(double, double)>& f) {
  return ScalarField(g, sample(g, f));
}

inline VectorField vector_from(const GridSpec& g,
                               const std::function<double(double, double)>& fx,
                               const std::function<double(double, double)>& fy) {
  return VectorField(g, sample(g, fx), sample(g, fy));
}

inline CovectorField flat(const VectorField& v) {
  return CovectorField(v.grid, v.c[0], v.c[1]);
}
inline VectorField sharp(const CovectorField& m) {
  return VectorField(m.grid, m.c[0], m.c[1]);
}

template <std::size_t N, class Tag>
double sup_norm(const ComponentField<N, Tag>& f) {
  double m = 0.0;
  for (const auto& a : f.c) m = std::max(m, a.abs().maxCoeff());
  return m;
}

/// Values of a field at the nodes of a coarser grid of the same length
/// whose size divides the fine one.
template <std::size_t N, class Tag>
ComponentField<N, Tag> restrict_to(const ComponentField<N, Tag>& fine,
                                   const GridSpec& coarse) {
  if (fine.grid.length != coarse.length || fine.grid.n % coarse.n != 0)
    throw ShapeError("coarse grid must divide the fine grid");
  const int r = fine.grid.n / coarse.n;
  ComponentField<N, Tag> out(coarse);
  for (std::size_t k = 0; k < N; ++k)
    for (int i = 0; i < coarse.n; ++i)
      for (int j = 0; j < coarse.n; ++j) out.c[k](i, j) = fine.c[k](r * i, r * j);
  return out;
}

} // namespace lael
