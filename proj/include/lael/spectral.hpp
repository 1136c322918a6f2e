#pragma once

// Real-to-complex 2D transforms on the periodic grid (FFTW backed).
//
// A Spectrum is the n x (n/2 + 1) half plane of coefficients, normalized so
// that the (0, 0) entry is the grid mean. Row index is the x wavenumber
// (wrapped), column index the non-negative y wavenumber.

#include <complex>

#include <Eigen/Core>

#include "lael/fields.hpp"

namespace lael::spectral {

using Complex = std::complex<double>;
using Spectrum =
    Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Spectrum forward(const Array2& a);
Array2 inverse(const Spectrum& s);

/// Signed integer wavenumber of row i.
inline int wavenumber_x(int i, int n) { return i <= n / 2 ? i : i - n; }

/// Multiplier of the first derivative along an axis; zero on the Nyquist
/// mode so the derivative stays real and skew-adjoint.
inline double derivative_symbol(int k, int n, double k0) {
  return (k == n / 2 || k == -n / 2) ? 0.0 : k * k0;
}

/// In-place i k multiplication for d/dx (axis 0) or d/dy (axis 1).
void differentiate(Spectrum& s, int axis, double k0);

/// Zeroes every mode with |k_x| or |k_y| above n/3.
void dealias(Spectrum& s);

/// True when every coefficient with |k_x| or |k_y| >= kmax is below tol.
bool band_limited(const Spectrum& s, int kmax, double tol);

} // namespace lael::spectral
