#include "lael/spectral.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>

namespace lael::spectral {
namespace {

// One plan pair per grid size. Plans are created under a lock (the FFTW
// planner is not thread safe) and executed through the new-array interface,
// which is. FFTW_ESTIMATE keeps the algorithm, and so the rounding, the same
// from run to run.
struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Plans(int n) {
    const int nh = n / 2 + 1;
    double* rbuf = fftw_alloc_real(std::size_t(n) * n);
    fftw_complex* cbuf = fftw_alloc_complex(std::size_t(n) * nh);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c = fftw_plan_dft_r2c_2d(n, n, rbuf, cbuf, flags);
    c2r = fftw_plan_dft_c2r_2d(n, n, cbuf, rbuf, flags | FFTW_DESTROY_INPUT);
    fftw_free(rbuf);
    fftw_free(cbuf);
  }
  ~Plans() {
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

const Plans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plans>(n);
  return *slot;
}

} // namespace

Spectrum forward(const Array2& a) {
  const int n = int(a.rows());
  Spectrum s(n, n / 2 + 1);
  // r2c leaves its input untouched, but the interface is non-const.
  fftw_execute_dft_r2c(plans_for(n).r2c, const_cast<double*>(a.data()),
                       reinterpret_cast<fftw_complex*>(s.data()));
  s /= double(n) * double(n);
  return s;
}

Array2 inverse(const Spectrum& s) {
  const int n = int(s.rows());
  Spectrum work = s;
  Array2 a(n, n);
  fftw_execute_dft_c2r(plans_for(n).c2r,
                       reinterpret_cast<fftw_complex*>(work.data()), a.data());
  return a;
}

void differentiate(Spectrum& s, int axis, double k0) {
  const int n = int(s.rows());
  const int nh = int(s.cols());
  const Complex I(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const int kx = wavenumber_x(i, n);
    for (int j = 0; j < nh; ++j) {
      const double k = axis == 0 ? derivative_symbol(kx, n, k0)
                                 : derivative_symbol(j, n, k0);
      s(i, j) *= I * k;
    }
  }
}

void dealias(Spectrum& s) {
  const int n = int(s.rows());
  const int nh = int(s.cols());
  const int kmax = n / 3;
  for (int i = 0; i < n; ++i) {
    const int kx = wavenumber_x(i, n);
    for (int j = 0; j < nh; ++j)
      if (std::abs(kx) > kmax || j > kmax) s(i, j) = 0.0;
  }
}

bool band_limited(const Spectrum& s, int kmax, double tol) {
  const int n = int(s.rows());
  const int nh = int(s.cols());
  for (int i = 0; i < n; ++i) {
    const int kx = wavenumber_x(i, n);
    for (int j = 0; j < nh; ++j)
      if ((std::abs(kx) >= kmax || j >= kmax) && std::abs(s(i, j)) > tol)
        return false;
  }
  return true;
}

} // namespace lael::spectral
