#pragma once

#include <complex>
#include <vector>

#include "vort2d/grid.hpp"

namespace vort {

using Complex = std::complex<double>;

// Fourier coefficients of a real scalar field on the torus.
class SpectralField {
 public:
  explicit SpectralField(const TorusGrid& grid)
      : grid_(grid), c_(static_cast<size_t>(grid.size()), Complex{0.0, 0.0}) {}

  const TorusGrid& grid() const { return grid_; }
  int n() const { return grid_.n; }

  Complex& at(int k1, int k2) { return c_[static_cast<size_t>(grid_.flat(k1, k2))]; }
  const Complex& at(int k1, int k2) const {
    return c_[static_cast<size_t>(grid_.flat(k1, k2))];
  }
  Complex* data() { return c_.data(); }
  const Complex* data() const { return c_.data(); }
  size_t size() const { return c_.size(); }
  Complex& operator[](size_t i) { return c_[i]; }
  const Complex& operator[](size_t i) const { return c_[i]; }

  Complex mean_coeff() const { return c_[0]; }
  void project_zero_mean() { c_[0] = Complex{0.0, 0.0}; }

  // Repair conj(g_k) = g_{-k} by averaging conjugate pairs; zeroes the
  // non-representable Nyquist rows.
  void enforce_reality();
  double reality_defect() const;  // max |g_k - conj(g_{-k})|

  void zero_nyquist();

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  // this += s * o
  void axpy(double s, const SpectralField& o);

  // sqrt(sum |g_k|^2); equals the L2 norm of the field (Parseval).
  double l2_norm() const;

 private:
  TorusGrid grid_;
  std::vector<Complex> c_;
};

inline SpectralField operator+(SpectralField a, const SpectralField& b) {
  a += b;
  return a;
}
inline SpectralField operator-(SpectralField a, const SpectralField& b) {
  a -= b;
  return a;
}
inline SpectralField operator*(double s, SpectralField a) {
  a *= s;
  return a;
}

// Samples of a real scalar field on the n x n collocation lattice,
// x_j = (2pi j1/n, 2pi j2/n).
class RealField {
 public:
  explicit RealField(const TorusGrid& grid)
      : grid_(grid), s_(static_cast<size_t>(grid.size()), 0.0) {}

  const TorusGrid& grid() const { return grid_; }
  int n() const { return grid_.n; }

  double& at(int j1, int j2) { return s_[static_cast<size_t>(j1 * grid_.n + j2)]; }
  const double& at(int j1, int j2) const {
    return s_[static_cast<size_t>(j1 * grid_.n + j2)];
  }
  double* data() { return s_.data(); }
  const double* data() const { return s_.data(); }
  size_t size() const { return s_.size(); }
  double& operator[](size_t i) { return s_[i]; }
  const double& operator[](size_t i) const { return s_[i]; }

 private:
  TorusGrid grid_;
  std::vector<double> s_;
};

// Two-component spectral vector field (velocities u, quadratic fluxes q).
// Divergence-freeness is a property of how a value was produced, not of
// the container; velocity_from_vorticity output satisfies it exactly.
struct VelocitySpectral {
  SpectralField c1;
  SpectralField c2;

  explicit VelocitySpectral(const TorusGrid& grid) : c1(grid), c2(grid) {}
  const TorusGrid& grid() const { return c1.grid(); }
};

}  // namespace vort
