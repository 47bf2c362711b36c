#include "vort2d/fields.hpp"

#include <algorithm>
#include <cmath>

namespace vort {

void SpectralField::zero_nyquist() {
  const int n = grid_.n;
  const int ny = n / 2;
  for (int b = 0; b < n; ++b) c_[static_cast<size_t>(ny * n + b)] = Complex{0.0, 0.0};
  for (int a = 0; a < n; ++a) c_[static_cast<size_t>(a * n + ny)] = Complex{0.0, 0.0};
}

void SpectralField::enforce_reality() {
  zero_nyquist();
  const int n = grid_.n;
  for (int a = 0; a < n; ++a) {
    const int ma = a == 0 ? 0 : n - a;
    for (int b = 0; b < n; ++b) {
      const int mb = b == 0 ? 0 : n - b;
      const int i = a * n + b;
      const int j = ma * n + mb;
      if (i > j) continue;  // each pair once
      if (i == j) {
        c_[static_cast<size_t>(i)] = Complex{c_[static_cast<size_t>(i)].real(), 0.0};
      } else {
        const Complex avg =
            0.5 * (c_[static_cast<size_t>(i)] + std::conj(c_[static_cast<size_t>(j)]));
        c_[static_cast<size_t>(i)] = avg;
        c_[static_cast<size_t>(j)] = std::conj(avg);
      }
    }
  }
}

double SpectralField::reality_defect() const {
  const int n = grid_.n;
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    const int ma = a == 0 ? 0 : n - a;
    for (int b = 0; b < n; ++b) {
      const int mb = b == 0 ? 0 : n - b;
      const Complex d = c_[static_cast<size_t>(a * n + b)] -
                        std::conj(c_[static_cast<size_t>(ma * n + mb)]);
      worst = std::max(worst, std::abs(d));
    }
  }
  return worst;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

void SpectralField::axpy(double s, const SpectralField& o) {
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += s * o.c_[i];
}

double SpectralField::l2_norm() const {
  double acc = 0.0;
  for (const auto& v : c_) acc += std::norm(v);
  return std::sqrt(acc);
}

}  // namespace vort
