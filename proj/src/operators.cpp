#include "vort2d/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vort2d/errors.hpp"

namespace vort {

SpectralField laplacian(const SpectralField& g) {
  const int n = g.n();
  const TorusGrid& grid = g.grid();
  SpectralField out(grid);
  for (int a = 0; a < n; ++a) {
    const double k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const double k2 = grid.freq(b);
      out[static_cast<size_t>(a * n + b)] =
          -(k1 * k1 + k2 * k2) * g[static_cast<size_t>(a * n + b)];
    }
  }
  return out;
}

double sobolev_norm(const SpectralField& g, double a) {
  const int n = g.n();
  const TorusGrid& grid = g.grid();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k1 = grid.freq(i);
    for (int j = 0; j < n; ++j) {
      if (i == 0 && j == 0) continue;
      const double k2 = grid.freq(j);
      const double lam = k1 * k1 + k2 * k2;
      acc += std::pow(lam, a) * std::norm(g[static_cast<size_t>(i * n + j)]);
    }
  }
  return std::sqrt(acc);
}

double lp_norm(const RealField& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
  }
  if (!(p >= 1.0) || !std::isfinite(p))
    throw DomainError("lp_norm: p must be >= 1 or infinity");
  double acc = 0.0;
  for (size_t i = 0; i < f.size(); ++i) acc += std::pow(std::abs(f[i]), p);
  return std::pow(acc * f.grid().cell_area(), 1.0 / p);
}

void dealias(SpectralField& g) {
  const int n = g.n();
  const TorusGrid& grid = g.grid();
  for (int a = 0; a < n; ++a) {
    const int k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const int k2 = grid.freq(b);
      if (!grid.dealias_keep(k1, k2))
        g[static_cast<size_t>(a * n + b)] = Complex{0.0, 0.0};
    }
  }
}

VelocitySpectral gradient(const SpectralField& g) {
  const int n = g.n();
  const TorusGrid& grid = g.grid();
  VelocitySpectral out(grid);
  const Complex iu{0.0, 1.0};
  for (int a = 0; a < n; ++a) {
    const double k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const double k2 = grid.freq(b);
      const Complex v = g[static_cast<size_t>(a * n + b)];
      out.c1[static_cast<size_t>(a * n + b)] = iu * k1 * v;
      out.c2[static_cast<size_t>(a * n + b)] = iu * k2 * v;
    }
  }
  return out;
}

SpectralField divergence(const VelocitySpectral& v) {
  const int n = v.grid().n;
  const TorusGrid& grid = v.grid();
  SpectralField out(grid);
  const Complex iu{0.0, 1.0};
  for (int a = 0; a < n; ++a) {
    const double k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const double k2 = grid.freq(b);
      const size_t i = static_cast<size_t>(a * n + b);
      out[i] = iu * (k1 * v.c1[i] + k2 * v.c2[i]);
    }
  }
  return out;
}

SpectralField curl(const VelocitySpectral& v) {
  const int n = v.grid().n;
  const TorusGrid& grid = v.grid();
  SpectralField out(grid);
  const Complex iu{0.0, 1.0};
  for (int a = 0; a < n; ++a) {
    const double k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const double k2 = grid.freq(b);
      const size_t i = static_cast<size_t>(a * n + b);
      out[i] = iu * (k1 * v.c2[i] - k2 * v.c1[i]);
    }
  }
  return out;
}

}  // namespace vort
