#include "vort2d/fieldgen.hpp"

#include <cmath>

#include "vort2d/errors.hpp"

namespace vort {

SpectralField cosine_field(const TorusGrid& grid, int k1, int k2,
                           double amplitude) {
  SpectralField g(grid);
  if (k1 == 0 && k2 == 0) {
    g[0] = Complex{kTwoPi * amplitude, 0.0};
    return g;
  }
  if (!grid.resolvable(k1, k2))
    throw DomainError("cosine_field: mode outside resolvable set");
  const double pi = 3.14159265358979323846;
  g.at(k1, k2) = Complex{amplitude * pi, 0.0};
  g.at(-k1, -k2) = Complex{amplitude * pi, 0.0};
  return g;
}

SpectralField field_from_modes(const TorusGrid& grid,
                               const std::vector<ProfileMode>& modes) {
  NoiseChannel ch;
  ch.modes = modes;
  return ch.profile_spectral(grid);
}

SpectralField random_smooth_field(const TorusGrid& grid, double decay,
                                  double l2_amplitude, NormalSampler& rng,
                                  bool in_dealias_shell) {
  const int n = grid.n;
  SpectralField g(grid);
  for (int a = 0; a < n; ++a) {
    const int k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const int k2 = grid.freq(b);
      if (!grid.resolvable(k1, k2)) continue;
      if (!(k1 > 0 || (k1 == 0 && k2 > 0))) continue;  // half-lattice
      if (in_dealias_shell && !grid.dealias_keep(k1, k2)) continue;
      const double lam = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      const double w = std::pow(lam, -0.5 * decay);
      const Complex c{w * rng.normal(), w * rng.normal()};
      g.at(k1, k2) = c;
      g.at(-k1, -k2) = std::conj(c);
    }
  }
  const double nrm = g.l2_norm();
  if (nrm > 0.0 && l2_amplitude > 0.0) g *= l2_amplitude / nrm;
  return g;
}

}  // namespace vort
