#include "vort2d/biot_savart.hpp"

#include <algorithm>
#include <cmath>

#include "vort2d/errors.hpp"
#include "vort2d/operators.hpp"
#include "vort2d/transforms.hpp"

namespace vort {

VelocitySpectral velocity_from_vorticity(const SpectralField& xi) {
  const double scale = std::max(1.0, xi.l2_norm());
  if (std::abs(xi.mean_coeff()) > 1e-12 * scale)
    throw DomainError("velocity_from_vorticity: input must have zero mean");
  const int n = xi.n();
  const TorusGrid& grid = xi.grid();
  VelocitySpectral u(grid);
  const Complex iu{0.0, 1.0};
  for (int a = 0; a < n; ++a) {
    const double k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      if (a == 0 && b == 0) continue;
      const double k2 = grid.freq(b);
      const double lam = k1 * k1 + k2 * k2;
      const size_t i = static_cast<size_t>(a * n + b);
      const Complex w = -iu * xi[i] / lam;
      u.c1[i] = -k2 * w;  // k_perp = (-k2, k1)
      u.c2[i] = k1 * w;
    }
  }
  return u;
}

VelocitySpectral nonlinearity_q(const SpectralField& xi) {
  VelocitySpectral u = velocity_from_vorticity(xi);
  const RealField xr = to_real(xi);
  const RealField u1 = to_real(u.c1);
  const RealField u2 = to_real(u.c2);
  RealField q1(xi.grid()), q2(xi.grid());
  for (size_t i = 0; i < xr.size(); ++i) {
    q1[i] = xr[i] * u1[i];
    q2[i] = xr[i] * u2[i];
  }
  VelocitySpectral q(xi.grid());
  q.c1 = to_spectral(q1);
  q.c2 = to_spectral(q2);
  dealias(q.c1);
  dealias(q.c2);
  return q;
}

LinfBound linf_bound_check(const SpectralField& xi, double p) {
  if (!(p > 2.0)) throw DomainError("linf_bound_check: p must exceed 2");
  LinfBound out;
  if (xi.l2_norm() == 0.0) return out;  // (0, 0) by convention
  VelocitySpectral u = velocity_from_vorticity(xi);
  const RealField u1 = to_real(u.c1);
  const RealField u2 = to_real(u.c2);
  double sup = 0.0;
  for (size_t i = 0; i < u1.size(); ++i)
    sup = std::max(sup, std::hypot(u1[i], u2[i]));
  out.lhs = sup;
  out.ratio = sup / lp_norm(to_real(xi), p);
  return out;
}

}  // namespace vort
