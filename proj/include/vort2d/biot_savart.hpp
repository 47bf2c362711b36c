#pragma once

#include "vort2d/fields.hpp"

namespace vort {

// u = k * xi on the torus; per mode u_k = -i (k_perp / |k|^2) xi_k with
// k_perp = (-k2, k1). Exactly divergence-free and curl(u) = xi in
// spectral space. Rejects inputs with a nonzero mean coefficient.
VelocitySpectral velocity_from_vorticity(const SpectralField& xi);

// q(xi) = xi . (k * xi), the quadratic flux whose divergence is the
// transport term u . grad xi. Computed pseudospectrally (pointwise
// product on the collocation grid) and dealiased.
VelocitySpectral nonlinearity_q(const SpectralField& xi);

// Velocity sup-norm against the vorticity L^p norm: returns
// (||u||_Linf, ||u||_Linf / ||xi||_Lp); (0, 0) for the zero field.
struct LinfBound {
  double lhs = 0.0;
  double ratio = 0.0;
};
LinfBound linf_bound_check(const SpectralField& xi, double p);

}  // namespace vort
