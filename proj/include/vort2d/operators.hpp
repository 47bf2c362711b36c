#pragma once

#include "vort2d/fields.hpp"

namespace vort {

// Coefficient at k scaled by -|k|^2.
SpectralField laplacian(const SpectralField& g);

// H^a norm of a zero-mean field, (sum_{k!=0} |k|^{2a} |g_k|^2)^{1/2}.
// a = 0 recovers the L2 norm, a = 1 gives ||grad g||_{L2}.
double sobolev_norm(const SpectralField& g, double a);

// Lattice-quadrature L^p norm, (sum |f|^p (2pi/n)^2)^{1/p}; p may be
// infinity (sup over collocation points).
double lp_norm(const RealField& f, double p);

// Zero every mode with |k_i| > dealias_fraction * (n/2).
void dealias(SpectralField& g);

// grad g  ->  (i k1 g, i k2 g)
VelocitySpectral gradient(const SpectralField& g);

// div V  ->  i (k1 V1 + k2 V2)
SpectralField divergence(const VelocitySpectral& v);

// curl V ->  i (k1 V2 - k2 V1)
SpectralField curl(const VelocitySpectral& v);

}  // namespace vort
