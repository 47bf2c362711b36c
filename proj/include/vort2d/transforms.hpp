#pragma once

#include "vort2d/fields.hpp"

namespace vort {

// Forward transform, g_k = (2pi/n^2) * sum_j f(x_j) exp(-i k.x_j).
// Enforces the reality invariant exactly (conjugate-pair averaging) and
// zeroes the Nyquist rows. Rejects non-finite samples.
SpectralField to_spectral(const RealField& f);

// Inverse transform, f(x_j) = (1/2pi) * sum_k g_k exp(i k.x_j).
// Round trip with to_spectral is the identity to machine precision.
RealField to_real(const SpectralField& g);

}  // namespace vort
