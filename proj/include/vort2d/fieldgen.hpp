#pragma once

#include <vector>

#include "vort2d/fields.hpp"
#include "vort2d/noise.hpp"

namespace vort {

// amplitude * cos(k.x) (coefficient amplitude*pi at +/-k); k = 0 gives
// the constant field.
SpectralField cosine_field(const TorusGrid& grid, int k1, int k2,
                           double amplitude);

// Field with the given coefficients, same semantics as noise profiles:
// a cos entry of amplitude c puts coefficient c at +/-k.
SpectralField field_from_modes(const TorusGrid& grid,
                               const std::vector<ProfileMode>& modes);

// Zero-mean random field with |g_k| ~ |k|^{-decay}, rescaled to the
// requested L2 norm. in_dealias_shell restricts support to the modes a
// pseudospectral product conserves exactly.
SpectralField random_smooth_field(const TorusGrid& grid, double decay,
                                  double l2_amplitude, NormalSampler& rng,
                                  bool in_dealias_shell = true);

}  // namespace vort
