#pragma once

#include <string>

#include "vort2d/fields.hpp"

namespace vort {

// Raw little-endian dump: magic "V2DS", uint32 n, then n*n coefficient
// pairs (re, im) in row-major order.
std::string state_to_bytes(const SpectralField& g);
SpectralField state_from_bytes(const std::string& bytes);
void write_state_bin(const std::string& path, const SpectralField& g);
SpectralField read_state_bin(const std::string& path);

}  // namespace vort
