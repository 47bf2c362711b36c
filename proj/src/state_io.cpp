#include "vort2d/state_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "vort2d/errors.hpp"

namespace vort {

std::string state_to_bytes(const SpectralField& g) {
  std::string out;
  out.reserve(8 + 16 * g.size());
  out.append("V2DS", 4);
  const uint32_t n = static_cast<uint32_t>(g.n());
  out.append(reinterpret_cast<const char*>(&n), sizeof(n));
  for (size_t i = 0; i < g.size(); ++i) {
    const double re = g[i].real(), im = g[i].imag();
    out.append(reinterpret_cast<const char*>(&re), sizeof(re));
    out.append(reinterpret_cast<const char*>(&im), sizeof(im));
  }
  return out;
}

SpectralField state_from_bytes(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), "V2DS", 4) != 0)
    throw InvariantError("bad state blob header");
  uint32_t n = 0;
  std::memcpy(&n, bytes.data() + 4, sizeof(n));
  SpectralField g(TorusGrid(static_cast<int>(n)));
  if (bytes.size() != 8 + 16 * g.size())
    throw InvariantError("state blob size mismatch");
  const char* p = bytes.data() + 8;
  for (size_t i = 0; i < g.size(); ++i) {
    double re = 0.0, im = 0.0;
    std::memcpy(&re, p, sizeof(re));
    p += sizeof(re);
    std::memcpy(&im, p, sizeof(im));
    p += sizeof(im);
    g[i] = Complex{re, im};
  }
  return g;
}

void write_state_bin(const std::string& path, const SpectralField& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvariantError("cannot open state dump file: " + path);
  const std::string bytes = state_to_bytes(g);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvariantError("short write on state dump: " + path);
}

SpectralField read_state_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvariantError("cannot open state file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return state_from_bytes(bytes);
}

}  // namespace vort
