#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vort2d/fields.hpp"

namespace vort {

// Purpose tags keep draws for different roles on disjoint streams.
enum class RngPurpose : uint64_t {
  field_noise = 1,
  wiener = 2,
  initial_data = 3,
  optimizer = 4,
  probe = 5,
};

// (seed, trajectory index, purpose) identifies a stream; identical ids
// reproduce identical draws bit for bit on any platform.
struct RngStream {
  uint64_t seed = 0;
  uint64_t trajectory = 0;
  RngPurpose purpose = RngPurpose::field_noise;
};

// mt19937_64 keyed by a SplitMix64 hash of the stream id, with an
// explicit Box-Muller transform. std::normal_distribution is not pinned
// by the standard, which would break the byte-reproducibility contract
// across library versions.
class NormalSampler {
 public:
  explicit NormalSampler(const RngStream& stream);

  double normal();                 // N(0, 1)
  double uniform();                // U[0, 1)
  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Additive Q-Wiener noise with covariance (-Laplace)^{-a}; a > 0 is
// required for well-defined trajectories in 2-d.
struct AdditiveNoiseSpec {
  double a = 1.0;
  explicit AdditiveNoiseSpec(double a_);
  AdditiveNoiseSpec() = default;
};

// One exact-in-law step of the stochastic convolution at unit noise
// scale: per mode, zeta_k <- exp(-|k|^2 dt) zeta_k + w with
// Var|w|^2 = |k|^{-2a} (1 - exp(-2|k|^2 dt)) / (2|k|^2), real and
// imaginary parts drawn independently on the half-lattice and mirrored
// so the field stays real. Draw order is fixed (row-major half-lattice).
SpectralField sample_stochastic_convolution_step(const SpectralField& zeta,
                                                 double dt,
                                                 const AdditiveNoiseSpec& spec,
                                                 NormalSampler& rng);

// Pointwise amplitude shapes sigma(r); every built-in satisfies
// |shape(r)| <= (1 + |r|) and a unit Lipschitz bound.
enum class SigmaShape { constant, linear, sine, saturated };

double sigma_shape_value(SigmaShape s, double r);
double sigma_shape_derivative(SigmaShape s, double r);
const char* sigma_shape_name(SigmaShape s);

// Spatial profile given by Fourier coefficients: a cos entry with
// amplitude c contributes coefficient c at +/-k (the field c/pi cos(k.x));
// a sin entry contributes -+ i c (the field c/pi sin(k.x)).
struct ProfileMode {
  int k1 = 0, k2 = 0;
  double amp = 1.0;
  bool sine = false;
};

// One noise channel: sigma_j(t, x, r) = g_j(x) * shape_j(r).
struct NoiseChannel {
  SigmaShape shape = SigmaShape::constant;
  bool uniform_profile = false;       // g = 1 everywhere
  std::vector<ProfileMode> modes;     // used when !uniform_profile

  RealField profile_real(const TorusGrid& grid) const;
  SpectralField profile_spectral(const TorusGrid& grid) const;
  double profile_sup(const TorusGrid& grid) const;
  bool state_independent() const { return shape == SigmaShape::constant; }
};

struct MultiplicativeNoiseSpec {
  std::vector<NoiseChannel> channels;
  double K = 1.0;  // declared linear-growth constant
  double L = 1.0;  // declared Lipschitz constant

  int n() const { return static_cast<int>(channels.size()); }
};

// Randomized check of |sigma_j| <= K (1 + |r|) and the Lipschitz bound
// against the declared constants; throws InvariantError on violation.
// Run at registration (config parse) and directly in tests.
void validate_hypothesis(const MultiplicativeNoiseSpec& spec,
                         const TorusGrid& grid, uint64_t seed, int trials);

// sigma_j(t, x, field(x)) for each channel.
std::vector<RealField> eval_sigma(const MultiplicativeNoiseSpec& spec, double t,
                                  const RealField& field);

// n i.i.d. N(0, dt) increments.
std::vector<double> wiener_increments(int n, double dt, NormalSampler& rng);

}  // namespace vort
