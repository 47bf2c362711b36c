#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vort2d/heat_kernel.hpp"
#include "vort2d/ldp.hpp"
#include "vort2d/noise.hpp"
#include "vort2d/solver.hpp"

namespace vort {

// Field construction recipe used for initial data and rate targets.
struct FieldSpec {
  enum class Kind { zero, cosine, modes, random } kind = Kind::zero;
  int k1 = 1, k2 = 0;      // cosine
  double amplitude = 1.0;  // cosine / random L2 norm
  std::vector<ProfileMode> modes;
  double decay = 2.0;  // random spectral decay
  uint64_t tag = 0;    // random stream tag
};

SpectralField build_field(const FieldSpec& spec, const TorusGrid& grid,
                          uint64_t seed);

// Control construction recipe (piecewise constant on the solver grid).
struct ControlSpec {
  enum class Kind { zero, constant, sine } kind = Kind::zero;
  std::vector<double> values;      // constant: one per channel
  std::vector<double> amplitudes;  // sine: one per channel
  double omega = 1.0;
};

ControlPath build_control(const ControlSpec& spec, int n_channels, int steps,
                          double dt, double bound);

enum class NoiseType { none, additive, multiplicative };

struct VerifyBlock {
  std::vector<double> betas_gradient{0.5, 1.0, 1.25};
  std::vector<double> betas_kernel{0.5, 1.0, 1.5};
  FitSettings fit;
  double slope_tol = 0.05;
  double r2_min = 0.999;
  int random_fields = 100;
  double rep_agree_tol = 1e-10;
  double transport_tol = 1e-12;
  double curl_tol = 1e-13;
};

struct RateBlock {
  FieldSpec target;
  RateSettings settings;
};

struct McBlock {
  EventSpec event;
  std::vector<double> epsilons{0.05, 0.02, 0.01};
  long samples = 1000;
  bool use_additive = false;  // multiplicative by default
};

struct LipschitzBlock {
  double R1 = 1.0;
  double R2 = 1.0;
  int pairs = 50;
};

struct UniformBlock {
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  std::vector<double> deltas{0.1, 0.05};
  int samples = 200;
  std::vector<FieldSpec> initials;
  std::vector<ControlSpec> controls;
  double control_bound = 10.0;
};

struct RunConfig {
  SimulationConfig sim;  // grid lives inside
  NoiseType noise_type = NoiseType::none;
  AdditiveNoiseSpec additive;
  MultiplicativeNoiseSpec multiplicative;
  double trunc_radius = -1.0;  // negative = auto (10x initial Lp norm)
  bool trunc_apply_to_sigma = false;
  PicardSettings picard;
  FieldSpec initial;
  uint64_t seed = 1;
  int threads = 0;
  bool dump_states = false;

  VerifyBlock verify;
  RateBlock rate;
  McBlock mc;
  LipschitzBlock lipschitz;
  UniformBlock uniform;

  TruncationSpec make_truncation(const SpectralField& xi0) const;
};

// Strict parse: unknown keys are rejected with a path diagnostic; values
// are validated on construction. Throws ConfigError.
RunConfig parse_config(const std::string& json_text);

// Resolved round-trip: serializing and re-parsing yields an equal
// configuration; keys are emitted in sorted order.
std::string serialize_config(const RunConfig& cfg);

}  // namespace vort
