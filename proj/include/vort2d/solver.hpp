#pragma once

#include <limits>
#include <string>
#include <vector>

#include "vort2d/fields.hpp"
#include "vort2d/noise.hpp"

namespace vort {

enum class Integrator { exponential_euler, exponential_heun };

// Viscosity is fixed at 1.
struct SimulationConfig {
  double T = 1.0;
  double dt = 1e-3;
  double epsilon = 0.0;  // noise scale, >= 0
  double p = 4.0;        // L^p diagnostic exponent, > 2
  TorusGrid grid{64};
  Integrator integrator = Integrator::exponential_euler;
  bool nonlinearity = true;
  int probe_k1 = 1, probe_k2 = 0;  // mode logged in the diagnostics
  bool record_diagnostics = true;
  bool record_states = false;
  int record_every = 1;
  std::string abort_dump_dir;  // NaN state dump location; empty disables

  int steps() const;  // T/dt, validated to be integral
  void validate() const;
};

// Smooth cutoff Pi_R: 1 on [0, R], cubic smoothstep down to 0 on
// [R, R+1]; |Pi'| <= 1.5.
struct TruncationSpec {
  double radius = std::numeric_limits<double>::infinity();
  bool apply_to_sigma = false;

  double value(double r) const;
  double derivative(double r) const;
  bool finite() const { return std::isfinite(radius); }

  // Default radius 10x the initial L^p norm, so the cutoff stays
  // inactive on typical runs.
  static TruncationSpec auto_radius(const SpectralField& xi0, double p);
};

struct PicardSettings {
  double lambda = 100.0;
  double tol = 1e-10;
  int max_iter = 50;
};

// Piecewise-constant control on the solver time grid.
struct ControlPath {
  int n_channels = 0;
  std::vector<std::vector<double>> values;  // [step][channel]
  double bound = std::numeric_limits<double>::infinity();  // energy bound M

  static ControlPath zero(int n_channels, int steps);
  double energy(double dt) const;  // (1/2) sum |v_m|^2 dt
  // Rescale into the admissible ball when energy exceeds the bound.
  void project(double dt);
  double value(int step, int channel) const {
    return values[static_cast<size_t>(step)][static_cast<size_t>(channel)];
  }
};

struct StepDiagnostics {
  double time = 0.0;
  double l2 = 0.0;
  double lp = 0.0;
  double grad_l2 = 0.0;
  bool trunc_active = false;
  Complex probe{0.0, 0.0};
};

struct Trajectory {
  explicit Trajectory(const TorusGrid& g) : terminal(g) {}
  std::vector<double> times;
  std::vector<StepDiagnostics> diag;
  std::vector<SpectralField> states;  // filled when record_states
  std::vector<std::string> warnings;
  SpectralField terminal;
  int steps = 0;
  int trunc_active_steps = 0;
  int trunc_saturated_steps = 0;
};

// One exponential-integrator step of the unforced vorticity equation:
// xi <- exp(-|k|^2 dt) (xi + dt * rhs_q(xi)) with rhs_q = -div q(xi).
SpectralField step_deterministic(const SpectralField& xi, double dt,
                                 Integrator integ = Integrator::exponential_euler);

Trajectory simulate_deterministic(const SimulationConfig& cfg,
                                  const SpectralField& xi0);

// Additive noise via the decomposition xi = beta + sqrt(eps) zeta: zeta
// advances by the exact per-mode OU recursion, beta by the exponential
// integrator with nonlinearity q(beta + sqrt(eps) zeta).
Trajectory simulate_additive(const SimulationConfig& cfg,
                             const AdditiveNoiseSpec& noise,
                             const SpectralField& xi0, const RngStream& stream);

// Truncated mild equation with optional control and noise. rng == nullptr
// (or epsilon == 0) drops the stochastic term; v == nullptr drops the
// control term; both dropped with nonlinearity gives the deterministic
// dynamics, rng == nullptr with v the skeleton equation.
Trajectory simulate_multiplicative(const SimulationConfig& cfg,
                                   const MultiplicativeNoiseSpec& noise,
                                   const SpectralField& xi0,
                                   const TruncationSpec& trunc,
                                   const ControlPath* v, const RngStream* rng);

// beta equation driven by a prescribed forcing path zeta (samples at the
// solver steps): beta' = Lap beta - div q(beta + zeta(t)). Used by the
// local-Lipschitz probes.
Trajectory integrate_beta_given_forcing(const SimulationConfig& cfg,
                                        const SpectralField& xi0,
                                        const std::vector<SpectralField>& zeta);

struct PicardReport {
  int iterations = 0;
  std::vector<double> contraction_factors;  // successive weighted-norm ratios
  std::vector<double> distances;            // weighted distance per sweep
  bool converged = false;
};

// Whole-path fixed point of the truncated mild equation on the time
// grid, iterated in the lambda-weighted norm sup_t e^{-lambda t} ||.||_Lp.
// Shares the noise stream convention with simulate_multiplicative, so a
// stepping run on the same stream sees the same increments. Throws
// SolverError when max_iter is reached (report still filled).
Trajectory picard_solve(const SimulationConfig& cfg,
                        const MultiplicativeNoiseSpec& noise,
                        const SpectralField& xi0, const TruncationSpec& trunc,
                        const PicardSettings& settings, const ControlPath* v,
                        const RngStream* rng, PicardReport* report);

struct EnergyReport {
  double sup_lp_p = 0.0;              // sup_t ||xi||_Lp^p
  double dissipation_integral = 0.0;  // int || |xi|^{(p-2)/2} grad xi ||^2 dt
};

// Requires a trajectory recorded with record_states at every step.
EnergyReport energy_report(const Trajectory& traj, double p);

}  // namespace vort
