#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vort2d/solver.hpp"

namespace vort {

// ------------------------------------------------------------------
// Rate function: penalized terminal matching over piecewise-constant
// controls on the solver grid.
// ------------------------------------------------------------------

enum class GradientMethod { finite_difference, adjoint };

struct RateSettings {
  double penalty0 = 10.0;
  double penalty_growth = 10.0;
  int penalty_stages = 3;
  int max_iter = 500;  // per stage
  double grad_norm_tol = 1e-9;
  double fd_step = 1e-5;  // coordinate step for finite differences
  GradientMethod gradient = GradientMethod::finite_difference;
  int restarts = 3;  // random restarts besides the zero start
  double restart_amplitude = 0.1;
  double control_bound = std::numeric_limits<double>::infinity();
  int stall_window = 20;  // non-decreasing objective window -> not converged
  double residual_tol = 0.05;  // terminal matching tolerance for success
  uint64_t seed = 0;
  int threads = 0;
};

struct RateResult {
  ControlPath optimal_control;
  double cost = 0.0;               // (1/2) sum |v|^2 dt at the optimum
  double terminal_residual = 0.0;  // ||xi_v(T) - target||_{L2}
  double objective = 0.0;          // cost + penalty * residual^2, final stage
  int iterations = 0;
  bool converged = false;
};

// Minimizes (1/2) sum |v_m|^2 dt + penalty ||xi_v(T) - target||_{L2}^2
// over the skeleton dynamics, with penalty continuation; cost reported
// is the control energy alone.
RateResult rate_function(const SpectralField& xi0, const SpectralField& target,
                         const SimulationConfig& cfg,
                         const MultiplicativeNoiseSpec& noise,
                         const TruncationSpec& trunc,
                         const RateSettings& settings);

// Exposed for gradient cross-validation.
double rate_objective(const ControlPath& v, const SpectralField& xi0,
                      const SpectralField& target, const SimulationConfig& cfg,
                      const MultiplicativeNoiseSpec& noise,
                      const TruncationSpec& trunc, double penalty,
                      double* residual_out);
std::vector<double> rate_gradient_fd(const ControlPath& v,
                                     const SpectralField& xi0,
                                     const SpectralField& target,
                                     const SimulationConfig& cfg,
                                     const MultiplicativeNoiseSpec& noise,
                                     const TruncationSpec& trunc, double penalty,
                                     double h, int threads);
// Discrete adjoint of the exponential-Euler skeleton recursion; requires
// the truncation to stay inactive along the forward solve.
std::vector<double> rate_gradient_adjoint(const ControlPath& v,
                                          const SpectralField& xi0,
                                          const SpectralField& target,
                                          const SimulationConfig& cfg,
                                          const MultiplicativeNoiseSpec& noise,
                                          const TruncationSpec& trunc,
                                          double penalty);

// ------------------------------------------------------------------
// Small-noise Monte Carlo
// ------------------------------------------------------------------

struct EventSpec {
  enum class Kind {
    whole_space,
    terminal_mode_re_exceed,  // Re xi_hat_k(T) > threshold
    terminal_l2_exceed,       // ||xi(T)||_{L2} > threshold
    sup_lp_exceed,            // sup_t ||xi(t)||_{Lp} > threshold
  };
  Kind kind = Kind::whole_space;
  int k1 = 1, k2 = 0;
  double threshold = 0.0;

  bool needs_diagnostics() const { return kind == Kind::sup_lp_exceed; }
  bool eval(const Trajectory& tr) const;
  std::string describe() const;
};

struct MCCell {
  double epsilon = 0.0;
  long samples = 0;
  long hits = 0;
  double p_hat = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

struct MCEstimate {
  std::vector<MCCell> cells;
  // OLS of eps*log(p_hat) against eps over cells with hits; the
  // intercept extrapolates the empirical decay rate to eps -> 0.
  double slope = 0.0;
  double intercept = 0.0;
  int fit_points = 0;
  std::string event;
};

// 95% Wilson score interval.
void wilson_interval(long hits, long n, double* lo, double* hi);

MCEstimate mc_estimate(const EventSpec& event, const std::vector<double>& epsilons,
                       long samples, const SimulationConfig& cfg,
                       const MultiplicativeNoiseSpec& noise,
                       const SpectralField& xi0, const TruncationSpec& trunc,
                       uint64_t seed, int threads);

MCEstimate mc_estimate_additive(const EventSpec& event,
                                const std::vector<double>& epsilons, long samples,
                                const SimulationConfig& cfg,
                                const AdditiveNoiseSpec& noise,
                                const SpectralField& xi0, uint64_t seed,
                                int threads);

// ------------------------------------------------------------------
// Local Lipschitz probe for the forcing-to-solution map zeta -> beta
// ------------------------------------------------------------------

struct LipschitzPair {
  double forcing_dist_lp = 0.0;  // ||z1 - z2||_{C([0,T];Lp)}
  double beta_dist_lp = 0.0;
  double ratio_lp = 0.0;
  double forcing_dist_sup = 0.0;  // C([0,T] x T^2) norms
  double beta_dist_sup = 0.0;
  double ratio_sup = 0.0;
};

struct LipschitzProbe {
  double R1 = 0.0, R2 = 0.0;
  std::vector<LipschitzPair> records;
  double max_ratio_lp = 0.0;
  double median_ratio_lp = 0.0;
  double max_ratio_sup = 0.0;
};

// Random smooth forcing pairs within C([0,T];Lp) radius R2, initial data
// within Lp radius R1; both solutions share the initial data.
LipschitzProbe lipschitz_probe(double R1, double R2, int pairs,
                               const SimulationConfig& cfg, uint64_t seed,
                               int threads);

// ------------------------------------------------------------------
// Uniform convergence in probability: controlled vs skeleton paths
// ------------------------------------------------------------------

struct UniformProbeEntry {
  int init_index = 0;
  int control_index = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double p_lp = 0.0;   // P(||xi^eps - xi^0||_{C([0,T];Lp)} > delta)
  double p_sup = 0.0;  // sup-norm topology
};

struct UniformProbeResult {
  std::vector<double> epsilons;  // sorted decreasing
  std::vector<double> deltas;
  std::vector<UniformProbeEntry> entries;
  // max over the (xi0, v) grid, indexed [delta][eps]
  std::vector<std::vector<double>> max_p_lp;
  std::vector<std::vector<double>> max_p_sup;
  bool monotone_lp = true;
  bool monotone_sup = true;
  // common-random-numbers report for the two largest eps: variance of
  // the paired difference estimator vs the independent-sampling value
  double paired_diff_var = 0.0;
  double independent_diff_var = 0.0;
};

// For every (xi0, v, eps) runs paired controlled/skeleton simulations
// with shared Wiener increments across the eps grid.
UniformProbeResult uniform_convergence_probe(
    const SimulationConfig& cfg, const MultiplicativeNoiseSpec& noise,
    const TruncationSpec& trunc, const std::vector<SpectralField>& initials,
    const std::vector<ControlPath>& controls, const std::vector<double>& epsilons,
    const std::vector<double>& deltas, int samples, uint64_t seed, int threads);

}  // namespace vort
