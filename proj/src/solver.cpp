#include "vort2d/solver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>

#include "vort2d/biot_savart.hpp"
#include "vort2d/errors.hpp"
#include "vort2d/operators.hpp"
#include "vort2d/state_io.hpp"
#include "vort2d/transforms.hpp"

namespace vort {

int SimulationConfig::steps() const {
  const long k = std::lround(T / dt);
  if (k < 1 || std::abs(static_cast<double>(k) * dt - T) > 1e-9 * std::max(1.0, T))
    throw DomainError("simulation horizon T must be an integral number of steps");
  return static_cast<int>(k);
}

void SimulationConfig::validate() const {
  if (!(dt > 0.0) || !(T > 0.0) || dt > T + 1e-15)
    throw DomainError("require 0 < dt <= T");
  if (epsilon < 0.0) throw DomainError("epsilon must be nonnegative");
  if (!(p > 2.0)) throw DomainError("diagnostic exponent p must exceed 2");
  if (!grid.resolvable(probe_k1, probe_k2))
    throw DomainError("probe mode outside resolvable set");
  (void)steps();
}

double TruncationSpec::value(double r) const {
  if (!finite()) return 1.0;
  const double u = r - radius;
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  return 1.0 - u * u * (3.0 - 2.0 * u);
}

double TruncationSpec::derivative(double r) const {
  if (!finite()) return 0.0;
  const double u = r - radius;
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return -6.0 * u * (1.0 - u);
}

TruncationSpec TruncationSpec::auto_radius(const SpectralField& xi0, double p) {
  TruncationSpec t;
  const double lp = lp_norm(to_real(xi0), p);
  t.radius = std::max(10.0 * lp, 1.0);  // guard for zero initial data
  return t;
}

ControlPath ControlPath::zero(int n_channels, int steps) {
  ControlPath v;
  v.n_channels = n_channels;
  v.values.assign(static_cast<size_t>(steps),
                  std::vector<double>(static_cast<size_t>(n_channels), 0.0));
  return v;
}

double ControlPath::energy(double dt) const {
  double acc = 0.0;
  for (const auto& row : values)
    for (double x : row) acc += x * x;
  return 0.5 * acc * dt;
}

void ControlPath::project(double dt) {
  const double e = energy(dt);
  if (e <= bound || !std::isfinite(bound)) return;
  const double s = std::sqrt(bound / e);
  for (auto& row : values)
    for (double& x : row) x *= s;
}

namespace {

std::vector<double> decay_multipliers(const TorusGrid& grid, double dt) {
  const int n = grid.n;
  std::vector<double> e(static_cast<size_t>(grid.size()));
  for (int a = 0; a < n; ++a) {
    const double k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const double k2 = grid.freq(b);
      e[static_cast<size_t>(a * n + b)] = std::exp(-dt * (k1 * k1 + k2 * k2));
    }
  }
  return e;
}

void apply_decay(SpectralField& g, const std::vector<double>& e) {
  for (size_t i = 0; i < g.size(); ++i) g[i] *= e[i];
}

bool finite_field(const SpectralField& g) {
  for (size_t i = 0; i < g.size(); ++i)
    if (!std::isfinite(g[i].real()) || !std::isfinite(g[i].imag())) return false;
  return true;
}

SpectralField checked_zero_mean(const SpectralField& xi0, const char* who) {
  const double scale = std::max(1.0, xi0.l2_norm());
  if (std::abs(xi0.mean_coeff()) > 1e-12 * scale)
    throw DomainError(std::string(who) + ": initial data must have zero mean");
  SpectralField out = xi0;
  out.project_zero_mean();
  return out;
}

// -div q(xi); zero when the nonlinearity is switched off. An overflow
// inside the pseudospectral product surfaces as a transform rejection;
// report it as a solver failure so drivers dump the last good state.
SpectralField transport_rhs(const SimulationConfig& cfg, const SpectralField& xi) {
  if (!cfg.nonlinearity) return SpectralField(xi.grid());
  try {
    SpectralField rhs = divergence(nonlinearity_q(xi));
    rhs *= -1.0;
    return rhs;
  } catch (const DomainError& e) {
    throw SolverError(std::string("non-finite nonlinearity: ") + e.what());
  }
}

void record_step(Trajectory& tr, const SimulationConfig& cfg, int m, int total,
                 double t, const SpectralField& xi, bool trunc_active) {
  if (cfg.record_diagnostics) {
    StepDiagnostics d;
    d.time = t;
    d.l2 = xi.l2_norm();
    d.lp = lp_norm(to_real(xi), cfg.p);
    d.grad_l2 = sobolev_norm(xi, 1.0);
    d.trunc_active = trunc_active;
    d.probe = xi.at(cfg.probe_k1, cfg.probe_k2);
    if (!std::isfinite(d.l2) || !std::isfinite(d.lp) || !std::isfinite(d.grad_l2))
      throw SolverError("non-finite diagnostics at t = " + std::to_string(t));
    tr.times.push_back(t);
    tr.diag.push_back(d);
  }
  if (cfg.record_states && (m % cfg.record_every == 0 || m == total))
    tr.states.push_back(xi);
}

[[noreturn]] void abort_with_dump(const SimulationConfig& cfg,
                                  const SpectralField& last_good, int step) {
  std::string note = "state dump disabled (no abort_dump_dir)";
  if (!cfg.abort_dump_dir.empty()) {
    std::filesystem::create_directories(cfg.abort_dump_dir);
    char name[64];
    std::snprintf(name, sizeof(name), "nan_state_step%06d.bin", step);
    const std::string path = cfg.abort_dump_dir + "/" + name;
    write_state_bin(path, last_good);
    note = "last state dumped to " + path;
  }
  throw SolverError("non-finite nonlinearity at step " + std::to_string(step) +
                    "; " + note);
}

// Shared assembly of the per-step increment (everything the semigroup
// acts on besides the state itself) for the multiplicative equation.
struct MultCore {
  const SimulationConfig& cfg;
  const MultiplicativeNoiseSpec& spec;
  TruncationSpec trunc;
  const ControlPath* v;
  bool use_noise;
  double sqrt_eps;
  std::vector<std::optional<SpectralField>> cached_sigma;
  std::vector<RealField> profiles;

  MultCore(const SimulationConfig& c, const MultiplicativeNoiseSpec& s,
           const TruncationSpec& tr, const ControlPath* vv, bool noise)
      : cfg(c), spec(s), trunc(tr), v(vv), use_noise(noise),
        sqrt_eps(std::sqrt(c.epsilon)) {
    for (const NoiseChannel& ch : spec.channels) {
      profiles.push_back(ch.profile_real(cfg.grid));
      if (ch.state_independent()) {
        SpectralField sg = ch.profile_spectral(cfg.grid);
        sg.project_zero_mean();
        dealias(sg);
        cached_sigma.emplace_back(std::move(sg));
      } else {
        cached_sigma.emplace_back(std::nullopt);
      }
    }
  }

  // dW may be null (no stochastic term this step).
  SpectralField increment(const SpectralField& xi, int m, const double* dW,
                          double* pi_out) {
    try {
      return increment_impl(xi, m, dW, pi_out);
    } catch (const DomainError& e) {
      throw SolverError(std::string("non-finite step increment: ") + e.what());
    }
  }

  SpectralField increment_impl(const SpectralField& xi, int m, const double* dW,
                               double* pi_out) {
    const TorusGrid& grid = cfg.grid;
    SpectralField inc(grid);

    const bool need_pi = trunc.finite() && (cfg.nonlinearity || trunc.apply_to_sigma);
    bool any_state_dep = false;
    for (size_t j = 0; j < cached_sigma.size(); ++j)
      if (!cached_sigma[j].has_value()) any_state_dep = true;

    std::optional<RealField> xr;
    if (need_pi || any_state_dep) xr = to_real(xi);

    double pi = 1.0;
    if (need_pi) pi = trunc.value(lp_norm(*xr, cfg.p));
    *pi_out = pi;

    if (cfg.nonlinearity) {
      SpectralField rhs = divergence(nonlinearity_q(xi));
      inc.axpy(-cfg.dt * pi, rhs);
    }

    for (int j = 0; j < spec.n(); ++j) {
      double coef = 0.0;
      if (use_noise && dW) coef += sqrt_eps * dW[j];
      if (v) coef += v->value(m, j) * cfg.dt;
      if (coef == 0.0) continue;
      if (trunc.apply_to_sigma) coef *= pi;
      if (cached_sigma[static_cast<size_t>(j)].has_value()) {
        inc.axpy(coef, *cached_sigma[static_cast<size_t>(j)]);
      } else {
        const NoiseChannel& ch = spec.channels[static_cast<size_t>(j)];
        RealField sr = profiles[static_cast<size_t>(j)];
        for (size_t i = 0; i < sr.size(); ++i)
          sr[i] *= sigma_shape_value(ch.shape, (*xr)[i]);
        SpectralField sg = to_spectral(sr);
        sg.project_zero_mean();
        dealias(sg);
        inc.axpy(coef, sg);
      }
    }
    return inc;
  }
};

}  // namespace

SpectralField step_deterministic(const SpectralField& xi, double dt,
                                 Integrator integ) {
  if (!(dt > 0.0)) throw DomainError("step_deterministic: dt <= 0");
  SimulationConfig cfg;
  cfg.grid = xi.grid();
  cfg.dt = dt;
  cfg.T = dt;
  const std::vector<double> e = decay_multipliers(cfg.grid, dt);
  SpectralField f1 = transport_rhs(cfg, xi);
  if (!finite_field(f1)) throw SolverError("non-finite nonlinearity");
  if (integ == Integrator::exponential_euler) {
    SpectralField next = xi;
    next.axpy(dt, f1);
    apply_decay(next, e);
    next.project_zero_mean();
    return next;
  }
  // Exponential trapezoid (Heun in the nonlinearity).
  SpectralField pred = xi;
  pred.axpy(dt, f1);
  apply_decay(pred, e);
  SpectralField f2 = transport_rhs(cfg, pred);
  if (!finite_field(f2)) throw SolverError("non-finite nonlinearity");
  SpectralField next = xi;
  next.axpy(0.5 * dt, f1);
  apply_decay(next, e);
  next.axpy(0.5 * dt, f2);
  next.project_zero_mean();
  return next;
}

Trajectory simulate_deterministic(const SimulationConfig& cfg,
                                  const SpectralField& xi0) {
  cfg.validate();
  const int K = cfg.steps();
  SpectralField xi = checked_zero_mean(xi0, "simulate_deterministic");
  Trajectory tr(cfg.grid);
  tr.steps = K;
  record_step(tr, cfg, 0, K, 0.0, xi, false);
  for (int m = 0; m < K; ++m) {
    SpectralField next(cfg.grid);
    try {
      next = step_deterministic(xi, cfg.dt, cfg.integrator);
    } catch (const SolverError&) {
      abort_with_dump(cfg, xi, m);
    }
    xi = std::move(next);
    record_step(tr, cfg, m + 1, K, (m + 1) * cfg.dt, xi, false);
  }
  tr.terminal = std::move(xi);
  return tr;
}

Trajectory simulate_additive(const SimulationConfig& cfg,
                             const AdditiveNoiseSpec& noise,
                             const SpectralField& xi0, const RngStream& stream) {
  cfg.validate();
  if (cfg.epsilon == 0.0) return simulate_deterministic(cfg, xi0);
  if (cfg.integrator == Integrator::exponential_heun)
    throw DomainError("heun integrator is restricted to noise-free runs");
  const int K = cfg.steps();
  const std::vector<double> e = decay_multipliers(cfg.grid, cfg.dt);
  const double sqrt_eps = std::sqrt(cfg.epsilon);

  SpectralField beta = checked_zero_mean(xi0, "simulate_additive");
  SpectralField zeta(cfg.grid);
  NormalSampler rng(stream);

  Trajectory tr(cfg.grid);
  tr.steps = K;
  SpectralField xi = beta;
  record_step(tr, cfg, 0, K, 0.0, xi, false);
  for (int m = 0; m < K; ++m) {
    SpectralField rhs(cfg.grid);
    try {
      rhs = transport_rhs(cfg, xi);
    } catch (const SolverError&) {
      abort_with_dump(cfg, xi, m);
    }
    if (!finite_field(rhs)) abort_with_dump(cfg, xi, m);
    beta.axpy(cfg.dt, rhs);
    apply_decay(beta, e);
    beta.project_zero_mean();
    zeta = sample_stochastic_convolution_step(zeta, cfg.dt, noise, rng);
    xi = beta;
    xi.axpy(sqrt_eps, zeta);
    record_step(tr, cfg, m + 1, K, (m + 1) * cfg.dt, xi, false);
  }
  tr.terminal = std::move(xi);
  return tr;
}

Trajectory simulate_multiplicative(const SimulationConfig& cfg,
                                   const MultiplicativeNoiseSpec& noise,
                                   const SpectralField& xi0,
                                   const TruncationSpec& trunc,
                                   const ControlPath* v, const RngStream* rng) {
  cfg.validate();
  const int K = cfg.steps();
  const bool use_noise = rng != nullptr && cfg.epsilon > 0.0;
  if (cfg.integrator == Integrator::exponential_heun && use_noise)
    throw DomainError("heun integrator is restricted to noise-free runs");
  if (v && v->n_channels != noise.n())
    throw DomainError("control channel count does not match noise spec");
  if (v && static_cast<int>(v->values.size()) < K)
    throw DomainError("control path shorter than the time grid");

  const std::vector<double> e = decay_multipliers(cfg.grid, cfg.dt);
  MultCore core(cfg, noise, trunc, v, use_noise);
  std::optional<NormalSampler> sampler;
  if (use_noise) sampler.emplace(*rng);

  SpectralField xi = checked_zero_mean(xi0, "simulate_multiplicative");
  Trajectory tr(cfg.grid);
  tr.steps = K;
  record_step(tr, cfg, 0, K, 0.0, xi, false);

  for (int m = 0; m < K; ++m) {
    std::vector<double> dW;
    if (use_noise) dW = wiener_increments(noise.n(), cfg.dt, *sampler);
    double pi = 1.0;
    SpectralField inc(cfg.grid);
    try {
      inc = core.increment(xi, m, use_noise ? dW.data() : nullptr, &pi);
    } catch (const SolverError&) {
      abort_with_dump(cfg, xi, m);
    }
    if (!finite_field(inc)) abort_with_dump(cfg, xi, m);

    if (cfg.integrator == Integrator::exponential_euler) {
      xi += inc;
      apply_decay(xi, e);
    } else {
      // Noise-free: exponential trapezoid, control frozen over the step.
      SpectralField pred = xi;
      pred += inc;
      apply_decay(pred, e);
      double pi2 = 1.0;
      SpectralField inc2(cfg.grid);
      try {
        inc2 = core.increment(pred, m, nullptr, &pi2);
      } catch (const SolverError&) {
        abort_with_dump(cfg, xi, m);
      }
      if (!finite_field(inc2)) abort_with_dump(cfg, xi, m);
      SpectralField half = xi;
      half.axpy(0.5, inc);
      apply_decay(half, e);
      half.axpy(0.5, inc2);
      xi = std::move(half);
    }
    xi.project_zero_mean();

    if (pi < 1.0) ++tr.trunc_active_steps;
    if (pi == 0.0) ++tr.trunc_saturated_steps;
    record_step(tr, cfg, m + 1, K, (m + 1) * cfg.dt, xi, pi < 1.0);
  }
  if (tr.trunc_saturated_steps > K / 10)
    tr.warnings.push_back(
        "truncation saturated on more than 10% of steps; the solution left "
        "the modeling regime R");
  tr.terminal = std::move(xi);
  return tr;
}

Trajectory integrate_beta_given_forcing(const SimulationConfig& cfg,
                                        const SpectralField& xi0,
                                        const std::vector<SpectralField>& zeta) {
  cfg.validate();
  const int K = cfg.steps();
  if (static_cast<int>(zeta.size()) < K + 1)
    throw DomainError("forcing path shorter than the time grid");
  const std::vector<double> e = decay_multipliers(cfg.grid, cfg.dt);
  SpectralField beta = checked_zero_mean(xi0, "integrate_beta_given_forcing");
  Trajectory tr(cfg.grid);
  tr.steps = K;
  record_step(tr, cfg, 0, K, 0.0, beta, false);
  for (int m = 0; m < K; ++m) {
    SpectralField total = beta + zeta[static_cast<size_t>(m)];
    SpectralField rhs(cfg.grid);
    try {
      rhs = transport_rhs(cfg, total);
    } catch (const SolverError&) {
      abort_with_dump(cfg, beta, m);
    }
    if (!finite_field(rhs)) abort_with_dump(cfg, beta, m);
    beta.axpy(cfg.dt, rhs);
    apply_decay(beta, e);
    beta.project_zero_mean();
    record_step(tr, cfg, m + 1, K, (m + 1) * cfg.dt, beta, false);
  }
  tr.terminal = std::move(beta);
  return tr;
}

Trajectory picard_solve(const SimulationConfig& cfg,
                        const MultiplicativeNoiseSpec& noise,
                        const SpectralField& xi0, const TruncationSpec& trunc,
                        const PicardSettings& settings, const ControlPath* v,
                        const RngStream* rng, PicardReport* report) {
  cfg.validate();
  if (!(settings.lambda > 0.0)) throw DomainError("picard lambda must be positive");
  const int K = cfg.steps();
  const bool use_noise = rng != nullptr && cfg.epsilon > 0.0;
  if (cfg.integrator != Integrator::exponential_euler)
    throw DomainError("picard_solve uses the exponential Euler discretization");

  // Same draw order as a stepping run on this stream.
  std::vector<std::vector<double>> dW;
  if (use_noise) {
    NormalSampler sampler(*rng);
    dW.reserve(static_cast<size_t>(K));
    for (int m = 0; m < K; ++m)
      dW.push_back(wiener_increments(noise.n(), cfg.dt, sampler));
  }

  const std::vector<double> e = decay_multipliers(cfg.grid, cfg.dt);
  MultCore core(cfg, noise, trunc, v, use_noise);
  const SpectralField start = checked_zero_mean(xi0, "picard_solve");

  // Initial guess: the constant-in-time path.
  std::vector<SpectralField> cur(static_cast<size_t>(K + 1), start);
  PicardReport local;
  PicardReport& rep = report ? *report : local;
  rep = PicardReport{};

  auto weighted_distance = [&](const std::vector<SpectralField>& a,
                               const std::vector<SpectralField>& b) {
    double d = 0.0;
    for (int m = 0; m <= K; ++m) {
      SpectralField diff = a[static_cast<size_t>(m)] - b[static_cast<size_t>(m)];
      const double w = std::exp(-settings.lambda * m * cfg.dt);
      d = std::max(d, w * lp_norm(to_real(diff), cfg.p));
    }
    return d;
  };

  std::vector<SpectralField> next(static_cast<size_t>(K + 1), start);
  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    next[0] = start;
    for (int m = 0; m < K; ++m) {
      double pi = 1.0;
      SpectralField inc(cfg.grid);
      try {
        inc = core.increment(cur[static_cast<size_t>(m)], m,
                             use_noise ? dW[static_cast<size_t>(m)].data() : nullptr,
                             &pi);
      } catch (const SolverError&) {
        abort_with_dump(cfg, cur[static_cast<size_t>(m)], m);
      }
      if (!finite_field(inc)) abort_with_dump(cfg, cur[static_cast<size_t>(m)], m);
      SpectralField x = next[static_cast<size_t>(m)];
      x += inc;
      apply_decay(x, e);
      x.project_zero_mean();
      next[static_cast<size_t>(m + 1)] = std::move(x);
    }
    const double d = weighted_distance(next, cur);
    rep.iterations = iter;
    if (!rep.distances.empty() && rep.distances.back() > 0.0)
      rep.contraction_factors.push_back(d / rep.distances.back());
    rep.distances.push_back(d);
    cur.swap(next);
    if (d < settings.tol) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged) {
    const double last = rep.contraction_factors.empty()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : rep.contraction_factors.back();
    throw SolverError("picard_solve: max_iter reached, last contraction factor " +
                      std::to_string(last));
  }

  // Assemble the trajectory from the converged path.
  Trajectory tr(cfg.grid);
  tr.steps = K;
  for (int m = 0; m <= K; ++m)
    record_step(tr, cfg, m, K, m * cfg.dt, cur[static_cast<size_t>(m)], false);
  tr.terminal = cur[static_cast<size_t>(K)];
  return tr;
}

EnergyReport energy_report(const Trajectory& traj, double p) {
  if (!(p >= 2.0)) throw DomainError("energy_report: p must be >= 2");
  EnergyReport rep;
  if (traj.states.empty()) {
    if (traj.steps == 0) return rep;  // zero path convention
    throw DomainError("energy_report requires a trajectory with recorded states");
  }
  if (static_cast<int>(traj.states.size()) != traj.steps + 1)
    throw DomainError("energy_report requires states recorded at every step");
  const double dt =
      traj.times.size() >= 2 ? traj.times[1] - traj.times[0] : 0.0;
  std::vector<double> integrand;
  integrand.reserve(traj.states.size());
  for (const SpectralField& s : traj.states) {
    const RealField xr = to_real(s);
    rep.sup_lp_p = std::max(rep.sup_lp_p, std::pow(lp_norm(xr, p), p));
    VelocitySpectral gr = gradient(s);
    const RealField g1 = to_real(gr.c1);
    const RealField g2 = to_real(gr.c2);
    double acc = 0.0;
    for (size_t i = 0; i < xr.size(); ++i) {
      const double w = std::pow(std::abs(xr[i]), 0.5 * (p - 2.0));
      acc += w * w * (g1[i] * g1[i] + g2[i] * g2[i]);
    }
    integrand.push_back(acc * s.grid().cell_area());
  }
  double total = 0.0;
  for (size_t i = 0; i + 1 < integrand.size(); ++i)
    total += 0.5 * (integrand[i] + integrand[i + 1]) * dt;
  rep.dissipation_integral = total;
  return rep;
}

}  // namespace vort
