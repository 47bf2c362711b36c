#include "vort2d/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vort2d/biot_savart.hpp"
#include "vort2d/errors.hpp"
#include "vort2d/fieldgen.hpp"
#include "vort2d/heat_kernel.hpp"  // ols_fit
#include "vort2d/operators.hpp"
#include "vort2d/parallel.hpp"
#include "vort2d/transforms.hpp"

namespace vort {
namespace {

double re_inner(const SpectralField& a, const SpectralField& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return acc;
}

SpectralField mode_multiply(const SpectralField& g, bool second_axis) {
  const int n = g.n();
  const TorusGrid& grid = g.grid();
  SpectralField out(grid);
  const Complex iu{0.0, 1.0};
  for (int a = 0; a < n; ++a) {
    const double k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const double k2 = grid.freq(b);
      const size_t i = static_cast<size_t>(a * n + b);
      out[i] = iu * (second_axis ? k2 : k1) * g[i];
    }
  }
  return out;
}

SpectralField sigma_spectral(const NoiseChannel& ch, const RealField& profile,
                             const RealField* state_real, const TorusGrid& grid) {
  SpectralField sg(grid);
  if (ch.state_independent()) {
    sg = ch.profile_spectral(grid);
  } else {
    RealField sr = profile;
    for (size_t i = 0; i < sr.size(); ++i)
      sr[i] *= sigma_shape_value(ch.shape, (*state_real)[i]);
    sg = to_spectral(sr);
  }
  sg.project_zero_mean();
  dealias(sg);
  return sg;
}

std::vector<double> flatten(const ControlPath& v) {
  std::vector<double> x;
  x.reserve(v.values.size() * static_cast<size_t>(v.n_channels));
  for (const auto& row : v.values)
    for (double val : row) x.push_back(val);
  return x;
}

void unflatten(const std::vector<double>& x, ControlPath* v) {
  size_t idx = 0;
  for (auto& row : v->values)
    for (double& val : row) val = x[idx++];
}

}  // namespace

// ------------------------------------------------------------------
// objective and gradients
// ------------------------------------------------------------------

double rate_objective(const ControlPath& v, const SpectralField& xi0,
                      const SpectralField& target, const SimulationConfig& cfg,
                      const MultiplicativeNoiseSpec& noise,
                      const TruncationSpec& trunc, double penalty,
                      double* residual_out) {
  SimulationConfig c = cfg;
  c.record_diagnostics = false;
  c.record_states = false;
  Trajectory tr = simulate_multiplicative(c, noise, xi0, trunc, &v, nullptr);
  const double resid = (tr.terminal - target).l2_norm();
  if (residual_out) *residual_out = resid;
  return v.energy(cfg.dt) + penalty * resid * resid;
}

std::vector<double> rate_gradient_fd(const ControlPath& v,
                                     const SpectralField& xi0,
                                     const SpectralField& target,
                                     const SimulationConfig& cfg,
                                     const MultiplicativeNoiseSpec& noise,
                                     const TruncationSpec& trunc, double penalty,
                                     double h, int threads) {
  const std::vector<double> x = flatten(v);
  std::vector<double> g(x.size(), 0.0);
  parallel_for(static_cast<int>(x.size()), threads, [&](int c) {
    ControlPath vp = v, vm = v;
    std::vector<double> xp = x, xm = x;
    xp[static_cast<size_t>(c)] += h;
    xm[static_cast<size_t>(c)] -= h;
    unflatten(xp, &vp);
    unflatten(xm, &vm);
    const double fp = rate_objective(vp, xi0, target, cfg, noise, trunc, penalty, nullptr);
    const double fm = rate_objective(vm, xi0, target, cfg, noise, trunc, penalty, nullptr);
    g[static_cast<size_t>(c)] = (fp - fm) / (2.0 * h);
  });
  return g;
}

std::vector<double> rate_gradient_adjoint(const ControlPath& v,
                                          const SpectralField& xi0,
                                          const SpectralField& target,
                                          const SimulationConfig& cfg,
                                          const MultiplicativeNoiseSpec& noise,
                                          const TruncationSpec& trunc,
                                          double penalty) {
  if (cfg.integrator != Integrator::exponential_euler)
    throw DomainError("adjoint gradient is derived for the exponential Euler scheme");
  SimulationConfig c = cfg;
  c.record_diagnostics = false;
  c.record_states = true;
  c.record_every = 1;
  Trajectory tr = simulate_multiplicative(c, noise, xi0, trunc, &v, nullptr);
  if (tr.trunc_active_steps > 0)
    throw DomainError("adjoint gradient requires the truncation to stay inactive");
  const int K = tr.steps;
  const TorusGrid& grid = cfg.grid;
  const double dt = cfg.dt;
  const int nch = noise.n();

  std::vector<RealField> profiles;
  for (const NoiseChannel& ch : noise.channels)
    profiles.push_back(ch.profile_real(grid));

  // exp(-|k|^2 dt) multipliers
  std::vector<double> decay(static_cast<size_t>(grid.size()));
  for (int a = 0; a < grid.n; ++a)
    for (int b = 0; b < grid.n; ++b) {
      const double k1 = grid.freq(a), k2 = grid.freq(b);
      decay[static_cast<size_t>(a * grid.n + b)] = std::exp(-dt * (k1 * k1 + k2 * k2));
    }

  SpectralField lambda = tr.states[static_cast<size_t>(K)] - target;
  lambda *= 2.0 * penalty;

  std::vector<double> grad(static_cast<size_t>(K) * static_cast<size_t>(nch), 0.0);
  for (int m = K - 1; m >= 0; --m) {
    const SpectralField& xi = tr.states[static_cast<size_t>(m)];
    const RealField xr = to_real(xi);

    SpectralField mu = lambda;
    for (size_t i = 0; i < mu.size(); ++i) mu[i] *= decay[i];

    // control gradient: dt (v + <mu, sigma_j(xi_m)>)
    for (int j = 0; j < nch; ++j) {
      const SpectralField sg = sigma_spectral(noise.channels[static_cast<size_t>(j)],
                                              profiles[static_cast<size_t>(j)], &xr, grid);
      grad[static_cast<size_t>(m * nch + j)] =
          dt * (v.value(m, j) + re_inner(mu, sg));
    }

    // lambda_m = mu + dt (N'^T mu + sum_j v_j S_j'^T mu)
    SpectralField next_lambda = mu;
    if (cfg.nonlinearity) {
      SpectralField w1 = mode_multiply(mu, false);
      SpectralField w2 = mode_multiply(mu, true);
      dealias(w1);
      dealias(w2);
      const RealField v1 = to_real(w1);
      const RealField v2 = to_real(w2);

      VelocitySpectral u = velocity_from_vorticity(xi);
      const RealField u1 = to_real(u.c1);
      const RealField u2 = to_real(u.c2);

      RealField t1(grid);
      for (size_t i = 0; i < t1.size(); ++i)
        t1[i] = u1[i] * v1[i] + u2[i] * v2[i];
      SpectralField term1 = to_spectral(t1);

      RealField p1(grid), p2(grid);
      for (size_t i = 0; i < p1.size(); ++i) {
        p1[i] = xr[i] * v1[i];
        p2[i] = xr[i] * v2[i];
      }
      const SpectralField w1s = to_spectral(p1);
      const SpectralField w2s = to_spectral(p2);
      // adjoint of the Biot-Savart multipliers (i k2/lam, -i k1/lam)
      SpectralField term2(grid);
      const Complex iu{0.0, 1.0};
      for (int a = 0; a < grid.n; ++a) {
        const double k1 = grid.freq(a);
        for (int b = 0; b < grid.n; ++b) {
          if (a == 0 && b == 0) continue;
          const double k2 = grid.freq(b);
          const double lam = k1 * k1 + k2 * k2;
          const size_t i = static_cast<size_t>(a * grid.n + b);
          term2[i] = (-iu * k2 / lam) * w1s[i] + (iu * k1 / lam) * w2s[i];
        }
      }
      next_lambda.axpy(dt, term1);
      next_lambda.axpy(dt, term2);
    }
    for (int j = 0; j < nch; ++j) {
      const NoiseChannel& ch = noise.channels[static_cast<size_t>(j)];
      const double vj = v.value(m, j);
      if (ch.state_independent() || vj == 0.0) continue;
      SpectralField mz = mu;
      mz.project_zero_mean();
      dealias(mz);
      const RealField mr = to_real(mz);
      RealField s(grid);
      for (size_t i = 0; i < s.size(); ++i)
        s[i] = profiles[static_cast<size_t>(j)][i] *
               sigma_shape_derivative(ch.shape, xr[i]) * mr[i];
      next_lambda.axpy(dt * vj, to_spectral(s));
    }
    next_lambda.project_zero_mean();
    lambda = std::move(next_lambda);
  }
  return grad;
}

// ------------------------------------------------------------------
// gradient descent with backtracking and Barzilai-Borwein steps
// ------------------------------------------------------------------

namespace {

struct StageResult {
  ControlPath v;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

StageResult optimize_stage(const ControlPath& v_init, const SpectralField& xi0,
                           const SpectralField& target, const SimulationConfig& cfg,
                           const MultiplicativeNoiseSpec& noise,
                           const TruncationSpec& trunc, double penalty,
                           const RateSettings& st) {
  auto objective = [&](const ControlPath& v) {
    return rate_objective(v, xi0, target, cfg, noise, trunc, penalty, nullptr);
  };
  auto gradient = [&](const ControlPath& v) {
    return st.gradient == GradientMethod::adjoint
               ? rate_gradient_adjoint(v, xi0, target, cfg, noise, trunc, penalty)
               : rate_gradient_fd(v, xi0, target, cfg, noise, trunc, penalty,
                                  st.fd_step, st.threads);
  };

  StageResult out;
  out.v = v_init;
  out.v.bound = st.control_bound;
  out.v.project(cfg.dt);

  double f = objective(out.v);
  std::vector<double> x = flatten(out.v);
  std::vector<double> g = gradient(out.v);
  auto norm2 = [](const std::vector<double>& a) {
    double s = 0.0;
    for (double z : a) s += z * z;
    return s;
  };
  double gn2 = norm2(g);
  double alpha = 1.0 / std::max(1.0, std::sqrt(gn2));
  int stall = 0;

  for (int iter = 1; iter <= st.max_iter; ++iter) {
    out.iterations = iter;
    if (std::sqrt(gn2) <= st.grad_norm_tol) {
      out.converged = true;
      break;
    }
    double a = alpha;
    bool accepted = false;
    std::vector<double> xt;
    ControlPath vt = out.v;
    double ft = f;
    for (int bt = 0; bt < 60; ++bt) {
      xt = x;
      for (size_t i = 0; i < xt.size(); ++i) xt[i] -= a * g[i];
      unflatten(xt, &vt);
      vt.project(cfg.dt);
      try {
        ft = objective(vt);
      } catch (const SolverError&) {
        // overshoot blew up the forward solve; treat as a rejected step
        ft = std::numeric_limits<double>::infinity();
      }
      if (ft <= f - 1e-4 * a * gn2) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) break;  // no productive descent direction left

    std::vector<double> gt = gradient(vt);
    const std::vector<double> xt_flat = flatten(vt);  // after projection
    double sy = 0.0, ss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double si = xt_flat[i] - x[i];
      sy += si * (gt[i] - g[i]);
      ss += si * si;
    }
    alpha = sy > 1e-30 ? std::clamp(ss / sy, 1e-14, 1e6) : std::min(a * 2.0, 1e6);

    if (f - ft < 1e-14 * std::max(1.0, std::abs(f)))
      ++stall;
    else
      stall = 0;
    out.v = vt;
    x = xt_flat;
    f = ft;
    g = std::move(gt);
    gn2 = norm2(g);
    if (stall >= st.stall_window) break;  // flagged not converged by caller
  }
  out.objective = f;
  return out;
}

}  // namespace

RateResult rate_function(const SpectralField& xi0, const SpectralField& target,
                         const SimulationConfig& cfg,
                         const MultiplicativeNoiseSpec& noise,
                         const TruncationSpec& trunc,
                         const RateSettings& settings) {
  const double target_mean = std::abs(target.mean_coeff());
  if (target_mean > 1e-12 * std::max(1.0, target.l2_norm()))
    throw DomainError("rate_function: target must have zero mean");
  const int K = cfg.steps();
  const int nch = noise.n();

  std::vector<ControlPath> starts;
  starts.push_back(ControlPath::zero(nch, K));
  for (int r = 0; r < settings.restarts; ++r) {
    NormalSampler rng(RngStream{settings.seed, static_cast<uint64_t>(r),
                                RngPurpose::optimizer});
    ControlPath v = ControlPath::zero(nch, K);
    for (auto& row : v.values)
      for (double& val : row) val = settings.restart_amplitude * rng.normal();
    starts.push_back(std::move(v));
  }

  RateResult best;
  bool have_best = false;
  int total_iters = 0;
  for (const ControlPath& start : starts) {
    ControlPath v = start;
    bool conv = false;
    double obj = 0.0;
    double penalty = settings.penalty0;
    for (int stage = 0; stage < settings.penalty_stages; ++stage) {
      StageResult r = optimize_stage(v, xi0, target, cfg, noise, trunc, penalty,
                                     settings);
      v = r.v;
      conv = r.converged;
      obj = r.objective;
      total_iters += r.iterations;
      if (stage + 1 < settings.penalty_stages) penalty *= settings.penalty_growth;
    }
    if (!have_best || obj < best.objective) {
      have_best = true;
      best.optimal_control = v;
      best.objective = obj;
      best.converged = conv;
    }
  }
  best.iterations = total_iters;
  best.cost = best.optimal_control.energy(cfg.dt);
  const double final_penalty =
      settings.penalty0 *
      std::pow(settings.penalty_growth, settings.penalty_stages - 1);
  rate_objective(best.optimal_control, xi0, target, cfg, noise, trunc,
                 final_penalty, &best.terminal_residual);
  // success requires the terminal state to actually match the target
  best.converged = best.converged && best.terminal_residual < settings.residual_tol;
  return best;
}

// ------------------------------------------------------------------
// Monte Carlo
// ------------------------------------------------------------------

bool EventSpec::eval(const Trajectory& tr) const {
  switch (kind) {
    case Kind::whole_space:
      return true;
    case Kind::terminal_mode_re_exceed:
      return tr.terminal.at(k1, k2).real() > threshold;
    case Kind::terminal_l2_exceed:
      return tr.terminal.l2_norm() > threshold;
    case Kind::sup_lp_exceed: {
      if (tr.diag.empty())
        throw DomainError("sup_lp event requires recorded diagnostics");
      double m = 0.0;
      for (const auto& d : tr.diag) m = std::max(m, d.lp);
      return m > threshold;
    }
  }
  return false;
}

std::string EventSpec::describe() const {
  switch (kind) {
    case Kind::whole_space:
      return "whole_space";
    case Kind::terminal_mode_re_exceed:
      return "Re xi_hat(" + std::to_string(k1) + "," + std::to_string(k2) +
             ")(T) > " + std::to_string(threshold);
    case Kind::terminal_l2_exceed:
      return "||xi(T)||_L2 > " + std::to_string(threshold);
    case Kind::sup_lp_exceed:
      return "sup_t ||xi||_Lp > " + std::to_string(threshold);
  }
  return "?";
}

void wilson_interval(long hits, long n, double* lo, double* hi) {
  const double z = 1.959963984540054;  // 95%
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  *lo = std::max(0.0, center - half);
  *hi = std::min(1.0, center + half);
  // the score interval pins the observed extremes exactly
  if (hits == 0) *lo = 0.0;
  if (hits == n) *hi = 1.0;
}

namespace {

template <typename RunFn>
MCEstimate mc_common(const EventSpec& event, const std::vector<double>& epsilons,
                     long samples, int threads, const RunFn& run) {
  MCEstimate est;
  est.event = event.describe();
  for (size_t ei = 0; ei < epsilons.size(); ++ei) {
    std::vector<char> hit(static_cast<size_t>(samples), 0);
    parallel_for(static_cast<int>(samples), threads, [&](int i) {
      hit[static_cast<size_t>(i)] =
          run(epsilons[ei], static_cast<uint64_t>(ei) * static_cast<uint64_t>(samples) +
                                static_cast<uint64_t>(i))
              ? 1
              : 0;
    });
    MCCell cell;
    cell.epsilon = epsilons[ei];
    cell.samples = samples;
    for (char h : hit) cell.hits += h;
    cell.p_hat = static_cast<double>(cell.hits) / static_cast<double>(samples);
    wilson_interval(cell.hits, samples, &cell.wilson_lo, &cell.wilson_hi);
    est.cells.push_back(cell);
  }
  std::vector<double> xs, ys;
  for (const MCCell& c : est.cells) {
    if (c.hits == 0) continue;  // interval stays [0, upper]; point skipped
    xs.push_back(c.epsilon);
    ys.push_back(c.epsilon * std::log(c.p_hat));
  }
  est.fit_points = static_cast<int>(xs.size());
  if (est.fit_points >= 2) {
    double r2 = 0.0;
    ols_fit(xs, ys, &est.slope, &est.intercept, &r2);
  } else if (est.fit_points == 1) {
    est.intercept = ys[0];
  }
  return est;
}

}  // namespace

MCEstimate mc_estimate(const EventSpec& event, const std::vector<double>& epsilons,
                       long samples, const SimulationConfig& cfg,
                       const MultiplicativeNoiseSpec& noise,
                       const SpectralField& xi0, const TruncationSpec& trunc,
                       uint64_t seed, int threads) {
  SimulationConfig c = cfg;
  c.record_diagnostics = event.needs_diagnostics();
  c.record_states = false;
  return mc_common(event, epsilons, samples, threads,
                   [&](double eps, uint64_t traj) {
                     SimulationConfig ce = c;
                     ce.epsilon = eps;
                     RngStream s{seed, traj, RngPurpose::wiener};
                     Trajectory tr =
                         simulate_multiplicative(ce, noise, xi0, trunc, nullptr, &s);
                     return event.eval(tr);
                   });
}

MCEstimate mc_estimate_additive(const EventSpec& event,
                                const std::vector<double>& epsilons, long samples,
                                const SimulationConfig& cfg,
                                const AdditiveNoiseSpec& noise,
                                const SpectralField& xi0, uint64_t seed,
                                int threads) {
  SimulationConfig c = cfg;
  c.record_diagnostics = event.needs_diagnostics();
  c.record_states = false;
  return mc_common(event, epsilons, samples, threads,
                   [&](double eps, uint64_t traj) {
                     SimulationConfig ce = c;
                     ce.epsilon = eps;
                     RngStream s{seed, traj, RngPurpose::field_noise};
                     Trajectory tr = simulate_additive(ce, noise, xi0, s);
                     return event.eval(tr);
                   });
}

// ------------------------------------------------------------------
// Lipschitz probe
// ------------------------------------------------------------------

namespace {

// Smooth random forcing path: a few low modes with smooth time
// envelopes, rescaled into the C([0,T];Lp) ball of radius r.
std::vector<SpectralField> make_forcing_path(const SimulationConfig& cfg,
                                             double radius, NormalSampler& rng) {
  const int K = cfg.steps();
  const int n_components = 3;
  struct Component {
    SpectralField base;
    double omega, phase, amp;
  };
  std::vector<Component> comps;
  for (int c = 0; c < n_components; ++c) {
    int k1 = 0, k2 = 0;
    while (k1 == 0 && k2 == 0) {
      k1 = static_cast<int>(rng.raw() % 7) - 3;
      k2 = static_cast<int>(rng.raw() % 7) - 3;
    }
    ProfileMode m;
    m.k1 = k1;
    m.k2 = k2;
    m.amp = 1.0;
    m.sine = (rng.raw() & 1) != 0;
    // slow envelopes: at most half an oscillation over [0, T], so the
    // forcing does not time-average away
    comps.push_back(Component{field_from_modes(cfg.grid, {m}),
                              0.5 * kTwoPi * rng.uniform() / (2.0 * cfg.T),
                              kTwoPi * rng.uniform(), rng.normal()});
  }
  std::vector<SpectralField> path;
  path.reserve(static_cast<size_t>(K + 1));
  for (int m = 0; m <= K; ++m) {
    const double t = m * cfg.dt;
    SpectralField z(cfg.grid);
    for (const Component& c : comps)
      z.axpy(c.amp * std::cos(c.omega * t + c.phase), c.base);
    path.push_back(std::move(z));
  }
  double sup = 0.0;
  for (const SpectralField& z : path)
    sup = std::max(sup, lp_norm(to_real(z), cfg.p));
  const double target = (0.3 + 0.7 * rng.uniform()) * radius;
  const double s = sup > 0.0 ? target / sup : 0.0;
  for (SpectralField& z : path) z *= s;
  return path;
}

double path_dist_lp(const std::vector<SpectralField>& a,
                    const std::vector<SpectralField>& b, double p) {
  double d = 0.0;
  for (size_t m = 0; m < a.size(); ++m)
    d = std::max(d, lp_norm(to_real(a[m] - b[m]), p));
  return d;
}

double path_dist_sup(const std::vector<SpectralField>& a,
                     const std::vector<SpectralField>& b) {
  double d = 0.0;
  for (size_t m = 0; m < a.size(); ++m) {
    const RealField r = to_real(a[m] - b[m]);
    for (size_t i = 0; i < r.size(); ++i) d = std::max(d, std::abs(r[i]));
  }
  return d;
}

}  // namespace

LipschitzProbe lipschitz_probe(double R1, double R2, int pairs,
                               const SimulationConfig& cfg, uint64_t seed,
                               int threads) {
  if (!(R1 > 0.0) || !(R2 > 0.0))
    throw DomainError("lipschitz_probe: radii must be positive");
  SimulationConfig c = cfg;
  c.record_diagnostics = false;
  c.record_states = true;
  c.record_every = 1;

  LipschitzProbe probe;
  probe.R1 = R1;
  probe.R2 = R2;
  probe.records.resize(static_cast<size_t>(pairs));

  parallel_for(pairs, threads, [&](int i) {
    NormalSampler rng(RngStream{seed, static_cast<uint64_t>(i), RngPurpose::probe});
    SpectralField xi0 = random_smooth_field(c.grid, 2.0, 1.0, rng);
    const double lp0 = lp_norm(to_real(xi0), c.p);
    if (lp0 > 0.0) xi0 *= (0.3 + 0.7 * rng.uniform()) * R1 / lp0;

    const std::vector<SpectralField> z1 = make_forcing_path(c, R2, rng);
    std::vector<SpectralField> z2 = make_forcing_path(c, R2, rng);
    while (path_dist_lp(z1, z2, c.p) < 1e-6) z2 = make_forcing_path(c, R2, rng);

    const Trajectory b1 = integrate_beta_given_forcing(c, xi0, z1);
    const Trajectory b2 = integrate_beta_given_forcing(c, xi0, z2);

    LipschitzPair rec;
    rec.forcing_dist_lp = path_dist_lp(z1, z2, c.p);
    rec.beta_dist_lp = path_dist_lp(b1.states, b2.states, c.p);
    rec.ratio_lp = rec.beta_dist_lp / rec.forcing_dist_lp;
    rec.forcing_dist_sup = path_dist_sup(z1, z2);
    rec.beta_dist_sup = path_dist_sup(b1.states, b2.states);
    rec.ratio_sup = rec.beta_dist_sup / rec.forcing_dist_sup;
    probe.records[static_cast<size_t>(i)] = rec;
  });

  std::vector<double> ratios;
  for (const LipschitzPair& r : probe.records) {
    probe.max_ratio_lp = std::max(probe.max_ratio_lp, r.ratio_lp);
    probe.max_ratio_sup = std::max(probe.max_ratio_sup, r.ratio_sup);
    ratios.push_back(r.ratio_lp);
  }
  std::sort(ratios.begin(), ratios.end());
  if (!ratios.empty()) probe.median_ratio_lp = ratios[ratios.size() / 2];
  return probe;
}

// ------------------------------------------------------------------
// Uniform convergence probe
// ------------------------------------------------------------------

UniformProbeResult uniform_convergence_probe(
    const SimulationConfig& cfg, const MultiplicativeNoiseSpec& noise,
    const TruncationSpec& trunc, const std::vector<SpectralField>& initials,
    const std::vector<ControlPath>& controls, const std::vector<double>& epsilons,
    const std::vector<double>& deltas, int samples, uint64_t seed, int threads) {
  UniformProbeResult res;
  res.epsilons = epsilons;
  std::sort(res.epsilons.begin(), res.epsilons.end(), std::greater<double>());
  res.deltas = deltas;

  SimulationConfig base = cfg;
  base.record_diagnostics = false;
  base.record_states = true;
  base.record_every = 1;

  const int ncells = static_cast<int>(initials.size() * controls.size());
  const int neps = static_cast<int>(res.epsilons.size());

  // Skeleton paths, one per (xi0, v) cell.
  std::vector<std::vector<SpectralField>> skeletons(
      static_cast<size_t>(ncells));
  for (size_t ii = 0; ii < initials.size(); ++ii) {
    for (size_t ci = 0; ci < controls.size(); ++ci) {
      Trajectory skel = simulate_multiplicative(base, noise, initials[ii], trunc,
                                                &controls[ci], nullptr);
      skeletons[ii * controls.size() + ci] = std::move(skel.states);
    }
  }

  // Per (cell, sample): sup-in-time distances for every eps, using the
  // same Wiener increments across the eps grid (common random numbers).
  struct ItemOut {
    std::vector<double> dist_lp, dist_sup;
  };
  std::vector<ItemOut> items(static_cast<size_t>(ncells) *
                             static_cast<size_t>(samples));

  parallel_for(ncells * samples, threads, [&](int idx) {
    const int cell = idx / samples;
    const int s = idx % samples;
    const size_t ii = static_cast<size_t>(cell) / controls.size();
    const size_t ci = static_cast<size_t>(cell) % controls.size();
    ItemOut out;
    for (int ei = 0; ei < neps; ++ei) {
      SimulationConfig ce = base;
      ce.epsilon = res.epsilons[static_cast<size_t>(ei)];
      RngStream stream{seed,
                       static_cast<uint64_t>(cell) * static_cast<uint64_t>(samples) +
                           static_cast<uint64_t>(s),
                       RngPurpose::wiener};
      Trajectory tr = simulate_multiplicative(ce, noise, initials[ii], trunc,
                                              &controls[ci], &stream);
      const auto& skel = skeletons[static_cast<size_t>(cell)];
      double dlp = 0.0, dsup = 0.0;
      for (size_t m = 0; m < skel.size(); ++m) {
        const RealField diff = to_real(tr.states[m] - skel[m]);
        double acc = 0.0;
        for (size_t i = 0; i < diff.size(); ++i) {
          const double av = std::abs(diff[i]);
          acc += std::pow(av, ce.p);
          dsup = std::max(dsup, av);
        }
        dlp = std::max(dlp, std::pow(acc * diff.grid().cell_area(), 1.0 / ce.p));
      }
      out.dist_lp.push_back(dlp);
      out.dist_sup.push_back(dsup);
    }
    items[static_cast<size_t>(idx)] = std::move(out);
  });

  res.max_p_lp.assign(deltas.size(), std::vector<double>(static_cast<size_t>(neps), 0.0));
  res.max_p_sup.assign(deltas.size(), std::vector<double>(static_cast<size_t>(neps), 0.0));
  for (int cell = 0; cell < ncells; ++cell) {
    for (int ei = 0; ei < neps; ++ei) {
      for (size_t di = 0; di < deltas.size(); ++di) {
        long hits_lp = 0, hits_sup = 0;
        for (int s = 0; s < samples; ++s) {
          const ItemOut& it =
              items[static_cast<size_t>(cell) * static_cast<size_t>(samples) +
                    static_cast<size_t>(s)];
          if (it.dist_lp[static_cast<size_t>(ei)] > deltas[di]) ++hits_lp;
          if (it.dist_sup[static_cast<size_t>(ei)] > deltas[di]) ++hits_sup;
        }
        UniformProbeEntry e;
        e.init_index = cell / static_cast<int>(controls.size());
        e.control_index = cell % static_cast<int>(controls.size());
        e.epsilon = res.epsilons[static_cast<size_t>(ei)];
        e.delta = deltas[di];
        e.p_lp = static_cast<double>(hits_lp) / samples;
        e.p_sup = static_cast<double>(hits_sup) / samples;
        res.entries.push_back(e);
        res.max_p_lp[di][static_cast<size_t>(ei)] =
            std::max(res.max_p_lp[di][static_cast<size_t>(ei)], e.p_lp);
        res.max_p_sup[di][static_cast<size_t>(ei)] =
            std::max(res.max_p_sup[di][static_cast<size_t>(ei)], e.p_sup);
      }
    }
  }

  for (size_t di = 0; di < deltas.size(); ++di) {
    for (int ei = 0; ei + 1 < neps; ++ei) {
      if (res.max_p_lp[di][static_cast<size_t>(ei + 1)] >
          res.max_p_lp[di][static_cast<size_t>(ei)] + 1e-12)
        res.monotone_lp = false;
      if (res.max_p_sup[di][static_cast<size_t>(ei + 1)] >
          res.max_p_sup[di][static_cast<size_t>(ei)] + 1e-12)
        res.monotone_sup = false;
    }
  }

  // CRN variance report, pooled over all cells: the paired estimator of
  // P(eps_0) - P(eps_1) at the first delta against the independent-
  // sampling variance at the same marginals.
  if (neps >= 2 && ncells >= 1 && !deltas.empty() && ncells * samples >= 2) {
    const double d0 = deltas[0];
    const long total = static_cast<long>(ncells) * samples;
    std::vector<double> diffs;
    diffs.reserve(static_cast<size_t>(total));
    double p1 = 0.0, p2 = 0.0;
    for (long i = 0; i < total; ++i) {
      const ItemOut& it = items[static_cast<size_t>(i)];
      const double i1 = it.dist_lp[0] > d0 ? 1.0 : 0.0;
      const double i2 = it.dist_lp[1] > d0 ? 1.0 : 0.0;
      diffs.push_back(i1 - i2);
      p1 += i1;
      p2 += i2;
    }
    p1 /= static_cast<double>(total);
    p2 /= static_cast<double>(total);
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double var = 0.0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    var /= static_cast<double>(diffs.size() - 1);
    res.paired_diff_var = var / static_cast<double>(total);
    res.independent_diff_var =
        (p1 * (1.0 - p1) + p2 * (1.0 - p2)) / static_cast<double>(total);
  }
  return res;
}

}  // namespace vort
