// Command-line front end: simulate / verify / rate / mc / probe-lipschitz /
// probe-uniform. Every run creates an append-only directory under --out
// containing the resolved config, the data outputs, and a manifest with
// per-output checksums.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vort2d/biot_savart.hpp"
#include "vort2d/config.hpp"
#include "vort2d/errors.hpp"
#include "vort2d/fieldgen.hpp"
#include "vort2d/heat_kernel.hpp"
#include "vort2d/ldp.hpp"
#include "vort2d/operators.hpp"
#include "vort2d/runio.hpp"
#include "vort2d/solver.hpp"
#include "vort2d/state_io.hpp"
#include "vort2d/transforms.hpp"

#include <json.hpp>

namespace {

using namespace vort;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "runs";
  int64_t seed = -1;  // -1 = keep config seed
  int threads = -1;   // -1 = keep config threads
};

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = parse_config(slurp(args.config_path));
  if (args.seed >= 0) cfg.seed = static_cast<uint64_t>(args.seed);
  if (args.threads >= 0) cfg.threads = args.threads;
  return cfg;
}

RunDirectory open_run_dir(const CommonArgs& args, const RunConfig& cfg,
                          const std::string& command, std::string* hash_out) {
  const std::string resolved = serialize_config(cfg);
  const std::string hash = fnv1a_hex(resolved);
  RunDirectory dir = RunDirectory::create(args.out_dir, command);
  dir.write_text("resolved_config.json", resolved);
  *hash_out = hash;
  return dir;
}

int finish(RunDirectory& dir, const std::string& hash) {
  dir.finalize(hash);
  std::cout << "run_dir: " << dir.path() << "\n";
  return 0;
}

std::string fmt_bool(bool b) { return b ? "1" : "0"; }

// ----------------------------------------------------------------
// simulate
// ----------------------------------------------------------------

int cmd_simulate(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  SimulationConfig sim = cfg.sim;
  sim.record_diagnostics = true;
  sim.record_states = cfg.dump_states;

  const SpectralField xi0 = build_field(cfg.initial, sim.grid, cfg.seed);
  std::string hash;
  RunDirectory dir = open_run_dir(args, cfg, "simulate", &hash);
  sim.abort_dump_dir = dir.path();

  Trajectory tr(sim.grid);
  switch (cfg.noise_type) {
    case NoiseType::none:
      tr = simulate_deterministic(sim, xi0);
      break;
    case NoiseType::additive:
      tr = simulate_additive(sim, cfg.additive, xi0,
                             RngStream{cfg.seed, 0, RngPurpose::field_noise});
      break;
    case NoiseType::multiplicative: {
      const TruncationSpec trunc = cfg.make_truncation(xi0);
      const RngStream stream{cfg.seed, 0, RngPurpose::wiener};
      tr = simulate_multiplicative(sim, cfg.multiplicative, xi0, trunc, nullptr,
                                   &stream);
      break;
    }
  }

  CsvBuilder csv({"time", "l2", "lp", "grad_l2", "trunc_active", "probe_re",
                  "probe_im"});
  for (const StepDiagnostics& d : tr.diag)
    csv.row({format_double(d.time), format_double(d.l2), format_double(d.lp),
             format_double(d.grad_l2), fmt_bool(d.trunc_active),
             format_double(d.probe.real()), format_double(d.probe.imag())});
  dir.write_text("diagnostics.csv", csv.str());

  if (cfg.dump_states) {
    for (size_t i = 0; i < tr.states.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "states/state_%06zu.bin", i);
      const std::string bytes = state_to_bytes(tr.states[i]);
      dir.write_bytes(name, bytes.data(), bytes.size());
    }
  }

  json summary;
  summary["steps"] = tr.steps;
  summary["terminal_l2"] = tr.terminal.l2_norm();
  summary["trunc_active_steps"] = tr.trunc_active_steps;
  summary["warnings"] = tr.warnings;
  if (cfg.dump_states && sim.record_every == 1) {
    const EnergyReport er = energy_report(tr, sim.p);
    summary["sup_lp_p"] = er.sup_lp_p;
    summary["dissipation_integral"] = er.dissipation_integral;
  }
  dir.write_text("summary.json", summary.dump(2) + "\n");
  return finish(dir, hash);
}

// ----------------------------------------------------------------
// verify
// ----------------------------------------------------------------

struct Check {
  std::string name;
  double value;
  double threshold;
  bool less_than;  // pass when value < threshold (else >=)
  bool pass() const { return less_than ? value < threshold : value >= threshold; }
};

int cmd_verify(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  std::string hash;
  RunDirectory dir = open_run_dir(args, cfg, "verify", &hash);

  FitSettings fit = cfg.verify.fit;
  fit.threads = cfg.threads;

  CsvBuilder kernels({"beta", "theoretical_exponent", "fitted_slope",
                      "r_squared", "kind"});
  std::vector<Check> checks;
  for (double beta : cfg.verify.betas_gradient) {
    const ExponentFit f = fit_gradient_estimate(beta, fit);
    const double expo = 1.0 - 1.5 * beta;
    kernels.row({format_double(beta), format_double(expo),
                 format_double(f.fitted_slope), format_double(f.r_squared),
                 "gradient"});
    checks.push_back({"gradient_slope_beta_" + format_double(beta),
                      std::abs(f.fitted_slope - expo), cfg.verify.slope_tol,
                      true});
    checks.push_back({"gradient_r2_beta_" + format_double(beta), f.r_squared,
                      cfg.verify.r2_min, false});
  }
  for (double beta : cfg.verify.betas_kernel) {
    const ExponentFit f = fit_kernel_estimate(beta, fit);
    const double expo = 1.0 - beta;
    kernels.row({format_double(beta), format_double(expo),
                 format_double(f.fitted_slope), format_double(f.r_squared),
                 "kernel"});
    checks.push_back({"kernel_slope_beta_" + format_double(beta),
                      std::abs(f.fitted_slope - expo), cfg.verify.slope_tol,
                      true});
    checks.push_back({"kernel_r2_beta_" + format_double(beta), f.r_squared,
                      cfg.verify.r2_min, false});
  }
  dir.write_text("kernels.csv", kernels.str());

  // Dual-representation agreement on a log time grid.
  {
    NormalSampler rng(RngStream{cfg.seed, 0, RngPurpose::probe});
    double worst = 0.0;
    const int npts = 100;
    for (int i = 0; i < npts; ++i) {
      const double t =
          std::exp(std::log(1e-2) + (std::log(10.0) - std::log(1e-2)) * i / (npts - 1));
      const double dx1 = rng.uniform() * kTwoPi;
      const double dx2 = rng.uniform() * kTwoPi;
      const double a = kernel_value(t, dx1, dx2, KernelRep::fourier);
      const double b = kernel_value(t, dx1, dx2, KernelRep::images);
      worst = std::max(worst, std::abs(a - b));
    }
    checks.push_back({"representation_agreement", worst,
                      cfg.verify.rep_agree_tol, true});
  }

  // Mass conservation by lattice quadrature.
  {
    const TorusGrid g(64);
    double worst = 0.0;
    for (double t : {1e-2, 0.1, 1.0, 10.0}) {
      double acc = 0.0;
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
          acc += kernel_value(t, i * g.spacing(), j * g.spacing());
      worst = std::max(worst, std::abs(acc * g.cell_area() - 1.0));
    }
    checks.push_back({"kernel_mass", worst, 1e-12, true});
  }

  // Biot-Savart identity suite on random fields.
  {
    const TorusGrid grid(64);
    double worst_curl = 0.0, worst_div = 0.0, worst_transport = 0.0;
    for (int i = 0; i < cfg.verify.random_fields; ++i) {
      NormalSampler rng(RngStream{cfg.seed, static_cast<uint64_t>(i + 1),
                                  RngPurpose::probe});
      const SpectralField xi = random_smooth_field(grid, 1.5, 1.0, rng);
      const VelocitySpectral u = velocity_from_vorticity(xi);
      const SpectralField back = curl(u);
      worst_curl = std::max(worst_curl, (back - xi).l2_norm());
      const SpectralField div_u = divergence(u);
      worst_div = std::max(worst_div, div_u.l2_norm());
      const SpectralField dq = divergence(nonlinearity_q(xi));
      double ip = 0.0;
      for (size_t c = 0; c < dq.size(); ++c)
        ip += dq[c].real() * xi[c].real() + dq[c].imag() * xi[c].imag();
      worst_transport = std::max(worst_transport, std::abs(ip));
    }
    checks.push_back({"curl_biot_savart_identity", worst_curl,
                      cfg.verify.curl_tol, true});
    checks.push_back({"incompressibility", worst_div, cfg.verify.curl_tol, true});
    checks.push_back({"transport_orthogonality", worst_transport,
                      cfg.verify.transport_tol, true});
  }

  CsvBuilder table({"name", "value", "threshold", "pass"});
  bool all_pass = true;
  for (const Check& c : checks) {
    table.row({c.name, format_double(c.value), format_double(c.threshold),
               fmt_bool(c.pass())});
    all_pass = all_pass && c.pass();
  }
  dir.write_text("checks.csv", table.str());
  finish(dir, hash);
  if (!all_pass) {
    std::cerr << "verify: invariant failure (see checks.csv)\n";
    return 1;
  }
  return 0;
}

// ----------------------------------------------------------------
// rate
// ----------------------------------------------------------------

int cmd_rate(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  if (cfg.noise_type != NoiseType::multiplicative)
    throw ConfigError("rate requires a multiplicative noise spec");
  SimulationConfig sim = cfg.sim;
  const SpectralField xi0 = build_field(cfg.initial, sim.grid, cfg.seed);
  const SpectralField target = build_field(cfg.rate.target, sim.grid, cfg.seed);
  const TruncationSpec trunc = cfg.make_truncation(xi0);

  RateSettings st = cfg.rate.settings;
  st.seed = cfg.seed;
  st.threads = cfg.threads;

  std::string hash;
  RunDirectory dir = open_run_dir(args, cfg, "rate", &hash);
  const RateResult res =
      rate_function(xi0, target, sim, cfg.multiplicative, trunc, st);

  json out;
  out["cost"] = res.cost;
  out["terminal_residual"] = res.terminal_residual;
  out["objective"] = res.objective;
  out["iterations"] = res.iterations;
  out["converged"] = res.converged;
  dir.write_text("rate_result.json", out.dump(2) + "\n");

  std::vector<std::string> header{"step", "time"};
  for (int j = 0; j < cfg.multiplicative.n(); ++j)
    header.push_back("v" + std::to_string(j));
  CsvBuilder csv(header);
  for (size_t m = 0; m < res.optimal_control.values.size(); ++m) {
    std::vector<std::string> cells{std::to_string(m),
                                   format_double(static_cast<double>(m) * sim.dt)};
    for (double v : res.optimal_control.values[m]) cells.push_back(format_double(v));
    csv.row(cells);
  }
  dir.write_text("control.csv", csv.str());
  return finish(dir, hash);
}

// ----------------------------------------------------------------
// mc
// ----------------------------------------------------------------

int cmd_mc(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  SimulationConfig sim = cfg.sim;
  const SpectralField xi0 = build_field(cfg.initial, sim.grid, cfg.seed);

  std::string hash;
  RunDirectory dir = open_run_dir(args, cfg, "mc", &hash);

  MCEstimate est;
  if (cfg.mc.use_additive || cfg.noise_type == NoiseType::additive) {
    if (cfg.noise_type != NoiseType::additive)
      throw ConfigError("mc.use_additive requires an additive noise spec");
    est = mc_estimate_additive(cfg.mc.event, cfg.mc.epsilons, cfg.mc.samples, sim,
                               cfg.additive, xi0, cfg.seed, cfg.threads);
  } else if (cfg.noise_type == NoiseType::multiplicative) {
    const TruncationSpec trunc = cfg.make_truncation(xi0);
    est = mc_estimate(cfg.mc.event, cfg.mc.epsilons, cfg.mc.samples, sim,
                      cfg.multiplicative, xi0, trunc, cfg.seed, cfg.threads);
  } else {
    throw ConfigError("mc requires a noise spec");
  }

  CsvBuilder csv({"epsilon", "samples", "hits", "p_hat", "wilson_lo", "wilson_hi"});
  for (const MCCell& c : est.cells)
    csv.row({format_double(c.epsilon), std::to_string(c.samples),
             std::to_string(c.hits), format_double(c.p_hat),
             format_double(c.wilson_lo), format_double(c.wilson_hi)});
  dir.write_text("mc.csv", csv.str());

  json summary;
  summary["event"] = est.event;
  summary["slope"] = est.slope;
  summary["intercept"] = est.intercept;
  summary["fit_points"] = est.fit_points;
  dir.write_text("mc_summary.json", summary.dump(2) + "\n");
  return finish(dir, hash);
}

// ----------------------------------------------------------------
// probe-lipschitz
// ----------------------------------------------------------------

int cmd_probe_lipschitz(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  std::string hash;
  RunDirectory dir = open_run_dir(args, cfg, "probe-lipschitz", &hash);

  const LipschitzProbe probe =
      lipschitz_probe(cfg.lipschitz.R1, cfg.lipschitz.R2, cfg.lipschitz.pairs,
                      cfg.sim, cfg.seed, cfg.threads);

  CsvBuilder csv({"pair", "forcing_dist_lp", "beta_dist_lp", "ratio_lp",
                  "forcing_dist_sup", "beta_dist_sup", "ratio_sup"});
  for (size_t i = 0; i < probe.records.size(); ++i) {
    const LipschitzPair& r = probe.records[i];
    csv.row({std::to_string(i), format_double(r.forcing_dist_lp),
             format_double(r.beta_dist_lp), format_double(r.ratio_lp),
             format_double(r.forcing_dist_sup), format_double(r.beta_dist_sup),
             format_double(r.ratio_sup)});
  }
  dir.write_text("lipschitz.csv", csv.str());

  json summary;
  summary["R1"] = probe.R1;
  summary["R2"] = probe.R2;
  summary["max_ratio_lp"] = probe.max_ratio_lp;
  summary["median_ratio_lp"] = probe.median_ratio_lp;
  summary["max_ratio_sup"] = probe.max_ratio_sup;
  dir.write_text("lipschitz_summary.json", summary.dump(2) + "\n");
  return finish(dir, hash);
}

// ----------------------------------------------------------------
// probe-uniform
// ----------------------------------------------------------------

int cmd_probe_uniform(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  if (cfg.noise_type != NoiseType::multiplicative)
    throw ConfigError("probe-uniform requires a multiplicative noise spec");
  if (cfg.uniform.initials.empty() || cfg.uniform.controls.empty())
    throw ConfigError("probe-uniform needs initials and controls");

  SimulationConfig sim = cfg.sim;
  const int K = sim.steps();
  std::vector<SpectralField> initials;
  for (const FieldSpec& f : cfg.uniform.initials)
    initials.push_back(build_field(f, sim.grid, cfg.seed));
  std::vector<ControlPath> controls;
  for (const ControlSpec& c : cfg.uniform.controls)
    controls.push_back(build_control(c, cfg.multiplicative.n(), K, sim.dt,
                                     cfg.uniform.control_bound));
  const TruncationSpec trunc = cfg.make_truncation(initials[0]);

  std::string hash;
  RunDirectory dir = open_run_dir(args, cfg, "probe-uniform", &hash);

  const UniformProbeResult res = uniform_convergence_probe(
      sim, cfg.multiplicative, trunc, initials, controls, cfg.uniform.epsilons,
      cfg.uniform.deltas, cfg.uniform.samples, cfg.seed, cfg.threads);

  CsvBuilder csv({"init", "control", "epsilon", "delta", "p_lp", "p_sup"});
  for (const UniformProbeEntry& e : res.entries)
    csv.row({std::to_string(e.init_index), std::to_string(e.control_index),
             format_double(e.epsilon), format_double(e.delta),
             format_double(e.p_lp), format_double(e.p_sup)});
  dir.write_text("uniform.csv", csv.str());

  json summary;
  summary["monotone_lp"] = res.monotone_lp;
  summary["monotone_sup"] = res.monotone_sup;
  summary["epsilons"] = res.epsilons;
  summary["deltas"] = res.deltas;
  summary["max_p_lp"] = res.max_p_lp;
  summary["max_p_sup"] = res.max_p_sup;
  summary["paired_diff_var"] = res.paired_diff_var;
  summary["independent_diff_var"] = res.independent_diff_var;
  dir.write_text("uniform_summary.json", summary.dump(2) + "\n");
  finish(dir, hash);
  if (!res.monotone_lp || !res.monotone_sup) {
    std::cerr << "probe-uniform: exceedance probabilities not monotone\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudospectral 2-d stochastic vorticity solver and "
               "large-deviations toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "run configuration (JSON)")
        ->required();
    sub->add_option("--out", args.out_dir, "parent directory for run outputs");
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--threads", args.threads,
                    "worker threads (0 = auto, overrides config)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  CLI::App* verify =
      app.add_subcommand("verify", "kernel exponent fits and identity checks");
  CLI::App* rate = app.add_subcommand("rate", "rate function by control optimization");
  CLI::App* mc = app.add_subcommand("mc", "small-noise Monte Carlo estimates");
  CLI::App* probe_lip =
      app.add_subcommand("probe-lipschitz", "forcing-to-solution Lipschitz probe");
  CLI::App* probe_uni = app.add_subcommand(
      "probe-uniform", "controlled vs skeleton uniform convergence probe");
  for (CLI::App* sub : {simulate, verify, rate, mc, probe_lip, probe_uni})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(args);
    if (verify->parsed()) return cmd_verify(args);
    if (rate->parsed()) return cmd_rate(args);
    if (mc->parsed()) return cmd_mc(args);
    if (probe_lip->parsed()) return cmd_probe_lipschitz(args);
    if (probe_uni->parsed()) return cmd_probe_uniform(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
