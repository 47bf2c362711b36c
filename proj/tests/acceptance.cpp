// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any fails. Usage: acceptance [--cli PATH] [--only 1,2,...] [--threads N]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "vort2d/biot_savart.hpp"
#include "vort2d/fieldgen.hpp"
#include "vort2d/heat_kernel.hpp"
#include "vort2d/ldp.hpp"
#include "vort2d/operators.hpp"
#include "vort2d/solver.hpp"
#include "vort2d/transforms.hpp"

using namespace vort;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string g_cli;
int g_threads = 8;

struct Outcome {
  bool pass = false;
  std::string detail;
};

MultiplicativeNoiseSpec single_mode_channel(int k1, int k2, double amp,
                                            SigmaShape shape) {
  MultiplicativeNoiseSpec spec;
  NoiseChannel c;
  c.shape = shape;
  ProfileMode m;
  m.k1 = k1;
  m.k2 = k2;
  m.amp = amp;
  c.modes = {m};
  spec.channels = {c};
  spec.K = 2.0;
  spec.L = 2.0;
  return spec;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ------------------------------------------------------------------
// 1. dual-representation agreement, 100 points over t in [1e-2, 10]
// ------------------------------------------------------------------
Outcome criterion1() {
  NormalSampler rng(RngStream{201, 0, RngPurpose::probe});
  double worst = 0.0;
  const int npts = 100;
  for (int i = 0; i < npts; ++i) {
    const double t = std::exp(std::log(1e-2) +
                              (std::log(10.0) - std::log(1e-2)) * i / (npts - 1));
    const double dx1 = rng.uniform() * kTwoPi;
    const double dx2 = rng.uniform() * kTwoPi;
    worst = std::max(worst,
                     std::abs(kernel_value(t, dx1, dx2, KernelRep::fourier) -
                              kernel_value(t, dx1, dx2, KernelRep::images)));
  }
  return {worst < 1e-10, "max |fourier - images| = " + fmt(worst)};
}

// ------------------------------------------------------------------
// 2. exponent recovery with r^2 > 0.999
// ------------------------------------------------------------------
Outcome criterion2() {
  FitSettings fs;
  fs.threads = g_threads;
  bool pass = true;
  std::string detail;
  for (double beta : {0.5, 1.0, 1.25}) {
    const ExponentFit f = fit_gradient_estimate(beta, fs);
    const double dev = std::abs(f.fitted_slope - (1.0 - 1.5 * beta));
    pass = pass && dev < 0.05 && f.r_squared > 0.999;
    detail += "grad b=" + fmt(beta) + " slope " + fmt(f.fitted_slope) + " r2 " +
              fmt(f.r_squared) + "; ";
  }
  for (double beta : {0.5, 1.0, 1.5}) {
    const ExponentFit f = fit_kernel_estimate(beta, fs);
    const double dev = std::abs(f.fitted_slope - (1.0 - beta));
    pass = pass && dev < 0.05 && f.r_squared > 0.999;
    detail += "ker b=" + fmt(beta) + " slope " + fmt(f.fitted_slope) + " r2 " +
              fmt(f.r_squared) + "; ";
  }
  return {pass, detail};
}

// ------------------------------------------------------------------
// 3. Biot-Savart exactness at N = 64
// ------------------------------------------------------------------
Outcome criterion3() {
  const TorusGrid grid(64);
  double worst_curl = 0.0, worst_div = 0.0;
  for (int i = 0; i < 100; ++i) {
    NormalSampler rng(RngStream{203, static_cast<uint64_t>(i), RngPurpose::probe});
    const SpectralField xi = random_smooth_field(grid, 1.2, 1.0, rng, false);
    const VelocitySpectral u = velocity_from_vorticity(xi);
    worst_curl = std::max(worst_curl, (curl(u) - xi).l2_norm());
    for (int a = 0; a < grid.n; ++a) {
      const double k1 = grid.freq(a);
      for (int b = 0; b < grid.n; ++b) {
        const double k2 = grid.freq(b);
        const size_t f = static_cast<size_t>(a * grid.n + b);
        worst_div = std::max(worst_div, std::abs(k1 * u.c1[f] + k2 * u.c2[f]));
      }
    }
  }
  return {worst_curl < 1e-13 && worst_div < 1e-13,
          "curl identity " + fmt(worst_curl) + ", div " + fmt(worst_div)};
}

// ------------------------------------------------------------------
// 4. transport orthogonality after dealiasing
// ------------------------------------------------------------------
Outcome criterion4() {
  const TorusGrid grid(64);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    NormalSampler rng(RngStream{204, static_cast<uint64_t>(i), RngPurpose::probe});
    const SpectralField xi = random_smooth_field(grid, 1.0, 1.0, rng, true);
    const SpectralField dq = divergence(nonlinearity_q(xi));
    double ip = 0.0;
    for (size_t f = 0; f < dq.size(); ++f)
      ip += dq[f].real() * xi[f].real() + dq[f].imag() * xi[f].imag();
    worst = std::max(worst, std::abs(ip));
  }
  return {worst < 1e-12, "max |<div q, xi>| = " + fmt(worst)};
}

// ------------------------------------------------------------------
// 5. exact deterministic decay of cos(x1)
// ------------------------------------------------------------------
Outcome criterion5() {
  SimulationConfig cfg;
  cfg.grid = TorusGrid(64);
  cfg.T = 1.0;
  cfg.dt = 1e-3;
  const Trajectory tr = simulate_deterministic(cfg, cosine_field(cfg.grid, 1, 0, 1.0));
  double worst = 0.0;
  for (const StepDiagnostics& d : tr.diag)
    worst = std::max(worst,
                     std::abs(d.l2 - std::sqrt(2.0) * kPi * std::exp(-d.time)));
  return {worst < 1e-6, "sup_t | ||xi||_L2 - pi sqrt(2) e^{-t} | = " + fmt(worst)};
}

// ------------------------------------------------------------------
// 6. stochastic convolution law at a = 1
// ------------------------------------------------------------------
Outcome criterion6() {
  const TorusGrid grid(16);
  const AdditiveNoiseSpec spec(1.0);
  const double t = 0.7;
  const int draws = 10000;
  const int modes[3][2] = {{1, 0}, {1, 1}, {2, 1}};
  double acc[3] = {0.0, 0.0, 0.0};
  NormalSampler rng(RngStream{206, 0, RngPurpose::field_noise});
  const SpectralField zero(grid);
  for (int d = 0; d < draws; ++d) {
    const SpectralField z = sample_stochastic_convolution_step(zero, t, spec, rng);
    for (int m = 0; m < 3; ++m) acc[m] += std::norm(z.at(modes[m][0], modes[m][1]));
  }
  bool pass = true;
  std::string detail;
  for (int m = 0; m < 3; ++m) {
    const double lam = modes[m][0] * modes[m][0] + modes[m][1] * modes[m][1];
    const double want =
        std::pow(lam, -spec.a) * (1.0 - std::exp(-2.0 * lam * t)) / (2.0 * lam);
    const double got = acc[m] / draws;
    const double se = want / std::sqrt(static_cast<double>(draws));
    pass = pass && std::abs(got - want) < 3.0 * se;
    detail += "|k|^2=" + fmt(lam) + ": " + fmt(got) + " vs " + fmt(want) + "; ";
  }
  return {pass, detail};
}

// ------------------------------------------------------------------
// 7. picard / stepping cross-oracle and contraction monotonicity
// ------------------------------------------------------------------
Outcome criterion7() {
  // linear problem: agreement to 1e-9
  SimulationConfig cfg;
  cfg.grid = TorusGrid(16);
  cfg.T = 0.5;
  cfg.dt = 0.01;
  cfg.nonlinearity = false;
  cfg.epsilon = 0.4;
  cfg.record_states = true;
  MultiplicativeNoiseSpec lin = single_mode_channel(1, 0, 1.0, SigmaShape::constant);
  {
    NoiseChannel c2;
    c2.shape = SigmaShape::constant;
    ProfileMode m;
    m.k1 = 0;
    m.k2 = 1;
    m.amp = 0.7;
    c2.modes = {m};
    lin.channels.push_back(c2);
  }
  TruncationSpec trunc;
  trunc.radius = 50.0;  // truncated problem, cutoff inactive at this scale
  const RngStream stream{207, 0, RngPurpose::wiener};
  const Trajectory stepped =
      simulate_multiplicative(cfg, lin, SpectralField(cfg.grid), trunc, nullptr, &stream);
  PicardReport rep;
  const Trajectory fixed = picard_solve(cfg, lin, SpectralField(cfg.grid), trunc,
                                        PicardSettings{}, nullptr, &stream, &rep);
  double worst = 0.0;
  for (size_t m = 0; m < fixed.states.size(); ++m)
    worst = std::max(worst, (fixed.states[m] - stepped.states[m]).l2_norm());

  // contraction factors on the nonlinear truncated problem
  SimulationConfig ncfg = cfg;
  ncfg.nonlinearity = true;
  ncfg.epsilon = 0.2;
  ncfg.record_states = false;
  NormalSampler rng(RngStream{207, 1, RngPurpose::probe});
  const SpectralField xi0 = random_smooth_field(ncfg.grid, 1.5, 1.0, rng);
  const MultiplicativeNoiseSpec nspec = single_mode_channel(1, 0, 1.0, SigmaShape::sine);
  const TruncationSpec ntrunc = TruncationSpec::auto_radius(xi0, ncfg.p);
  const RngStream nstream{207, 2, RngPurpose::wiener};
  auto mean_factor = [&](double lambda) {
    PicardSettings s;
    s.lambda = lambda;
    PicardReport r;
    picard_solve(ncfg, nspec, xi0, ntrunc, s, nullptr, &nstream, &r);
    double a = 0.0;
    for (double f : r.contraction_factors) a += f;
    return a / static_cast<double>(r.contraction_factors.size());
  };
  const double f1 = mean_factor(1.0), f10 = mean_factor(10.0), f100 = mean_factor(100.0);
  const bool pass = worst < 1e-9 && rep.iterations <= 3 && f1 > f10 && f10 > f100;
  return {pass, "linear path diff " + fmt(worst) + "; factors " + fmt(f1) + " > " +
                    fmt(f10) + " > " + fmt(f100)};
}

// ------------------------------------------------------------------
// 8. controllability-Gramian rate test, z = 1, T = 1
// ------------------------------------------------------------------
Outcome criterion8() {
  SimulationConfig cfg;
  cfg.grid = TorusGrid(8);
  cfg.T = 1.0;
  cfg.dt = 5e-3;
  cfg.nonlinearity = false;
  cfg.record_diagnostics = false;
  const MultiplicativeNoiseSpec spec = single_mode_channel(1, 0, 1.0, SigmaShape::constant);
  TruncationSpec trunc;
  const double z = 1.0;
  const SpectralField target = field_from_modes(cfg.grid, {{1, 0, z, false}});
  RateSettings st;
  st.gradient = GradientMethod::adjoint;
  st.penalty0 = 10.0;
  st.max_iter = 2000;
  st.seed = 208;
  st.threads = g_threads;
  const RateResult res = rate_function(SpectralField(cfg.grid), target, cfg, spec, trunc, st);
  const double want = z * z / (1.0 - std::exp(-2.0 * cfg.T));
  const double rel = std::abs(res.cost - want) / want;
  return {rel < 0.02 && res.converged,
          "cost " + fmt(res.cost) + " vs " + fmt(want) + " (" + fmt(100 * rel) + "%)"};
}

// ------------------------------------------------------------------
// 9. Freidlin-Wentzell slope test, 1e5 samples per epsilon
// ------------------------------------------------------------------
Outcome criterion9() {
  SimulationConfig cfg;
  cfg.grid = TorusGrid(8);
  cfg.T = 1.0;
  cfg.dt = 5e-3;
  cfg.nonlinearity = false;
  cfg.record_diagnostics = false;
  const MultiplicativeNoiseSpec spec = single_mode_channel(1, 0, 1.0, SigmaShape::constant);
  TruncationSpec trunc;
  const double z = 0.25;
  EventSpec ev;
  ev.kind = EventSpec::Kind::terminal_mode_re_exceed;
  ev.k1 = 1;
  ev.k2 = 0;
  ev.threshold = z;
  const MCEstimate est = mc_estimate(ev, {0.05, 0.02, 0.01}, 100000, cfg, spec,
                                     SpectralField(cfg.grid), trunc, 209, g_threads);
  const double rate = z * z / (1.0 - std::exp(-2.0 * cfg.T));
  const double rel = std::abs(est.intercept - (-rate)) / rate;
  std::string detail = "intercept " + fmt(est.intercept) + " vs " + fmt(-rate) +
                       " (" + fmt(100 * rel) + "%); hits";
  for (const MCCell& c : est.cells) detail += " " + std::to_string(c.hits);
  return {est.fit_points >= 2 && rel < 0.20, detail};
}

// ------------------------------------------------------------------
// 10. uniform convergence probe on a 3 x 3 grid
// ------------------------------------------------------------------
Outcome criterion10() {
  SimulationConfig cfg;
  cfg.grid = TorusGrid(32);
  cfg.T = 0.5;
  cfg.dt = 0.01;
  cfg.p = 4.0;
  MultiplicativeNoiseSpec spec = single_mode_channel(1, 0, 1.0, SigmaShape::sine);
  {
    NoiseChannel c2;
    c2.shape = SigmaShape::constant;
    ProfileMode m;
    m.k1 = 0;
    m.k2 = 1;
    m.amp = 1.0;
    c2.modes = {m};
    spec.channels.push_back(c2);
  }
  NormalSampler rng(RngStream{210, 0, RngPurpose::probe});
  std::vector<SpectralField> initials;
  initials.push_back(SpectralField(cfg.grid));
  initials.push_back(cosine_field(cfg.grid, 1, 1, 0.3));
  initials.push_back(random_smooth_field(cfg.grid, 1.5, 0.5, rng));
  const int K = cfg.steps();
  std::vector<ControlPath> controls;
  controls.push_back(ControlPath::zero(2, K));
  ControlPath c1 = ControlPath::zero(2, K);
  for (auto& row : c1.values) {
    row[0] = 0.5;
    row[1] = -0.3;
  }
  controls.push_back(c1);
  ControlPath c2 = ControlPath::zero(2, K);
  for (int m = 0; m < K; ++m) {
    c2.values[static_cast<size_t>(m)][0] = 0.4 * std::sin(6.0 * m * cfg.dt);
    c2.values[static_cast<size_t>(m)][1] = 0.4 * std::cos(6.0 * m * cfg.dt);
  }
  controls.push_back(c2);
  TruncationSpec trunc;
  const UniformProbeResult res = uniform_convergence_probe(
      cfg, spec, trunc, initials, controls, {1e-1, 1e-2, 1e-3}, {0.1, 0.05}, 200,
      210, g_threads);
  std::string detail = "max P(delta=0.1):";
  for (double p : res.max_p_lp[0]) detail += " " + fmt(p);
  detail += res.monotone_lp && res.monotone_sup ? " (monotone both norms)"
                                                : " (NOT monotone)";
  const bool informative = res.max_p_lp[0].front() > 0.0;
  return {res.monotone_lp && res.monotone_sup && informative, detail};
}

// ------------------------------------------------------------------
// 11. determinism through the CLI: byte-identical data outputs
// ------------------------------------------------------------------
Outcome criterion11() {
  if (g_cli.empty()) return {false, "no --cli path provided"};
  namespace fs = std::filesystem;
  const fs::path work = fs::temp_directory_path() / "vort2d_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path cfg = work / "det.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "grid": {"n": 32},
      "sim": {"T": 0.2, "dt": 0.001, "epsilon": 0.3, "p": 4.0},
      "noise": {"type": "multiplicative", "K": 1.0, "L": 1.0,
                "channels": [{"shape": "sin",
                              "profile": {"type": "modes",
                                          "modes": [{"k": [1, 0], "amp": 1.0}]}},
                             {"shape": "constant",
                              "profile": {"type": "modes",
                                          "modes": [{"k": [0, 1], "amp": 0.5}]}}]},
      "truncation": {"radius": 0},
      "initial": {"type": "random", "amplitude": 0.8, "decay": 1.5},
      "seed": 99, "threads": 4,
      "output": {"dump_states": true}
    })";
  }
  auto run_once = [&](const std::string& tag) -> std::string {
    const fs::path out_file = work / ("stdout_" + tag + ".txt");
    const std::string cmd = g_cli + " simulate --config " + cfg.string() +
                            " --out " + (work / tag).string() + " > " +
                            out_file.string() + " 2>&1";
    if (std::system(cmd.c_str()) != 0) return "";
    std::ifstream in(out_file);
    std::string line, dir;
    while (std::getline(in, line))
      if (line.rfind("run_dir: ", 0) == 0) dir = line.substr(9);
    return dir;
  };
  const std::string a = run_once("a");
  const std::string b = run_once("b");
  if (a.empty() || b.empty()) return {false, "CLI run failed"};
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    if (rel.filename() == "manifest.json") continue;  // carries timestamps
    ++compared;
    if (read(entry.path()) != read(fs::path(b) / rel))
      return {false, "byte mismatch in " + rel.string()};
  }
  // the manifests' checksum tables must agree even though timestamps differ
  const std::string ma = read(fs::path(a) / "manifest.json");
  const std::string mb = read(fs::path(b) / "manifest.json");
  const auto outputs_of = [](const std::string& m) {
    const size_t pos = m.find("\"outputs\"");
    return pos == std::string::npos ? std::string() : m.substr(pos);
  };
  if (outputs_of(ma) != outputs_of(mb))
    return {false, "manifest checksum tables differ"};
  return {true, std::to_string(compared) + " files byte-identical across reruns"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      g_cli = argv[++i];
    } else if (a == "--threads" && i + 1 < argc) {
      g_threads = std::atoi(argv[++i]);
    } else if (a == "--only" && i + 1 < argc) {
      std::istringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.push_back(std::atoi(tok.c_str()));
    }
  }

  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "heat-kernel dual-representation agreement", 10, criterion1},
      {2, "kernel estimate exponent recovery", 60, criterion2},
      {3, "Biot-Savart exactness", 5, criterion3},
      {4, "transport orthogonality", 10, criterion4},
      {5, "exact deterministic solution", 30, criterion5},
      {6, "stochastic convolution law", 60, criterion6},
      {7, "picard/stepping cross-oracle", 60, criterion7},
      {8, "Gramian rate-function test", 300, criterion8},
      {9, "Freidlin-Wentzell slope test", 1200, criterion9},
      {10, "uniform convergence probe", 1800, criterion10},
      {11, "determinism of CLI outputs", 120, criterion11},
  };

  int passed = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), c.id) == only.end())
      continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool in_budget = secs < c.budget_seconds;
    const bool ok = out.pass && in_budget;
    if (ok) ++passed;
    std::printf("[%s] criterion %d: %s (%s; %.1f s of %.0f s)\n",
                ok ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs,
                c.budget_seconds);
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d criteria passed\n", passed, ran);
  return passed == ran ? 0 : 1;
}
