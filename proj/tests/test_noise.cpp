#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"
#include "vort2d/errors.hpp"
#include "vort2d/noise.hpp"
#include "vort2d/operators.hpp"
#include "vort2d/transforms.hpp"

using namespace vort;
namespace ts = testsupport;

namespace {

double ou_variance(double lam, double a, double t) {
  return std::pow(lam, -a) * (1.0 - std::exp(-2.0 * lam * t)) / (2.0 * lam);
}

}  // namespace

TEST_CASE("additive spec requires a > 0") {
  CHECK_THROWS_AS(AdditiveNoiseSpec(0.0), DomainError);
  CHECK_THROWS_AS(AdditiveNoiseSpec(-1.0), DomainError);
  CHECK(AdditiveNoiseSpec(0.5).a == 0.5);
}

TEST_CASE("stochastic convolution: per-mode stationary variance") {
  // One exact step of length 20 samples the (nearly) stationary law;
  // modes |k|^2 in {1, 2, 5}.
  const TorusGrid grid(16);
  const AdditiveNoiseSpec spec(1.0);
  const int n_draws = 10000;
  const double t = 20.0;
  struct Mode {
    int k1, k2;
  };
  const Mode modes[] = {{1, 0}, {1, 1}, {2, 1}};
  std::vector<double> acc(3, 0.0);
  NormalSampler rng(RngStream{101, 0, RngPurpose::field_noise});
  const SpectralField zero(grid);
  for (int d = 0; d < n_draws; ++d) {
    const SpectralField z = sample_stochastic_convolution_step(zero, t, spec, rng);
    for (int m = 0; m < 3; ++m)
      acc[static_cast<size_t>(m)] += std::norm(z.at(modes[m].k1, modes[m].k2));
  }
  for (int m = 0; m < 3; ++m) {
    const double lam = modes[m].k1 * modes[m].k1 + modes[m].k2 * modes[m].k2;
    const double want = ou_variance(lam, spec.a, t);  // ~ |k|^{-2a} / (2|k|^2)
    const double got = acc[static_cast<size_t>(m)] / n_draws;
    // |zeta|^2 is (v/2) chi^2_2: sd of the mean estimate is v / sqrt(N)
    const double se = want / std::sqrt(static_cast<double>(n_draws));
    CHECK(std::abs(got - want) < 3.0 * se);
  }
}

TEST_CASE("stochastic convolution: transient variance matches the OU formula") {
  const TorusGrid grid(8);
  const AdditiveNoiseSpec spec(0.7);
  const int n_draws = 10000;
  const double dt = 0.13;
  NormalSampler rng(RngStream{102, 0, RngPurpose::field_noise});
  const SpectralField zero(grid);
  double acc = 0.0;
  for (int d = 0; d < n_draws; ++d) {
    const SpectralField z = sample_stochastic_convolution_step(zero, dt, spec, rng);
    acc += std::norm(z.at(1, 0));
  }
  const double want = ou_variance(1.0, spec.a, dt);
  CHECK(std::abs(acc / n_draws - want) < 3.0 * want / std::sqrt(1.0 * n_draws));
}

TEST_CASE("zeta stays real, zero-mean, and inside the resolvable set") {
  const TorusGrid grid(16);
  const AdditiveNoiseSpec spec(1.0);
  NormalSampler rng(RngStream{103, 0, RngPurpose::field_noise});
  SpectralField z(grid);
  for (int s = 0; s < 10; ++s) z = sample_stochastic_convolution_step(z, 0.05, spec, rng);
  CHECK(z.reality_defect() == 0.0);
  CHECK(std::abs(z.mean_coeff()) == 0.0);
  // Nyquist rows untouched
  CHECK(std::abs(z.at(-8, 3)) == 0.0);
  // imaginary part of the inverse transform vanishes
  double worst = 0.0;
  for (double x1 : {0.3, 2.0}) {
    for (double x2 : {0.0, 4.4}) {
      worst = std::max(worst, std::abs(ts::inverse_point_oracle(z, x1, x2).imag()));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("grid refinement stability of E sup_t ||zeta||_L4^4 (a = 1)") {
  // Refinement comparison on a shared realization: the same zeta at
  // N = 64 against its spectral restriction to the N = 32 mode set, so
  // the difference measures discretization rather than sampling noise.
  const AdditiveNoiseSpec spec(1.0);
  const TorusGrid fine(64);
  const TorusGrid coarse(32);
  const int paths = 200, steps = 20;
  const double dt = 0.05;
  double mean_fine = 0.0, mean_coarse = 0.0;
  for (int p = 0; p < paths; ++p) {
    NormalSampler rng(RngStream{104, static_cast<uint64_t>(p), RngPurpose::field_noise});
    SpectralField z(fine);
    double sup_fine = 0.0, sup_coarse = 0.0;
    for (int s = 0; s < steps; ++s) {
      z = sample_stochastic_convolution_step(z, dt, spec, rng);
      sup_fine = std::max(sup_fine, std::pow(lp_norm(to_real(z), 4.0), 4.0));
      SpectralField restricted(coarse);
      for (int a = 0; a < coarse.n; ++a) {
        const int k1 = coarse.freq(a);
        for (int b = 0; b < coarse.n; ++b) {
          const int k2 = coarse.freq(b);
          if (coarse.resolvable(k1, k2)) restricted.at(k1, k2) = z.at(k1, k2);
        }
      }
      sup_coarse =
          std::max(sup_coarse, std::pow(lp_norm(to_real(restricted), 4.0), 4.0));
    }
    mean_fine += sup_fine;
    mean_coarse += sup_coarse;
  }
  mean_fine /= paths;
  mean_coarse /= paths;
  CHECK(std::isfinite(mean_fine));
  CHECK(std::abs(mean_fine - mean_coarse) / mean_coarse < 0.10);
}

TEST_CASE("composing two half steps equals one full step in law") {
  // Analytic identity of the per-mode variances ...
  for (double lam : {1.0, 2.0, 5.0, 13.0}) {
    for (double a : {0.5, 1.0, 2.0}) {
      for (double dt : {0.01, 0.2, 1.5}) {
        const double whole = ou_variance(lam, a, dt);
        const double half = ou_variance(lam, a, 0.5 * dt);
        const double composed = std::exp(-2.0 * lam * 0.5 * dt) * half + half;
        CHECK(std::abs(whole - composed) < 1e-13 * whole);
      }
    }
  }

  // ... and a two-sample KS test on the sampled endpoints.
  const TorusGrid grid(8);
  const AdditiveNoiseSpec spec(1.0);
  const double dt = 0.4;
  const int n_draws = 10000;
  struct Mode {
    int k1, k2;
  };
  const Mode modes[] = {{1, 0}, {1, 1}, {2, 1}};
  const SpectralField zero(grid);
  for (int m = 0; m < 3; ++m) {
    std::vector<double> one_step, two_steps;
    NormalSampler r1(RngStream{105, static_cast<uint64_t>(m), RngPurpose::field_noise});
    NormalSampler r2(RngStream{106, static_cast<uint64_t>(m), RngPurpose::field_noise});
    for (int d = 0; d < n_draws; ++d) {
      one_step.push_back(
          sample_stochastic_convolution_step(zero, dt, spec, r1).at(modes[m].k1, modes[m].k2).real());
      SpectralField z = sample_stochastic_convolution_step(zero, 0.5 * dt, spec, r2);
      z = sample_stochastic_convolution_step(z, 0.5 * dt, spec, r2);
      two_steps.push_back(z.at(modes[m].k1, modes[m].k2).real());
    }
    const double p = ts::ks_two_sample_pvalue(one_step, two_steps);
    CHECK(p > 0.01);
  }
}

TEST_CASE("sigma families: constant and linear closed forms") {
  const TorusGrid grid(16);
  RealField field(grid);
  for (size_t i = 0; i < field.size(); ++i) field[i] = 0.1 * static_cast<double>(i % 7) - 0.3;

  MultiplicativeNoiseSpec spec;
  NoiseChannel constant;
  constant.shape = SigmaShape::constant;
  constant.uniform_profile = true;
  NoiseChannel linear;
  linear.shape = SigmaShape::linear;
  linear.uniform_profile = true;
  spec.channels = {constant, linear};
  spec.K = 1.0;
  spec.L = 1.0;
  validate_hypothesis(spec, grid, 7, 5000);

  const std::vector<RealField> out = eval_sigma(spec, 0.0, field);
  REQUIRE(out.size() == 2);
  for (size_t i = 0; i < field.size(); ++i) {
    CHECK(out[0][i] == 1.0);
    CHECK(out[1][i] == field[i]);
  }
}

TEST_CASE("sin family is 1-Lipschitz over 1e5 random pairs") {
  NormalSampler rng(RngStream{107, 0, RngPurpose::probe});
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double r = (rng.uniform() - 0.5) * 50.0;
    const double s = (rng.uniform() - 0.5) * 50.0;
    if (r == s) continue;
    worst = std::max(worst, std::abs(std::sin(r) - std::sin(s)) / std::abs(r - s));
  }
  CHECK(worst <= 1.0 + 1e-12);
}

TEST_CASE("saturated family respects K = L = 1") {
  NormalSampler rng(RngStream{108, 0, RngPurpose::probe});
  for (int i = 0; i < 100000; ++i) {
    const double r = (rng.uniform() - 0.5) * 50.0;
    const double s = (rng.uniform() - 0.5) * 50.0;
    const double vr = sigma_shape_value(SigmaShape::saturated, r);
    const double vs = sigma_shape_value(SigmaShape::saturated, s);
    CHECK(std::abs(vr) <= 1.0 + std::abs(r));
    CHECK(std::abs(vr - vs) <= std::abs(r - s) + 1e-15);
  }
}

TEST_CASE("hypothesis validation rejects an undersized declared constant") {
  const TorusGrid grid(16);
  MultiplicativeNoiseSpec spec;
  NoiseChannel big;
  big.shape = SigmaShape::constant;
  ProfileMode m;
  m.k1 = 1;
  m.k2 = 0;
  m.amp = 10.0;  // sup |g| = 10/pi > 1
  big.modes = {m};
  spec.channels = {big};
  spec.K = 1.0;
  spec.L = 1.0;
  CHECK_THROWS_AS(validate_hypothesis(spec, grid, 7, 5000), InvariantError);
}

TEST_CASE("wiener increments: moments and bit reproducibility") {
  const int n_draws = 100000;
  const double dt = 0.05;
  NormalSampler rng(RngStream{109, 0, RngPurpose::wiener});
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const std::vector<double> w = wiener_increments(1, dt, rng);
    sum += w[0];
    sumsq += w[0] * w[0];
  }
  const double mean = sum / n_draws;
  const double var = sumsq / n_draws - mean * mean;
  CHECK(std::abs(mean) < 4.0 * std::sqrt(dt / n_draws));
  CHECK(std::abs(var - dt) / dt < 0.05);

  NormalSampler ra(RngStream{110, 3, RngPurpose::wiener});
  NormalSampler rb(RngStream{110, 3, RngPurpose::wiener});
  const std::vector<double> wa = wiener_increments(8, dt, ra);
  const std::vector<double> wb = wiener_increments(8, dt, rb);
  for (int i = 0; i < 8; ++i) CHECK(wa[static_cast<size_t>(i)] == wb[static_cast<size_t>(i)]);

  NormalSampler rc(RngStream{110, 4, RngPurpose::wiener});
  const std::vector<double> wc = wiener_increments(8, dt, rc);
  bool all_equal = true;
  for (int i = 0; i < 8; ++i)
    all_equal = all_equal && wa[static_cast<size_t>(i)] == wc[static_cast<size_t>(i)];
  CHECK(!all_equal);

  CHECK_THROWS_AS(wiener_increments(2, 0.0, ra), DomainError);
}

TEST_CASE("profile fields match their declared coefficients") {
  const TorusGrid grid(32);
  NoiseChannel ch;
  ProfileMode m;
  m.k1 = 1;
  m.k2 = 0;
  m.amp = 1.0;
  ch.modes = {m};
  const SpectralField g = ch.profile_spectral(grid);
  CHECK(std::abs(g.at(1, 0) - Complex{1.0, 0.0}) == 0.0);
  CHECK(std::abs(g.at(-1, 0) - Complex{1.0, 0.0}) == 0.0);
  // real samples agree with the inverse transform of the coefficients
  const RealField direct = ch.profile_real(grid);
  const RealField via = to_real(g);
  double worst = 0.0;
  for (size_t i = 0; i < direct.size(); ++i)
    worst = std::max(worst, std::abs(direct[i] - via[i]));
  CHECK(worst < 1e-13);

  NoiseChannel sine;
  ProfileMode s;
  s.k1 = 2;
  s.k2 = -1;
  s.amp = 0.7;
  s.sine = true;
  sine.modes = {s};
  const RealField sd = sine.profile_real(grid);
  const RealField sv = to_real(sine.profile_spectral(grid));
  worst = 0.0;
  for (size_t i = 0; i < sd.size(); ++i)
    worst = std::max(worst, std::abs(sd[i] - sv[i]));
  CHECK(worst < 1e-13);
}
