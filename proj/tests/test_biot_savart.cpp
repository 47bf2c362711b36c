#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"
#include "vort2d/biot_savart.hpp"
#include "vort2d/errors.hpp"
#include "vort2d/fieldgen.hpp"
#include "vort2d/operators.hpp"
#include "vort2d/transforms.hpp"

using namespace vort;
namespace ts = testsupport;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("velocity of cos(x1) is (0, sin(x1))") {
  const TorusGrid grid(32);
  const SpectralField xi = to_spectral(
      ts::sample(grid, [](double x, double) { return std::cos(x); }));
  const VelocitySpectral u = velocity_from_vorticity(xi);
  const RealField u1 = to_real(u.c1);
  const RealField u2 = to_real(u.c2);
  double worst = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      worst = std::max(worst, std::abs(u1.at(i, j)));
      worst = std::max(worst,
                       std::abs(u2.at(i, j) - std::sin(i * grid.spacing())));
    }
  }
  CHECK(worst < 1e-13);
  // curl(u) recovers the vorticity spectrally
  CHECK((curl(u) - xi).l2_norm() < 1e-14);
}

TEST_CASE("zero vorticity gives zero velocity") {
  const TorusGrid grid(16);
  const VelocitySpectral u = velocity_from_vorticity(SpectralField(grid));
  CHECK(u.c1.l2_norm() == 0.0);
  CHECK(u.c2.l2_norm() == 0.0);
}

TEST_CASE("nonzero mean input is rejected") {
  const TorusGrid grid(16);
  SpectralField xi(grid);
  xi.at(0, 0) = Complex{1.0, 0.0};
  CHECK_THROWS_AS(velocity_from_vorticity(xi), DomainError);
}

TEST_CASE("per-mode norm equivalence: sum |k|^2 |u_k|^2 = sum |xi_k|^2") {
  const TorusGrid grid(64);
  for (int trial = 0; trial < 10; ++trial) {
    NormalSampler rng(RngStream{31, static_cast<uint64_t>(trial), RngPurpose::probe});
    const SpectralField xi = random_smooth_field(grid, 1.0, 1.0, rng, false);
    const VelocitySpectral u = velocity_from_vorticity(xi);
    double lhs = 0.0;
    for (int a = 0; a < grid.n; ++a) {
      const double k1 = grid.freq(a);
      for (int b = 0; b < grid.n; ++b) {
        const double k2 = grid.freq(b);
        const size_t i = static_cast<size_t>(a * grid.n + b);
        lhs += (k1 * k1 + k2 * k2) * (std::norm(u.c1[i]) + std::norm(u.c2[i]));
      }
    }
    const double rhs = xi.l2_norm() * xi.l2_norm();
    CHECK(std::abs(lhs - rhs) < 1e-13 * std::max(1.0, rhs));
  }
}

TEST_CASE("incompressibility: k . u_k vanishes to the last ulp") {
  // The cancellation k . k_perp = 0 is exact in the multipliers; the two
  // evaluation orders of the dot product round independently, leaving
  // O(eps) residue well below the 1e-13 contract.
  const TorusGrid grid(64);
  for (int trial = 0; trial < 100; ++trial) {
    NormalSampler rng(RngStream{32, static_cast<uint64_t>(trial), RngPurpose::probe});
    const SpectralField xi = random_smooth_field(grid, 1.2, 1.0, rng, false);
    const VelocitySpectral u = velocity_from_vorticity(xi);
    double worst = 0.0;
    for (int a = 0; a < grid.n; ++a) {
      const double k1 = grid.freq(a);
      for (int b = 0; b < grid.n; ++b) {
        const double k2 = grid.freq(b);
        const size_t i = static_cast<size_t>(a * grid.n + b);
        worst = std::max(worst, std::abs(k1 * u.c1[i] + k2 * u.c2[i]));
      }
    }
    CHECK(worst < 1e-15);
  }
}

TEST_CASE("curl after reconstruction is the identity on zero-mean fields") {
  const TorusGrid grid(64);
  for (int trial = 0; trial < 100; ++trial) {
    NormalSampler rng(RngStream{33, static_cast<uint64_t>(trial), RngPurpose::probe});
    const SpectralField xi = random_smooth_field(grid, 1.0, 1.0, rng, false);
    const SpectralField back = curl(velocity_from_vorticity(xi));
    CHECK((back - xi).l2_norm() < 1e-13);
  }
}

TEST_CASE("energy-enstrophy inequality ||u||_2 <= ||xi||_2") {
  const TorusGrid grid(32);
  for (int trial = 0; trial < 20; ++trial) {
    NormalSampler rng(RngStream{34, static_cast<uint64_t>(trial), RngPurpose::probe});
    const SpectralField xi = random_smooth_field(grid, 0.8, 1.3, rng, false);
    const VelocitySpectral u = velocity_from_vorticity(xi);
    const double uu = std::sqrt(u.c1.l2_norm() * u.c1.l2_norm() +
                                u.c2.l2_norm() * u.c2.l2_norm());
    CHECK(uu <= xi.l2_norm() * (1.0 + 1e-14));
  }
}

TEST_CASE("q(cos(x1)) equals (0, sin(2 x1)/2)") {
  const TorusGrid grid(32);
  const SpectralField xi = to_spectral(
      ts::sample(grid, [](double x, double) { return std::cos(x); }));
  const VelocitySpectral q = nonlinearity_q(xi);
  const RealField q1 = to_real(q.c1);
  const RealField q2 = to_real(q.c2);
  // oracle: the pointwise product cos(x1) sin(x1) sampled directly
  double worst = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double x = i * grid.spacing();
    for (int j = 0; j < grid.n; ++j) {
      worst = std::max(worst, std::abs(q1.at(i, j)));
      worst = std::max(worst, std::abs(q2.at(i, j) - std::cos(x) * std::sin(x)));
      worst = std::max(worst, std::abs(q2.at(i, j) - 0.5 * std::sin(2 * x)));
    }
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("q of the zero field is zero") {
  const TorusGrid grid(16);
  const VelocitySpectral q = nonlinearity_q(SpectralField(grid));
  CHECK(q.c1.l2_norm() == 0.0);
  CHECK(q.c2.l2_norm() == 0.0);
}

TEST_CASE("transport orthogonality after dealiasing") {
  const TorusGrid grid(64);
  for (int trial = 0; trial < 100; ++trial) {
    NormalSampler rng(RngStream{35, static_cast<uint64_t>(trial), RngPurpose::probe});
    // in-shell fields: the dealiased product conserves the L2 pairing
    const SpectralField xi = random_smooth_field(grid, 1.0, 1.0, rng, true);
    const SpectralField dq = divergence(nonlinearity_q(xi));
    double ip = 0.0;
    for (size_t i = 0; i < dq.size(); ++i)
      ip += dq[i].real() * xi[i].real() + dq[i].imag() * xi[i].imag();
    CHECK(std::abs(ip) < 1e-12);
  }
}

TEST_CASE("velocity sup-norm bound: cos(x1) closed form at p = 4") {
  const TorusGrid grid(32);
  const RealField c = ts::sample(grid, [](double x, double) { return std::cos(x); });
  const SpectralField xi = to_spectral(c);
  const LinfBound b = linf_bound_check(xi, 4.0);
  CHECK(b.lhs == doctest::Approx(1.0).epsilon(1e-13));
  // ||cos||_{L4}^4 = int cos^4 = (3/8)(2 pi)(2 pi) = 3 pi^2 / 2
  const double l4 = std::pow(1.5 * kPi * kPi, 0.25);
  CHECK(lp_norm(c, 4.0) == doctest::Approx(l4).epsilon(1e-13));
  CHECK(b.ratio == doctest::Approx(1.0 / l4).epsilon(1e-12));
}

TEST_CASE("velocity sup-norm bound: zero convention and ensemble boundedness") {
  const TorusGrid grid(32);
  const LinfBound z = linf_bound_check(SpectralField(grid), 4.0);
  CHECK(z.lhs == 0.0);
  CHECK(z.ratio == 0.0);

  std::vector<double> ratios;
  for (int trial = 0; trial < 500; ++trial) {
    NormalSampler rng(RngStream{36, static_cast<uint64_t>(trial), RngPurpose::probe});
    const SpectralField xi = random_smooth_field(
        grid, 0.5 + 1.5 * rng.uniform(), 0.2 + rng.uniform(), rng);
    ratios.push_back(linf_bound_check(xi, 4.0).ratio);
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios[ratios.size() / 2];
  MESSAGE("ensemble sup/L4 ratio: median ", median, " max ", ratios.back());
  CHECK(ratios.back() < 10.0 * median);
}
