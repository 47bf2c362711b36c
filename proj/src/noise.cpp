#include "vort2d/noise.hpp"

#include <cmath>

#include "vort2d/errors.hpp"

namespace vort {
namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t mix_stream(const RngStream& s) {
  uint64_t h = splitmix64(s.seed);
  h = splitmix64(h ^ s.trajectory);
  h = splitmix64(h ^ static_cast<uint64_t>(s.purpose));
  return h;
}

}  // namespace

NormalSampler::NormalSampler(const RngStream& stream) : eng_(mix_stream(stream)) {}

double NormalSampler::uniform() {
  // 53-bit mantissa from the top bits; in [0, 1).
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double NormalSampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = kTwoPi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

AdditiveNoiseSpec::AdditiveNoiseSpec(double a_) : a(a_) {
  if (!(a > 0.0)) throw DomainError("additive noise requires a > 0");
}

SpectralField sample_stochastic_convolution_step(const SpectralField& zeta,
                                                 double dt,
                                                 const AdditiveNoiseSpec& spec,
                                                 NormalSampler& rng) {
  if (!(dt > 0.0)) throw DomainError("stochastic convolution step: dt <= 0");
  const int n = zeta.n();
  const TorusGrid& grid = zeta.grid();
  SpectralField out(grid);
  for (int a = 0; a < n; ++a) {
    const int k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const int k2 = grid.freq(b);
      if (!grid.resolvable(k1, k2)) continue;
      // Half-lattice: k1 > 0, or k1 == 0 and k2 > 0.
      if (!(k1 > 0 || (k1 == 0 && k2 > 0))) continue;
      const double lam = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      const double decay = std::exp(-lam * dt);
      const double var =
          std::pow(lam, -spec.a) * (1.0 - decay * decay) / (2.0 * lam);
      const double sd = std::sqrt(0.5 * var);
      const Complex w{sd * rng.normal(), sd * rng.normal()};
      const Complex next = decay * zeta.at(k1, k2) + w;
      out.at(k1, k2) = next;
      out.at(-k1, -k2) = std::conj(next);
    }
  }
  return out;
}

double sigma_shape_value(SigmaShape s, double r) {
  switch (s) {
    case SigmaShape::constant: return 1.0;
    case SigmaShape::linear: return r;
    case SigmaShape::sine: return std::sin(r);
    case SigmaShape::saturated: return r / (1.0 + std::abs(r));
  }
  return 0.0;
}

double sigma_shape_derivative(SigmaShape s, double r) {
  switch (s) {
    case SigmaShape::constant: return 0.0;
    case SigmaShape::linear: return 1.0;
    case SigmaShape::sine: return std::cos(r);
    case SigmaShape::saturated: {
      const double d = 1.0 + std::abs(r);
      return 1.0 / (d * d);
    }
  }
  return 0.0;
}

const char* sigma_shape_name(SigmaShape s) {
  switch (s) {
    case SigmaShape::constant: return "constant";
    case SigmaShape::linear: return "linear";
    case SigmaShape::sine: return "sin";
    case SigmaShape::saturated: return "saturated";
  }
  return "?";
}

SpectralField NoiseChannel::profile_spectral(const TorusGrid& grid) const {
  SpectralField g(grid);
  if (uniform_profile) {
    g[0] = Complex{kTwoPi, 0.0};  // the constant field 1
    return g;
  }
  for (const ProfileMode& m : modes) {
    if (!grid.resolvable(m.k1, m.k2))
      throw DomainError("noise profile mode outside resolvable set");
    if (m.k1 == 0 && m.k2 == 0) {
      g.at(0, 0) += Complex{kTwoPi * m.amp, 0.0};
      continue;
    }
    if (m.sine) {
      g.at(m.k1, m.k2) += Complex{0.0, -m.amp};
      g.at(-m.k1, -m.k2) += Complex{0.0, m.amp};
    } else {
      g.at(m.k1, m.k2) += Complex{m.amp, 0.0};
      g.at(-m.k1, -m.k2) += Complex{m.amp, 0.0};
    }
  }
  return g;
}

RealField NoiseChannel::profile_real(const TorusGrid& grid) const {
  const int n = grid.n;
  RealField f(grid);
  if (uniform_profile) {
    for (size_t i = 0; i < f.size(); ++i) f[i] = 1.0;
    return f;
  }
  const double h = grid.spacing();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x1 = i * h, x2 = j * h;
      double v = 0.0;
      for (const ProfileMode& m : modes) {
        const double phase = m.k1 * x1 + m.k2 * x2;
        const double inv_pi = (m.k1 == 0 && m.k2 == 0) ? 1.0 : 1.0 / 3.14159265358979323846;
        v += m.amp * inv_pi * (m.sine ? std::sin(phase) : std::cos(phase));
      }
      f.at(i, j) = v;
    }
  }
  return f;
}

double NoiseChannel::profile_sup(const TorusGrid& grid) const {
  const RealField f = profile_real(grid);
  double m = 0.0;
  for (size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

void validate_hypothesis(const MultiplicativeNoiseSpec& spec,
                         const TorusGrid& grid, uint64_t seed, int trials) {
  NormalSampler rng(RngStream{seed, 0, RngPurpose::probe});
  const double tol = 1e-9;
  for (const NoiseChannel& ch : spec.channels) {
    const RealField g = ch.profile_real(grid);
    for (int t = 0; t < trials; ++t) {
      const size_t i = static_cast<size_t>(rng.raw() % g.size());
      const double gx = g[i];
      const double r = (rng.uniform() - 0.5) * 40.0;
      const double s = (rng.uniform() - 0.5) * 40.0;
      const double vr = gx * sigma_shape_value(ch.shape, r);
      const double vs = gx * sigma_shape_value(ch.shape, s);
      if (std::abs(vr) > spec.K * (1.0 + std::abs(r)) + tol)
        throw InvariantError("sigma growth bound violated for shape " +
                             std::string(sigma_shape_name(ch.shape)));
      if (std::abs(vr - vs) > spec.L * std::abs(r - s) + tol)
        throw InvariantError("sigma Lipschitz bound violated for shape " +
                             std::string(sigma_shape_name(ch.shape)));
    }
  }
}

std::vector<RealField> eval_sigma(const MultiplicativeNoiseSpec& spec, double t,
                                  const RealField& field) {
  (void)t;  // built-in families are time-homogeneous
  std::vector<RealField> out;
  out.reserve(spec.channels.size());
  for (const NoiseChannel& ch : spec.channels) {
    RealField g = ch.profile_real(field.grid());
    for (size_t i = 0; i < g.size(); ++i)
      g[i] = g[i] * sigma_shape_value(ch.shape, field[i]);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<double> wiener_increments(int n, double dt, NormalSampler& rng) {
  if (!(dt > 0.0)) throw DomainError("wiener_increments: dt <= 0");
  std::vector<double> w(static_cast<size_t>(n));
  const double sd = std::sqrt(dt);
  for (auto& v : w) v = sd * rng.normal();
  return w;
}

}  // namespace vort
