#include "vort2d/heat_kernel.hpp"

#include <cmath>
#include <string>

#include "vort2d/errors.hpp"
#include "vort2d/parallel.hpp"
#include "vort2d/transforms.hpp"

namespace vort {
namespace {

constexpr double kFourPiSq = 4.0 * 3.14159265358979323846 * 3.14159265358979323846;
// exp(-44) ~ 8e-20: truncation below double precision of O(1) sums.
constexpr double kLogPrecision = 44.0;

int auto_fourier_radius(double t) {
  return static_cast<int>(std::ceil(std::sqrt(kLogPrecision / t))) + 1;
}

// Displacements are wrapped into [-pi, pi) first, so the farthest point
// of the fundamental cell sits at pi*sqrt(2).
int auto_image_shells(double t) {
  const double reach = std::sqrt(4.0 * t * kLogPrecision) + kTwoPi / std::sqrt(2.0);
  return std::max(1, static_cast<int>(std::ceil(reach / kTwoPi)));
}

double wrap_pi(double x) {
  const double pi = 0.5 * kTwoPi;
  x = std::fmod(x + pi, kTwoPi);
  if (x < 0.0) x += kTwoPi;
  return x - pi;
}

KernelRep resolve_rep(double t, KernelRep rep) {
  if (rep != KernelRep::automatic) return rep;
  // Each sum converges geometrically in its own regime.
  return t < 0.1 ? KernelRep::images : KernelRep::fourier;
}

}  // namespace

double kernel_value(double t, double dx1, double dx2, KernelRep rep,
                    int truncation) {
  if (!(t > 0.0)) throw DomainError("kernel_value: t must be positive");
  rep = resolve_rep(t, rep);
  if (rep == KernelRep::fourier) {
    const int r = truncation > 0 ? truncation : auto_fourier_radius(t);
    double acc = 0.0;
    for (int k1 = -r; k1 <= r; ++k1) {
      for (int k2 = -r; k2 <= r; ++k2) {
        const double lam = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
        acc += std::exp(-t * lam) * std::cos(k1 * dx1 + k2 * dx2);
      }
    }
    return acc / kFourPiSq;
  }
  const int m = truncation > 0 ? truncation : auto_image_shells(t);
  const double w1 = wrap_pi(dx1), w2 = wrap_pi(dx2);
  const double inv4t = 1.0 / (4.0 * t);
  double acc = 0.0;
  for (int k1 = -m; k1 <= m; ++k1) {
    const double z1 = w1 + kTwoPi * k1;
    for (int k2 = -m; k2 <= m; ++k2) {
      const double z2 = w2 + kTwoPi * k2;
      acc += std::exp(-(z1 * z1 + z2 * z2) * inv4t);
    }
  }
  return acc * inv4t / 3.14159265358979323846;  // 1/(4 pi t)
}

void kernel_gradient(double t, double dx1, double dx2, KernelRep rep,
                     int truncation, double* g1, double* g2) {
  if (!(t > 0.0)) throw DomainError("kernel_gradient: t must be positive");
  rep = resolve_rep(t, rep);
  double a1 = 0.0, a2 = 0.0;
  if (rep == KernelRep::fourier) {
    const int r = truncation > 0 ? truncation : auto_fourier_radius(t);
    for (int k1 = -r; k1 <= r; ++k1) {
      for (int k2 = -r; k2 <= r; ++k2) {
        const double lam = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
        const double w = -std::exp(-t * lam) * std::sin(k1 * dx1 + k2 * dx2);
        a1 += k1 * w;
        a2 += k2 * w;
      }
    }
    *g1 = a1 / kFourPiSq;
    *g2 = a2 / kFourPiSq;
    return;
  }
  const int m = truncation > 0 ? truncation : auto_image_shells(t);
  const double w1 = wrap_pi(dx1), w2 = wrap_pi(dx2);
  const double inv4t = 1.0 / (4.0 * t);
  for (int k1 = -m; k1 <= m; ++k1) {
    const double z1 = w1 + kTwoPi * k1;
    for (int k2 = -m; k2 <= m; ++k2) {
      const double z2 = w2 + kTwoPi * k2;
      const double w = std::exp(-(z1 * z1 + z2 * z2) * inv4t);
      a1 += -z1 * 2.0 * inv4t * w;
      a2 += -z2 * 2.0 * inv4t * w;
    }
  }
  const double scale = inv4t / 3.14159265358979323846;
  *g1 = a1 * scale;
  *g2 = a2 * scale;
}

SpectralField semigroup_apply(double t, const SpectralField& g) {
  if (t < 0.0) throw DomainError("semigroup_apply: t must be nonnegative");
  const int n = g.n();
  const TorusGrid& grid = g.grid();
  SpectralField out(grid);
  for (int a = 0; a < n; ++a) {
    const double k1 = grid.freq(a);
    for (int b = 0; b < n; ++b) {
      const double k2 = grid.freq(b);
      const size_t i = static_cast<size_t>(a * n + b);
      out[i] = std::exp(-t * (k1 * k1 + k2 * k2)) * g[i];
    }
  }
  return out;
}

VelocitySpectral semigroup_apply(double t, const VelocitySpectral& v) {
  VelocitySpectral out(v.grid());
  out.c1 = semigroup_apply(t, v.c1);
  out.c2 = semigroup_apply(t, v.c2);
  return out;
}

void lemma_integrals(double s, const std::vector<double>& betas_grad,
                     const std::vector<double>& betas_ker,
                     const FitSettings& settings, std::vector<double>* out_grad,
                     std::vector<double>* out_ker) {
  if (!(s > 0.0)) throw DomainError("lemma_integrals: s must be positive");
  // Resolution contract: sqrt(s) spans >= cells_per_width cells.
  const double n_needed = settings.cells_per_width * kTwoPi / std::sqrt(s);
  int n = 4;
  while (n < n_needed) n *= 2;
  if (n > settings.max_grid)
    throw QuadratureError(
        "lemma_integrals: s = " + std::to_string(s) + " needs a " +
            std::to_string(n) + "^2 midpoint grid (max " +
            std::to_string(settings.max_grid) + ")",
        n);

  const int shells = auto_image_shells(s);
  const double h = kTwoPi / n;
  const double inv4s = 1.0 / (4.0 * s);
  const double scale = inv4s / 3.14159265358979323846;

  const size_t ng = betas_grad.size(), nk = betas_ker.size();
  std::vector<std::vector<double>> row_grad(static_cast<size_t>(n),
                                            std::vector<double>(ng, 0.0));
  std::vector<std::vector<double>> row_ker(static_cast<size_t>(n),
                                           std::vector<double>(nk, 0.0));

  parallel_for(n, settings.threads, [&](int i) {
    const double y1 = wrap_pi((i + 0.5) * h);
    auto& rg = row_grad[static_cast<size_t>(i)];
    auto& rk = row_ker[static_cast<size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const double y2 = wrap_pi((j + 0.5) * h);
      double val = 0.0, g1 = 0.0, g2 = 0.0;
      for (int m1 = -shells; m1 <= shells; ++m1) {
        const double z1 = y1 + kTwoPi * m1;
        for (int m2 = -shells; m2 <= shells; ++m2) {
          const double z2 = y2 + kTwoPi * m2;
          const double w = std::exp(-(z1 * z1 + z2 * z2) * inv4s);
          val += w;
          g1 += -z1 * 2.0 * inv4s * w;
          g2 += -z2 * 2.0 * inv4s * w;
        }
      }
      val *= scale;
      const double gmag = std::hypot(g1 * scale, g2 * scale);
      for (size_t b = 0; b < ng; ++b) rg[b] += std::pow(gmag, betas_grad[b]);
      for (size_t b = 0; b < nk; ++b) rk[b] += std::pow(val, betas_ker[b]);
    }
  });

  out_grad->assign(ng, 0.0);
  out_ker->assign(nk, 0.0);
  const double cell = h * h;
  for (int i = 0; i < n; ++i) {
    for (size_t b = 0; b < ng; ++b)
      (*out_grad)[b] += row_grad[static_cast<size_t>(i)][b] * cell;
    for (size_t b = 0; b < nk; ++b)
      (*out_ker)[b] += row_ker[static_cast<size_t>(i)][b] * cell;
  }
}

void ols_fit(const std::vector<double>& x, const std::vector<double>& y,
             double* slope, double* intercept, double* r_squared) {
  const size_t m = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  *slope = sxy / sxx;
  *intercept = my - *slope * mx;
  if (syy < 1e-16) {
    // A constant series is fit perfectly by its own mean.
    *r_squared = 1.0;
    return;
  }
  double ssres = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double r = y[i] - (*intercept + *slope * x[i]);
    ssres += r * r;
  }
  *r_squared = 1.0 - ssres / syy;
}

namespace {

ExponentFit fit_common(double beta, bool gradient, const FitSettings& settings) {
  if (settings.num_samples < 2)
    throw DomainError("exponent fit: need at least two sample times");
  ExponentFit fit;
  fit.beta = beta;
  const int m = settings.num_samples;
  const double la = std::log(settings.s_min), lb = std::log(settings.s_max);
  std::vector<double> logs(static_cast<size_t>(m)), logi(static_cast<size_t>(m));
  const std::vector<double> want{beta};
  const std::vector<double> none;
  for (int i = 0; i < m; ++i) {
    const double s = std::exp(la + (lb - la) * i / (m - 1));
    std::vector<double> ig, ik;
    lemma_integrals(s, gradient ? want : none, gradient ? none : want, settings,
                    &ig, &ik);
    const double val = gradient ? ig[0] : ik[0];
    fit.sample_times.push_back(s);
    fit.integral_values.push_back(val);
    logs[static_cast<size_t>(i)] = std::log(s);
    logi[static_cast<size_t>(i)] = std::log(val);
  }
  double intercept = 0.0;
  ols_fit(logs, logi, &fit.fitted_slope, &intercept, &fit.r_squared);
  return fit;
}

}  // namespace

ExponentFit fit_gradient_estimate(double beta, const FitSettings& settings) {
  if (!(beta > 0.0) || !(beta < 4.0 / 3.0))
    throw DomainError("fit_gradient_estimate: beta must lie in (0, 4/3)");
  return fit_common(beta, true, settings);
}

ExponentFit fit_kernel_estimate(double beta, const FitSettings& settings) {
  if (!(beta > 0.0) || !(beta < 2.0))
    throw DomainError("fit_kernel_estimate: beta must lie in (0, 2)");
  return fit_common(beta, false, settings);
}

RealField apply_J(const std::vector<VelocitySpectral>& phi, double dt, double t) {
  if (!(dt > 0.0)) throw DomainError("apply_J: dt must be positive");
  const int m = static_cast<int>(std::lround(t / dt));
  if (std::abs(m * dt - t) > 1e-9 * std::max(1.0, t))
    throw DomainError("apply_J: t must be a multiple of dt");
  if (static_cast<int>(phi.size()) < m + 1)
    throw DomainError("apply_J: phi series too short for requested t");
  const TorusGrid& grid = phi[0].grid();
  const int n = grid.n;
  SpectralField acc(grid);
  const Complex iu{0.0, 1.0};
  for (int l = 0; l < m; ++l) {
    const double smid = (l + 0.5) * dt;
    const double tau = t - smid;
    const VelocitySpectral& a = phi[static_cast<size_t>(l)];
    const VelocitySpectral& b = phi[static_cast<size_t>(l + 1)];
    for (int i = 0; i < n; ++i) {
      const double k1 = grid.freq(i);
      for (int j = 0; j < n; ++j) {
        const double k2 = grid.freq(j);
        const size_t f = static_cast<size_t>(i * n + j);
        const Complex pmid1 = 0.5 * (a.c1[f] + b.c1[f]);
        const Complex pmid2 = 0.5 * (a.c2[f] + b.c2[f]);
        const double w = std::exp(-tau * (k1 * k1 + k2 * k2)) * dt;
        // grad_y G contraction: multiplier -i k . phi_hat
        acc[f] += w * (-iu) * (k1 * pmid1 + k2 * pmid2);
      }
    }
  }
  return to_real(acc);
}

}  // namespace vort
