#pragma once

#include <vector>

#include "vort2d/fields.hpp"

namespace vort {

// G(t,x,y) depends on x-y only; both closed forms are truncations of
// rapidly converging sums:
//   fourier: (1/4pi^2) sum_k exp(-t|k|^2) cos(k.(x-y))
//   images:  (1/4pi t) sum_k exp(-|x-y+2pi k|^2 / 4t)
enum class KernelRep { fourier, images, automatic };

// Heat kernel at displacement dx = x - y. truncation = mode radius
// (fourier) or image shells per axis side (images); 0 picks a radius
// that exhausts double precision.
double kernel_value(double t, double dx1, double dx2,
                    KernelRep rep = KernelRep::automatic, int truncation = 0);

// d/d(dx) of the kernel; used by the exponent fits and brute-force
// quadrature oracles.
void kernel_gradient(double t, double dx1, double dx2, KernelRep rep,
                     int truncation, double* g1, double* g2);

// Coefficient at k scaled by exp(-t |k|^2); t = 0 is the identity.
SpectralField semigroup_apply(double t, const SpectralField& g);
VelocitySpectral semigroup_apply(double t, const VelocitySpectral& v);

struct ExponentFit {
  double beta = 0.0;
  double fitted_slope = 0.0;
  double r_squared = 0.0;
  std::vector<double> sample_times;
  std::vector<double> integral_values;
};

struct FitSettings {
  double s_min = 1e-3;
  double s_max = 1e-1;
  int num_samples = 16;       // >= 12
  int cells_per_width = 8;    // quadrature cells across sqrt(s)
  int max_grid = 4096;        // refuse beyond this resolution
  int threads = 0;            // 0 = hardware concurrency
};

// Midpoint-rule values of I_grad(s) = int |grad_y G(s,x,y)|^beta dy and
// I_ker(s) = int |G(s,x,y)|^beta dy for several beta at once (the kernel
// evaluations dominate and are shared). Throws QuadratureError if the
// resolution contract cannot be met within max_grid.
void lemma_integrals(double s, const std::vector<double>& betas_grad,
                     const std::vector<double>& betas_ker,
                     const FitSettings& settings, std::vector<double>* out_grad,
                     std::vector<double>* out_ker);

// Log-log OLS fit of I_grad(s) over s in [s_min, s_max]; the slope
// estimates the small-s scaling exponent (1 - 3 beta/2 analytically,
// beta in (0, 4/3)).
ExponentFit fit_gradient_estimate(double beta, const FitSettings& settings = {});

// Same for I_ker(s); analytic exponent 1 - beta, beta in (0, 2).
ExponentFit fit_kernel_estimate(double beta, const FitSettings& settings = {});

// (J phi)(t,x) = int_0^t int grad_y G(t-s,x,y) . phi(s,y) dy ds with phi
// sampled at solver steps l*dt; midpoint rule in s (adjacent samples
// averaged). phi must hold at least round(t/dt)+1 samples.
RealField apply_J(const std::vector<VelocitySpectral>& phi, double dt, double t);

// Ordinary least squares of y against x; r_squared is defined as 1 for a
// numerically constant y (SStot below 1e-16).
void ols_fit(const std::vector<double>& x, const std::vector<double>& y,
             double* slope, double* intercept, double* r_squared);

}  // namespace vort
