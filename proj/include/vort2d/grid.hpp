#pragma once

#include <cmath>
#include <cstdlib>

#include "vort2d/errors.hpp"

namespace vort {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Collocation grid on the 2pi-periodic torus.
//
// Conventions used throughout:
//   * basis      e_k(x) = exp(i k.x) / (2pi),  k in Z^2
//   * a real field f(x) = sum_k g_k e_k(x) with conj(g_k) = g_{-k}
//   * storage    g at flat index a*n + b maps to k = (freq(a), freq(b))
//     with freq(a) = a for a <= n/2-1 and a - n otherwise
//   * Parseval   sum_j |f(x_j)|^2 (2pi/n)^2 = sum_k |g_k|^2 exactly
//
// The Nyquist rows (|k_i| = n/2) cannot carry a conjugate pair and are
// kept identically zero; the resolvable mode set is |k_i| <= n/2 - 1.
struct TorusGrid {
  int n;                    // modes (= collocation points) per axis
  double dealias_fraction;  // products keep |k_i| <= dealias_fraction*(n/2)

  explicit TorusGrid(int n_, double dealias = 2.0 / 3.0)
      : n(n_), dealias_fraction(dealias) {
    if (n < 4 || (n & (n - 1)) != 0)
      throw DomainError("grid size must be a power of two >= 4");
    if (!(dealias > 0.0) || dealias > 1.0)
      throw DomainError("dealias fraction must lie in (0, 1]");
  }

  int size() const { return n * n; }
  double spacing() const { return kTwoPi / n; }
  double cell_area() const { return spacing() * spacing(); }

  int freq(int a) const { return a <= n / 2 - 1 ? a : a - n; }
  int index_along(int k) const { return k >= 0 ? k : k + n; }
  int flat(int k1, int k2) const {
    return index_along(k1) * n + index_along(k2);
  }

  bool resolvable(int k1, int k2) const {
    return std::abs(k1) <= n / 2 - 1 && std::abs(k2) <= n / 2 - 1;
  }
  bool dealias_keep(int k1, int k2) const {
    const double c = dealias_fraction * (n / 2);
    return std::abs(k1) <= c && std::abs(k2) <= c;
  }

  bool operator==(const TorusGrid& o) const {
    return n == o.n && dealias_fraction == o.dealias_fraction;
  }
};

}  // namespace vort
