#include "vort2d/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <string>
#include <unordered_map>

#include "vort2d/errors.hpp"

namespace vort {
namespace {

// The FFTW planner is not thread-safe; execution of a created plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* buf = nullptr;
  int n = 0;

  explicit PlanPair(int n_) : n(n_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    buf = fftw_alloc_complex(static_cast<size_t>(n) * n);
    fwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~PlanPair() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (buf) fftw_free(buf);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
};

// One workspace per (thread, grid size); plans are reused across calls.
PlanPair& plans_for(int n) {
  thread_local std::unordered_map<int, PlanPair*> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    // Leaked deliberately at thread exit: destroying plans during static
    // teardown races the FFTW allocator on some platforms.
    it = cache.emplace(n, new PlanPair(n)).first;
  }
  return *it->second;
}

}  // namespace

SpectralField to_spectral(const RealField& f) {
  const int n = f.n();
  const size_t sz = f.size();
  for (size_t i = 0; i < sz; ++i) {
    if (!std::isfinite(f[i]))
      throw DomainError("to_spectral: non-finite sample at flat index " +
                        std::to_string(i));
  }
  PlanPair& p = plans_for(n);
  for (size_t i = 0; i < sz; ++i) {
    p.buf[i][0] = f[i];
    p.buf[i][1] = 0.0;
  }
  fftw_execute(p.fwd);
  SpectralField g(f.grid());
  const double scale = kTwoPi / (static_cast<double>(n) * n);
  for (size_t i = 0; i < sz; ++i)
    g[i] = Complex{p.buf[i][0] * scale, p.buf[i][1] * scale};
  g.enforce_reality();
  return g;
}

RealField to_real(const SpectralField& g) {
  const int n = g.n();
  const size_t sz = g.size();
  PlanPair& p = plans_for(n);
  for (size_t i = 0; i < sz; ++i) {
    p.buf[i][0] = g[i].real();
    p.buf[i][1] = g[i].imag();
  }
  fftw_execute(p.bwd);
  RealField f(g.grid());
  const double scale = 1.0 / kTwoPi;
  for (size_t i = 0; i < sz; ++i) f[i] = p.buf[i][0] * scale;
  return f;
}

}  // namespace vort
