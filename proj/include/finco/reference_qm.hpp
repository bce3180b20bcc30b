#pragma once

// Exact grid propagation by Strang splitting, exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2),
// with the kinetic factor applied in momentum space.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "finco/dynamics.hpp"
#include "finco/finco.hpp"

namespace finco {

struct GridSpec {
  double x_min = -12.0;
  double x_max = 50.0;
  std::size_t n = 4096;
  double dt = 0.005;

  void validate() const {
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("GridSpec: n must be a power of two");
    if (!(x_max > x_min)) throw std::invalid_argument("GridSpec: x_max must exceed x_min");
    if (!(dt > 0.0)) throw std::invalid_argument("GridSpec: dt must be > 0");
  }
  double dx() const { return (x_max - x_min) / static_cast<double>(n); }
  std::vector<double> positions() const { return linspace_grid(x_min, x_max, n); }
};

struct ReferenceRun {
  std::vector<WavefunctionGrid> snapshots;
  double max_edge_amplitude = 0.0;
  bool leaked() const { return max_edge_amplitude > 1e-6; }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Owns an in-place forward/backward plan pair on a single buffer.
class FftPair {
 public:
  explicit FftPair(std::size_t n) : n_(n) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (buf_ == nullptr) throw std::bad_alloc();
    std::lock_guard lock(fftw_planner_mutex());
    const int ni = static_cast<int>(n);
    fwd_ = fftw_plan_dft_1d(ni, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(ni, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;
  ~FftPair() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  cplx* data() { return reinterpret_cast<cplx*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

inline std::vector<double> wavenumbers(const GridSpec& spec) {
  std::vector<double> k(spec.n);
  const double dk = 2.0 * std::numbers::pi / (spec.x_max - spec.x_min);
  const auto n = static_cast<std::ptrdiff_t>(spec.n);
  for (std::ptrdiff_t j = 0; j < n; ++j) k[static_cast<std::size_t>(j)] = dk * static_cast<double>(j < n / 2 ? j : j - n);
  return k;
}

}  // namespace detail

/// Real-time split-operator propagator on a periodic grid.
class SplitOperator {
 public:
  SplitOperator(const PotentialModel& model, const GridSpec& spec) : spec_(spec), fft_(spec.n) {
    spec_.validate();
    x_ = spec_.positions();
    v_.resize(spec_.n);
    for (std::size_t i = 0; i < spec_.n; ++i) v_[i] = model.value(x_[i]).real();
    k_ = detail::wavenumbers(spec_);
  }

  const std::vector<double>& x() const { return x_; }
  const GridSpec& spec() const { return spec_; }

  /// n steps of size dt (real time, or imaginary time when `imaginary`).
  void step(std::vector<cplx>& psi, double dt, std::size_t n, bool imaginary = false) {
    if (n == 0) return;
    if (cached_dt_ != dt || cached_imag_ != imaginary) build_factors(dt, imaginary);
    cplx* buf = fft_.data();
    const double inv_n = 1.0 / static_cast<double>(spec_.n);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t i = 0; i < spec_.n; ++i) buf[i] = psi[i] * half_v_[i];
      fft_.forward();
      for (std::size_t i = 0; i < spec_.n; ++i) buf[i] *= full_t_[i] * inv_n;
      fft_.backward();
      for (std::size_t i = 0; i < spec_.n; ++i) psi[i] = buf[i] * half_v_[i];
    }
  }

  double norm(const std::vector<cplx>& psi) const {
    double s = 0.0;
    for (const auto& v : psi) s += std::norm(v);
    return s * spec_.dx();
  }

  /// <psi|H|psi> / <psi|psi> with the kinetic part evaluated spectrally.
  double energy(const std::vector<cplx>& psi) {
    cplx* buf = fft_.data();
    std::copy(psi.begin(), psi.end(), buf);
    fft_.forward();
    double kin = 0.0, sk = 0.0;
    for (std::size_t i = 0; i < spec_.n; ++i) {
      kin += 0.5 * k_[i] * k_[i] * std::norm(buf[i]);
      sk += std::norm(buf[i]);
    }
    double pot = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < spec_.n; ++i) {
      pot += v_[i] * std::norm(psi[i]);
      sx += std::norm(psi[i]);
    }
    return kin / sk + pot / sx;
  }

 private:
  void build_factors(double dt, bool imaginary) {
    half_v_.resize(spec_.n);
    full_t_.resize(spec_.n);
    for (std::size_t i = 0; i < spec_.n; ++i) {
      const double t = 0.5 * k_[i] * k_[i];
      if (imaginary) {
        half_v_[i] = std::exp(-0.5 * v_[i] * dt);
        full_t_[i] = std::exp(-t * dt);
      } else {
        half_v_[i] = std::polar(1.0, -0.5 * v_[i] * dt);
        full_t_[i] = std::polar(1.0, -t * dt);
      }
    }
    cached_dt_ = dt;
    cached_imag_ = imaginary;
  }

  GridSpec spec_;
  detail::FftPair fft_;
  std::vector<double> x_, v_, k_;
  std::vector<cplx> half_v_, full_t_;
  double cached_dt_ = -1.0;
  bool cached_imag_ = false;
};

/// Wavefunctions at each requested checkpoint time (sorted, all <= t_final).
inline ReferenceRun propagate_exact(const InitialGaussian& g, const PotentialModel& model, const GridSpec& spec,
                                    double t_final, std::vector<double> checkpoints) {
  g.validate();
  if (checkpoints.empty()) checkpoints.push_back(t_final);
  std::sort(checkpoints.begin(), checkpoints.end());
  if (checkpoints.front() < 0.0 || checkpoints.back() > t_final + 1e-12)
    throw std::invalid_argument("propagate_exact: checkpoints must lie in [0, t_final]");

  SplitOperator prop(model, spec);
  const auto& x = prop.x();
  std::vector<cplx> psi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) psi[i] = g.amplitude(x[i]);
  if (std::abs(psi.front()) > 1e-12 || std::abs(psi.back()) > 1e-12)
    throw std::invalid_argument("propagate_exact: initial Gaussian is not contained in the grid");

  ReferenceRun run;
  auto edge = [&] {
    const std::size_t m = std::min<std::size_t>(8, psi.size() / 2);
    for (std::size_t i = 0; i < m; ++i)
      run.max_edge_amplitude = std::max({run.max_edge_amplitude, std::abs(psi[i]), std::abs(psi[psi.size() - 1 - i])});
  };
  edge();
  double t = 0.0;
  for (double tc : checkpoints) {
    const double span = tc - t;
    if (span > 0.0) {
      const auto n = static_cast<std::size_t>(std::ceil(span / spec.dt - 1e-9));
      prop.step(psi, span / static_cast<double>(n), n);
      t = tc;
      edge();
    }
    WavefunctionGrid w;
    w.x = x;
    w.psi = psi;
    w.t_final = tc;
    w.norm = w.compute_norm();
    run.snapshots.push_back(std::move(w));
  }
  return run;
}

/// Imaginary-time relaxation with renormalization after every step; returns the
/// relaxed state and its energy.
inline std::pair<std::vector<cplx>, double> relax_ground_state(const PotentialModel& model, const GridSpec& spec,
                                                               const InitialGaussian& guess, double tau_total,
                                                               double energy_tol = 1e-12) {
  SplitOperator prop(model, spec);
  const auto& x = prop.x();
  std::vector<cplx> psi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) psi[i] = guess.amplitude(x[i]);
  const auto chunk = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / spec.dt)));
  double e_prev = prop.energy(psi);
  for (double tau = 0.0; tau < tau_total; tau += static_cast<double>(chunk) * spec.dt) {
    for (std::size_t s = 0; s < chunk; ++s) {
      prop.step(psi, spec.dt, 1, true);
      const double scale = 1.0 / std::sqrt(prop.norm(psi));
      for (auto& v : psi) v *= scale;
    }
    const double e = prop.energy(psi);
    if (std::abs(e - e_prev) < energy_tol) {
      e_prev = e;
      break;
    }
    e_prev = e;
  }
  return {psi, e_prev};
}

}  // namespace finco
