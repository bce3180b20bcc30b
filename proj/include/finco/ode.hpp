#pragma once

// Adaptive Dormand-Prince 5(4) integration of autonomous complex ODE systems
// along straight segments of the complex time plane.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace finco {

using cplx = std::complex<double>;

struct StepperOptions {
  double dt_max = 0.05;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double dt_min = 1e-11;  // below this |dt| the step is declared collapsed
  std::size_t max_steps = 5'000'000;
};

enum class SegmentStatus { Ok, NonFinite, StepCollapse, TooManySteps };

struct SegmentResult {
  SegmentStatus status = SegmentStatus::Ok;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

template <std::size_t N>
using ComplexState = std::array<cplx, N>;

namespace detail {

template <std::size_t N>
bool all_finite(const ComplexState<N>& y) {
  for (const auto& v : y)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

template <std::size_t N>
ComplexState<N> axpy(const ComplexState<N>& y, cplx h, std::initializer_list<std::pair<double, const ComplexState<N>*>> terms) {
  ComplexState<N> out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    const cplx hc = h * c;
    for (std::size_t i = 0; i < N; ++i) out[i] += hc * (*k)[i];
  }
  return out;
}

}  // namespace detail

/// Integrates y' = rhs(y) from t0 to t1 along the straight line joining them.
///
/// The step is the complex increment dt = direction * |dt|, so every
/// right-hand side is multiplied by a complex step. `h` carries the step
/// magnitude between calls so consecutive segments keep their adapted size.
///
/// `accept(y_old, y_new)` may veto an otherwise accepted step (the step is then
/// halved); `observe(y_new, t_new)` is invoked after every accepted step.
template <std::size_t N, class Rhs, class Accept, class Observe>
SegmentResult integrate_segment(ComplexState<N>& y, cplx t0, cplx t1, double& h, const StepperOptions& opt,
                                Rhs&& rhs, Accept&& accept, Observe&& observe) {
  // Dormand-Prince tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2; (void)c3; (void)c4; (void)c5;

  SegmentResult res;
  const double length = std::abs(t1 - t0);
  if (length == 0.0) return res;
  const cplx dir = (t1 - t0) / length;
  if (!(h > 0.0)) h = std::min(opt.dt_max, 0.01);
  double s = 0.0;

  ComplexState<N> k1 = rhs(y);
  while (s < length) {
    if (res.accepted + res.rejected >= opt.max_steps) {
      res.status = SegmentStatus::TooManySteps;
      return res;
    }
    double hs = std::min({h, opt.dt_max, length - s});
    const bool last = (hs >= length - s);
    if (hs < opt.dt_min && !last) {
      res.status = SegmentStatus::StepCollapse;
      return res;
    }
    const cplx dt = dir * hs;

    const auto k2 = rhs(detail::axpy<N>(y, dt, {{a21, &k1}}));
    const auto k3 = rhs(detail::axpy<N>(y, dt, {{a31, &k1}, {a32, &k2}}));
    const auto k4 = rhs(detail::axpy<N>(y, dt, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const auto k5 = rhs(detail::axpy<N>(y, dt, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const auto k6 = rhs(detail::axpy<N>(y, dt, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const auto y_new = detail::axpy<N>(y, dt, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const auto k7 = rhs(y_new);

    double err = 0.0;
    bool finite = detail::all_finite<N>(y_new) && detail::all_finite<N>(k7);
    if (finite) {
      for (std::size_t i = 0; i < N; ++i) {
        const cplx e = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        const double r = std::abs(e) / sc;
        err += r * r;
      }
      err = std::sqrt(err / static_cast<double>(N));
      finite = std::isfinite(err);
    }

    if (!finite) {
      // overflow inside the step: retry smaller, and give up once the step collapses
      ++res.rejected;
      h = 0.25 * hs;
      if (h < opt.dt_min) {
        res.status = SegmentStatus::NonFinite;
        return res;
      }
      continue;
    }

    if (err <= 1.0) {
      if (!accept(y, y_new)) {
        ++res.rejected;
        h = 0.5 * hs;
        if (h < opt.dt_min) {
          res.status = SegmentStatus::StepCollapse;
          return res;
        }
        continue;
      }
      y = y_new;
      k1 = k7;
      s = last ? length : s + hs;
      ++res.accepted;
      observe(y, last ? t1 : t0 + dir * s);
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      // keep the adapted size when the step was only truncated by the segment end
      h = last ? std::max(h, hs * fac) : hs * fac;
    } else {
      ++res.rejected;
      h = hs * std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
      if (h < opt.dt_min) {
        res.status = SegmentStatus::StepCollapse;
        return res;
      }
    }
  }
  return res;
}

}  // namespace finco
