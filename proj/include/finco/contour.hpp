#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace finco {

using cplx = std::complex<double>;

enum class ContourFamily { Real, RectangularDip };

/// Fractions of t_final between which a RectangularDip runs below the axis.
struct DipSpan {
  double start = 0.05;
  double end = 0.95;
};

/// Piecewise-linear path in the complex time plane from 0 to a real final time.
class TimeContour {
 public:
  explicit TimeContour(std::vector<cplx> waypoints) : waypoints_(std::move(waypoints)) {
    if (waypoints_.size() < 2) throw std::invalid_argument("contour needs at least two waypoints");
    if (waypoints_.front() != cplx(0.0, 0.0)) throw std::invalid_argument("contour must start at t = 0");
    if (waypoints_.back().imag() != 0.0) throw std::invalid_argument("contour must end on the real axis");
    for (std::size_t k = 1; k < waypoints_.size(); ++k) {
      if (waypoints_[k] == waypoints_[k - 1]) throw std::invalid_argument("repeated contour waypoint");
      if (waypoints_[k].real() < waypoints_[k - 1].real())
        throw std::invalid_argument("contour must be non-decreasing in real time");
    }
  }

  const std::vector<cplx>& waypoints() const noexcept { return waypoints_; }
  double t_final() const noexcept { return waypoints_.back().real(); }
  bool is_real() const noexcept {
    for (const auto& w : waypoints_)
      if (w.imag() != 0.0) return false;
    return true;
  }

  /// Total path length, i.e. the sum of |dt| along the polyline.
  double length() const noexcept {
    double len = 0.0;
    for (std::size_t k = 1; k < waypoints_.size(); ++k) len += std::abs(waypoints_[k] - waypoints_[k - 1]);
    return len;
  }

 private:
  std::vector<cplx> waypoints_;
};

inline TimeContour make_contour(ContourFamily family, double t_final, double dip_depth = 0.0,
                                DipSpan span = {}) {
  if (!(t_final > 0.0)) throw std::invalid_argument("make_contour: t_final must be > 0");
  if (family == ContourFamily::Real) return TimeContour({0.0, t_final});
  if (!(dip_depth >= 0.0)) throw std::invalid_argument("make_contour: dip depth must be >= 0");
  if (!(span.start >= 0.0 && span.end <= 1.0 && span.start < span.end))
    throw std::invalid_argument("make_contour: dip span must satisfy 0 <= start < end <= 1");
  if (dip_depth == 0.0) return TimeContour({0.0, t_final});

  const double a = span.start * t_final;
  const double b = span.end * t_final;
  const cplx drop(0.0, -dip_depth);
  std::vector<cplx> pts{0.0, a, a + drop, b + drop, b, t_final};
  std::vector<cplx> out;
  for (const auto& p : pts)
    if (out.empty() || out.back() != p) out.push_back(p);
  return TimeContour(std::move(out));
}

/// Splits every segment into equal pieces no longer than dt_max. The last step
/// absorbs rounding so that the running sum lands exactly on t_final.
inline std::vector<cplx> discretize(const TimeContour& contour, double dt_max) {
  if (!(dt_max > 0.0)) throw std::invalid_argument("discretize: dt_max must be > 0");
  std::vector<cplx> steps;
  const auto& w = contour.waypoints();
  for (std::size_t k = 1; k < w.size(); ++k) {
    const cplx seg = w[k] - w[k - 1];
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(seg) / dt_max - 1e-9)));
    for (std::size_t j = 0; j < n; ++j) {
      const cplx a = w[k - 1] + seg * (static_cast<double>(j) / static_cast<double>(n));
      const cplx b = (j + 1 == n) ? w[k] : w[k - 1] + seg * (static_cast<double>(j + 1) / static_cast<double>(n));
      steps.push_back(b - a);
    }
  }
  cplx sum = 0.0;
  for (std::size_t k = 0; k + 1 < steps.size(); ++k) sum += steps[k];
  steps.back() = cplx(contour.t_final(), 0.0) - sum;
  return steps;
}

}  // namespace finco
