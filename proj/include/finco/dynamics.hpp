#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "finco/contour.hpp"
#include "finco/ode.hpp"
#include "finco/potentials.hpp"

namespace finco {

/// Normalized Gaussian (2 gamma0/pi)^{1/4} exp{-gamma0 (x-q0)^2 + i p0 (x-q0)}.
struct InitialGaussian {
  double gamma0 = 0.5;
  double q0 = 0.0;
  double p0 = 0.0;

  void validate() const {
    if (!(gamma0 > 0.0) || !std::isfinite(q0) || !std::isfinite(p0))
      throw std::invalid_argument("InitialGaussian needs gamma0 > 0 and finite centre");
  }
  cplx amplitude(double x) const {
    const double d = x - q0;
    return std::pow(2.0 * gamma0 / std::numbers::pi, 0.25) * std::exp(cplx(-gamma0 * d * d, p0 * d));
  }
};

/// 2x2 stability matrix, M_ab = d a(t) / d b(t0).
struct Monodromy {
  cplx pp{1.0}, pq{0.0}, qp{0.0}, qq{1.0};
  cplx det() const { return pp * qq - pq * qp; }
};

enum class TrajectoryStatus { Ok, NonFinite, StepCollapse };

struct TrajectoryState {
  cplx q{};      // position
  cplx p{};      // momentum, identical to S_1
  cplx s0_cl{};  // classical (potential + kinetic) action including S_0(t0)
  cplx s_kin{};  // kinetic action, integral of p^2/2
  cplx pz{};
  cplx z{};
  Monodromy m{};
  double arg_d = 0.0;  // contour-continuous arg of D = 2 gamma_f Z - i P_z
  double arg_z = 0.0;  // contour-continuous arg of Z
  TrajectoryStatus status = TrajectoryStatus::Ok;

  bool valid() const noexcept { return status == TrajectoryStatus::Ok; }
  cplx s2() const { return pz / z; }
  cplx d(double gamma_f) const { return 2.0 * gamma_f * z - cplx(0.0, 1.0) * pz; }
  /// Quantum action (i/2) ln Z on the tracked sheet.
  cplx s0_qm() const { return cplx(0.0, 0.5) * cplx(std::log(std::abs(z)), arg_z); }
};

struct Checkpoint {
  cplx t{};
  TrajectoryState state{};
};

struct RecordDiagnostics {
  double max_abs_im_q = 0.0;
  double min_abs_re_v = std::numeric_limits<double>::infinity();
  double min_re_v = std::numeric_limits<double>::infinity();
  double min_abs_d = std::numeric_limits<double>::infinity();
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

struct TrajectoryRecord {
  cplx initial_q{};
  TimeContour contour{{0.0, 1.0}};
  std::vector<Checkpoint> checkpoints;  // ordered along the contour
  TrajectoryState final{};
  RecordDiagnostics diag{};
};

/// Initial conditions S_n(t0) = -i d^n/dq^n ln Psi(q, t0) on the Gaussian.
inline TrajectoryState init_from_gaussian(const InitialGaussian& g, cplx q_init, double gamma_f) {
  g.validate();
  const cplx I(0.0, 1.0);
  const cplx dq = q_init - g.q0;
  TrajectoryState s;
  s.q = q_init;
  s.p = 2.0 * I * g.gamma0 * dq + g.p0;
  s.s0_cl = I * g.gamma0 * dq * dq + g.p0 * dq - 0.25 * I * std::log(2.0 * g.gamma0 / std::numbers::pi);
  s.s_kin = 0.0;
  s.pz = 2.0 * I * g.gamma0;
  s.z = 1.0;
  s.m = Monodromy{};
  s.arg_d = std::arg(s.d(gamma_f));
  s.arg_z = 0.0;
  return s;
}

/// Packed ODE vector: q, p, S0_cl, S_kin, P_z, Z, M_pp, M_pq, M_qp, M_qq.
using PackedState = ComplexState<10>;

inline PackedState pack(const TrajectoryState& s) {
  return {s.q, s.p, s.s0_cl, s.s_kin, s.pz, s.z, s.m.pp, s.m.pq, s.m.qp, s.m.qq};
}

inline void unpack(const PackedState& y, TrajectoryState& s) {
  s.q = y[0]; s.p = y[1]; s.s0_cl = y[2]; s.s_kin = y[3]; s.pz = y[4]; s.z = y[5];
  s.m = {y[6], y[7], y[8], y[9]};
}

/// Time derivative of the N = 2 truncated hierarchy. arg_d is not part of the
/// ODE; it is advanced by the stepper from the increments of D.
inline PackedState derivative(const PackedState& y, const PotentialModel& model) {
  const auto v = model.derivs(y[0]);
  const cplx p = y[1];
  const cplx kin = 0.5 * p * p;
  return {p, -v.v1, -v.v0 + kin, kin, -v.v2 * y[5], y[4],
          -v.v2 * y[8], -v.v2 * y[9], y[6], y[7]};
}

inline TrajectoryState derivative(const TrajectoryState& s, const PotentialModel& model) {
  TrajectoryState d;
  unpack(derivative(pack(s), model), d);
  d.arg_d = 0.0;
  d.arg_z = 0.0;
  return d;
}

struct PropagateOptions {
  StepperOptions stepper{};
  double gamma_f = 0.5;
  /// Extra times on the contour at which to store the state.
  std::vector<cplx> checkpoint_times{};
  /// Also store the state at every contour corner.
  bool record_waypoints = false;
};

namespace detail {

inline bool on_segment(cplx a, cplx b, cplx t) {
  const double len = std::abs(b - a);
  const double scale = std::max(1.0, len);
  const double da = std::abs(t - a);
  const double db = std::abs(b - t);
  return std::abs(da + db - len) <= 1e-12 * scale;
}

}  // namespace detail

/// Integrates one trajectory along the contour. Overflow or step collapse marks
/// the result invalid instead of throwing.
inline TrajectoryRecord propagate(const TrajectoryState& state0, const TimeContour& contour,
                                  const PotentialModel& model, const PropagateOptions& opts) {
  TrajectoryRecord rec;
  rec.initial_q = state0.q;
  rec.contour = contour;
  rec.final = state0;

  TrajectoryState& st = rec.final;
  PackedState y = pack(st);
  const double gf = opts.gamma_f;
  double pending_dd = 0.0, pending_dz = 0.0;

  auto rhs = [&model](const PackedState& u) { return derivative(u, model); };
  auto accept = [&](const PackedState& y_old, const PackedState& y_new) {
    const cplx I(0.0, 1.0);
    const cplx d_old = 2.0 * gf * y_old[5] - I * y_old[4];
    const cplx d_new = 2.0 * gf * y_new[5] - I * y_new[4];
    pending_dd = std::arg(d_new / d_old);
    pending_dz = std::arg(y_new[5] / y_old[5]);
    constexpr double limit = std::numbers::pi / 2;
    return std::abs(pending_dd) < limit && std::abs(pending_dz) < limit;
  };
  auto observe = [&](const PackedState& u, cplx) {
    st.arg_d += pending_dd;
    st.arg_z += pending_dz;
    const double im_q = std::abs(u[0].imag());
    rec.diag.max_abs_im_q = std::max(rec.diag.max_abs_im_q, im_q);
    const double re_v = model.value(u[0]).real();
    rec.diag.min_re_v = std::min(rec.diag.min_re_v, re_v);
    rec.diag.min_abs_re_v = std::min(rec.diag.min_abs_re_v, std::abs(re_v));
    rec.diag.min_abs_d = std::min(rec.diag.min_abs_d, std::abs(2.0 * gf * u[5] - cplx(0.0, 1.0) * u[4]));
  };
  observe(y, 0.0);
  pending_dd = pending_dz = 0.0;

  // split points: contour corners plus any requested checkpoint on each segment
  const auto& w = contour.waypoints();
  double h = std::min(opts.stepper.dt_max, 0.01);
  auto store = [&](cplx t) {
    TrajectoryState snap = st;
    unpack(y, snap);
    rec.checkpoints.push_back({t, snap});
  };
  auto store_requested = [&](cplx t) {
    for (const auto& c : opts.checkpoint_times)
      if (std::abs(c - t) <= 1e-12 * std::max(1.0, std::abs(t))) return true;
    return false;
  };
  if (opts.record_waypoints || store_requested(w.front())) store(w.front());

  for (std::size_t k = 1; k < w.size() && st.valid(); ++k) {
    std::vector<cplx> stops;
    for (const auto& c : opts.checkpoint_times)
      if (detail::on_segment(w[k - 1], w[k], c) && c != w[k - 1] && c != w[k]) stops.push_back(c);
    std::sort(stops.begin(), stops.end(),
              [&](cplx a, cplx b) { return std::abs(a - w[k - 1]) < std::abs(b - w[k - 1]); });
    stops.push_back(w[k]);

    cplx from = w[k - 1];
    for (const auto& to : stops) {
      const auto r = integrate_segment<10>(y, from, to, h, opts.stepper, rhs, accept, observe);
      rec.diag.accepted_steps += r.accepted;
      rec.diag.rejected_steps += r.rejected;
      if (r.status == SegmentStatus::NonFinite) {
        st.status = TrajectoryStatus::NonFinite;
        break;
      }
      if (r.status != SegmentStatus::Ok) {
        st.status = TrajectoryStatus::StepCollapse;
        break;
      }
      const bool corner = (to == w[k]);
      if ((corner && opts.record_waypoints) || store_requested(to)) store(to);
      from = to;
    }
  }
  unpack(y, st);
  return rec;
}

/// Classical period 2 pi / (beta sqrt(2|E|)) of a bound Morse orbit, or 2 pi / omega.
inline double classical_period(const PotentialModel& model, double q0, double p0) {
  if (const auto* m = std::get_if<Morse>(&model.params())) {
    const double e = model.value(q0).real() + 0.5 * p0 * p0;
    if (!(e < 0.0)) throw std::domain_error("classical_period: Morse orbit is not bound");
    return 2.0 * std::numbers::pi / (m->beta * std::sqrt(2.0 * std::abs(e)));
  }
  if (const auto* h = std::get_if<Harmonic>(&model.params())) return 2.0 * std::numbers::pi / h->omega;
  throw std::domain_error("classical_period: free particle has no period");
}

}  // namespace finco
