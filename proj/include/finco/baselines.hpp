#pragma once

// Non-FINCO reconstructions: a Newton root search for trajectories that land
// on a real x, and second-order Taylor continuation from a trajectory end point.

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "finco/contour.hpp"
#include "finco/dynamics.hpp"
#include "finco/errors.hpp"

namespace finco {

struct NewtonOptions {
  int max_iter = 60;
  double tol = 1e-10;        // on |q(t) - x|
  double dedupe = 1e-6;      // roots closer than this in q(t0) are merged
  double max_step = std::numeric_limits<double>::infinity();  // step length cap in q(t0)
  PropagateOptions propagate{};
};

struct Root {
  cplx q_init{};
  TrajectoryState final{};
  int iterations = 0;
};

/// S0 = S0_cl + (i/2) ln Z on the contour-tracked sheet.
inline cplx total_action(const TrajectoryState& s) { return s.s0_cl + s.s0_qm(); }

/// Newton iteration on F(q0) = q(t; q0) - x from every seed; F'(q0) = Z(t).
inline std::vector<Root> find_roots(const InitialGaussian& g, const PotentialModel& model, const TimeContour& contour,
                                    double x, const std::vector<cplx>& seeds, const NewtonOptions& opt = {}) {
  std::vector<Root> roots;
  for (const auto& seed : seeds) {
    if (!std::isfinite(seed.real()) || !std::isfinite(seed.imag()))
      throw std::invalid_argument("find_roots: seeds must be finite");
    cplx q0 = seed;
    for (int it = 0; it < opt.max_iter; ++it) {
      const auto rec = propagate(init_from_gaussian(g, q0, opt.propagate.gamma_f), contour, model, opt.propagate);
      if (!rec.final.valid()) break;
      const cplx f = rec.final.q - x;
      if (std::abs(f) < opt.tol) {
        bool seen = false;
        for (const auto& r : roots) seen = seen || std::abs(r.q_init - q0) < opt.dedupe;
        if (!seen) roots.push_back({q0, rec.final, it});
        break;
      }
      if (rec.final.z == cplx(0.0)) break;
      cplx step = f / rec.final.z;
      if (std::abs(step) > opt.max_step) step *= opt.max_step / std::abs(step);
      q0 -= step;
    }
  }
  return roots;
}

/// Psi(x, t) = sum over roots of exp(i S0(t)).
inline cplx root_search_reconstruct(const InitialGaussian& g, const PotentialModel& model, const TimeContour& contour,
                                    double x, const std::vector<cplx>& seeds, const NewtonOptions& opt = {}) {
  const auto roots = find_roots(g, model, contour, x, seeds, opt);
  if (roots.empty()) throw NoRoots("root_search_reconstruct: no seed converged");
  cplx psi = 0.0;
  for (const auto& r : roots) psi += std::exp(cplx(0.0, 1.0) * total_action(r.final));
  return psi;
}

/// exp{i [S0 + (x - q) S1 + (x - q)^2 S2 / 2]} at the trajectory end point.
inline cplx taylor_continuation(const TrajectoryState& s, double x) {
  const cplx dq = x - s.q;
  return std::exp(cplx(0.0, 1.0) * (total_action(s) + dq * s.p + 0.5 * dq * dq * s.s2()));
}

inline cplx taylor_continuation(const TrajectoryRecord& record, double x) {
  if (!record.final.valid()) throw std::invalid_argument("taylor_continuation: invalid trajectory");
  return taylor_continuation(record.final, x);
}

/// For every x, continues from the valid trajectory whose end point is closest.
inline std::vector<cplx> nearest_continuation(const std::vector<TrajectoryRecord>& records,
                                              const std::vector<double>& x) {
  std::vector<cplx> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    const TrajectoryRecord* pick = nullptr;
    for (const auto& r : records) {
      if (!r.final.valid()) continue;
      const double d = std::abs(r.final.q - x[i]);
      if (d < best) {
        best = d;
        pick = &r;
      }
    }
    if (pick != nullptr) out[i] = taylor_continuation(pick->final, x[i]);
  }
  return out;
}

}  // namespace finco
