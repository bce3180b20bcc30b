#pragma once

// Final-value coherent-state reconstruction: every propagated trajectory is
// assigned to a real-centred Gaussian through the Huber-Heller bra transform
// and weighted by its semiclassical overlap times the measure Jacobian.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "finco/dynamics.hpp"
#include "finco/errors.hpp"
#include "finco/parallel.hpp"

namespace finco {

enum class RejectReason { None, InvalidTrajectory, KineticAction, PotentialDivergence, Noise };

inline std::string to_string(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "none";
    case RejectReason::InvalidTrajectory: return "invalid_trajectory";
    case RejectReason::KineticAction: return "kinetic_action";
    case RejectReason::PotentialDivergence: return "potential_divergence";
    case RejectReason::Noise: return "noise";
  }
  return "?";
}

/// How the square root of the overlap prefactor picks its branch.
enum class PrefactorPhase {
  Continuous,  // exp(-i arg_d / 2) with arg_d tracked along the contour
  Principal,   // principal branch of sqrt(1 / D)
};

struct FincoSample {
  double qf = 0.0;
  double pf = 0.0;
  cplx weight{};        // includes quadrature weight dA and 1/(2 pi)
  cplx contribution{};  // |J| times the overlap, before quadrature
  double jac_mag = 0.0;
  cplx sigma_exp{};
  double t_final = 0.0;
  bool valid = true;
  RejectReason reason = RejectReason::None;

  void reject(RejectReason r) {
    valid = false;
    reason = r;
    weight = 0.0;
  }
};

struct HHPoint {
  double qf = 0.0;
  double pf = 0.0;
};

/// Unique real (q_f, p_f) with 2 gamma_f q_f - i p_f = 2 gamma_f q - i p.
inline HHPoint hh_transform(cplx q, cplx p, double gamma_f) {
  if (!(gamma_f > 0.0)) throw std::invalid_argument("hh_transform: gamma_f must be > 0");
  return {q.real() + p.imag() / (2.0 * gamma_f), p.real() - 2.0 * gamma_f * q.imag()};
}

/// |J| = |2 g M_qq + 2 g M_qp S2 - i M_pq - i M_pp S2|^2 / (2 g), the Jacobian of
/// (q_f, p_f) with respect to (Re q(t0), Im q(t0)).
inline double jacobian_magnitude(const TrajectoryState& final, cplx s2_t0, double gamma_f) {
  const cplx I(0.0, 1.0);
  const auto& m = final.m;
  const cplx d = 2.0 * gamma_f * m.qq + 2.0 * gamma_f * m.qp * s2_t0 - I * m.pq - I * m.pp * s2_t0;
  return std::norm(d) / (2.0 * gamma_f);
}

/// sigma = i S0_cl + g (q_f^2 - q^2) + i (S_1 q_f - p_f q).
inline cplx overlap_exponent(const TrajectoryState& s, HHPoint c, double gamma_f) {
  const cplx I(0.0, 1.0);
  return I * s.s0_cl + gamma_f * (c.qf * c.qf - s.q * s.q) + I * (s.p * c.qf - c.pf * s.q);
}

inline FincoSample sample_weight(const TrajectoryState& final, const InitialGaussian& g, double gamma_f, double dA,
                                 double t_final = 0.0, PrefactorPhase phase = PrefactorPhase::Continuous) {
  FincoSample out;
  out.t_final = t_final;
  if (!final.valid()) {
    out.reject(RejectReason::InvalidTrajectory);
    return out;
  }
  const auto c = hh_transform(final.q, final.p, gamma_f);
  out.qf = c.qf;
  out.pf = c.pf;
  const cplx s2_t0(0.0, 2.0 * g.gamma0);
  out.jac_mag = jacobian_magnitude(final, s2_t0, gamma_f);
  out.sigma_exp = overlap_exponent(final, c, gamma_f);

  const cplx d = final.d(gamma_f);
  const double arg = phase == PrefactorPhase::Continuous ? final.arg_d : std::arg(d);
  // overlap = (2g/pi)^{1/4} sqrt(2 pi / D) e^sigma with the branch fixed by arg;
  // |J| |D|^{-1/2} = |D|^{3/2} / (2g) is formed directly so a caustic gives 0
  const double pref = std::pow(2.0 * gamma_f / std::numbers::pi, 0.25) * std::sqrt(2.0 * std::numbers::pi);
  const double mag = std::pow(std::abs(d), 1.5) / (2.0 * gamma_f);
  out.contribution = pref * mag * std::polar(1.0, -0.5 * arg) * std::exp(out.sigma_exp);
  out.weight = dA / (2.0 * std::numbers::pi) * out.contribution;
  if (!std::isfinite(out.weight.real()) || !std::isfinite(out.weight.imag()) || !std::isfinite(out.qf) ||
      !std::isfinite(out.pf))
    out.reject(RejectReason::InvalidTrajectory);
  return out;
}

/// Where along the contour the potential filter looks.
enum class PotentialFilterMode {
  PathMinimum,  // reject if Re V fell below nu anywhere up to the reconstruction time
  Final,        // reject only while Re V(q(t)) is below nu at the reconstruction time
};

struct FilterThresholds {
  double sigma = -2.5;  // on Im S_kin(t)
  double nu = -20.0;    // on Re V along the trajectory
  double eps = 1e4;     // on |J| |overlap|
  PotentialFilterMode nu_mode = PotentialFilterMode::Final;

  static FilterThresholds disabled() {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, -inf, inf, PotentialFilterMode::PathMinimum};
  }
};

inline FincoSample apply_filters(const TrajectoryRecord& record, FincoSample sample, const FilterThresholds& f,
                                 const PotentialModel* model = nullptr) {
  if (!sample.valid) return sample;
  if (!record.final.valid()) {
    sample.reject(RejectReason::InvalidTrajectory);
    return sample;
  }
  if (record.final.s_kin.imag() < f.sigma) {
    sample.reject(RejectReason::KineticAction);
    return sample;
  }
  double re_v = record.diag.min_re_v;
  if (f.nu_mode == PotentialFilterMode::Final) {
    if (model == nullptr) throw std::invalid_argument("apply_filters: final-time potential filter needs the model");
    re_v = model->value(record.final.q).real();
  }
  if (re_v < f.nu) {
    sample.reject(RejectReason::PotentialDivergence);
    return sample;
  }
  if (!(std::abs(sample.contribution) < f.eps)) sample.reject(RejectReason::Noise);
  return sample;
}

/// Complex amplitudes on a uniform real grid.
struct WavefunctionGrid {
  std::vector<double> x;
  std::vector<cplx> psi;
  double t_final = 0.0;
  double norm = 0.0;

  double dx() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
  double compute_norm() const {
    double s = 0.0;
    for (const auto& v : psi) s += std::norm(v);
    return s * dx();
  }
  std::vector<double> density() const {
    std::vector<double> d(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) d[i] = std::norm(psi[i]);
    return d;
  }
};

inline void check_uniform(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("x grid needs at least two points");
  const double dx = x[1] - x[0];
  if (!(dx > 0.0)) throw std::invalid_argument("x grid must be strictly increasing");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs((x[i] - x[i - 1]) - dx) > 1e-9 * std::max(1.0, std::abs(dx)))
      throw std::invalid_argument("x grid must be uniformly spaced");
}

inline std::vector<double> linspace_grid(double x_min, double x_max, std::size_t n) {
  std::vector<double> x(n);
  const double dx = (x_max - x_min) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = x_min + dx * static_cast<double>(i);
  return x;
}

/// Psi(x) = sum_k w_k <x|g_f(q_k, p_k)>, summed in sample order.
inline WavefunctionGrid reconstruct(const std::vector<FincoSample>& samples, const std::vector<double>& x_grid,
                                    double gamma_f, unsigned workers = 1) {
  check_uniform(x_grid);
  if (!(gamma_f > 0.0)) throw std::invalid_argument("reconstruct: gamma_f must be > 0");
  std::vector<std::size_t> active;
  double w_max = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k)
    if (samples[k].valid && samples[k].weight != cplx(0.0)) {
      active.push_back(k);
      w_max = std::max(w_max, std::abs(samples[k].weight));
    }
  if (active.empty()) throw EmptyReconstruction("reconstruct: no valid samples");
  const double t_final = samples[active.front()].t_final;

  // contributions below e^-40 of the largest weight are skipped
  std::vector<double> reach(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    const double budget = 40.0 + std::log(std::abs(samples[active[a]].weight) / w_max);
    reach[a] = budget > 0.0 ? std::sqrt(budget / gamma_f) : -1.0;
  }

  WavefunctionGrid out;
  out.x = x_grid;
  out.psi.assign(x_grid.size(), 0.0);
  out.t_final = t_final;
  const double norm_g = std::pow(2.0 * gamma_f / std::numbers::pi, 0.25);
  parallel_for(x_grid.size(), workers, [&](std::size_t i) {
    const double x = x_grid[i];
    cplx acc = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto& s = samples[active[a]];
      const double d = x - s.qf;
      if (std::abs(d) > reach[a]) continue;
      acc += s.weight * std::exp(cplx(-gamma_f * d * d, s.pf * d));
    }
    out.psi[i] = norm_g * acc;
  });
  out.norm = out.compute_norm();
  return out;
}

}  // namespace finco
