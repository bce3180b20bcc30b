#pragma once

// End-to-end FINCO run over an initial-manifold grid: propagate every cell,
// weight and filter the final states, optionally refine, and superpose.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "finco/contour.hpp"
#include "finco/dynamics.hpp"
#include "finco/finco.hpp"
#include "finco/parallel.hpp"
#include "finco/sampling.hpp"

namespace finco {

struct ContourSpec {
  ContourFamily family = ContourFamily::RectangularDip;
  double depth = 0.2;
  DipSpan span{};

  TimeContour build(double t_final) const { return make_contour(family, t_final, depth, span); }
};

struct RefinementSpec {
  int rounds = 0;
  std::size_t budget = 0;  // cells split per round
};

struct FincoSetup {
  PotentialModel model{};
  InitialGaussian gaussian{};
  double gamma_f = 0.5;
  ContourSpec contour{};
  Rect rect{};
  int nx = 100;
  int ny = 100;
  RefinementSpec refinement{};
  FilterThresholds filters{};
  StepperOptions stepper{};
  PrefactorPhase phase = PrefactorPhase::Continuous;
  unsigned workers = 0;
};

struct SampleCounts {
  std::size_t total = 0;
  std::size_t accepted = 0;
  std::size_t invalid = 0;
  std::size_t kinetic = 0;
  std::size_t potential = 0;
  std::size_t noise = 0;
};

inline SampleCounts count_samples(const std::vector<FincoSample>& samples) {
  SampleCounts c;
  c.total = samples.size();
  for (const auto& s : samples) {
    switch (s.reason) {
      case RejectReason::None: ++c.accepted; break;
      case RejectReason::InvalidTrajectory: ++c.invalid; break;
      case RejectReason::KineticAction: ++c.kinetic; break;
      case RejectReason::PotentialDivergence: ++c.potential; break;
      case RejectReason::Noise: ++c.noise; break;
    }
  }
  return c;
}

/// Final states and weights for every grid cell at one reconstruction time.
struct FincoEnsemble {
  ManifoldGrid grid;
  double t_final = 0.0;
  std::vector<TrajectoryRecord> records;
  std::vector<FincoSample> raw;       // before filtering
  std::vector<FincoSample> samples;   // after filtering
  double seconds = 0.0;

  SampleCounts counts() const { return count_samples(samples); }
};

inline TrajectoryRecord propagate_cell(const FincoSetup& setup, cplx q_init, double t_final) {
  const auto s0 = init_from_gaussian(setup.gaussian, q_init, setup.gamma_f);
  if (t_final == 0.0) {
    TrajectoryRecord rec;
    rec.initial_q = q_init;
    rec.final = s0;
    rec.diag.min_re_v = setup.model.value(q_init).real();
    rec.diag.min_abs_re_v = std::abs(rec.diag.min_re_v);
    rec.diag.max_abs_im_q = std::abs(q_init.imag());
    rec.diag.min_abs_d = std::abs(s0.d(setup.gamma_f));
    return rec;
  }
  PropagateOptions opts;
  opts.stepper = setup.stepper;
  opts.gamma_f = setup.gamma_f;
  return propagate(s0, setup.contour.build(t_final), setup.model, opts);
}

inline void weigh(const FincoSetup& setup, const ManifoldGrid& grid, FincoEnsemble& ens, std::size_t from) {
  const auto& pts = grid.points();
  ens.raw.resize(pts.size());
  ens.samples.resize(pts.size());
  for (std::size_t k = from; k < pts.size(); ++k) {
    ens.raw[k] = sample_weight(ens.records[k].final, setup.gaussian, setup.gamma_f, pts[k].weight, ens.t_final, setup.phase);
    ens.samples[k] = apply_filters(ens.records[k], ens.raw[k], setup.filters, &setup.model);
  }
}

/// Propagates the manifold to t_final and performs the configured refinement
/// rounds. Refinement scores use the filtered contribution field.
inline FincoEnsemble build_ensemble(const FincoSetup& setup, double t_final) {
  if (t_final < 0.0) throw std::invalid_argument("build_ensemble: negative time");
  const auto start = std::chrono::steady_clock::now();
  FincoEnsemble ens;
  ens.t_final = t_final;
  ens.grid = uniform_grid(setup.rect, setup.nx, setup.ny);

  auto propagate_range = [&](std::size_t from) {
    const auto& pts = ens.grid.points();
    ens.records.resize(pts.size());
    parallel_for(pts.size() - from, setup.workers,
                 [&](std::size_t i) { ens.records[from + i] = propagate_cell(setup, pts[from + i].q, t_final); });
    weigh(setup, ens.grid, ens, from);
  };
  propagate_range(0);

  for (int round = 0; round < setup.refinement.rounds && setup.refinement.budget > 0; ++round) {
    std::vector<cplx> field(ens.samples.size());
    for (std::size_t k = 0; k < field.size(); ++k) field[k] = ens.samples[k].valid ? ens.samples[k].contribution : 0.0;
    const auto scores = gradient_scores(ens.grid, field);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(std::min(setup.refinement.budget, order.size()));

    std::vector<char> drop(ens.records.size(), 0);
    for (auto i : order) drop[i] = 1;
    std::vector<TrajectoryRecord> kept;
    kept.reserve(ens.records.size());
    for (std::size_t k = 0; k < ens.records.size(); ++k)
      if (!drop[k]) kept.push_back(std::move(ens.records[k]));
    const std::size_t from = kept.size();
    ens.grid.split(order);
    ens.records = std::move(kept);
    ens.raw.clear();
    ens.samples.clear();
    ens.raw.resize(from);
    ens.samples.resize(from);
    propagate_range(from);
    weigh(setup, ens.grid, ens, 0);
  }
  ens.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ens;
}

inline WavefunctionGrid reconstruct(const FincoSetup& setup, const FincoEnsemble& ens, const std::vector<double>& x) {
  auto wf = reconstruct(ens.samples, x, setup.gamma_f, setup.workers);
  wf.t_final = ens.t_final;
  return wf;
}

}  // namespace finco
