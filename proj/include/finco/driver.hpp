#pragma once

// Run modes behind `finco run`. Each mode writes its artifacts under the
// configured output directory and returns the in-memory results as well.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "finco/baselines.hpp"
#include "finco/config.hpp"
#include "finco/diagnostics.hpp"
#include "finco/io.hpp"
#include "finco/pipeline.hpp"
#include "finco/reference_qm.hpp"

namespace finco {

enum class Mode { Finco, Reference, BranchMap, RootSearch, Compare, RealContourCompare };

inline const std::vector<std::pair<std::string, Mode>>& mode_names() {
  static const std::vector<std::pair<std::string, Mode>> names{
      {"finco", Mode::Finco},         {"reference", Mode::Reference}, {"branchmap", Mode::BranchMap},
      {"rootsearch", Mode::RootSearch}, {"compare", Mode::Compare},     {"real_contour_compare", Mode::RealContourCompare},
  };
  return names;
}

inline Mode parse_mode(const std::string& s) {
  for (const auto& [n, m] : mode_names())
    if (n == s) return m;
  throw ConfigError("mode", "unknown mode '" + s + "'");
}

inline std::string to_string(Mode m) {
  for (const auto& [n, v] : mode_names())
    if (v == m) return n;
  return "?";
}

// ---- comparisons

struct Comparison {
  double t = 0.0;
  double rel_l2 = 0.0;    // ||rho - rho_ref|| / ||rho_ref||
  double rel_linf = 0.0;  // max |rho - rho_ref| / max rho_ref
  double l2_psi = 0.0;    // ||psi - psi_ref||, phase sensitive
  double norm = 0.0;
  double norm_ref = 0.0;
};

/// Both grids must share their x points.
inline Comparison compare(const WavefunctionGrid& a, const WavefunctionGrid& ref) {
  if (a.x.size() != ref.x.size()) throw std::invalid_argument("compare: grids differ in size");
  for (std::size_t i = 0; i < a.x.size(); ++i)
    if (std::abs(a.x[i] - ref.x[i]) > 1e-9) throw std::invalid_argument("compare: grids differ");
  Comparison c;
  c.t = ref.t_final;
  double num2 = 0, den2 = 0, max_ref = 0, max_diff = 0, psi2 = 0;
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    const double r = std::norm(ref.psi[i]), d = std::norm(a.psi[i]) - r;
    num2 += d * d;
    den2 += r * r;
    max_ref = std::max(max_ref, r);
    max_diff = std::max(max_diff, std::abs(d));
    psi2 += std::norm(a.psi[i] - ref.psi[i]);
  }
  const double dx = ref.dx();
  c.rel_l2 = std::sqrt(num2 / den2);
  c.rel_linf = max_diff / max_ref;
  c.l2_psi = std::sqrt(psi2 * dx);
  c.norm = a.compute_norm();
  c.norm_ref = ref.compute_norm();
  return c;
}

/// Nodes of |psi|^2: local minima flanked on both sides by maxima above
/// `floor` times the global maximum and at most half as high as the lower flank.
inline std::vector<double> density_nodes(const WavefunctionGrid& wf, double floor = 0.05) {
  const auto rho = wf.density();
  const std::size_t n = rho.size();
  std::vector<double> out;
  if (n < 3) return out;
  const double top = *std::max_element(rho.begin(), rho.end());
  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (rho[i] < rho[i - 1] && rho[i] <= rho[i + 1]) minima.push_back(i);
  for (auto m : minima) {
    // flanks: the highest points up to the neighbouring minima
    const auto it = std::lower_bound(minima.begin(), minima.end(), m);
    const std::size_t lo = it == minima.begin() ? 0 : *(it - 1);
    const std::size_t hi = it + 1 == minima.end() ? n - 1 : *(it + 1);
    const double left = *std::max_element(rho.begin() + static_cast<std::ptrdiff_t>(lo), rho.begin() + static_cast<std::ptrdiff_t>(m));
    const double right = *std::max_element(rho.begin() + static_cast<std::ptrdiff_t>(m), rho.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    const double flank = std::min(left, right);
    if (flank > floor * top && rho[m] <= 0.5 * flank) out.push_back(wf.x[m]);
  }
  return out;
}

// ---- per-mode building blocks

inline WavefunctionGrid restrict_to(const WavefunctionGrid& wf, const std::vector<double>& x) {
  WavefunctionGrid out;
  out.t_final = wf.t_final;
  if (x.empty()) return out;
  const auto first = std::lower_bound(wf.x.begin(), wf.x.end(), x.front() - 1e-9) - wf.x.begin();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto k = static_cast<std::size_t>(first) + i;
    if (k >= wf.x.size() || std::abs(wf.x[k] - x[i]) > 1e-9) throw std::invalid_argument("restrict_to: x not on grid");
    out.x.push_back(wf.x[k]);
    out.psi.push_back(wf.psi[k]);
  }
  out.norm = out.compute_norm();
  return out;
}

/// Split-operator reference at every checkpoint, restricted to the window.
inline std::vector<WavefunctionGrid> reference_snapshots(const RunConfig& c, bool full_grid = false,
                                                        double* edge_amplitude = nullptr) {
  const auto times = c.checkpoint_times();
  const auto run = propagate_exact(c.gaussian, c.model, c.reference, times.back(), times);
  if (edge_amplitude) *edge_amplitude = run.max_edge_amplitude;
  std::vector<WavefunctionGrid> out;
  const auto x = c.window_positions();
  for (const auto& s : run.snapshots) out.push_back(full_grid ? s : restrict_to(s, x));
  return out;
}

struct FincoResult {
  FincoEnsemble ensemble;
  WavefunctionGrid wf;
};

inline FincoResult finco_at(const RunConfig& c, double t) {
  const auto setup = c.setup();
  FincoResult r{build_ensemble(setup, t), {}};
  r.wf = reconstruct(setup, r.ensemble, c.window_positions());
  return r;
}

/// Samples whose trajectory the real contour reproduces; the rest are
/// rejected as invalid. Matching compares final q, p and the sample weight.
inline std::vector<FincoSample> real_accessible(const RunConfig& c, const FincoEnsemble& ens, double tol = 1e-6) {
  auto setup = c.setup();
  setup.contour.family = ContourFamily::Real;
  const auto& pts = ens.grid.points();
  std::vector<FincoSample> out = ens.samples;
  std::vector<char> keep(pts.size(), 0);
  parallel_for(pts.size(), setup.workers, [&](std::size_t k) {
    if (!ens.samples[k].valid) return;
    const auto rec = propagate_cell(setup, pts[k].q, ens.t_final);
    if (!rec.final.valid()) return;
    const auto& a = ens.records[k].final;
    const auto w = sample_weight(rec.final, setup.gaussian, setup.gamma_f, pts[k].weight, ens.t_final, setup.phase);
    auto close = [&](cplx x, cplx y) { return std::abs(x - y) <= tol * (1.0 + std::abs(y)); };
    keep[k] = close(rec.final.q, a.q) && close(rec.final.p, a.p) && close(w.contribution, ens.samples[k].contribution);
  });
  for (std::size_t k = 0; k < out.size(); ++k)
    if (out[k].valid && !keep[k]) out[k].reject(RejectReason::InvalidTrajectory);
  return out;
}

/// Root-search amplitude on every x_stride-th window point. Seeds are one
/// point per branch of the map at this time, a coarse grid over the
/// manifold rectangle, and the roots found at the previous x. Roots failing
/// the sigma filter are left out of the sum.
struct RootSearchResult {
  WavefunctionGrid wf;
  std::vector<std::size_t> roots_per_x;
};

inline RootSearchResult rootsearch_at(const RunConfig& c, double t, const std::vector<cplx>& branch_seeds) {
  const auto contour = c.setup().contour.build(t);
  const auto xs = c.window_positions();
  std::vector<cplx> grid_seeds;
  for (const auto& p : uniform_grid(c.rect, c.rootsearch.seeds_nx, c.rootsearch.seeds_ny).points())
    grid_seeds.push_back(p.q);
  NewtonOptions opt;
  opt.max_step = c.rootsearch.max_step;
  opt.propagate.stepper = c.stepper;
  opt.propagate.gamma_f = c.gamma_f;

  RootSearchResult r;
  r.wf.t_final = t;
  std::vector<cplx> previous;
  for (std::size_t i = 0; i < xs.size(); i += static_cast<std::size_t>(c.rootsearch.x_stride)) {
    std::vector<cplx> seeds = previous;
    seeds.insert(seeds.end(), branch_seeds.begin(), branch_seeds.end());
    seeds.insert(seeds.end(), grid_seeds.begin(), grid_seeds.end());
    const auto roots = t == 0.0 ? std::vector<Root>{} : find_roots(c.gaussian, c.model, contour, xs[i], seeds, opt);
    cplx psi = 0.0;
    previous.clear();
    for (const auto& root : roots) {
      // same kinetic-action filter as the FINCO samples
      if (root.final.s_kin.imag() < c.filters.sigma) continue;
      psi += std::exp(cplx(0.0, 1.0) * total_action(root.final));
      previous.push_back(root.q_init);
    }
    if (t == 0.0) psi = c.gaussian.amplitude(xs[i]);
    r.wf.x.push_back(xs[i]);
    r.wf.psi.push_back(psi);
    r.roots_per_x.push_back(t == 0.0 ? 1 : roots.size());
  }
  r.wf.norm = r.wf.compute_norm();
  return r;
}

// ---- top level

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::vector<Comparison> comparisons;            // compare / real_contour_compare (full result)
  std::vector<Comparison> restricted;             // real_contour_compare (real-accessible subset)
  std::vector<std::size_t> branch_counts;         // branchmap
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string checkpoint_tag(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", k);
  return buf;
}

inline Metadata run_meta(const RunConfig& c, Mode m) {
  Metadata meta{{"mode", to_string(m)}, {"gamma_f", num(c.gamma_f)}};
  if (c.model.kind() != PotentialKind::FreeParticle) meta.push_back({"t_cl", num(c.t_cl())});
  return meta;
}

inline Metadata counts_meta(const SampleCounts& s, double seconds) {
  return {{"trajectories", std::to_string(s.total)},
          {"accepted", std::to_string(s.accepted)},
          {"rejected_invalid_trajectory", std::to_string(s.invalid)},
          {"rejected_kinetic_action", std::to_string(s.kinetic)},
          {"rejected_potential_divergence", std::to_string(s.potential)},
          {"rejected_noise", std::to_string(s.noise)},
          {"seconds", num(seconds)}};
}

inline Metadata join(Metadata a, const Metadata& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::vector<std::string> comparison_row(std::size_t k, const Comparison& c) {
  return {std::to_string(k), num(c.t), num(c.rel_l2), num(c.rel_linf), num(c.l2_psi), num(c.norm), num(c.norm_ref)};
}

inline const std::vector<std::string> kComparisonColumns{"checkpoint", "t", "rel_l2_density", "rel_linf_density",
                                                         "l2_psi", "norm", "norm_ref"};

}  // namespace detail

/// Runs one mode. `log` receives progress lines.
inline RunReport run(const RunConfig& c, Mode mode, const std::function<void(const std::string&)>& log = {}) {
  const auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  namespace fs = std::filesystem;
  const fs::path dir = c.output_dir;
  const auto times = c.checkpoint_times();
  const auto meta = detail::run_meta(c, mode);
  RunReport rep;

  auto emit_reference = [&](bool full) {
    say("reference: split-operator to t = " + num(times.back()));
    double edge = 0.0;
    auto refs = reference_snapshots(c, full, &edge);
    if (edge > 1e-6) rep.warnings.push_back("reference: |psi| reaches " + num(edge) + " at the grid edge");
    return refs;
  };

  switch (mode) {
    case Mode::Finco: {
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = 0; k < times.size(); ++k) {
        say("finco: checkpoint " + std::to_string(k) + ", t = " + num(times[k]));
        const auto r = finco_at(c, times[k]);
        const auto counts = r.ensemble.counts();
        const auto path = dir / ("finco_" + detail::checkpoint_tag(k) + ".txt");
        write_wavefunction(path, r.wf, c, detail::join(meta, detail::counts_meta(counts, r.ensemble.seconds)));
        rep.files.push_back(path);
        rows.push_back({std::to_string(k), num(times[k]), num(r.wf.norm), std::to_string(counts.total),
                        std::to_string(counts.accepted), num(r.ensemble.seconds)});
      }
      const auto path = dir / "summary.txt";
      write_table(path, c, meta, {"checkpoint", "t", "norm", "trajectories", "accepted", "seconds"}, rows);
      rep.files.push_back(path);
      break;
    }
    case Mode::Reference: {
      const auto refs = emit_reference(true);
      for (std::size_t k = 0; k < refs.size(); ++k) {
        const auto path = dir / ("reference_" + detail::checkpoint_tag(k) + ".txt");
        write_wavefunction(path, refs[k], c, meta);
        rep.files.push_back(path);
      }
      break;
    }
    case Mode::BranchMap: {
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = 0; k < times.size(); ++k) {
        say("branchmap: checkpoint " + std::to_string(k) + ", t = " + num(times[k]));
        const auto ens = build_ensemble(c.setup(), times[k]);
        const auto b = branch_map(ens.grid, ens.records, c.diagnostics.branch);
        const auto w = weight_map(ens.samples, ens.grid);
        const auto scars = detect_scars(w, c.diagnostics.scar);
        const std::string tag = detail::checkpoint_tag(k);
        const Metadata extra{{"t_final", num(times[k])}, {"branches", std::to_string(b.count)}};
        for (const auto& [name, map] : {std::pair<std::string, const FieldMap*>{"branchmap_", &b.map},
                                        {"weight_", &w}}) {
          const auto path = dir / (name + tag + ".txt");
          write_field_map(path, *map, c, detail::join(meta, extra));
          rep.files.push_back(path);
        }
        const auto argd_path = dir / ("argd_" + tag + ".txt");
        write_field_map(argd_path, arg_d_map(ens.records, ens.grid), c, detail::join(meta, extra));
        rep.files.push_back(argd_path);
        rep.branch_counts.push_back(b.count);
        rows.push_back({std::to_string(k), num(times[k]), std::to_string(b.count), std::to_string(scars.size())});
      }
      const auto path = dir / "branches.txt";
      write_table(path, c, meta, {"checkpoint", "t", "branches", "scar_segments"}, rows);
      rep.files.push_back(path);
      break;
    }
    case Mode::RootSearch: {
      for (std::size_t k = 0; k < times.size(); ++k) {
        say("rootsearch: checkpoint " + std::to_string(k) + ", t = " + num(times[k]));
        std::vector<cplx> seeds;
        if (times[k] > 0.0) {
          const auto ens = build_ensemble(c.setup(), times[k]);
          seeds = branch_seeds(branch_map(ens.grid, ens.records, c.diagnostics.branch));
        }
        const auto r = rootsearch_at(c, times[k], seeds);
        const auto [lo, hi] = std::minmax_element(r.roots_per_x.begin(), r.roots_per_x.end());
        std::size_t empty = 0;
        for (auto n : r.roots_per_x) empty += n == 0;
        const auto path = dir / ("rootsearch_" + detail::checkpoint_tag(k) + ".txt");
        write_wavefunction(path, r.wf, c,
                           detail::join(meta, {{"branch_seeds", std::to_string(seeds.size())},
                                               {"roots_min", std::to_string(*lo)},
                                               {"roots_max", std::to_string(*hi)},
                                               {"points_without_roots", std::to_string(empty)}}));
        if (empty > 0) rep.warnings.push_back(std::to_string(empty) + " points without roots at t = " + num(times[k]));
        rep.files.push_back(path);
      }
      break;
    }
    case Mode::Compare:
    case Mode::RealContourCompare: {
      const auto refs = emit_reference(false);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = 0; k < times.size(); ++k) {
        say(to_string(mode) + ": checkpoint " + std::to_string(k) + ", t = " + num(times[k]));
        const auto r = finco_at(c, times[k]);
        const std::string tag = detail::checkpoint_tag(k);
        const auto full = compare(r.wf, refs[k]);
        rep.comparisons.push_back(full);
        auto path = dir / ("finco_" + tag + ".txt");
        write_wavefunction(path, r.wf, c, detail::join(meta, detail::counts_meta(r.ensemble.counts(), r.ensemble.seconds)));
        rep.files.push_back(path);
        path = dir / ("reference_" + tag + ".txt");
        write_wavefunction(path, refs[k], c, meta);
        rep.files.push_back(path);
        auto row = detail::comparison_row(k, full);
        if (mode == Mode::RealContourCompare) {
          const auto subset = real_accessible(c, r.ensemble);
          auto wf = reconstruct(subset, c.window_positions(), c.gamma_f, c.workers);
          wf.t_final = times[k];
          const auto part = compare(wf, refs[k]);
          rep.restricted.push_back(part);
          path = dir / ("real_accessible_" + tag + ".txt");
          write_wavefunction(path, wf, c, detail::join(meta, detail::counts_meta(count_samples(subset), 0.0)));
          rep.files.push_back(path);
          auto extra = detail::comparison_row(k, part);
          row.insert(row.end(), extra.begin() + 2, extra.end());
        }
        rows.push_back(row);
      }
      auto cols = detail::kComparisonColumns;
      if (mode == Mode::RealContourCompare)
        for (std::size_t i = 2; i < detail::kComparisonColumns.size(); ++i)
          cols.push_back("real_" + detail::kComparisonColumns[i]);
      const auto path = dir / "errors.txt";
      write_table(path, c, meta, cols, rows);
      rep.files.push_back(path);
      break;
    }
  }
  return rep;
}

}  // namespace finco
