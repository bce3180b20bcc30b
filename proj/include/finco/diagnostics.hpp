#pragma once

// Structure of the initial-coordinate plane: branch maps, weight maps, caustics
// and phase-scar lines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "finco/dynamics.hpp"
#include "finco/finco.hpp"
#include "finco/sampling.hpp"

namespace finco {

enum class FieldKind { ImFinalQ, WeightMagPhase, JacMag, ArgD };

inline std::string to_string(FieldKind k) {
  switch (k) {
    case FieldKind::ImFinalQ: return "im_final_q";
    case FieldKind::WeightMagPhase: return "weight";
    case FieldKind::JacMag: return "jac_mag";
    case FieldKind::ArgD: return "arg_d";
  }
  return "?";
}

/// Per-point scalar over the manifold grid. Real fields use the real part.
struct FieldMap {
  ManifoldGrid grid;
  std::vector<cplx> values;
  FieldKind kind = FieldKind::ImFinalQ;
};

struct BranchOptions {
  double threshold = 0.05;
  std::size_t min_size = 5;
};

struct BranchResult {
  FieldMap map;
  std::size_t count = 0;
  std::vector<std::vector<std::size_t>> components;  // counted ones, by first index
};

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

inline void check_aligned(const ManifoldGrid& grid, std::size_t n) {
  if (grid.size() != n) throw std::invalid_argument("diagnostics: values not aligned with grid points");
}

}  // namespace detail

/// Connected components of the mask under edge adjacency, in order of their
/// smallest member.
inline std::vector<std::vector<std::size_t>> connected_components(const ManifoldGrid& grid,
                                                                  const std::vector<char>& mask) {
  detail::check_aligned(grid, mask.size());
  const auto nb = grid.neighbors();
  detail::UnionFind uf(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k])
      for (auto j : nb[k])
        if (mask[j]) uf.unite(k, j);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k]) groups[uf.find(k)].push_back(k);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

/// |Im q(t)| per initial point and the number of sizeable components of
/// the set |Im q(t)| < threshold. Invalid trajectories never belong to a branch.
inline BranchResult branch_map(const ManifoldGrid& grid, const std::vector<TrajectoryRecord>& records,
                               const BranchOptions& opt = {}) {
  detail::check_aligned(grid, records.size());
  BranchResult out;
  out.map.grid = grid;
  out.map.kind = FieldKind::ImFinalQ;
  out.map.values.resize(records.size());
  std::vector<char> mask(records.size(), 0);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& f = records[k].final;
    const double v = f.valid() ? std::abs(f.q.imag()) : std::numeric_limits<double>::infinity();
    out.map.values[k] = v;
    mask[k] = v < opt.threshold;
  }
  for (auto& c : connected_components(grid, mask))
    if (c.size() >= opt.min_size) out.components.push_back(std::move(c));
  out.count = out.components.size();
  return out;
}

/// One seed per counted branch: the member with the smallest |Im q(t)|.
inline std::vector<cplx> branch_seeds(const BranchResult& b) {
  std::vector<cplx> seeds;
  for (const auto& c : b.components) {
    auto best = *std::min_element(c.begin(), c.end(), [&](std::size_t i, std::size_t j) {
      return b.map.values[i].real() < b.map.values[j].real();
    });
    seeds.push_back(b.map.grid.points()[best].q);
  }
  return seeds;
}

/// |J| times the overlap per point (no quadrature weight); rejected samples are 0.
inline FieldMap weight_map(const std::vector<FincoSample>& samples, const ManifoldGrid& grid) {
  detail::check_aligned(grid, samples.size());
  FieldMap m{grid, std::vector<cplx>(samples.size()), FieldKind::WeightMagPhase};
  for (std::size_t k = 0; k < samples.size(); ++k) m.values[k] = samples[k].valid ? samples[k].contribution : 0.0;
  return m;
}

inline FieldMap jacobian_map(const std::vector<FincoSample>& samples, const ManifoldGrid& grid) {
  detail::check_aligned(grid, samples.size());
  FieldMap m{grid, std::vector<cplx>(samples.size()), FieldKind::JacMag};
  for (std::size_t k = 0; k < samples.size(); ++k) m.values[k] = samples[k].jac_mag;
  return m;
}

inline FieldMap arg_d_map(const std::vector<TrajectoryRecord>& records, const ManifoldGrid& grid) {
  detail::check_aligned(grid, records.size());
  FieldMap m{grid, std::vector<cplx>(records.size()), FieldKind::ArgD};
  for (std::size_t k = 0; k < records.size(); ++k) m.values[k] = records[k].final.arg_d;
  return m;
}

/// Grid points where |D| is a local minimum over edge neighbours and below threshold.
inline std::vector<std::size_t> find_caustics(const ManifoldGrid& grid, const std::vector<TrajectoryRecord>& records,
                                              double gamma_f, double threshold = 1e-3) {
  detail::check_aligned(grid, records.size());
  std::vector<double> mag(records.size(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < records.size(); ++k)
    if (records[k].final.valid()) mag[k] = std::abs(records[k].final.d(gamma_f));
  const auto nb = grid.neighbors();
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    if (!(mag[k] < threshold)) continue;
    bool is_min = true;
    for (auto j : nb[k]) is_min = is_min && mag[k] <= mag[j];
    if (is_min) out.push_back(k);
  }
  return out;
}

/// Newton search for a zero of an analytic function of q(t0), with a centred
/// difference derivative. Returns the last iterate.
inline cplx locate_zero(const std::function<cplx(cplx)>& f, cplx seed, double tol = 1e-12, int max_iter = 50,
                        double h = 1e-6) {
  cplx z = seed;
  for (int it = 0; it < max_iter; ++it) {
    const cplx v = f(z);
    if (std::abs(v) < tol) break;
    const cplx dv = (f(z + h) - f(z - h)) / (2.0 * h);
    if (dv == cplx(0.0)) break;
    z -= v / dv;
  }
  return z;
}

/// Grid edge between two cells, with the dual segment (shared cell boundary)
/// in rectangle coordinates.
struct ScarEdge {
  std::size_t a = 0, b = 0;
  double jump = 0.0;  // residual phase difference after trend removal
  cplx from{}, to{};
};

struct ScarSegment {
  std::vector<ScarEdge> edges;
  std::vector<cplx> ends;  // dual-segment vertices used by exactly one edge

  double length() const {
    double s = 0.0;
    for (const auto& e : edges) s += std::abs(e.to - e.from);
    return s;
  }
};

struct ScarOptions {
  double threshold = std::numbers::pi / 2;
  double min_magnitude = 0.0;  // complex fields: ignore edges touching smaller |value|
};

namespace detail {

inline double wrap(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

}  // namespace detail

/// Edges whose phase difference exceeds the threshold after subtracting the
/// local trend, estimated from the collinear edges next to it.
/// Complex fields are compared through arg(v_b / v_a); ArgD fields through the
/// raw difference of the stored phase. Touching edges are chained into segments.
inline std::vector<ScarSegment> detect_scars(const FieldMap& map, const ScarOptions& opt = {}) {
  detail::check_aligned(map.grid, map.values.size());
  const auto& pts = map.grid.points();
  const bool raw = map.kind == FieldKind::ArgD || map.kind == FieldKind::JacMag || map.kind == FieldKind::ImFinalQ;
  const auto nb = map.grid.neighbors();

  auto diff = [&](std::size_t a, std::size_t b) {
    if (raw) return map.values[b].real() - map.values[a].real();
    return std::arg(map.values[b] / map.values[a]);
  };
  auto usable = [&](std::size_t a) {
    const double m = std::abs(map.values[a]);
    return std::isfinite(m) && (raw || m > opt.min_magnitude);
  };

  // lookup of the neighbour in a given direction, for same-level cells only
  const auto& g = map.grid;
  auto step = [&](std::size_t k, double dx, double dy) -> std::ptrdiff_t {
    const auto& c = pts[k];
    const cplx target = c.q + cplx(dx * g.cell_width(c.level), dy * g.cell_height(c.level));
    for (auto j : nb[k])
      if (std::abs(pts[j].q - target) < 1e-9 * (1.0 + std::abs(target))) return static_cast<std::ptrdiff_t>(j);
    return -1;
  };

  std::vector<ScarEdge> flagged;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    if (!usable(a)) continue;
    for (auto b : nb[a]) {
      if (b <= a || !usable(b)) continue;
      const cplx sep = pts[b].q - pts[a].q;
      const bool horizontal = std::abs(sep.real()) > std::abs(sep.imag());
      const double sx = horizontal ? (sep.real() > 0 ? 1.0 : -1.0) : 0.0;
      const double sy = horizontal ? 0.0 : (sep.imag() > 0 ? 1.0 : -1.0);
      const double d = diff(a, b);
      // trend from the collinear edges just before a and after b; when they
      // disagree the smaller one is taken, so a jump never sets the trend
      std::vector<double> nd;
      auto add = [&](std::ptrdiff_t u, std::ptrdiff_t v) {
        if (u < 0 || v < 0 || !usable(static_cast<std::size_t>(u)) || !usable(static_cast<std::size_t>(v))) return;
        nd.push_back(diff(static_cast<std::size_t>(u), static_cast<std::size_t>(v)));
      };
      add(step(a, -sx, -sy), static_cast<std::ptrdiff_t>(a));
      add(static_cast<std::ptrdiff_t>(b), step(b, sx, sy));
      double t = 0.0;
      if (nd.size() == 1) t = nd[0];
      if (nd.size() == 2) {
        const double gap = raw ? nd[0] - nd[1] : detail::wrap(nd[0] - nd[1]);
        if (std::abs(gap) <= opt.threshold) t = raw ? 0.5 * (nd[0] + nd[1]) : nd[1] + 0.5 * gap;
        else t = std::abs(nd[0]) < std::abs(nd[1]) ? nd[0] : nd[1];
      }
      const double resid = raw ? d - t : detail::wrap(d - t);
      if (std::abs(resid) <= opt.threshold) continue;

      // dual segment: the shared boundary of the two cells
      const auto& pa = pts[a];
      const auto& pb = pts[b];
      ScarEdge e{a, b, resid, {}, {}};
      if (horizontal) {
        const double x = pa.q.real() + 0.5 * sx * g.cell_width(pa.level);
        const double y0 = std::max(pa.q.imag() - 0.5 * g.cell_height(pa.level), pb.q.imag() - 0.5 * g.cell_height(pb.level));
        const double y1 = std::min(pa.q.imag() + 0.5 * g.cell_height(pa.level), pb.q.imag() + 0.5 * g.cell_height(pb.level));
        e.from = cplx(x, y0);
        e.to = cplx(x, y1);
      } else {
        const double y = pa.q.imag() + 0.5 * sy * g.cell_height(pa.level);
        const double x0 = std::max(pa.q.real() - 0.5 * g.cell_width(pa.level), pb.q.real() - 0.5 * g.cell_width(pb.level));
        const double x1 = std::min(pa.q.real() + 0.5 * g.cell_width(pa.level), pb.q.real() + 0.5 * g.cell_width(pb.level));
        e.from = cplx(x0, y);
        e.to = cplx(x1, y);
      }
      flagged.push_back(e);
    }
  }

  // chain edges sharing a dual vertex
  const double snap = 1e-6 * std::min(g.cell_width(0), g.cell_height(0));
  auto key = [&](cplx z) {
    return std::pair<std::int64_t, std::int64_t>(std::llround(z.real() / snap), std::llround(z.imag() / snap));
  };
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> at;
  for (std::size_t i = 0; i < flagged.size(); ++i) {
    at[key(flagged[i].from)].push_back(i);
    at[key(flagged[i].to)].push_back(i);
  }
  detail::UnionFind uf(flagged.size());
  for (const auto& [k, list] : at)
    for (std::size_t i = 1; i < list.size(); ++i) uf.unite(list[0], list[i]);

  std::map<std::size_t, ScarSegment> segs;
  for (std::size_t i = 0; i < flagged.size(); ++i) segs[uf.find(i)].edges.push_back(flagged[i]);
  std::vector<ScarSegment> out;
  for (auto& [root, s] : segs) {
    std::map<std::pair<std::int64_t, std::int64_t>, std::pair<int, cplx>> deg;
    for (const auto& e : s.edges) {
      auto& u = deg[key(e.from)];
      ++u.first;
      u.second = e.from;
      auto& v = deg[key(e.to)];
      ++v.first;
      v.second = e.to;
    }
    for (const auto& [k, dv] : deg)
      if (dv.first == 1) s.ends.push_back(dv.second);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace finco
