#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace finco {

using cplx = std::complex<double>;

/// Axis-aligned rectangle in the complex plane of initial positions.
struct Rect {
  double re_min = 0.0, re_max = 1.0;
  double im_min = 0.0, im_max = 1.0;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double area() const { return width() * height(); }
  bool contains(cplx z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

/// One quadrature cell. (ix, iy) index the cell on the lattice of its level,
/// which is 2^level times finer than the base grid in each direction.
struct GridPoint {
  cplx q{};
  double weight = 0.0;
  int level = 0;
  std::int64_t ix = 0, iy = 0;
};

class ManifoldGrid {
 public:
  ManifoldGrid() = default;

  ManifoldGrid(Rect rect, int nx, int ny) : rect_(rect), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("uniform_grid: nx and ny must be >= 1");
    if (!(rect.width() > 0.0) || !(rect.height() > 0.0))
      throw std::invalid_argument("uniform_grid: degenerate rectangle");
    points_.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) points_.push_back(make_point(0, i, j));
  }

  const Rect& rect() const noexcept { return rect_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  const std::vector<GridPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool is_uniform() const noexcept {
    return std::all_of(points_.begin(), points_.end(), [](const GridPoint& p) { return p.level == 0; });
  }

  /// Compensated (Neumaier) sum of the cell weights.
  double total_weight() const {
    double s = 0.0, c = 0.0;
    for (const auto& p : points_) {
      const double t = s + p.weight;
      c += std::abs(s) >= std::abs(p.weight) ? (s - t) + p.weight : (p.weight - t) + s;
      s = t;
    }
    return s + c;
  }

  double cell_width(int level) const { return rect_.width() / nx_ / static_cast<double>(1LL << level); }
  double cell_height(int level) const { return rect_.height() / ny_ / static_cast<double>(1LL << level); }

  GridPoint make_point(int level, std::int64_t ix, std::int64_t iy) const {
    const double w = cell_width(level), h = cell_height(level);
    GridPoint p;
    p.level = level;
    p.ix = ix;
    p.iy = iy;
    p.q = cplx(rect_.re_min + (static_cast<double>(ix) + 0.5) * w, rect_.im_min + (static_cast<double>(iy) + 0.5) * h);
    p.weight = w * h;
    return p;
  }

  /// Replaces cell `index` by its four children, appended at the end.
  void split(const std::vector<std::size_t>& indices) {
    std::vector<char> drop(points_.size(), 0);
    std::vector<GridPoint> children;
    for (auto idx : indices) {
      if (idx >= points_.size() || drop[idx]) continue;
      drop[idx] = 1;
      const auto& c = points_[idx];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) children.push_back(make_point(c.level + 1, 2 * c.ix + a, 2 * c.iy + b));
    }
    std::vector<GridPoint> next;
    next.reserve(points_.size() - indices.size() + children.size());
    for (std::size_t k = 0; k < points_.size(); ++k)
      if (!drop[k]) next.push_back(points_[k]);
    next.insert(next.end(), children.begin(), children.end());
    points_ = std::move(next);
  }

  /// Cells sharing an edge of positive length with each cell.
  std::vector<std::vector<std::size_t>> neighbors() const {
    std::unordered_map<Key, std::size_t, KeyHash> index;
    int max_level = 0;
    for (std::size_t k = 0; k < points_.size(); ++k) {
      index[{points_[k].level, points_[k].ix, points_[k].iy}] = k;
      max_level = std::max(max_level, points_[k].level);
    }
    std::vector<std::vector<std::size_t>> out(points_.size());
    const std::int64_t dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (std::size_t k = 0; k < points_.size(); ++k) {
      const auto& c = points_[k];
      for (const auto& d : dirs) {
        const std::int64_t nx = c.ix + d[0], ny = c.iy + d[1];
        if (!in_lattice(c.level, nx, ny)) continue;
        // same level or a coarser leaf covering the neighbour position
        bool found = false;
        for (int lvl = c.level; lvl >= 0 && !found; --lvl) {
          const int sh = c.level - lvl;
          auto it = index.find({lvl, nx >> sh, ny >> sh});
          if (it != index.end()) {
            out[k].push_back(it->second);
            found = true;
          }
        }
        if (found) continue;
        // otherwise finer leaves along the shared edge
        collect_finer(index, max_level, c.level, nx, ny, d, out[k]);
      }
      std::sort(out[k].begin(), out[k].end());
      out[k].erase(std::unique(out[k].begin(), out[k].end()), out[k].end());
    }
    return out;
  }

 private:
  struct Key {
    int level;
    std::int64_t ix, iy;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<std::int64_t>()(k.ix * 73856093LL ^ k.iy * 19349663LL ^ (std::int64_t{k.level} << 58));
    }
  };

  bool in_lattice(int level, std::int64_t ix, std::int64_t iy) const {
    const std::int64_t mx = static_cast<std::int64_t>(nx_) << level;
    const std::int64_t my = static_cast<std::int64_t>(ny_) << level;
    return ix >= 0 && iy >= 0 && ix < mx && iy < my;
  }

  void collect_finer(const std::unordered_map<Key, std::size_t, KeyHash>& index, int max_level, int level,
                     std::int64_t ix, std::int64_t iy, const std::int64_t* d, std::vector<std::size_t>& out) const {
    if (level >= max_level) return;
    // the two children of (ix, iy) that face back towards the origin cell
    for (int s = 0; s < 2; ++s) {
      std::int64_t cx, cy;
      if (d[0] != 0) {
        cx = 2 * ix + (d[0] > 0 ? 0 : 1);
        cy = 2 * iy + s;
      } else {
        cx = 2 * ix + s;
        cy = 2 * iy + (d[1] > 0 ? 0 : 1);
      }
      auto it = index.find({level + 1, cx, cy});
      if (it != index.end())
        out.push_back(it->second);
      else
        collect_finer(index, max_level, level + 1, cx, cy, d, out);
    }
  }

  Rect rect_{};
  int nx_ = 0, ny_ = 0;
  std::vector<GridPoint> points_;
};

/// Midpoint rule: nx * ny cell centres, each weighted by its cell area.
inline ManifoldGrid uniform_grid(Rect rect, int nx, int ny) { return ManifoldGrid(rect, nx, ny); }

/// Splits the `budget` highest-scoring cells 2x2. Ties keep index order.
inline ManifoldGrid refine(const ManifoldGrid& grid, const std::vector<double>& scores, std::size_t budget) {
  if (scores.size() != grid.size()) throw std::invalid_argument("refine: scores not aligned with grid points");
  if (budget == 0) return grid;
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(budget, order.size()));
  ManifoldGrid out = grid;
  out.split(order);
  return out;
}

/// max over edge neighbours of |v_i - v_j| / distance, the default refinement score.
inline std::vector<double> gradient_scores(const ManifoldGrid& grid, const std::vector<cplx>& values) {
  if (values.size() != grid.size()) throw std::invalid_argument("gradient_scores: values not aligned");
  const auto nb = grid.neighbors();
  std::vector<double> out(grid.size(), 0.0);
  const auto& pts = grid.points();
  for (std::size_t k = 0; k < pts.size(); ++k)
    for (auto j : nb[k]) {
      const double dist = std::abs(pts[k].q - pts[j].q);
      out[k] = std::max(out[k], std::abs(values[k] - values[j]) / dist);
    }
  return out;
}

}  // namespace finco
