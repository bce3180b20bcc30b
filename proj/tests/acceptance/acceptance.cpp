// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers
// on indented lines above it. Always exits 0 once every criterion has been
// evaluated; a FAIL is a result, not a crash.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "../oracles.hpp"
#include "finco/driver.hpp"

using namespace finco;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
  std::va_list ap;
  va_start(ap, fmt);
  std::printf("  ");
  std::vprintf(fmt, ap);
  std::printf("\n");
  std::fflush(stdout);
  va_end(ap);
}

double l2_psi(const WavefunctionGrid& wf, const std::function<cplx(double)>& exact) {
  double s = 0.0;
  for (std::size_t i = 0; i < wf.x.size(); ++i) s += std::norm(wf.psi[i] - exact(wf.x[i]));
  return std::sqrt(s * wf.dx());
}

/// Reference density snapshots at every requested multiple of T_cl.
class References {
 public:
  explicit References(const RunConfig& c, std::vector<double> fracs) : c_(c) {
    std::vector<double> t;
    for (double f : fracs) t.push_back(f * c.t_cl());
    const auto t0 = Clock::now();
    const auto run = propagate_exact(c.gaussian, c.model, c.reference, t.back(), t);
    const auto x = c.window_positions();
    for (std::size_t k = 0; k < fracs.size(); ++k) snaps_[fracs[k]] = restrict_to(run.snapshots[k], x);
    note("reference to %.4g T_cl: %.1f s, max edge |psi| %.2e", fracs.back(), seconds_since(t0), run.max_edge_amplitude);
  }
  const WavefunctionGrid& at(double frac) const { return snaps_.at(frac); }

 private:
  RunConfig c_;
  std::map<double, WavefunctionGrid> snaps_;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// -- 1
void identity_anchor() {
  const auto t0 = Clock::now();
  const auto c = preset_identity();
  const auto r = finco_at(c, 0.0);
  double linf = 0.0;
  for (std::size_t i = 0; i < r.wf.x.size(); ++i)
    linf = std::max(linf, std::abs(r.wf.psi[i] - c.gaussian.amplitude(r.wf.x[i])));
  const double secs = seconds_since(t0);
  note("t = 0, %dx%d grid: L_inf %.3e, norm %.10f, %.2f s", c.nx, c.ny, linf, r.wf.norm, secs);
  verdict(1, linf < 1e-3 && std::abs(r.wf.norm - 1.0) < 1e-3 && secs < 10.0,
          "identity anchor (L_inf < 1e-3, |norm - 1| < 1e-3, < 10 s)");
}

// -- 2
void harmonic_exactness() {
  const auto t0 = Clock::now();
  auto c = preset_harmonic_check();
  c.gamma_f = c.gaussian.gamma0;
  bool ok = true;
  for (double t : {std::numbers::pi / 2, 2 * std::numbers::pi}) {
    const auto r = finco_at(c, t);
    const double e = l2_psi(r.wf, [&](double x) { return oracle::harmonic_coherent(x, t, c.gaussian.q0, c.gaussian.p0); });
    note("harmonic t = %.6f: L2 error %.3e", t, e);
    ok = ok && e < 1e-3;
  }
  const double secs = seconds_since(t0);
  note("%.2f s", secs);
  verdict(2, ok && secs < 30.0, "harmonic exactness at pi/2 and 2 pi (L2 < 1e-3, < 30 s)");
}

// -- 3
bool nodes_match(const WavefunctionGrid& a, const WavefunctionGrid& ref, double tol) {
  const auto na = density_nodes(a), nr = density_nodes(ref);
  std::string sa, sr;
  for (double v : na) sa += fmt(" %.3f", v);
  for (double v : nr) sr += fmt(" %.3f", v);
  note("  nodes reference:%s", sr.c_str());
  note("  nodes FINCO:    %s", sa.c_str());
  if (na.size() != nr.size()) return false;
  for (std::size_t i = 0; i < na.size(); ++i)
    if (std::abs(na[i] - nr[i]) > tol + 1e-12) return false;
  return true;
}

void morse_short_time(const References& refs) {
  const RunConfig c;
  const double dx = c.reference.dx();
  bool ok = true;
  for (double frac : {0.5, 1.0}) {
    const auto t0 = Clock::now();
    const auto r = finco_at(c, frac * c.t_cl());
    const auto cmp = compare(r.wf, refs.at(frac));
    const auto counts = r.ensemble.counts();
    note("%.1f T_cl: rel L2 of |psi|^2 %.4f, norm %.4f, %zu trajectories (%zu accepted), %.1f s", frac, cmp.rel_l2,
         cmp.norm, counts.total, counts.accepted, seconds_since(t0));
    const bool nodes = nodes_match(r.wf, refs.at(frac), dx);
    note("  nodes within one grid spacing (%.4f): %s", dx, nodes ? "yes" : "no");
    ok = ok && cmp.rel_l2 < 0.05 && nodes && counts.total >= 20000;

    auto real = c;
    real.contour.family = ContourFamily::Real;
    const auto rr = finco_at(real, frac * c.t_cl());
    note("  real contour for comparison: rel L2 %.4f, norm %.4f", compare(rr.wf, refs.at(frac)).rel_l2,
         rr.wf.norm);
  }
  verdict(3, ok, "Morse 0.5 and 1 T_cl (rel L2 of |psi|^2 < 5%, nodes within one grid spacing, >= 20000 trajectories)");
}

// -- 4
void morse_long_time(const References& refs) {
  const auto c = preset_morse_revival();
  bool ok = true;
  for (double frac : {19.0, 20.0}) {
    const auto t0 = Clock::now();
    const auto r = finco_at(c, frac * c.t_cl());
    const auto& ref = refs.at(frac);
    const auto cmp = compare(r.wf, ref);
    note("%.0f T_cl: %zu trajectories, rel L2 %.4f, norm %.4f, %.1f s", frac, r.ensemble.counts().total, cmp.rel_l2,
         cmp.norm, seconds_since(t0));
    if (frac == 19.0) {
      const auto na = density_nodes(r.wf), nr = density_nodes(ref);
      note("  nodes where |psi|^2 > 5%% of max: reference %zu, FINCO %zu", nr.size(), na.size());
      ok = ok && na.size() == nr.size();
    } else {
      const auto da = r.wf.density(), dr = ref.density();
      const auto ia = static_cast<std::size_t>(std::max_element(da.begin(), da.end()) - da.begin());
      const auto ir = static_cast<std::size_t>(std::max_element(dr.begin(), dr.end()) - dr.begin());
      note("  dominant peak: reference %.3f bohr height %.4f, FINCO %.3f bohr height %.4f", ref.x[ir], dr[ir],
           r.wf.x[ia], da[ia]);
      ok = ok && std::abs(ref.x[ir] - r.wf.x[ia]) < 0.5 && std::abs(da[ia] - dr[ir]) < 0.25 * dr[ir];
    }
  }
  verdict(4, ok, "Morse 19 T_cl node count and 20 T_cl dominant peak (0.5 bohr, 25%)");
}

// -- 5
void branch_counts() {
  const RunConfig c;
  std::map<double, std::size_t> n;
  for (double frac : {3.0, 20.0}) {
    const auto t0 = Clock::now();
    const auto ens = build_ensemble(c.setup(), frac * c.t_cl());
    n[frac] = branch_map(ens.grid, ens.records, c.diagnostics.branch).count;
    note("%.0f T_cl: %zu branches (|Im q(t)| < %.3g, >= %zu points), %.1f s", frac, n[frac],
         c.diagnostics.branch.threshold, c.diagnostics.branch.min_size, seconds_since(t0));
  }
  verdict(5, n[3.0] == 11 && n[20.0] >= 94 && n[20.0] <= 114, "branch counts (11 at 3 T_cl, 104 +- 10 at 20 T_cl)");
}

// -- 6
void classical_period_check() {
  const RunConfig c;
  const double t_cl = c.t_cl();
  // Newton on p(t) = 0 for the return to the outer turning point, dp/dt = -V'(q)
  const auto s0 = init_from_gaussian(c.gaussian, c.gaussian.q0, c.gamma_f);
  PropagateOptions opt;
  opt.stepper = c.stepper;
  double t = 12.5;
  for (int it = 0; it < 30; ++it) {
    const auto f = propagate(s0, make_contour(ContourFamily::Real, t), c.model, opt).final;
    const double step = f.p.real() / -c.model.derivs(f.q).v1.real();
    t -= step;
    if (std::abs(step) < 1e-12) break;
  }
  note("T_cl from the period relation %.10f, trajectory return time %.10f", t_cl, t);
  verdict(6, t_cl >= 12.87 && t_cl <= 12.89 && std::abs(t - t_cl) < 1e-3, "classical period in [12.87, 12.89], return time within 1e-3");
}

// -- 7
bool timed(const char* name, const std::function<std::pair<double, double>()>& f) {
  const auto t0 = Clock::now();
  const auto [value, limit] = f();
  const double secs = seconds_since(t0);
  const bool ok = value < limit && secs < 60.0;
  note("%-44s %.3e (< %.0e) %6.1f s  %s", name, value, limit, secs, ok ? "ok" : "FAILED");
  return ok;
}

void property_suite() {
  const RunConfig c;
  const auto& model = c.model;
  const auto& g = c.gaussian;
  const double t_cl = c.t_cl();
  PropagateOptions opt;
  opt.stepper = c.stepper;
  auto run = [&](cplx q0, double t) {
    return propagate(init_from_gaussian(g, q0, c.gamma_f), make_contour(ContourFamily::Real, t), model, opt).final;
  };
  bool ok = true;

  ok &= timed("monodromy |det M - 1| over 3 T_cl", [&] {
    double worst = 0.0;
    for (cplx q0 : {cplx(9.342, 0.0), cplx(9.6, 0.3), cplx(9.0, -0.4)})
      worst = std::max(worst, std::abs(run(q0, 3.0 * t_cl).m.det() - 1.0));
    return std::pair{worst, 1e-8};
  });

  ok &= timed("Riccati S2 vs P_z/Z", [&] {
    auto rhs = [](const std::array<cplx, 3>& y) {
      const auto v = oracle::morse(y[0]);
      return std::array<cplx, 3>{y[1], -v[1], -y[2] * y[2] - v[2]};
    };
    double worst = 0.0;
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
      const auto direct = oracle::rk4<3>({g.q0, g.p0, cplx(0.0, 2.0 * g.gamma0)}, frac * t_cl, 20000, rhs);
      const auto f = run(g.q0, frac * t_cl);
      worst = std::max(worst, std::abs(f.s2() - direct[2]) / std::max(1.0, std::abs(direct[2])));
    }
    return std::pair{worst, 1e-6};
  });

  ok &= timed("quantum action (i/2) ln Z vs quadrature", [&] {
    const cplx q0(9.9, 0.35);
    const auto s0 = init_from_gaussian(g, q0, c.gamma_f);
    auto rhs = [](const std::array<cplx, 5>& y) {
      const auto v = oracle::morse(y[0]);
      return std::array<cplx, 5>{y[1], -v[1], -v[2] * y[3], y[2], cplx(0.0, 0.5) * y[2] / y[3]};
    };
    const auto quad = oracle::rk4<5>({s0.q, s0.p, s0.pz, s0.z, 0.0}, t_cl, 40000, rhs);
    return std::pair{std::abs(quad[4] - run(q0, t_cl).s0_qm()), 1e-6};
  });

  ok &= timed("|J| vs finite-difference Jacobian (relative)", [&] {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ur(8.5, 10.5), ui(-0.6, 0.6);
    auto hh_at = [&](cplx q) {
      const auto f = run(q, t_cl);
      return hh_transform(f.q, f.p, c.gamma_f);
    };
    double worst = 0.0;
    for (int k = 0; k < 6; ++k) {
      const cplx q(ur(rng), ui(rng));
      const double j = jacobian_magnitude(run(q, t_cl), cplx(0.0, 2.0 * g.gamma0), c.gamma_f);
      const double h = 1e-5;
      const auto xp = hh_at(q + h), xm = hh_at(q - h), yp = hh_at(q + cplx(0, h)), ym = hh_at(q - cplx(0, h));
      const double fd = std::abs((xp.qf - xm.qf) * (yp.pf - ym.pf) - (yp.qf - ym.qf) * (xp.pf - xm.pf)) / (4 * h * h);
      worst = std::max(worst, std::abs(fd - j) / j);
    }
    return std::pair{worst, 1e-4};
  });

  ok &= timed("HH round trip (count of inexact cases)", [&] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    int bad = 0;
    for (double gf : {0.25, 0.5, 1.0, 2.0})
      for (int k = 0; k < 2000; ++k) {
        const cplx q(u(rng), u(rng)), p(u(rng), u(rng));
        const auto h = hh_transform(q, p, gf);
        bad += (2.0 * gf * q - cplx(0.0, 1.0) * p) != (2.0 * gf * h.qf - cplx(0.0, 1.0) * h.pf);
      }
    return std::pair{static_cast<double>(bad), 0.5};
  });

  ok &= timed("caustic weight: deviation from |D|^{3/2} law", [&] {
    // synthetic states with D = s running through zero along the real axis
    double ref = -1.0, worst = 0.0;
    for (int k = -200; k <= 200; ++k) {
      const double s = k / 200.0;
      TrajectoryState st;
      st.q = 9.0;
      st.p = 0.3;
      st.z = 1.0;
      st.pz = cplx(0.0, -1.0) * (2.0 * c.gamma_f - s);
      st.arg_d = s < 0.0 ? std::numbers::pi : 0.0;
      const auto w = sample_weight(st, g, c.gamma_f, 1.0);
      if (k == 0) {
        worst = std::max(worst, std::abs(w.weight));
        continue;
      }
      const double scaled = std::abs(w.weight) / std::pow(std::abs(s), 1.5);
      if (ref < 0.0) ref = scaled;
      worst = std::max(worst, std::abs(scaled / ref - 1.0));
    }
    return std::pair{worst, 1e-10};
  });

  ok &= timed("free particle: contour dependence", [&] {
    const InitialGaussian fg{0.5, 0.0, 1.0};
    const PotentialModel free{FreeParticle{}};
    const auto s0 = init_from_gaussian(fg, cplx(0.4, -0.7), 0.5);
    const auto a = propagate(s0, make_contour(ContourFamily::Real, 5.0), free, opt).final;
    double worst = 0.0;
    for (double depth : {0.2, 0.4, 1.5}) {
      const auto b = propagate(s0, make_contour(ContourFamily::RectangularDip, 5.0, depth), free, opt).final;
      for (double d : {std::abs(a.q - b.q), std::abs(a.p - b.p), std::abs(a.s0_cl - b.s0_cl), std::abs(a.z - b.z),
                       std::abs(a.pz - b.pz), std::abs(a.arg_d - b.arg_d)})
        worst = std::max(worst, d);
    }
    return std::pair{worst, 1e-10};
  });

  ok &= timed("reference norm drift over 20 T_cl", [&] {
    const auto r = propagate_exact(g, model, c.reference, 20.0 * t_cl, {0.0, 20.0 * t_cl});
    return std::pair{std::abs(r.snapshots[1].compute_norm() - r.snapshots[0].compute_norm()), 1e-10};
  });

  verdict(7, ok, "property suite (each property < 60 s)");
}

// -- 8
void real_contour_degradation(const References& refs) {
  const RunConfig c;
  const auto t0 = Clock::now();
  const auto r = finco_at(c, 4.0 * c.t_cl());
  const auto full = compare(r.wf, refs.at(4.0));
  const auto subset = real_accessible(c, r.ensemble);
  const auto wf = reconstruct(subset, c.window_positions(), c.gamma_f, c.workers);
  const auto part = compare(wf, refs.at(4.0));
  const auto counts = count_samples(subset);
  note("4 T_cl: full rel L2 %.4f (norm %.4f); real-accessible rel L2 %.4f (norm %.4f, %zu of %zu samples kept), %.1f s",
       full.rel_l2, full.norm, part.rel_l2, part.norm, counts.accepted, r.ensemble.counts().accepted,
       seconds_since(t0));
  note("ratio %.2f", part.rel_l2 / full.rel_l2);
  verdict(8, part.rel_l2 >= 3.0 * full.rel_l2, "real-contour degradation at 4 T_cl (error ratio >= 3)");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  identity_anchor();
  harmonic_exactness();
  const References refs(RunConfig{}, {0.5, 1.0, 4.0, 19.0, 20.0});
  morse_short_time(refs);
  classical_period_check();
  property_suite();
  real_contour_degradation(refs);
  branch_counts();
  morse_long_time(refs);
  std::printf("%d of 8 criteria failed, %.0f s total\n", failures, seconds_since(t0));
  return 0;
}
