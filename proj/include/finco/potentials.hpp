#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <variant>

namespace finco {

using cplx = std::complex<double>;

/// V(x) = D[(1 - e^{-beta x})^2 - 1], minimum -D at x = 0.
struct Morse {
  double depth = 10.25;  // D, hartree
  double beta = 0.2209;  // bohr^-1
};

/// V(x) = omega^2 x^2 / 2.
struct Harmonic {
  double omega = 1.0;
};

struct FreeParticle {};

enum class PotentialKind { Morse, Harmonic, FreeParticle };

/// V and its first two derivatives at one complex point.
struct PotentialDerivs {
  cplx v0{}, v1{}, v2{};
};

/// Analytic one-dimensional potential, evaluable anywhere in the complex plane.
class PotentialModel {
 public:
  using Params = std::variant<Morse, Harmonic, FreeParticle>;

  PotentialModel() = default;
  PotentialModel(const Params& p) : params_(p) { validate(); }  // NOLINT(google-explicit-constructor)

  PotentialKind kind() const noexcept {
    return static_cast<PotentialKind>(params_.index());
  }
  const Params& params() const noexcept { return params_; }

  /// Closed-form V, V', V'' without any input checks; the trajectory stepper
  /// checks finiteness of the integrated state instead.
  PotentialDerivs derivs(cplx q) const noexcept {
    return std::visit([q](const auto& m) { return eval(m, q); }, params_);
  }

  cplx value(cplx q) const noexcept { return derivs(q).v0; }

  /// Returns [V_0, ..., V_{n_max}].
  std::array<cplx, 3> eval_derivs(cplx q, int n_max) const {
    if (n_max < 0 || n_max > 2) throw std::domain_error("eval_derivs: n_max must be in 0..2");
    if (!std::isfinite(q.real()) || !std::isfinite(q.imag()))
      throw std::domain_error("eval_derivs: non-finite position");
    const auto d = derivs(q);
    std::array<cplx, 3> out{d.v0, d.v1, d.v2};
    for (int n = n_max + 1; n < 3; ++n) out[n] = 0.0;
    return out;
  }

 private:
  static PotentialDerivs eval(const Morse& m, cplx q) noexcept {
    // D[(-2b)^n u^2 - 2(-b)^n u] with u = e^{-b q}
    const cplx u = std::exp(-m.beta * q);
    const cplx u2 = u * u;
    const double b = m.beta;
    return {m.depth * (u2 - 2.0 * u), m.depth * (-2.0 * b * u2 + 2.0 * b * u),
            m.depth * (4.0 * b * b * u2 - 2.0 * b * b * u)};
  }
  static PotentialDerivs eval(const Harmonic& h, cplx q) noexcept {
    const double w2 = h.omega * h.omega;
    return {0.5 * w2 * q * q, w2 * q, cplx(w2, 0.0)};
  }
  static PotentialDerivs eval(const FreeParticle&, cplx) noexcept { return {}; }

  void validate() const {
    if (const auto* m = std::get_if<Morse>(&params_)) {
      if (!(m->depth > 0.0) || !(m->beta > 0.0))
        throw std::invalid_argument("Morse potential needs depth > 0 and beta > 0");
    } else if (const auto* h = std::get_if<Harmonic>(&params_)) {
      if (!(h->omega > 0.0)) throw std::invalid_argument("harmonic potential needs omega > 0");
    }
  }

  Params params_{FreeParticle{}};
};

inline std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::Morse: return "morse";
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::FreeParticle: return "free";
  }
  return "?";
}

}  // namespace finco
