#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>

#include "nessent/errors.hpp"

namespace nessent {

using cplx = std::complex<double>;

/// Entries of the 2x2 scattering matrix at fixed momentum.
struct SMatrix {
  cplx r_L, t_R, t_L, r_R;
};

struct SingleImpurity {
  double epsilon0 = 0;
  double eta = 1;
};

/// Momentum-independent transmission probability.
struct ConstantT {
  double T = 1;
};

struct Trivial {};

/// A scatterer between two semi-infinite leads. m0 is the last site of the
/// scattering region on either side; it is 0 for every model here.
class ScatteringModel {
 public:
  using Variant = std::variant<SingleImpurity, ConstantT, Trivial>;

  ScatteringModel() : v_(Trivial{}) {}
  ScatteringModel(SingleImpurity s) : v_(s) {  // NOLINT(google-explicit-constructor)
    if (!(s.eta > 0)) throw DomainError("SingleImpurity: eta must be > 0");
    if (!std::isfinite(s.epsilon0)) throw DomainError("SingleImpurity: epsilon0 must be finite");
  }
  ScatteringModel(ConstantT c) : v_(c) {  // NOLINT(google-explicit-constructor)
    if (!(c.T >= 0 && c.T <= 1)) throw DomainError("ConstantT: T must lie in [0, 1]");
  }
  ScatteringModel(Trivial t) : v_(t) {}  // NOLINT(google-explicit-constructor)

  const Variant& variant() const noexcept { return v_; }
  int m0() const noexcept { return 0; }
  bool is_trivial() const noexcept { return std::holds_alternative<Trivial>(v_); }

  std::string describe() const {
    return std::visit(
        [](const auto& m) -> std::string {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, SingleImpurity>)
            return "single_impurity(epsilon0/eta=" + std::to_string(m.epsilon0 / m.eta) + ")";
          else if constexpr (std::is_same_v<M, ConstantT>)
            return "constant_t(T=" + std::to_string(m.T) + ")";
          else
            return "trivial";
        },
        v_);
  }

 private:
  Variant v_;
};

inline void require_momentum(double k, const char* who) {
  if (!(k > 0 && k < std::numbers::pi))
    throw DomainError(std::string(who) + ": momentum must lie in (0, pi)");
}

/// S-matrix at 0 < k < pi.
///
/// For the impurity the amplitudes solve the lattice equations at site 0:
/// t = 1 / (1 + i eps0 / (2 eta sin k)), r = t - 1, the same from both sides.
inline SMatrix s_matrix(const ScatteringModel& model, double k) {
  require_momentum(k, "s_matrix");
  return std::visit(
      [k](const auto& m) -> SMatrix {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SingleImpurity>) {
          const cplx t = 1.0 / cplx(1.0, m.epsilon0 / (2 * m.eta * std::sin(k)));
          const cplx r = t - 1.0;
          return {r, t, t, r};
        } else if constexpr (std::is_same_v<M, ConstantT>) {
          const cplx t(std::sqrt(m.T), 0);
          const cplx r(0, std::sqrt(1 - m.T));
          return {r, t, t, r};
        } else {
          return {0.0, 1.0, 1.0, 0.0};
        }
      },
      model.variant());
}

inline double transmission(const ScatteringModel& model, double k) {
  require_momentum(k, "transmission");
  return std::visit(
      [k](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SingleImpurity>) {
          const double s = std::sin(k), e = m.epsilon0 / (2 * m.eta);
          return s * s / (s * s + e * e);
        } else if constexpr (std::is_same_v<M, ConstantT>) {
          return m.T;
        } else {
          return 1.0;
        }
      },
      model.variant());
}

inline double reflection(const ScatteringModel& model, double k) {
  return 1.0 - transmission(model, k);
}

/// Scattering-state amplitude at site m for signed momentum k.
///
/// k > 0 is incoming from the left lead, k < 0 from the right lead; |m| > m0.
inline cplx wavefunction(const ScatteringModel& model, double k, long m) {
  if (!(k != 0 && std::abs(k) < std::numbers::pi))
    throw DomainError("wavefunction: momentum must lie in (-pi, 0) or (0, pi)");
  const long m0 = model.m0();
  if (std::abs(m) <= m0) throw DomainError("wavefunction: site lies inside the scattering region");
  const SMatrix s = s_matrix(model, std::abs(k));
  const double x = static_cast<double>(m);
  const cplx in = std::polar(1.0, k * x);
  if (k > 0) {
    if (m > m0) return s.t_L * in;
    return in + s.r_L * std::polar(1.0, -k * x);
  }
  if (m < -m0) return s.t_R * in;
  return in + s.r_R * std::polar(1.0, -k * x);
}

/// Fermi momenta of the left and right reservoirs.
struct BiasState {
  double k_FL = std::numbers::pi / 2;
  double k_FR = std::numbers::pi / 2;

  BiasState() = default;
  BiasState(double kfl, double kfr) : k_FL(kfl), k_FR(kfr) {
    if (!(kfl > 0 && kfl < std::numbers::pi) || !(kfr > 0 && kfr < std::numbers::pi))
      throw DomainError("BiasState: Fermi momenta must lie in (0, pi)");
  }
  double k_minus() const noexcept { return std::min(k_FL, k_FR); }
  double k_plus() const noexcept { return std::max(k_FL, k_FR); }
};

}  // namespace nessent
