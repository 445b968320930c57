#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nessent/scattering.hpp"

using namespace nessent;
using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<ScatteringModel> models() {
  return {SingleImpurity{0, 1}, SingleImpurity{1, 1}, SingleImpurity{2, 1}, SingleImpurity{-3, 0.7},
          ConstantT{0.3}, ConstantT{0.5}, ConstantT{1}, Trivial{}};
}

}  // namespace

TEST(SMatrix, UnitarityOnGrid) {
  for (const auto& m : models())
    for (int i = 1; i < 1000; ++i) {
      const double k = pi * i / 1000;
      const SMatrix s = s_matrix(m, k);
      // S = [[r_L, t_R], [t_L, r_R]]
      const cd a = std::norm(s.r_L) + std::norm(s.t_L);
      const cd b = std::norm(s.t_R) + std::norm(s.r_R);
      const cd c = std::conj(s.r_L) * s.t_R + std::conj(s.t_L) * s.r_R;
      EXPECT_NEAR(a.real(), 1, 1e-12);
      EXPECT_NEAR(b.real(), 1, 1e-12);
      EXPECT_LT(std::abs(c), 1e-12);
      EXPECT_LT(std::abs(s.t_L - s.t_R), 1e-15);
      EXPECT_LT(std::abs(s.t_L * std::conj(s.r_L) + std::conj(s.t_R) * s.r_R), 1e-12);
    }
}

TEST(SMatrix, ImpurityTransmissionValues) {
  EXPECT_NEAR(transmission(SingleImpurity{2, 1}, pi / 2), 0.5, 1e-15);
  EXPECT_NEAR(transmission(SingleImpurity{1, 1}, pi / 2), 0.8, 1e-15);
  const SMatrix s = s_matrix(SingleImpurity{0, 1}, 1.1);
  EXPECT_LT(std::abs(s.t_L - 1.0), 1e-15);
  EXPECT_LT(std::abs(s.r_L), 1e-15);
  EXPECT_NEAR(transmission(ConstantT{0.3}, 2.0), 0.3, 1e-15);
  EXPECT_NEAR(reflection(ConstantT{0.3}, 2.0), 0.7, 1e-15);
}

TEST(SMatrix, TransmissionMatchesModulusSquared) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uk(1e-3, pi - 1e-3), ue(-4, 4);
  for (int t = 0; t < 100; ++t) {
    const ScatteringModel m = SingleImpurity{ue(rng), 1.3};
    const double k = uk(rng);
    const double sk = std::sin(k), e = std::get<SingleImpurity>(m.variant()).epsilon0 / (2 * 1.3);
    EXPECT_NEAR(transmission(m, k), sk * sk / (sk * sk + e * e), 1e-14);
    EXPECT_NEAR(transmission(m, k), std::norm(s_matrix(m, k).t_L), 1e-14);
    EXPECT_NEAR(transmission(m, k) + reflection(m, k), 1, 1e-14);
  }
}

TEST(SMatrix, TransmissionIsContinuous) {
  const ScatteringModel m = SingleImpurity{1, 1};
  for (int i = 1; i < 100; ++i) {
    const double k = pi * i / 100;
    EXPECT_LT(std::abs(transmission(m, k + 1e-6) - transmission(m, k)), 1e-5);
  }
}

TEST(Wavefunction, SolvesLatticeEquation) {
  // -eta (u_{m+1} + u_{m-1}) + eps0 delta_{m,0} u_m = -2 eta cos(k) u_m, with u_0 = t.
  const double eta = 0.8, eps0 = 1.7;
  const ScatteringModel m = SingleImpurity{eps0, eta};
  for (double k : {0.3, 1.2, 2.5, -0.4, -2.9}) {
    const double e = -2 * eta * std::cos(k);
    for (long site : {-7L, -2L, 2L, 9L}) {
      const cd lhs = -eta * (wavefunction(m, k, site + 1) + wavefunction(m, k, site - 1));
      EXPECT_LT(std::abs(lhs - e * wavefunction(m, k, site)), 1e-12);
    }
    const SMatrix s = s_matrix(m, std::abs(k));
    const cd u0 = s.t_L;  // both extrapolations meet here: t = 1 + r
    EXPECT_LT(std::abs(u0 - (1.0 + s.r_L)), 1e-15);
    const cd lhs0 = -eta * (wavefunction(m, k, 1) + wavefunction(m, k, -1)) + eps0 * u0;
    EXPECT_LT(std::abs(lhs0 - e * u0), 1e-12);
  }
}

TEST(Wavefunction, Examples) {
  EXPECT_LT(std::abs(wavefunction(Trivial{}, 0.7, 4) - std::polar(1.0, 2.8)), 1e-15);
  const cd t = 1.0 / cd(1, 1);
  EXPECT_LT(std::abs(wavefunction(SingleImpurity{2, 1}, pi / 2, 5) - t * std::polar(1.0, 5 * pi / 2)), 1e-14);
}

TEST(Wavefunction, UnitarityIdentity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uk(0.05, pi - 0.05), ue(-3, 3);
  std::uniform_int_distribution<long> um(1, 50);
  for (int t = 0; t < 100; ++t) {
    const ScatteringModel m = SingleImpurity{ue(rng), 1};
    const double k = uk(rng);
    const long site = um(rng);
    const SMatrix s = s_matrix(m, k);
    const double lhs = std::norm(wavefunction(m, k, site)) + std::norm(wavefunction(m, k, -site));
    const double rhs = std::norm(1.0 + s.r_L * std::polar(1.0, 2 * k * site)) + std::norm(s.t_L);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(Wavefunction, DomainErrors) {
  EXPECT_THROW(wavefunction(Trivial{}, 0.5, 0), DomainError);
  EXPECT_THROW(wavefunction(Trivial{}, 0.0, 3), DomainError);
  EXPECT_THROW(wavefunction(Trivial{}, 4.0, 3), DomainError);
  EXPECT_THROW(s_matrix(Trivial{}, 0.0), DomainError);
  EXPECT_THROW(transmission(Trivial{}, pi), DomainError);
}

TEST(Model, Validation) {
  EXPECT_THROW(ScatteringModel(SingleImpurity{1, 0}), DomainError);
  EXPECT_THROW(ScatteringModel(ConstantT{1.2}), DomainError);
  EXPECT_THROW(BiasState(0, 1), DomainError);
  EXPECT_THROW(BiasState(1, pi), DomainError);
  const BiasState b(2 * pi / 3, pi / 2);
  EXPECT_DOUBLE_EQ(b.k_minus(), pi / 2);
  EXPECT_DOUBLE_EQ(b.k_plus(), 2 * pi / 3);
  const SMatrix s = s_matrix(ConstantT{0.25}, 1.0);
  EXPECT_LT(std::abs(s.t_L - 0.5), 1e-15);
  EXPECT_LT(std::abs(s.r_L - cd(0, std::sqrt(0.75))), 1e-15);
}
