#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fock.hpp"
#include "nessent/correlation.hpp"
#include "nessent/entanglement.hpp"

using namespace nessent;
using cd = std::complex<double>;
constexpr double ln2 = std::numbers::ln2;

namespace {

ComplexMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ComplexMatrix m(static_cast<std::size_t>(e.rows()), true);
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

CorrelationMatrix split(const Eigen::MatrixXcd& e, std::size_t nL) {
  CorrelationMatrix c;
  c.matrix = from_eigen(e);
  for (std::size_t i = 0; i < nL; ++i) c.sites_L.push_back(-static_cast<long>(i) - 1);
  for (std::size_t i = nL; i < static_cast<std::size_t>(e.rows()); ++i)
    c.sites_R.push_back(static_cast<long>(i - nL) + 1);
  return c;
}

// -Tr[C ln C + (1 - C) ln(1 - C)] through Eigen's eigendecomposition.
double direct_entropy(const Eigen::MatrixXcd& c, double n) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
  double s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = std::clamp(es.eigenvalues()(i), 0.0, 1.0);
    if (n == 1) {
      if (v > 0) s -= v * std::log(v);
      if (v < 1) s -= (1 - v) * std::log(1 - v);
    } else {
      s += std::log(std::pow(v, n) + std::pow(1 - v, n)) / (1 - n);
    }
  }
  return s;
}

}  // namespace

TEST(Entropy, SimpleSpectra) {
  EXPECT_NEAR(renyi_entropy(ComplexMatrix::diagonal({cd(0), cd(1), cd(0)}), 2), 0, 1e-15);
  EXPECT_NEAR(renyi_entropy(ComplexMatrix::diagonal({cd(0.5)}), 2), ln2, 1e-15);
  EXPECT_NEAR(von_neumann_entropy(ComplexMatrix::diagonal({cd(0.5)})), ln2, 1e-15);
  EXPECT_NEAR(von_neumann_entropy(ComplexMatrix::diagonal({cd(0), cd(1)})), 0, 1e-15);
  EXPECT_THROW(renyi_entropy(ComplexMatrix::diagonal({cd(0.5)}), 1), DomainError);
  EXPECT_THROW(von_neumann_entropy(ComplexMatrix::diagonal({cd(1.1)})), SpectrumError);
  const auto c = clamp_spectrum({-5e-9, 0.3, 1 + 5e-9});
  EXPECT_EQ(c.clamped, 2);
}

TEST(Entropy, SpectralOracle) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int t = 0; t < 200; ++t) {
    const int d = dim(rng);
    const auto c = oracle::random_correlation(d, rng, 0.0, 1.0);
    const auto m = from_eigen(c);
    EXPECT_NEAR(von_neumann_entropy(m), direct_entropy(c, 1), 1e-10);
    for (double n : {0.5, 2.0, 3.0}) EXPECT_NEAR(renyi_entropy(m, n), direct_entropy(c, n), 1e-10);
    for (int p : {1, 2, 3, 5}) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
      const double want = es.eigenvalues().array().pow(p).sum();
      EXPECT_NEAR(correlation_moments(m, p), want, 1e-10);
    }
  }
}

TEST(Entropy, MomentsExamples) {
  const auto m = ComplexMatrix::diagonal({cd(0.5), cd(0.5)});
  EXPECT_NEAR(correlation_moments(m, 3), 0.25, 1e-15);
  EXPECT_NEAR(correlation_moments(m, 1), 1.0, 1e-15);
}

TEST(Entropy, SecondRenyiFromMoments) {
  // S^(2) = -ln det[C^2 + (1 - C)^2] = -Tr ln(I - 2C + 2C^2).
  std::mt19937_64 rng(43);
  for (int t = 0; t < 20; ++t) {
    const auto c = oracle::random_correlation(6, rng);
    const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(6, 6) - 2 * c + 2 * c * c;
    const double want = -std::log(q.determinant().real());
    EXPECT_NEAR(renyi_entropy(from_eigen(c), 2), want, 1e-9);
  }
}

TEST(Entropy, ContinuityAtOrderOne) {
  std::mt19937_64 rng(47);
  const auto m = from_eigen(oracle::random_correlation(7, rng));
  const double h = 1e-5;
  const double mid = 0.5 * (renyi_entropy(m, 1 - h) + renyi_entropy(m, 1 + h));
  EXPECT_NEAR(von_neumann_entropy(m), mid, 1e-6);
}

TEST(Measures, BellPair) {
  Eigen::MatrixXcd c(2, 2);
  c << 0.5, 0.5, 0.5, 0.5;
  const auto r = measures(split(c, 1), 1, true);
  EXPECT_NEAR(r.S_A, 0, 1e-12);
  EXPECT_NEAR(r.mutual_info, 2 * ln2, 1e-12);
  EXPECT_NEAR(r.coherent_info, ln2, 1e-12);
  EXPECT_NEAR(*r.negativity, ln2, 1e-12);
}

TEST(Measures, ProductState) {
  std::mt19937_64 rng(53);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(7, 7);
  c.topLeftCorner(3, 3) = oracle::random_correlation(3, rng);
  c.bottomRightCorner(4, 4) = oracle::random_correlation(4, rng);
  const auto r = measures(split(c, 3), 1, true);
  EXPECT_NEAR(r.mutual_info, 0, 1e-9);
  EXPECT_NEAR(r.coherent_info, -r.S_AL, 1e-9);
  EXPECT_NEAR(*r.negativity, 0, 1e-8);
}

TEST(Measures, FockSpaceOracle) {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 50; ++t) {
    const auto c = oracle::random_correlation(6, rng);
    const auto f = oracle::fock_measures(c, 3);
    ASSERT_LT(f.correlation_mismatch, 1e-10);
    const auto r = measures(split(c, 3), 1, true);
    EXPECT_NEAR(r.S_AL, f.S_L, 1e-8);
    EXPECT_NEAR(r.S_AR, f.S_R, 1e-8);
    EXPECT_NEAR(r.mutual_info, f.mutual_info, 1e-8);
    EXPECT_NEAR(r.coherent_info, f.coherent_info, 1e-8);
    EXPECT_NEAR(*r.negativity, f.negativity, 1e-8);
    EXPECT_GE(r.mutual_info, -1e-8);
  }
}

TEST(Measures, UnevenBlocksFockOracle) {
  std::mt19937_64 rng(61);
  for (int nL : {1, 2, 4}) {
    const auto c = oracle::random_correlation(5, rng);
    const auto f = oracle::fock_measures(c, nL);
    const auto r = measures(split(c, static_cast<std::size_t>(nL)), 1, true);
    EXPECT_NEAR(r.mutual_info, f.mutual_info, 1e-8);
    EXPECT_NEAR(*r.negativity, f.negativity, 1e-8);
  }
}

TEST(Negativity, BothSpectrumPathsAgree) {
  std::mt19937_64 rng(67);
  for (int t = 0; t < 20; ++t) {
    const auto c = split(oracle::random_correlation(8, rng), 4);
    const auto a = fermionic_negativity_detail(c, 1, XiSpectrum::hermitian_similarity, true);
    const auto b = fermionic_negativity_detail(c, 1, XiSpectrum::general);
    EXPECT_NEAR(a.value, b.value, 1e-9);
    EXPECT_LT(a.spectrum_gap, 1e-9);
    EXPECT_LT(a.max_imag_eigen, 1e-7);
    EXPECT_LT(b.imag_residue, 1e-7);
  }
}

TEST(Negativity, GammaAdjointRelation) {
  std::mt19937_64 rng(71);
  const auto c = split(oracle::random_correlation(6, rng), 2);
  ComplexMatrix gp, gm;
  detail::build_gammas(c, gp, gm);
  EXPECT_LT((gp.adjoint() - gm).max_abs(), 1e-12);
}

TEST(Negativity, EvenOrderMatchesFockMoment) {
  // E_2 = ln Tr[(rho~ rho~^dagger)] for the partial time reversal.
  std::mt19937_64 rng(73);
  for (int t = 0; t < 10; ++t) {
    const auto c = oracle::random_correlation(4, rng);
    const auto rho = oracle::gaussian_state(c);
    const auto rt = oracle::partial_time_reversal(rho, 4, 2);
    const double want = std::log((rt * rt.adjoint()).trace().real());
    EXPECT_NEAR(fermionic_negativity(split(c, 2), 2), want, 1e-9);
  }
}

TEST(Negativity, Errors) {
  CorrelationMatrix c;
  c.matrix = ComplexMatrix::diagonal({cd(0.5), cd(0.5)});
  c.sites_R = {1, 2};
  EXPECT_THROW(fermionic_negativity(c), DomainError);
  EXPECT_THROW(measures(c, 1), DomainError);
}
