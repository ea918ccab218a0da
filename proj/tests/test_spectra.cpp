#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "wavelab/spectra.hpp"

using namespace wavelab;

namespace {

SpectralModel landau(double B, std::int64_t mult = 1) { return {model::Landau2D{B, mult}, 0.0}; }

}  // namespace

TEST(Spectra, LandauEigenvalues) {
  const auto m = landau(1.0);
  EXPECT_EQ(eigenvalue(m, ModeIndex{{0}}), std::complex<double>(1.0));
  EXPECT_EQ(eigenvalue(m, ModeIndex{{3}}), std::complex<double>(7.0));
  EXPECT_DOUBLE_EQ(frequency(m, ModeIndex{{4}}), 3.0);
}

TEST(Spectra, LandauCutoffFiveGivesThreeModes) {
  const auto set = enumerate_modes(landau(1.0), 5.0);
  ASSERT_EQ(set.size(), 3u);
  EXPECT_EQ(set[0].lambda.real(), 1.0);
  EXPECT_EQ(set[2].lambda.real(), 5.0);
}

TEST(Spectra, LandauMultiplicityAddsIndexCoordinate) {
  const auto set = enumerate_modes(landau(2.0, 3), 10.0);
  EXPECT_EQ(set.size(), oracle::landau_count(2.0, 10.0, 3));
  for (const auto& m : set.modes) EXPECT_EQ(m.index.coords.size(), 2u);
  EXPECT_THROW(eigenvalue(landau(2.0, 3), ModeIndex{{0, 3}}), std::invalid_argument);
}

TEST(Spectra, LandauCountsMatchBruteForce) {
  for (double B : {0.5, 1.0, 3.0})
    for (double lam : {1.0, 2.9, 3.0, 50.0, 1234.5}) {
      if (lam < B) continue;
      EXPECT_EQ(weyl_count(landau(B), lam), oracle::landau_count(B, lam)) << B << " " << lam;
    }
}

TEST(Spectra, HarmonicOscillatorDegeneracy) {
  const SpectralModel m{model::HarmonicOscillator{2}, 0.0};
  // λ = 2(k1+k2) + 2 ≤ 6 ⇒ k1 + k2 ≤ 2: 1 + 2 + 3 modes.
  EXPECT_EQ(enumerate_modes(m, 6.0).size(), 6u);
  EXPECT_EQ(eigenvalue(m, ModeIndex{{1, 2}}).real(), 8.0);
}

TEST(Spectra, AnisotropicHamiltonian) {
  const SpectralModel m{model::AnisotropicHamiltonian{{1.0, 2.0}}, 0.0};
  EXPECT_EQ(eigenvalue(m, ModeIndex{{1, 1}}).real(), 3.0 + 6.0);
  std::size_t brute = 0;
  for (int a = 0; a < 50; ++a)
    for (int b = 0; b < 50; ++b)
      if ((2 * a + 1) + 2.0 * (2 * b + 1) <= 40.0) ++brute;
  EXPECT_EQ(enumerate_modes(m, 40.0).size(), brute);
}

TEST(Spectra, TorusCountsMatchBruteForce) {
  for (int d : {1, 2, 3})
    for (double lam : {1.0, 5.0, 17.5}) EXPECT_EQ(weyl_count({model::TorusLaplacian{d}, 0.0}, lam), oracle::torus_count(d, lam));
}

TEST(Spectra, TorusZeroModeIncludedWhenUnlifted) {
  const auto set = enumerate_modes({model::TorusLaplacian{1}, 0.0}, 1.0);
  ASSERT_EQ(set.size(), 3u);
  EXPECT_EQ(set[0].nu, 0.0);
}

TEST(Spectra, NonSelfAdjointFlowIsComplex) {
  const SpectralModel m{model::NonSelfAdjointFlow{2.0}, 0.0};
  const auto lam = eigenvalue(m, ModeIndex{{1}});
  EXPECT_NEAR(lam.real(), 2 * std::numbers::pi, 1e-15);
  EXPECT_NEAR(lam.imag(), -std::log(2.0), 1e-15);
  const auto set = enumerate_modes(m, 20.0);
  for (const auto& mode : set.modes) EXPECT_LE(std::abs(mode.lambda), 20.0);
  EXPECT_EQ(set.size(), 7u);  // ξ ∈ {−3..3}: |2πξ − i ln 2| ≤ 20
}

TEST(Spectra, ShiftLiftsModulus) {
  const SpectralModel m{model::NonSelfAdjointFlow{2.0}, 1.0};
  const auto lam = eigenvalue(m, ModeIndex{{0}});
  EXPECT_DOUBLE_EQ(lam.real(), std::log(2.0) + 1.0);
  EXPECT_EQ(lam.imag(), 0.0);
}

TEST(Spectra, CustomTable) {
  const SpectralModel m{model::Custom{{4.0, 1.0, {0.0, 9.0}}}, 0.0};
  const auto set = enumerate_modes(m, 10.0);
  ASSERT_EQ(set.size(), 3u);
  EXPECT_EQ(set[0].nu, 1.0);
  EXPECT_EQ(set[2].nu, 3.0);
}

TEST(Spectra, ModesSortedByFrequencyThenIndex) {
  const auto set = enumerate_modes({model::TorusLaplacian{2}, 0.0}, 30.0);
  for (std::size_t i = 1; i < set.size(); ++i) {
    EXPECT_LE(set[i - 1].nu, set[i].nu);
    if (set[i - 1].nu == set[i].nu) EXPECT_TRUE(set[i - 1].index < set[i].index);
  }
}

TEST(Spectra, InvalidModelsRejected) {
  EXPECT_THROW(enumerate_modes(landau(-1.0), 10), std::invalid_argument);
  EXPECT_THROW(enumerate_modes({model::NonSelfAdjointFlow{1.0}, 0.0}, 10), std::invalid_argument);
  EXPECT_THROW(enumerate_modes(landau(1.0), 0.5), std::invalid_argument);
  EXPECT_THROW(eigenvalue(landau(1.0), ModeIndex{{-1}}), std::invalid_argument);
  EXPECT_THROW(eigenvalue(landau(1.0), ModeIndex{{1, 2}}), std::invalid_argument);
}

TEST(Spectra, WeylExponentLandauIsOne) {
  const auto fit = weyl_exponent_fit(landau(1.0), log_grid(10, 1e4, 25));
  EXPECT_NEAR(fit.slope, 1.0, 0.05);
}

TEST(Spectra, WeylExponentTorusIsHalfDimension) {
  const auto fit = weyl_exponent_fit({model::TorusLaplacian{2}, 0.0}, log_grid(100, 1e4, 15));
  EXPECT_NEAR(fit.slope, 1.0, 0.05);
  const auto fit3 = weyl_exponent_fit({model::HarmonicOscillator{3}, 0.0}, log_grid(100, 2000, 12));
  EXPECT_NEAR(fit3.slope, 3.0, 0.3);
}

TEST(Spectra, LogSpacedSelection) {
  const auto all = enumerate_modes(landau(1.0), 1e4);
  const auto sub = select_log_spaced(all, 16, 1.0, 100.0);
  EXPECT_GE(sub.size(), 12u);
  EXPECT_NEAR(sub.modes.front().nu, 1.0, 1e-12);
  EXPECT_GT(sub.modes.back().nu, 95.0);
  std::set<double> seen;
  for (const auto& m : sub.modes) EXPECT_TRUE(seen.insert(m.nu).second);
}

TEST(Spectra, PointValues) {
  EXPECT_EQ(eigenvalue({model::HarmonicOscillator{2}, 0.0}, ModeIndex{{0, 0}}).real(), 2.0);
  const SpectralModel flow{model::NonSelfAdjointFlow{std::numbers::e}, 0.0};
  const auto l0 = eigenvalue(flow, ModeIndex{{0}});
  EXPECT_EQ(l0.real(), 0.0);
  EXPECT_DOUBLE_EQ(l0.imag(), -1.0);
  EXPECT_NEAR(frequency(flow, ModeIndex{{1}}), std::pow(1 + 4 * std::numbers::pi * std::numbers::pi, 0.25), 1e-15);
  EXPECT_DOUBLE_EQ(frequency({model::Custom{{4.0}}, 0.0}, ModeIndex{{0}}), 2.0);
  EXPECT_DOUBLE_EQ(frequency(landau(1.0), ModeIndex{{1}}), std::sqrt(3.0));
  const auto ho = enumerate_modes({model::HarmonicOscillator{1}, 0.0}, 4.0);
  ASSERT_EQ(ho.size(), 2u);
  EXPECT_EQ(ho[1].lambda.real(), 3.0);
}

TEST(Spectra, IsotropicHamiltonianDependsOnTotalDegree) {
  const SpectralModel m{model::AnisotropicHamiltonian{{1.5, 1.5, 1.5}}, 0.0};
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c)
        EXPECT_DOUBLE_EQ(eigenvalue(m, ModeIndex{{a, b, c}}).real(), eigenvalue(m, ModeIndex{{a + b + c, 0, 0}}).real());
}

TEST(Spectra, FlowCutoffIsOnModulus) {
  // |2πξ − i ln 2| ≤ 50 for |ξ| ≤ 7.
  const auto set = enumerate_modes({model::NonSelfAdjointFlow{2.0}, 0.0}, 50.0);
  EXPECT_EQ(set.size(), 15u);
  const auto fit = weyl_exponent_fit({model::NonSelfAdjointFlow{2.0}, 0.0}, log_grid(100, 1e4, 15));
  EXPECT_NEAR(fit.slope, 1.0, 0.05);
}
