#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wavelab/symmetrisers.hpp"

using namespace wavelab;

TEST(Symmetriser, CommutatorsExactAgainstMultiprecision) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0, 10), ue(0, 1);
  for (int i = 0; i < 10000; ++i) {
    const double a = ua(rng), eps = ue(rng);
    EXPECT_EQ(symmetriser_commutator(a), RealMat2{});
    const auto q = quasi_commutator(a, eps);
    const auto big = oracle::quasi_commutator_big(a, eps);
    ASSERT_EQ(q(0, 0), big[0]);
    ASSERT_EQ(q(0, 1), big[1]);
    ASSERT_EQ(q(1, 0), big[2]);
    ASSERT_EQ(q(1, 1), big[3]);
  }
}

TEST(Symmetriser, DegenerateSpeedStillExact) {
  const auto q = quasi_commutator(0.0, 0.25);
  EXPECT_EQ(q(0, 1), 0.0625);
  EXPECT_EQ(q(1, 0), -0.0625);
  EXPECT_THROW(quasi_commutator(-1.0, 0.1), std::domain_error);
}

TEST(QuasiBounds, SandwichAndPairing) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(0, 10), ue(1e-6, 1), uv(-3, 3);
  for (int i = 0; i < 10000; ++i) {
    const double a = ua(rng), eps = ue(rng);
    const Vec2c V{std::complex<double>(uv(rng), uv(rng)), std::complex<double>(uv(rng), uv(rng))};
    const auto r = quasi_energy_bounds(a, eps, V, 10.0);
    ASSERT_TRUE(r.all_ok()) << a << " " << eps;
  }
}

TEST(QuasiBounds, LowerBoundAttained) {
  for (double eps : {0.5, 0.01}) {
    const auto r = quasi_energy_bounds(0.0, eps, Vec2c{1.0, 0.0});
    EXPECT_NEAR(r.energy, r.lower, 1e-12);
    EXPECT_DOUBLE_EQ(r.constant, 1.0);
  }
}

TEST(QuasiBounds, PairingIsEpsSquaredTimesImaginaryPart) {
  const Vec2c V{std::complex<double>(1, 2), std::complex<double>(-0.5, 0.25)};
  const double eps = 0.3;
  const auto p = pairing(quasi_commutator(2.0, eps), V);
  // ε²(V₂ V̄₁ − V₁ V̄₂) = 2iε² Im(V₂ V̄₁)
  const std::complex<double> expect = eps * eps * (V[1] * std::conj(V[0]) - V[0] * std::conj(V[1]));
  EXPECT_NEAR(std::abs(p - expect), 0.0, 1e-15);
}

TEST(SpectralNorm, MatchesKnownValues) {
  EXPECT_NEAR(spectral_norm(RealMat2::diag(3, -4)), 4.0, 1e-15);
  EXPECT_NEAR(spectral_norm(RealMat2{{{{1, 1}, {0, 1}}}}), (1 + std::sqrt(5.0)) / 2, 1e-14);
}

TEST(Roots, StrictIdentities) {
  const auto a = PropagationSpeed::sinusoid(2.0, 1.0);
  const RegularizedRoots r(a, Mollifier(), 0.05, RegularizedRoots::Variant::Strict, 0.5);
  const auto v = r.at(0.3);
  EXPECT_DOUBLE_EQ(v.l1, -v.l2);
  EXPECT_NEAR(v.l2, std::sqrt(a.formula(0.3)), 1e-3);
  EXPECT_DOUBLE_EQ(v.det, 2 * v.l2);
  EXPECT_THROW(RegularizedRoots(PropagationSpeed::holder_cusp(0.0, 0.5), Mollifier(), 0.1,
                                RegularizedRoots::Variant::Strict, 0.5),
               std::invalid_argument);
}

TEST(Roots, CuspExponents) {
  const auto cusp = PropagationSpeed::holder_cusp(1.0, 0.5);
  const auto rep = root_estimate_suite(cusp, Mollifier(), 0.5, log_grid(1e-1, 1e-3, 7));
  EXPECT_NEAR(rep.exponents[0].fit.exponent, -0.5, 0.15);
  EXPECT_NEAR(rep.exponents[1].fit.exponent, -0.5, 0.15);
  EXPECT_NEAR(rep.exponents[2].fit.exponent, 0.5, 0.15);
  // ‖(det H)H⁻¹‖ has a unit entry, so it cannot decay.
  EXPECT_GE(rep.exponents[3].fit.values.back(), 1.0);
  EXPECT_TRUE(rep.floor_ok);
}

TEST(Roots, WeakGap) {
  const auto a = PropagationSpeed::holder_cusp(0.0, 0.5);
  const auto rep = root_estimate_suite(a, Mollifier(), 0.5, log_grid(1e-1, 1e-3, 5), RegularizedRoots::Variant::Weak);
  EXPECT_TRUE(rep.gap_ok);
  EXPECT_GE(rep.min_gap_margin, 0.0);
}

TEST(Roots, ConstantSpeedDerivativesVanish) {
  const auto rep = root_estimate_suite(PropagationSpeed::constant(4.0), Mollifier(), 0.5, {0.1, 0.01});
  EXPECT_TRUE(rep.derivatives_vanish);
}

TEST(QuasiLogDerivative, WeaklyHyperbolicGrowsLogarithmically) {
  auto a = [](double t) { return t * t; };
  auto da = [](double t) { return 2 * t; };
  for (double eps : {0.1, 0.01}) {
    const double v = quasi_log_derivative_integral(a, da, eps, 1.0, 200000);
    EXPECT_NEAR(v, std::log(1 + 1 / (eps * eps)), 1e-4);
  }
}

TEST(Symmetriser, PointValues) {
  EXPECT_EQ(symmetriser_commutator(4.0), RealMat2{});
  EXPECT_EQ(symmetriser_commutator(std::numbers::pi), RealMat2{});
  const auto q = quasi_commutator(1.0, 0.1);
  EXPECT_EQ(q(0, 0), 0.0);
  EXPECT_EQ(q(0, 1), 0.1 * 0.1);
  EXPECT_EQ(q(1, 0), -0.1 * 0.1);
  const auto q1 = quasi_commutator(0.0, 1.0);
  EXPECT_EQ(q1(0, 1), 1.0);
  EXPECT_EQ(q1(1, 0), -1.0);
  const auto r = quasi_energy_bounds(3.0, 0.2, Vec2c{0.0, 1.0});
  EXPECT_EQ(r.energy, 1.0);
}

TEST(Roots, ConstantAndDegeneratePointValues) {
  const RegularizedRoots strict(PropagationSpeed::constant(4.0), Mollifier(), 0.05, RegularizedRoots::Variant::Strict, 0.5);
  for (double t : {0.0, 0.3, 1.0}) EXPECT_NEAR(strict.at(t).l2, 2.0, 1e-10);
  const RegularizedRoots weak(PropagationSpeed::constant(0.0), Mollifier(), 0.04, RegularizedRoots::Variant::Weak, 0.5);
  const auto v = weak.at(0.5);
  EXPECT_NEAR(v.l1, 0.2, 1e-15);
  EXPECT_NEAR(v.l2, 0.4, 1e-15);
  EXPECT_NEAR(v.l2 - v.l1, std::sqrt(0.04), 1e-15);
}
