#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wavelab/coefficients.hpp"

using namespace wavelab;

TEST(Mollifier, UnitMassAgainstIndependentQuadrature) {
  for (double p : {1.0, 2.0, 0.5}) {
    const Mollifier psi(p);
    const double mass = oracle::simpson([&](double t) { return psi(t); }, -1.0, 1.0, 40000);
    EXPECT_NEAR(mass, 1.0, 1e-10) << p;
    const double raw = oracle::simpson([&](double t) { return oracle::bump(t, p); }, -1, 1, 40000);
    EXPECT_NEAR(psi.normalisation(), 1.0 / raw, 1e-9);
  }
}

TEST(Mollifier, EvenNonnegativeCompactSupport) {
  const Mollifier psi;
  for (double t : {0.1, 0.4, 0.77, 0.999}) {
    EXPECT_EQ(psi(t), psi(-t));
    EXPECT_GT(psi(t), 0.0);
  }
  EXPECT_EQ(psi(1.0), 0.0);
  EXPECT_EQ(psi(-1.5), 0.0);
}

TEST(Mollifier, DerivativesMatchFiniteDifferences) {
  const Mollifier psi(1.5);
  const double h = 1e-5;
  for (double t : {-0.7, -0.2, 0.05, 0.5, 0.8})
    for (int k = 0; k < Mollifier::kMaxDerivative; ++k) {
      const double fd = (psi.derivative(t + h, k) - psi.derivative(t - h, k)) / (2 * h);
      EXPECT_NEAR(psi.derivative(t, k + 1), fd, 1e-5 * (1 + std::abs(fd))) << "t=" << t << " k=" << k;
    }
  EXPECT_THROW(psi.derivative(0.0, 5), std::invalid_argument);
}

TEST(ScaleRule, PowerAndLogarithmic) {
  EXPECT_DOUBLE_EQ(ScaleRule::power(2.0).omega(0.1), 0.010000000000000002);
  EXPECT_NEAR(ScaleRule::logarithmic().omega(1e-3), 1.0 / std::log(1e3), 1e-15);
  EXPECT_THROW(ScaleRule::power().omega(1.0), std::domain_error);
  EXPECT_THROW(ScaleRule::logarithmic().omega(0.2), std::domain_error);
  EXPECT_NO_THROW(ScaleRule::logarithmic().omega(std::exp(-2.0)));
}

TEST(Speeds, FactoriesAndBounds) {
  const auto s = PropagationSpeed::sinusoid(2.0, 1.0);
  EXPECT_DOUBLE_EQ(s.lower_bound(), 1.0);
  EXPECT_TRUE(s.strict());
  EXPECT_DOUBLE_EQ(s.formula(0.3), 2.0 + std::sin(0.3));
  EXPECT_DOUBLE_EQ(s.formula_derivative(0.3), std::cos(0.3));
  const auto cusp = PropagationSpeed::holder_cusp(1.0, 0.5);
  EXPECT_DOUBLE_EQ(cusp.formula(0.75), 1.5);
  EXPECT_DOUBLE_EQ(cusp.holder_exponent(), 0.5);
  EXPECT_THROW(cusp.formula_derivative(0.2), std::logic_error);
  const auto w = PropagationSpeed::weakly_hyperbolic(0.0, 1);
  EXPECT_FALSE(w.strict());
  EXPECT_DOUBLE_EQ(w.formula(0.5), 0.25);
  EXPECT_THROW(PropagationSpeed::holder_cusp(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(PropagationSpeed::measure({}, 0.0, {{1.5, 1.0}}), std::invalid_argument);
  EXPECT_THROW(PropagationSpeed::measure({}, 0.0, {{0.5, -1.0}}), std::invalid_argument);
}

TEST(Speeds, SamplingRejectsAtomsAndOutside) {
  const auto d = PropagationSpeed::measure([](double) { return 1.0; }, 1.0, {{0.5, 1.0}});
  EXPECT_THROW(sample_speed(d, 0.5), std::domain_error);
  EXPECT_DOUBLE_EQ(sample_speed(d, 0.4), 1.0);
  EXPECT_THROW(sample_speed(d, 1.2), std::domain_error);
}

TEST(Mollification, ConstantStaysConstantAndDerivativesVanish) {
  const auto a = PropagationSpeed::constant(3.0);
  const auto net = mollify_speed(a, Mollifier(), ScaleRule::power(), 0.01);
  for (double t : {0.0, 0.3, 1.0}) {
    EXPECT_NEAR(net(t), 3.0, 1e-14);
    EXPECT_EQ(net.derivative(t, 1), 0.0);
    EXPECT_EQ(net.derivative(t, 3), 0.0);
  }
}

TEST(Mollification, SmoothSpeedBiasIsSecondOrder) {
  const auto a = PropagationSpeed::sinusoid(2.0, 1.0);
  const Mollifier psi;
  // Independent second and fourth moments of ψ.
  const double m2 = oracle::simpson([&](double t) { return t * t * psi(t); }, -1, 1, 40000);
  const double m4 = oracle::simpson([&](double t) { return std::pow(t, 4) * psi(t); }, -1, 1, 40000);
  for (double eps : {0.1, 0.03, 0.01}) {
    const auto net = mollify_speed(a, psi, ScaleRule::power(), eps);
    const double t = 0.4;
    const double expect = a.formula(t) + (-0.5 * eps * eps * m2 + std::pow(eps, 4) * m4 / 24) * std::sin(t);
    EXPECT_NEAR(net(t), expect, 1e-3 * std::pow(eps, 6) + 1e-13);
  }
}

TEST(Mollification, DiracAtomHasUnitMassAndScales) {
  const auto d = PropagationSpeed::measure([](double) { return 1.0; }, 1.0, {{0.5, 2.0}});
  const auto net = mollify_speed(d, Mollifier(), ScaleRule::power(), 0.05);
  const double mass = oracle::simpson([&](double t) { return net(t) - 1.0; }, 0.0, 1.0, 20000);
  EXPECT_NEAR(mass, 2.0, 1e-9);
  EXPECT_NEAR(net(0.5) - 1.0, 2.0 * Mollifier()(0.0) / 0.05, 1e-10);
  EXPECT_NEAR(net(0.2), 1.0, 1e-15);
}

TEST(Mollification, LowerBoundPreserved) {
  const auto d = PropagationSpeed::measure([](double) { return 0.7; }, 0.7, {{0.5, 1.0}, {0.8, 0.3}});
  for (double eps : {0.1, 0.01}) {
    const auto net = mollify_speed(d, Mollifier(2.0), ScaleRule::logarithmic(), eps);
    double m = 1e9;
    for (int i = 0; i <= 5000; ++i) m = std::min(m, net(i / 5000.0));
    EXPECT_GE(m, 0.7 - 1e-10);
  }
}

TEST(Mollification, NetModeratenessExponents) {
  // sup|∂ᵏ (ψ_ω)| ~ ω^{−1−k}.
  const auto d = PropagationSpeed::measure({}, 0.0, {{0.5, 1.0}});
  const auto grid = log_grid(0.1, 0.001, 6);
  for (int k = 0; k <= 2; ++k) {
    const auto rep = moderateness_bound_check(d, Mollifier(), ScaleRule::power(), k, grid);
    EXPECT_NEAR(rep.exponent, -1.0 - k, 0.1) << k;
  }
  const auto smooth = moderateness_bound_check(PropagationSpeed::sinusoid(2, 1), Mollifier(), ScaleRule::power(), 1, grid);
  EXPECT_NEAR(smooth.exponent, 0.0, 0.05);
  EXPECT_THROW(moderateness_bound_check(d, Mollifier(), ScaleRule::power(), 0, {0.1, 0.01}), std::invalid_argument);
}

TEST(Data, LawsAndDelta) {
  const auto modes = enumerate_modes({model::Landau2D{1.0, 1}, 0.0}, 9.0);
  InitialDataSpec spec;
  spec.law = {DecayLaw::Kind::Sobolev, 1.0, 2.0};
  auto d = generate_initial_data(spec, modes);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    EXPECT_DOUBLE_EQ(d.u0[i].real(), std::pow(modes[i].nu, -2.0));
    EXPECT_EQ(d.u1[i], 0.0);
  }
  spec.kind = InitialDataSpec::Kind::Delta;
  spec.delta_mode = ModeIndex{{2}};
  d = generate_initial_data(spec, modes);
  EXPECT_EQ(d.u0[2], 1.0);
  EXPECT_EQ(d.u0[1], 0.0);
  spec.delta_mode = ModeIndex{{40}};
  EXPECT_THROW(generate_initial_data(spec, modes), std::invalid_argument);
}

TEST(Data, RandomIsSeeded) {
  const auto modes = enumerate_modes({model::Landau2D{1.0, 1}, 0.0}, 30.0);
  InitialDataSpec spec;
  spec.kind = InitialDataSpec::Kind::Random;
  spec.seed = 42;
  const auto a = generate_initial_data(spec, modes), b = generate_initial_data(spec, modes);
  EXPECT_EQ(a.u0, b.u0);
  spec.seed = 43;
  EXPECT_NE(generate_initial_data(spec, modes).u0, a.u0);
}

TEST(Source, TabulatedInterpolation) {
  SourceSpec s;
  s.kind = SourceSpec::Kind::Tabulated;
  s.times = {0.0, 1.0};
  s.values = {{0.0, 2.0}};
  const auto f = s.time_function(0);
  EXPECT_DOUBLE_EQ(f(0.25), 0.5);
  EXPECT_DOUBLE_EQ(f(2.0), 2.0);
  EXPECT_THROW(s.time_function(1), std::invalid_argument);
}

TEST(Speeds, PointValues) {
  EXPECT_DOUBLE_EQ(PropagationSpeed::sinusoid(2.0, 1.0).formula(0.0), 2.0);
  EXPECT_EQ(PropagationSpeed::weakly_hyperbolic(0.0, 1).formula(0.0), 0.0);
  const auto d = PropagationSpeed::measure([](double) { return 1.0; }, 1.0, {{0.5, 1.0}});
  const auto net = mollify_speed(d, Mollifier(), ScaleRule::power(), 0.02);
  EXPECT_NEAR(net(0.5), 1.0 + Mollifier()(0.0) / 0.02, 1e-10);
  const auto four = mollify_speed(PropagationSpeed::constant(4.0), Mollifier(), ScaleRule::logarithmic(), 0.01);
  EXPECT_NEAR(four(0.37), 4.0, 1e-10);
  EXPECT_NEAR(four.derivative(0.37, 1), 0.0, 1e-10);
  const auto flat = moderateness_bound_check(PropagationSpeed::constant(4.0), Mollifier(), ScaleRule::power(), 0,
                                             log_grid(0.1, 0.001, 6));
  EXPECT_NEAR(flat.exponent, 0.0, 0.05);
}

TEST(Data, LawPointValues) {
  EXPECT_NEAR((DecayLaw{DecayLaw::Kind::Gevrey, 1.0, 0.0, 1.0, 1.0, 1.0}).amplitude(2.0), std::exp(-2.0), 1e-16);
  EXPECT_NEAR((DecayLaw{DecayLaw::Kind::Sobolev, 1.0, 2.0}).amplitude(3.0), 1.0 / 9.0, 1e-16);
}
