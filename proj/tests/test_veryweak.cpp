#include <gtest/gtest.h>

#include "wavelab/veryweak.hpp"

using namespace wavelab;

namespace {

SweepConfig base(PropagationSpeed a, double cutoff = 30.0) {
  SweepConfig c;
  c.problem.modes = enumerate_modes({model::Landau2D{1.0, 1}, 0.0}, cutoff);
  c.problem.speed = std::move(a);
  InitialDataSpec spec;
  spec.law = {DecayLaw::Kind::Sobolev, 1.0, 2.0};
  spec.u1_weight = 0.5;
  c.problem.data = generate_initial_data(spec, c.problem.modes);
  c.epsilons = log_grid(0.1, 0.001, 6);
  c.samples = 16;
  return c;
}

}  // namespace

TEST(Sweep, ConstantSpeedIsEpsilonIndependent) {
  auto c = base(PropagationSpeed::constant(1.0));
  c.second = Mollifier(2.0);
  const auto r = run_sweep(c);
  ASSERT_TRUE(r.ok());
  for (const auto& run : r.runs) {
    EXPECT_NEAR(run.sup_norms[0], r.runs[0].sup_norms[0], 1e-9 * r.runs[0].sup_norms[0]);
    EXPECT_NEAR(run.min_speed, 1.0, 1e-14);
  }
  EXPECT_NEAR(moderateness_fit(r, 0).exponent, 0.0, 1e-6);
  EXPECT_NEAR(moderateness_fit(r, 1).exponent, 0.0, 1e-6);
  EXPECT_LE(negligibility_test(r).values.back(), 1e-9);
}

TEST(Sweep, SmoothSpeedModerateAndNegligible) {
  auto c = base(PropagationSpeed::sinusoid(2.0, 1.0));
  c.second = Mollifier(2.0);
  c.orders = {0, 1, 2};
  const auto r = run_sweep(c);
  ASSERT_TRUE(r.ok());
  for (int k : {0, 1, 2}) {
    const auto f = moderateness_fit(r, k);
    ASSERT_TRUE(f.ok);
    EXPECT_NEAR(f.exponent, 0.0, 0.05) << k;
  }
  const auto neg = negligibility_test(r);
  EXPECT_TRUE(neg.nonincreasing);
  EXPECT_NEAR(neg.exponent, 2.0, 0.3);
}

TEST(Sweep, ConsistencyWithClassicalSolution) {
  auto c = base(PropagationSpeed::sinusoid(2.0, 1.0));
  c.reference = true;
  const auto r = run_sweep(c);
  ASSERT_TRUE(r.ok());
  const auto d = consistency_test(r);
  EXPECT_TRUE(d.nonincreasing);
  EXPECT_GT(d.exponent, 1.5);
  EXPECT_LT(d.values.back(), 1e-4);
}

TEST(Sweep, MeasureSpeedNetExistsAndIsModerate) {
  auto c = base(PropagationSpeed::measure([](double) { return 1.0; }, 1.0, {{0.5, 1.0}}), 12.0);
  c.second = Mollifier(2.0);
  const auto r = run_sweep(c);
  ASSERT_TRUE(r.ok()) << r.runs.back().failure;
  for (const auto& run : r.runs) EXPECT_GE(run.min_speed, 1.0 - 1e-10);
  const auto f = moderateness_fit(r, 1);
  ASSERT_TRUE(f.ok);
  EXPECT_TRUE(std::isfinite(f.exponent));
  EXPECT_NO_THROW(negligibility_test(r));
}

TEST(Sweep, ValidationErrors) {
  auto c = base(PropagationSpeed::constant(1.0));
  c.epsilons.clear();
  EXPECT_THROW(run_sweep(c), std::invalid_argument);
  c.epsilons = {0.1, 0.05, 0.02, 0.01, 0.005, 0.004};
  EXPECT_THROW(run_sweep(c), std::invalid_argument);
  c.epsilons = log_grid(0.2, 0.001, 6);
  c.rule = ScaleRule::logarithmic();
  EXPECT_THROW(run_sweep(c), std::domain_error);
  c.rule = ScaleRule::power();
  c.second = Mollifier(1.0);
  EXPECT_THROW(run_sweep(c), std::invalid_argument);
  c.second.reset();
  c.problem.speed = PropagationSpeed::measure({}, 0.0, {{0.5, 1.0}});
  c.reference = true;
  EXPECT_THROW(run_sweep(c), std::invalid_argument);
}

TEST(Sweep, JobCountDoesNotChangeResults) {
  auto c = base(PropagationSpeed::sinusoid(2.0, 1.0), 20.0);
  const auto a = run_sweep(c);
  c.jobs = 3;
  const auto b = run_sweep(c);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].sup_norms, b.runs[i].sup_norms);
    for (std::size_t m = 0; m < a.runs[i].family.size(); ++m) EXPECT_EQ(a.runs[i].family[m].V, b.runs[i].family[m].V);
  }
}

TEST(Fits, DecayReportOnSyntheticData) {
  const auto eps = log_grid(0.1, 0.001, 6);
  std::vector<double> v;
  for (double e : eps) v.push_back(3 * e * e);
  const auto d = decay_report(eps, v);
  EXPECT_TRUE(d.nonincreasing);
  EXPECT_NEAR(d.exponent, 2.0, 1e-9);
  const auto z = decay_report(eps, std::vector<double>(6, 0.0));
  EXPECT_TRUE(z.vanishing);
  EXPECT_FALSE(z.fitted);
  v[3] = 1.0;
  EXPECT_FALSE(decay_report(eps, v).nonincreasing);
}

TEST(Threshold, TargetsAndCases) {
  ThresholdConfig c;
  EXPECT_NEAR(c.target(), 0.5, 1e-15);
  c.which = ThresholdCase::WeakSmooth;
  c.ell = 2;
  EXPECT_NEAR(c.target(), 0.5, 1e-15);
  c.ell = 3;
  EXPECT_THROW(c.speed(), std::invalid_argument);
  c.which = ThresholdCase::WeakHolder;
  EXPECT_NEAR(c.target(), 0.8, 1e-15);
  EXPECT_EQ(to_string(c.which), "weak_holder");
}

TEST(Threshold, GrowthStaysBelowThreshold) {
  for (auto which : {ThresholdCase::HolderStrict, ThresholdCase::WeakSmooth, ThresholdCase::WeakHolder}) {
    ThresholdConfig c;
    c.which = which;
    const auto r = threshold_experiment(c);
    EXPECT_TRUE(r.pass) << to_string(which) << " theta=" << r.fit.theta;
    EXPECT_GE(r.modes, 12u);
  }
}
