#pragma once

// ε-sweeps of regularised problems: moderateness and negligibility fits,
// convergence to classical solutions, and Gevrey growth threshold runs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "wavelab/coefficients.hpp"
#include "wavelab/fit.hpp"
#include "wavelab/mode_solver.hpp"
#include "wavelab/norms.hpp"
#include "wavelab/spectra.hpp"

namespace wavelab {

struct BaseProblem {
  ModeSet modes;
  PropagationSpeed speed = PropagationSpeed::constant(1.0);
  SourceSpec source;
  CauchyData data;
  double T = 1.0;
};

struct SweepConfig {
  BaseProblem problem;
  std::vector<double> epsilons;  // strictly descending
  ScaleRule rule = ScaleRule::power(1.0);
  Mollifier mollifier{1.0};
  std::optional<Mollifier> second;  // enables the negligibility diagnostic
  std::vector<int> orders{0, 1};    // tracked ∂ₜᵏ
  WeightSpec weight = WeightSpec::sobolev(0.0);
  double s = 0;  // difference metric ‖·‖_{H^{1+s}} + ‖∂ₜ·‖_{H^s}
  std::optional<WeightSpec> difference_weight;  // replaces both Sobolev weights when set
  bool reference = false;  // solve the unmollified problem on each ε's grid
  StepPolicy policy;
  std::size_t samples = 64;  // output intervals on [0, T]
  std::size_t jobs = 1;

  void validate() const {
    if (epsilons.empty()) throw std::invalid_argument("sweep: empty epsilon grid");
    if (epsilons.size() < 6) throw std::invalid_argument("sweep: epsilon grid needs at least 6 points");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      rule.check(epsilons[i]);
      if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw std::invalid_argument("sweep: epsilon grid must be descending");
    }
    if (epsilons.front() / epsilons.back() < 100.0 * (1 - 1e-12))
      throw std::invalid_argument("sweep: epsilon grid must span two decades");
    if (second && *second == mollifier) throw std::invalid_argument("sweep: the two mollifiers must differ");
    for (int k : orders)
      if (k < 0 || k > 4) throw std::invalid_argument("sweep: derivative orders must lie in [0,4]");
    if (samples == 0) throw std::invalid_argument("sweep: samples must be >= 1");
    if (problem.modes.empty()) throw std::invalid_argument("sweep: empty mode set");
    for (const auto& at : problem.speed.atoms())
      if (!(at.t > 0 && at.t < problem.T)) throw std::invalid_argument("sweep: atoms must lie strictly inside (0,T)");
    if (reference && problem.speed.is_measure()) throw std::invalid_argument("sweep: no classical reference for a measure speed");
    weight.validate();
  }
};

struct EpsilonRun {
  double epsilon = 0, omega = 0;
  bool ok = true;
  std::string failure;
  double min_speed = 0, sup_speed = 0;
  std::vector<double> sup_norms;  // per tracked order
  std::uint64_t max_steps = 0;
  bool residual_ok = true;
  std::vector<ModeTrajectory> family;
  double difference = std::numeric_limits<double>::quiet_NaN();       // two-mollifier
  double reference_error = std::numeric_limits<double>::quiet_NaN();  // against the classical solve
};

struct SweepResult {
  std::vector<int> orders;
  std::vector<EpsilonRun> runs;
  bool source_mollified = false;
  bool ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const EpsilonRun& r) { return r.ok; });
  }
};

namespace detail {

inline std::pair<double, double> speed_range(const RealFn& a, double T, double omega) {
  const double spacing = resolving_spacing(T, omega > 0 ? omega : T);
  const auto n = std::size_t(std::ceil(T / spacing));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i <= n; ++i) {
    const double v = a(T * double(i) / double(n));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

inline double binomial(int n, int k) {
  double b = 1;
  for (int i = 1; i <= k; ++i) b = b * double(n - k + i) / double(i);
  return b;
}

// sup_t sqrt(Σ w|∂ₜᵏû|²) for each order; ∂ₜᵏû for k ≥ 2 comes from
// û'' = f̂ − ν² a û differentiated k − 2 times.
inline std::vector<double> derivative_sup_norms(const ModeSet& modes, const std::vector<ModeTrajectory>& family,
                                                const std::vector<int>& orders, const WeightSpec& w,
                                                const MollifiedSpeed& net, const SourceSpec& source,
                                                const MollifiedFunction* mollified_source) {
  const auto& times = common_times(family);
  const auto lam = abs_eigenvalues(modes);
  const int kmax = orders.empty() ? 0 : *std::max_element(orders.begin(), orders.end());
  std::vector<RealFn> plain(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) plain[i] = source.time_function(i, mollified_source);
  auto source_derivative = [&](std::size_t i, double t, int m) -> Complex {
    if (source.is_zero()) return 0.0;
    if (m == 0) return source.modal_factor(modes[i].nu) * plain[i](t);
    if (source.kind == SourceSpec::Kind::Separable && mollified_source)
      return source.modal_factor(modes[i].nu) * mollified_source->derivative(t, m);
    throw std::invalid_argument("time derivatives of the source need a mollified separable profile");
  };
  std::vector<double> sup(orders.size(), 0.0);
  std::vector<std::vector<Complex>> d(std::size_t(kmax) + 1, std::vector<Complex>(modes.size()));
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    std::vector<double> da(std::size_t(std::max(kmax - 1, 0)));
    for (std::size_t j = 0; j < da.size(); ++j) da[j] = net.derivative(t, int(j));
    for (std::size_t i = 0; i < modes.size(); ++i) {
      d[0][i] = family[i].u(ti);
      if (kmax >= 1) d[1][i] = family[i].du(ti);
      const double nu2 = modes[i].nu * modes[i].nu;
      for (int k = 2; k <= kmax; ++k) {
        Complex acc = source_derivative(i, t, k - 2);
        for (int j = 0; j <= k - 2; ++j) acc -= nu2 * binomial(k - 2, j) * da[std::size_t(j)] * d[std::size_t(k - 2 - j)][i];
        d[std::size_t(k)][i] = acc;
      }
    }
    for (std::size_t o = 0; o < orders.size(); ++o) {
      const double v = std::exp(log_weighted_norm(lam, d[std::size_t(orders[o])], w));
      sup[o] = std::max(sup[o], v);
    }
  }
  return sup;
}

}  // namespace detail

/// sup_t (‖u − v‖_{H^{1+s}} + ‖∂ₜu − ∂ₜv‖_{H^s}) over two families on the same grid.
inline double family_distance(const ModeSet& modes, const std::vector<ModeTrajectory>& a,
                              const std::vector<ModeTrajectory>& b, double s,
                              const std::optional<WeightSpec>& weight = std::nullopt) {
  const auto& times = common_times(a);
  if (common_times(b) != times) throw std::invalid_argument("families are recorded on different grids");
  const auto lam = abs_eigenvalues(modes);
  const WeightSpec wu = weight.value_or(WeightSpec::sobolev(1 + s)), wd = weight.value_or(WeightSpec::sobolev(s));
  double sup = 0;
  std::vector<Complex> du(modes.size()), dd(modes.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      du[i] = a[i].u(ti) - b[i].u(ti);
      dd[i] = a[i].du(ti) - b[i].du(ti);
    }
    sup = std::max(sup, std::exp(log_weighted_norm(lam, du, wu)) + std::exp(log_weighted_norm(lam, dd, wd)));
  }
  return sup;
}

struct RegularisedSolve {
  BatchResult batch;
  MollifiedSpeed net;
  std::optional<MollifiedFunction> source_net;
  double min_speed = 0, sup_speed = 0;
};

/// One member of the net: mollify a (and a separable source when requested)
/// at scale ω(ε) and solve every mode on the common sample grid.
inline RegularisedSolve solve_regularised(const SweepConfig& cfg, const Mollifier& psi, double eps) {
  const auto& p = cfg.problem;
  RegularisedSolve out{{}, mollify_speed(p.speed, psi, cfg.rule, eps), std::nullopt, 0, 0};
  if (p.source.kind == SourceSpec::Kind::Separable && p.source.mollify)
    out.source_net.emplace(p.source.time_profile, std::vector<Atom>{}, psi, out.net.omega);
  const auto net = out.net;
  RealFn a = [net](double t) { return net(t); };
  std::tie(out.min_speed, out.sup_speed) = detail::speed_range(a, p.T, net.omega);
  StepPolicy policy = cfg.policy;
  policy.mollifier_scale = net.omega;
  policy.min_intervals = cfg.samples;
  policy.record_every = 0;
  SharedProblem shared{a, out.sup_speed, p.source, out.source_net ? &*out.source_net : nullptr, p.data, p.T, 0.0};
  out.batch = solve_all_modes(p.modes, shared, policy, cfg.jobs);
  return out;
}

/// The classical problem (unmollified a and f) on the grid used at scale ω.
inline BatchResult solve_reference(const SweepConfig& cfg, double omega) {
  const auto& p = cfg.problem;
  const auto speed = p.speed;
  RealFn a = [speed](double t) { return speed.formula(t); };
  StepPolicy policy = cfg.policy;
  policy.mollifier_scale = omega;
  policy.min_intervals = cfg.samples;
  policy.record_every = 0;
  const auto [lo, hi] = detail::speed_range(a, p.T, omega);
  (void)lo;
  SharedProblem shared{a, hi, p.source, nullptr, p.data, p.T, 0.0};
  return solve_all_modes(p.modes, shared, policy, cfg.jobs);
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult res;
  res.orders = cfg.orders;
  res.source_mollified = cfg.problem.source.kind == SourceSpec::Kind::Separable && cfg.problem.source.mollify;
  for (double eps : cfg.epsilons) {
    EpsilonRun run;
    run.epsilon = eps;
    run.omega = cfg.rule.omega(eps);
    try {
      auto sol = solve_regularised(cfg, cfg.mollifier, eps);
      run.min_speed = sol.min_speed;
      run.sup_speed = sol.sup_speed;
      if (!sol.batch.ok()) {
        run.ok = false;
        run.failure = "mode " + std::to_string(sol.batch.failures.front().first) + ": " + sol.batch.failures.front().second;
      }
      for (const auto& tr : sol.batch.trajectories) {
        run.max_steps = std::max(run.max_steps, tr.steps);
        run.residual_ok = run.residual_ok && tr.residual_ok;
      }
      if (run.ok) {
        run.sup_norms = detail::derivative_sup_norms(cfg.problem.modes, sol.batch.trajectories, cfg.orders, cfg.weight,
                                                     sol.net, cfg.problem.source,
                                                     sol.source_net ? &*sol.source_net : nullptr);
        for (double v : run.sup_norms)
          if (!std::isfinite(v)) {
            run.ok = false;
            run.failure = "non-finite norm";
          }
      }
      if (run.ok && cfg.second) {
        auto other = solve_regularised(cfg, *cfg.second, eps);
        if (!other.batch.ok()) throw std::runtime_error("second mollifier: " + other.batch.failures.front().second);
        run.difference = family_distance(cfg.problem.modes, sol.batch.trajectories, other.batch.trajectories, cfg.s,
                                         cfg.difference_weight);
      }
      if (run.ok && cfg.reference) {
        auto ref = solve_reference(cfg, run.omega);
        if (!ref.ok()) throw std::runtime_error("reference: " + ref.failures.front().second);
        run.reference_error = family_distance(cfg.problem.modes, sol.batch.trajectories, ref.trajectories, cfg.s,
                                              cfg.difference_weight);
      }
      run.family = std::move(sol.batch.trajectories);
    } catch (const std::exception& e) {
      run.ok = false;
      run.failure = e.what();
    }
    res.runs.push_back(std::move(run));
  }
  return res;
}

struct NetFit {
  double exponent = 0;
  double residual = 0;
  bool ok = false;
  bool degenerate = false;
  std::string reason;
};

/// N_k: slope of log sup_t‖∂ₜᵏu_ε‖ against log(1/ε).
inline NetFit moderateness_fit(const SweepResult& r, int k) {
  NetFit f;
  const auto it = std::find(r.orders.begin(), r.orders.end(), k);
  if (it == r.orders.end()) {
    f.reason = "order not tracked";
    return f;
  }
  const auto o = std::size_t(it - r.orders.begin());
  std::vector<double> x, y;
  for (const auto& run : r.runs) {
    if (!run.ok || run.sup_norms.size() <= o || !std::isfinite(run.sup_norms[o]) || !(run.sup_norms[o] > 0)) {
      f.reason = "non-finite or missing norm at epsilon " + std::to_string(run.epsilon);
      return f;
    }
    x.push_back(std::log(1.0 / run.epsilon));
    y.push_back(std::log(run.sup_norms[o]));
  }
  if (x.size() < 6) {
    f.reason = "fewer than 6 epsilons";
    return f;
  }
  const auto line = fit_line(x, y);
  f.exponent = line.slope;
  f.residual = line.rms_residual;
  f.degenerate = line.degenerate;
  f.ok = true;
  return f;
}

struct DecayReport {
  std::vector<double> epsilons, values;
  bool nonincreasing = true;  // along the descending ε grid
  bool vanishing = false;     // every value ≤ the floor
  double exponent = 0;        // slope of log value against log ε
  double residual = 0;
  bool fitted = false;
};

/// Decay diagnostics for a per-ε sequence; values at or below `floor` count
/// as solver-level zeros and are excluded from the fit.
inline DecayReport decay_report(const std::vector<double>& eps, const std::vector<double>& values, double floor = 1e-13) {
  DecayReport d;
  d.epsilons = eps;
  d.values = values;
  d.vanishing = std::all_of(values.begin(), values.end(), [&](double v) { return std::abs(v) <= floor; });
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1] * (1 + 1e-9) + floor) d.nonincreasing = false;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::isfinite(values[i]) && values[i] > floor) {
      x.push_back(eps[i]);
      y.push_back(values[i]);
    }
  if (x.size() >= 2) {
    const auto fit = fit_loglog(x, y);
    d.exponent = fit.slope;
    d.residual = fit.rms_residual;
    d.fitted = true;
  }
  return d;
}

/// Per-ε ‖u^{ψ₁}_ε − u^{ψ₂}_ε‖ with its decay exponent; the sweep must have
/// been run with a second mollifier.
inline DecayReport negligibility_test(const SweepResult& r) {
  std::vector<double> eps, vals;
  for (const auto& run : r.runs) {
    if (!run.ok || std::isnan(run.difference)) throw std::invalid_argument("negligibility: sweep lacks a complete two-mollifier run");
    eps.push_back(run.epsilon);
    vals.push_back(run.difference);
  }
  return decay_report(eps, vals);
}

/// Per-ε distance to the classical solution with its convergence rate.
inline DecayReport consistency_test(const SweepResult& r) {
  std::vector<double> eps, vals;
  for (const auto& run : r.runs) {
    if (!run.ok || std::isnan(run.reference_error)) throw std::invalid_argument("consistency: sweep lacks reference errors");
    eps.push_back(run.epsilon);
    vals.push_back(run.reference_error);
  }
  return decay_report(eps, vals);
}

enum class ThresholdCase {
  HolderStrict,  // a = 1 + |t − ½|^α
  WeakSmooth,    // a = t^ℓ, ℓ even
  WeakHolder,    // a = |t − ½|^α
};

inline std::string to_string(ThresholdCase c) {
  switch (c) {
    case ThresholdCase::HolderStrict: return "holder_strict";
    case ThresholdCase::WeakSmooth: return "weak_smooth";
    case ThresholdCase::WeakHolder: return "weak_holder";
  }
  return "";
}

struct ThresholdConfig {
  ThresholdCase which = ThresholdCase::HolderStrict;
  double alpha = 0.5;
  int ell = 2;
  SpectralModel model{model::Landau2D{1.0, 1}, 0.0};
  double cutoff = 1e4;
  std::size_t mode_count = 16;
  double nu_min = 1.0, nu_max = 100.0;
  InitialDataSpec data{InitialDataSpec::Kind::Law, {}, {DecayLaw::Kind::Gevrey, 1.0, 0.0, 1.0, 1.0, 1.5}, 0, 1.0, 1.0};
  double T = 1.0;
  StepPolicy policy;
  std::size_t jobs = 1;
  double tolerance = 0.1;

  PropagationSpeed speed() const {
    switch (which) {
      case ThresholdCase::HolderStrict: return PropagationSpeed::holder_cusp(1.0, alpha, 0.5, 1.0, T);
      case ThresholdCase::WeakSmooth:
        if (ell < 2 || ell % 2 != 0) throw std::invalid_argument("weak smooth threshold needs an even ell >= 2");
        return PropagationSpeed::weakly_hyperbolic(0.0, ell / 2, 0.0, double(ell), T);
      case ThresholdCase::WeakHolder: return PropagationSpeed::holder_cusp(0.0, alpha, 0.5, 1.0, T);
    }
    throw std::logic_error("unknown threshold case");
  }

  /// 1/s* for the case's Gevrey threshold s*.
  double target() const {
    switch (which) {
      case ThresholdCase::HolderStrict: return 1.0 - alpha;
      case ThresholdCase::WeakSmooth: return 1.0 / (1.0 + double(ell) / 2.0);
      case ThresholdCase::WeakHolder: return 1.0 / (1.0 + alpha / 2.0);
    }
    return 0;
  }
};

struct ThresholdReport {
  ThresholdCase which{};
  double target = 0;
  GrowthFit fit;
  bool pass = false;
  std::size_t modes = 0;
};

/// Solves the unregularised problem on log-spaced modes and compares the
/// fitted growth exponent with 1/s*.
inline ThresholdReport threshold_experiment(const ThresholdConfig& cfg) {
  const ModeSet all = enumerate_modes(cfg.model, cfg.cutoff);
  const ModeSet modes = select_log_spaced(all, cfg.mode_count, cfg.nu_min, cfg.nu_max);
  if (modes.size() < 6 || modes.modes.back().nu / modes.modes.front().nu < 10.0)
    throw std::invalid_argument("threshold experiment: insufficient frequency span");
  const auto speed = cfg.speed();
  RealFn a = [speed](double t) { return speed.formula(t); };
  const auto [lo, hi] = detail::speed_range(a, cfg.T, 0.0);
  (void)lo;
  StepPolicy policy = cfg.policy;
  policy.record_every = 0;
  SharedProblem shared{a, hi, {}, nullptr, generate_initial_data(cfg.data, modes), cfg.T, 0.0};
  const auto batch = solve_all_modes(modes, shared, policy, cfg.jobs);
  if (!batch.ok()) throw std::runtime_error("threshold experiment: " + batch.failures.front().second);
  ThresholdReport r;
  r.which = cfg.which;
  r.target = cfg.target();
  r.modes = modes.size();
  r.fit = growth_exponent_fit(batch.trajectories);
  r.pass = r.fit.theta <= r.target + cfg.tolerance;
  return r;
}

}  // namespace wavelab
