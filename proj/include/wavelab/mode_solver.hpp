#pragma once

// Per-mode integration of ∂ₜV = iν A(t) V + F(t), V = (iν û, ∂ₜû), F = (0, f̂).
//
// Step grids are dyadic: a mode uses N = min_intervals·2^k steps on
// [t_begin, t_end], and stage times are t_begin + (t_end − t_begin)·(j / 2N)
// for integer j. Two grids with N | N' therefore share stage times bit for
// bit, which lets one tabulated speed serve every mode of a batch while
// keeping each mode's result identical to a standalone solve.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wavelab/coefficients.hpp"
#include "wavelab/fit.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/spectra.hpp"
#include "wavelab/symmetrisers.hpp"

namespace wavelab {

using Complex = std::complex<double>;

inline double grid_time(double t_begin, double t_end, std::uint64_t num, std::uint64_t den) {
  return t_begin + (t_end - t_begin) * (double(num) / double(den));
}

/// Samples f(grid_time(t_begin, t_end, j, den)) for j = 0..den.
struct TimeTable {
  double t_begin = 0, t_end = 1;
  std::uint64_t den = 1;
  std::vector<double> values;

  static std::shared_ptr<const TimeTable> build(const RealFn& f, double t_begin, double t_end, std::uint64_t den,
                                                std::size_t jobs = 1) {
    auto table = std::make_shared<TimeTable>();
    table->t_begin = t_begin;
    table->t_end = t_end;
    table->den = den;
    table->values.resize(std::size_t(den) + 1);
    constexpr std::size_t chunk = 4096;
    const std::size_t chunks = (table->values.size() + chunk - 1) / chunk;
    parallel_for(chunks, jobs, [&](std::size_t c) {
      const std::size_t lo = c * chunk, hi = std::min(table->values.size(), lo + chunk);
      for (std::size_t j = lo; j < hi; ++j) table->values[j] = f(grid_time(t_begin, t_end, j, den));
    });
    return table;
  }
};

/// A real function of time, optionally backed by a table on a dyadic grid.
struct TimeFunction {
  RealFn fn;
  std::shared_ptr<const TimeTable> table;

  explicit operator bool() const { return bool(fn); }

  double at(double t_begin, double t_end, std::uint64_t num, std::uint64_t den) const {
    if (table && table->den % den == 0 && table->t_begin == t_begin && table->t_end == t_end)
      return table->values[std::size_t(num * (table->den / den))];
    return fn(grid_time(t_begin, t_end, num, den));
  }
};

struct StepPolicy {
  double theta_osc = 0.05;          // cap on ν√(sup a)·h
  double phase_tol = 1e-12;         // RK4 phase error budget relative to |V| over the run
  double mollifier_scale = 0.0;     // ω(ε) when the speed is a mollified net member
  double mollifier_fraction = 0.05; // h ≤ fraction·ω(ε)
  std::uint64_t min_intervals = 1;  // N is min_intervals·2^k
  std::uint64_t max_steps = 100'000'000;
  std::uint64_t record_every = 1;   // 0: once per output interval (N / min_intervals steps)
};

/// Largest admissible step for a mode. RK4 on y' = iωy loses ≈ ωT·z⁴/120 in
/// phase with z = ωh, so z is capped by both θ_osc and the phase budget.
inline double admissible_step(const StepPolicy& p, double nu, double speed_sup, double span) {
  const double omega = nu * std::sqrt(std::max(0.0, speed_sup)) + 1.0;
  const double z = std::min(p.theta_osc, std::pow(120.0 * p.phase_tol / (omega * span), 0.25));
  double h = z / omega;
  if (p.mollifier_scale > 0) h = std::min(h, p.mollifier_fraction * p.mollifier_scale);
  return h;
}

inline std::uint64_t step_count(const StepPolicy& p, double nu, double speed_sup, double span) {
  const double h = admissible_step(p, nu, speed_sup, span);
  std::uint64_t n = std::max<std::uint64_t>(1, p.min_intervals);
  while (span / double(n) > h) {
    if (n > (std::uint64_t(1) << 62)) throw std::overflow_error("step count overflow");
    n *= 2;
  }
  return n;
}

struct ModeProblem {
  double nu = 0;
  TimeFunction speed;
  double speed_sup = 0;  // sup of a over the interval; drives the step policy
  TimeFunction source;   // f̂(t) = source_scale · source(t); empty means zero
  Complex source_scale = 1.0;
  Complex u0 = 0, u1 = 0;
  double t_begin = 0, t_end = 1;
  std::optional<Vec2c> initial_state;  // overrides (u0, u1), e.g. for backward runs
  double quasi_eps = 0;                // > 0 also records E_ε = (Q_ε V, V)

  /// V(t_begin) = (iν û₀, û₁); for ν = 0 the state is (û, ∂ₜû).
  Vec2c initial() const {
    if (initial_state) return *initial_state;
    if (nu > 0) return {Complex(0, nu) * u0, u1};
    return {u0, u1};
  }
};

struct ModeTrajectory {
  double nu = 0;
  std::vector<double> t;
  std::vector<Vec2c> V;
  std::vector<double> energy;        // (S V, V) at recorded steps
  std::vector<double> quasi_energy;  // (Q_ε V, V) when requested
  std::uint64_t steps = 0;           // steps taken
  std::uint64_t planned_steps = 0;
  double step = 0;                   // signed step size
  bool completed = true;             // false when the step budget cut the run short
  double max_residual = 0;
  double residual_tolerance = 0;
  bool residual_ok = true;
  double initial_norm = 0;           // |V(t_begin)|
  double sup_norm = 0;               // max over every step of |V|
  double sup_energy = 0;

  /// û at recorded sample i.
  Complex u(std::size_t i) const { return nu > 0 ? V[i][0] / Complex(0, nu) : V[i][0]; }
  /// ∂ₜû at recorded sample i.
  Complex du(std::size_t i) const { return V[i][1]; }
  double growth() const { return initial_norm > 0 ? sup_norm / initial_norm : 0.0; }
};

inline double vec_norm(const Vec2c& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

/// (S V, V) with S = diag(a,1), or (Q_ε V, V) when eps > 0.
inline double energy(double a_value, const Vec2c& V, double eps = 0.0) {
  return (a_value + eps * eps) * std::norm(V[0]) + std::norm(V[1]);
}

/// Fixed-step classical RK4 on the complex 2-vector V.
inline ModeTrajectory integrate_mode(const ModeProblem& p, const StepPolicy& policy) {
  if (!p.speed) throw std::invalid_argument("integrate_mode: speed function missing");
  if (!(p.nu >= 0) || !std::isfinite(p.nu)) throw std::invalid_argument("integrate_mode: nu must be >= 0");
  const double span = std::abs(p.t_end - p.t_begin);
  ModeTrajectory tr;
  tr.nu = p.nu;
  Vec2c y = p.initial();
  tr.initial_norm = vec_norm(y);
  tr.sup_norm = tr.initial_norm;
  if (span == 0.0) {
    tr.t.push_back(p.t_begin);
    tr.V.push_back(y);
    tr.energy.push_back(energy(p.speed.at(p.t_begin, p.t_end, 0, 1), y));
    return tr;
  }

  const std::uint64_t N = step_count(policy, p.nu, p.speed_sup, span);
  const std::uint64_t den = 2 * N;
  const double h = (p.t_end - p.t_begin) / double(N);
  const bool first_order = p.nu > 0;
  const Complex inu(0, p.nu);
  tr.planned_steps = N;
  tr.step = h;
  const std::uint64_t steps = std::min(N, policy.max_steps);
  tr.completed = steps == N;
  const std::uint64_t stride = policy.record_every > 0 ? policy.record_every : N / std::max<std::uint64_t>(1, policy.min_intervals);

  auto a_at = [&](std::uint64_t j) { return p.speed.at(p.t_begin, p.t_end, j, den); };
  auto f_at = [&](std::uint64_t j) -> Complex {
    if (!p.source) return 0.0;
    return p.source_scale * p.source.at(p.t_begin, p.t_end, j, den);
  };
  auto rhs = [&](double a, Complex f, const Vec2c& v) -> Vec2c {
    if (first_order) return {inu * v[1], inu * a * v[0] + f};
    return {v[1], f};
  };
  auto record = [&](std::uint64_t n, const Vec2c& v, double a) {
    tr.t.push_back(grid_time(p.t_begin, p.t_end, n, N));
    tr.V.push_back(v);
    tr.energy.push_back(energy(a, v));
    if (p.quasi_eps > 0) tr.quasi_energy.push_back(energy(a, v, p.quasi_eps));
  };

  // Rolling window for the 5-point defect (−V₊₂ + 8V₊₁ − 8V₋₁ + V₋₂)/(12h) − V'.
  std::array<Vec2c, 5> win_v{};
  std::array<Vec2c, 5> win_d{};
  std::size_t filled = 0;
  auto push_defect = [&](const Vec2c& v, const Vec2c& d) {
    for (std::size_t i = 0; i + 1 < 5; ++i) {
      win_v[i] = win_v[i + 1];
      win_d[i] = win_d[i + 1];
    }
    win_v[4] = v;
    win_d[4] = d;
    if (++filled < 5) return;
    for (std::size_t c = 0; c < 2; ++c) {
      const Complex fd = (-win_v[4][c] + 8.0 * win_v[3][c] - 8.0 * win_v[1][c] + win_v[0][c]) / (12.0 * h);
      tr.max_residual = std::max(tr.max_residual, std::abs(fd - win_d[2][c]));
    }
  };

  double a0 = a_at(0);
  Complex f0 = f_at(0);
  record(0, y, a0);
  tr.sup_energy = tr.energy.back();
  Vec2c k1 = rhs(a0, f0, y);
  push_defect(y, k1);
  for (std::uint64_t n = 0; n < steps; ++n) {
    const double am = a_at(2 * n + 1), a1 = a_at(2 * n + 2);
    const Complex fm = f_at(2 * n + 1), f1 = f_at(2 * n + 2);
    Vec2c tmp;
    for (std::size_t c = 0; c < 2; ++c) tmp[c] = y[c] + 0.5 * h * k1[c];
    const Vec2c k2 = rhs(am, fm, tmp);
    for (std::size_t c = 0; c < 2; ++c) tmp[c] = y[c] + 0.5 * h * k2[c];
    const Vec2c k3 = rhs(am, fm, tmp);
    for (std::size_t c = 0; c < 2; ++c) tmp[c] = y[c] + h * k3[c];
    const Vec2c k4 = rhs(a1, f1, tmp);
    for (std::size_t c = 0; c < 2; ++c) y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);

    a0 = a1;
    f0 = f1;
    k1 = rhs(a0, f0, y);
    push_defect(y, k1);
    tr.sup_norm = std::max(tr.sup_norm, vec_norm(y));
    const double e = energy(a0, y);
    tr.sup_energy = std::max(tr.sup_energy, e);
    if ((n + 1) % stride == 0 || n + 1 == steps) record(n + 1, y, a0);
  }
  tr.steps = steps;
  tr.residual_tolerance = 1e-6 * (1.0 + p.nu * p.nu * p.speed_sup) * tr.sup_norm;
  tr.residual_ok = tr.max_residual <= tr.residual_tolerance;
  return tr;
}

/// Closed-form solution of û'' + a ν² û = f̂ with constant a > 0 (Duhamel
/// integral by adaptive quadrature). For aν² = 0 the polynomial limit is used.
inline std::pair<Complex, Complex> exact_constant_solution(double a, double nu, Complex u0, Complex u1,
                                                           const std::function<Complex(double)>& f, double t) {
  if (a < 0 || nu < 0) throw std::invalid_argument("exact_constant_solution: need a >= 0, nu >= 0");
  const double c = std::sqrt(a) * nu;
  if (c == 0.0) {
    Complex u = u0 + u1 * t, du = u1;
    if (f && t != 0.0) {
      u += integrate_adaptive_complex([&](double tau) { return (t - tau) * f(tau); }, 0.0, t);
      du += integrate_adaptive_complex(f, 0.0, t);
    }
    return {u, du};
  }
  Complex u = u0 * std::cos(c * t) + u1 * std::sin(c * t) / c;
  Complex du = -c * u0 * std::sin(c * t) + u1 * std::cos(c * t);
  if (f && t != 0.0) {
    // Panels of at most a few periods keep the adaptive rule well conditioned.
    const double period = 2.0 * std::numbers::pi / c;
    const auto panels = std::max<std::size_t>(1, std::size_t(std::ceil(std::abs(t) / (4.0 * period))));
    for (std::size_t k = 0; k < panels; ++k) {
      const double lo = t * double(k) / double(panels), hi = t * double(k + 1) / double(panels);
      u += integrate_adaptive_complex([&](double tau) { return std::sin(c * (t - tau)) / c * f(tau); }, lo, hi);
      du += integrate_adaptive_complex([&](double tau) { return std::cos(c * (t - tau)) * f(tau); }, lo, hi);
    }
  }
  return {u, du};
}

/// Problem data shared by every mode of a batch.
struct SharedProblem {
  RealFn speed;            // a(t) (or a member a_ε of a net)
  double speed_sup = 0;    // sup a on [0, T]
  SourceSpec source;
  const MollifiedFunction* mollified_source = nullptr;  // g_ε for separable sources
  CauchyData data;
  double T = 1.0;
  double quasi_eps = 0;
};

struct BatchResult {
  std::vector<ModeTrajectory> trajectories;  // ModeSet order
  std::vector<std::pair<std::size_t, std::string>> failures;
  bool ok() const { return failures.empty(); }
};

/// Solves every mode independently (in parallel when jobs > 1). The speed,
/// and a separable source profile, are tabulated once on the finest grid of
/// the batch; results are identical to standalone solves in any order.
inline BatchResult solve_all_modes(const ModeSet& modes, const SharedProblem& shared, const StepPolicy& policy,
                                   std::size_t jobs = 1) {
  BatchResult out;
  if (modes.empty()) return out;
  if (shared.data.u0.size() != modes.size() || shared.data.u1.size() != modes.size())
    throw std::invalid_argument("solve_all_modes: data size does not match the mode set");
  std::uint64_t n_max = 1;
  for (const auto& m : modes.modes) n_max = std::max(n_max, step_count(policy, m.nu, shared.speed_sup, shared.T));
  // Past the table cap modes evaluate the functions directly, which gives the same values.
  constexpr std::uint64_t table_cap = std::uint64_t(1) << 24;
  const bool tabulate = 2 * n_max <= table_cap;
  TimeFunction speed{shared.speed, tabulate ? TimeTable::build(shared.speed, 0.0, shared.T, 2 * n_max, jobs) : nullptr};
  TimeFunction profile;
  if (shared.source.kind == SourceSpec::Kind::Separable) {
    RealFn g = shared.source.time_function(0, shared.mollified_source);
    profile = TimeFunction{g, tabulate ? TimeTable::build(g, 0.0, shared.T, 2 * n_max, jobs) : nullptr};
  }
  out.trajectories.resize(modes.size());
  std::vector<std::string> errors(modes.size());
  parallel_for(modes.size(), jobs, [&](std::size_t i) {
    try {
      ModeProblem p;
      p.nu = modes[i].nu;
      p.speed = speed;
      p.speed_sup = shared.speed_sup;
      if (shared.source.kind == SourceSpec::Kind::Separable) {
        p.source = profile;
        p.source_scale = shared.source.modal_factor(p.nu);
      } else if (shared.source.kind == SourceSpec::Kind::Tabulated) {
        p.source = TimeFunction{shared.source.time_function(i), nullptr};
      }
      p.u0 = shared.data.u0[i];
      p.u1 = shared.data.u1[i];
      p.t_begin = 0.0;
      p.t_end = shared.T;
      p.quasi_eps = shared.quasi_eps;
      out.trajectories[i] = integrate_mode(p, policy);
      if (!out.trajectories[i].completed) errors[i] = "step budget exceeded";
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (!errors[i].empty()) out.failures.emplace_back(i, errors[i]);
  return out;
}

struct GrowthFit {
  double theta = 0;       // fitted exponent in sup|V| ≤ K|V(0)| exp(K ν^θ)
  double rate = 0;        // K of the fitted model (power of ν when θ = 0)
  double intercept = 0;
  double residual = 0;    // RMS of the log-growth fit
  bool no_loss = false;   // every growth ratio ≤ 1
  std::vector<double> nus, growths;
  std::vector<double> candidate_residuals;
};

/// Fits log G(ν) = c₀ + c₁ b_θ(ν), b_θ = (ν^θ − 1)/θ (ln ν at θ = 0), with
/// c₁ ≥ 0, for each candidate θ, and returns the smallest θ whose sum of
/// squares is within 5% of the best one. The Box–Cox basis makes θ = 0 the
/// polynomial-loss limit of the exponential model.
inline GrowthFit growth_exponent_fit(const std::vector<ModeTrajectory>& trajectories,
                                     std::vector<double> theta_candidates = {}) {
  if (theta_candidates.empty())
    for (int i = 0; i <= 50; ++i) theta_candidates.push_back(0.02 * i);
  std::sort(theta_candidates.begin(), theta_candidates.end());
  GrowthFit g;
  for (const auto& tr : trajectories) {
    if (!(tr.nu > 0) || !(tr.initial_norm > 0)) continue;
    g.nus.push_back(tr.nu);
    g.growths.push_back(tr.growth());
  }
  if (g.nus.size() < 6) throw std::invalid_argument("growth fit needs at least 6 modes with nonzero data");
  const auto [lo, hi] = std::minmax_element(g.nus.begin(), g.nus.end());
  if (*hi / *lo < 10.0 * (1 - 1e-12)) throw std::invalid_argument("growth fit needs a decade of frequencies");
  if (*std::max_element(g.growths.begin(), g.growths.end()) <= 1.0 + 1e-12) {
    g.no_loss = true;
    return g;
  }
  std::vector<double> y(g.growths.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::log(g.growths[i]);
  double ymean = 0;
  for (double v : y) ymean += v;
  ymean /= double(y.size());
  double sst = 0;
  for (double v : y) sst += (v - ymean) * (v - ymean);

  struct Cand {
    double theta, ssr, slope, intercept;
  };
  std::vector<Cand> cands;
  for (double th : theta_candidates) {
    std::vector<double> x(g.nus.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = th > 0 ? (std::pow(g.nus[i], th) - 1.0) / th : std::log(g.nus[i]);
    auto f = fit_line(x, y);
    double ssr = f.rms_residual * f.rms_residual * double(y.size());
    if (f.slope < 0 || f.degenerate) {
      f.slope = 0;
      f.intercept = ymean;
      ssr = sst;
    }
    cands.push_back({th, ssr, f.slope, f.intercept});
    g.candidate_residuals.push_back(std::sqrt(ssr / double(y.size())));
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) best = std::min(best, c.ssr);
  for (const auto& c : cands) {
    if (c.ssr <= best * 1.05 + 1e-14 * (sst + 1.0)) {
      g.theta = c.theta;
      g.rate = c.theta > 0 ? c.slope / c.theta : c.slope;
      g.intercept = c.theta > 0 ? c.intercept - c.slope / c.theta : c.intercept;
      g.residual = std::sqrt(c.ssr / double(y.size()));
      break;
    }
  }
  return g;
}

}  // namespace wavelab
