#pragma once

// Weighted ℓ² norms over mode coefficients: L-Sobolev, Gevrey (Roumieu and
// Beurling) and the dual ultradistribution seminorms, plus the a-priori
// energy inequality for strictly hyperbolic C¹ speeds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavelab/coefficients.hpp"
#include "wavelab/fit.hpp"
#include "wavelab/mode_solver.hpp"
#include "wavelab/spectra.hpp"

namespace wavelab {

/// Coefficients f̂(ξ) over a mode set, one per mode in ModeSet order.
struct SpectralFunction {
  const ModeSet* modes = nullptr;
  std::vector<Complex> coef;

  void validate() const {
    if (!modes) throw std::invalid_argument("spectral function without a mode set");
    if (coef.size() != modes->size()) throw std::invalid_argument("spectral function: one coefficient per mode required");
    for (const auto& c : coef)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("spectral function: non-finite coefficient");
  }
};

struct WeightSpec {
  enum class Kind { Sobolev, GevreyRoumieu, GevreyBeurling, DualRoumieu, DualBeurling };
  Kind kind = Kind::Sobolev;
  double order = 0;  // s for Sobolev; A, B, δ or η otherwise
  double s = 1;      // Gevrey order for the exponential weights

  static WeightSpec sobolev(double s) { return {Kind::Sobolev, s, 1}; }
  static WeightSpec gevrey_roumieu(double A, double s) { return {Kind::GevreyRoumieu, A, s}; }
  static WeightSpec gevrey_beurling(double B, double s) { return {Kind::GevreyBeurling, B, s}; }
  static WeightSpec dual_roumieu(double delta, double s) { return {Kind::DualRoumieu, delta, s}; }
  static WeightSpec dual_beurling(double eta, double s) { return {Kind::DualBeurling, eta, s}; }

  void validate() const {
    if (!std::isfinite(order)) throw std::invalid_argument("weight parameter must be finite");
    if (kind == Kind::Sobolev) return;
    if (!(order > 0)) throw std::invalid_argument("exponential weight parameter must be > 0");
    if (!(s >= 1) || !std::isfinite(s)) throw std::invalid_argument("Gevrey order s must be >= 1");
  }

  std::string name() const {
    switch (kind) {
      case Kind::Sobolev: return "sobolev";
      case Kind::GevreyRoumieu: return "gevrey_roumieu";
      case Kind::GevreyBeurling: return "gevrey_beurling";
      case Kind::DualRoumieu: return "dual_roumieu";
      case Kind::DualBeurling: return "dual_beurling";
    }
    return "";
  }

  /// log w(ξ) from |λ_ξ| (after lifting). Exponential weights use
  /// |λ|^{1/2s} = ν^{1/s}.
  double log_weight(double abs_lambda) const {
    switch (kind) {
      case Kind::Sobolev:
        if (abs_lambda == 0.0) {
          if (order == 0) return 0.0;
          if (order > 0) return -std::numeric_limits<double>::infinity();
          throw std::domain_error("negative Sobolev order at a zero eigenvalue");
        }
        return order * std::log(abs_lambda);
      case Kind::GevreyRoumieu:
      case Kind::GevreyBeurling: return 2.0 * order * std::pow(abs_lambda, 0.5 / s);
      case Kind::DualRoumieu:
      case Kind::DualBeurling: return -2.0 * order * std::pow(abs_lambda, 0.5 / s);
    }
    return 0;
  }
};

/// log √(Σ w(ξ)|c_ξ|²), accumulated in log space: the largest term is
/// factored out and the rest are summed pairwise in a fixed tree order.
inline double log_weighted_norm(const std::vector<double>& abs_lambda, const std::vector<Complex>& coef,
                                const WeightSpec& w) {
  if (abs_lambda.size() != coef.size()) throw std::invalid_argument("weighted norm: size mismatch");
  std::vector<double> logs;
  logs.reserve(coef.size());
  for (std::size_t i = 0; i < coef.size(); ++i) {
    const double c = std::abs(coef[i]);
    if (c == 0.0) continue;
    const double lw = w.log_weight(abs_lambda[i]);
    if (lw == -std::numeric_limits<double>::infinity()) continue;
    logs.push_back(lw + 2.0 * std::log(c));
  }
  if (logs.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(logs.begin(), logs.end());
  for (double& v : logs) v = std::exp(v - m);
  return 0.5 * (m + std::log(pairwise_sum(logs)));
}

inline std::vector<double> abs_eigenvalues(const ModeSet& modes) {
  std::vector<double> out;
  out.reserve(modes.size());
  for (const auto& m : modes.modes) out.push_back(std::abs(m.lambda));
  return out;
}

/// √(Σ w(ξ)|f̂(ξ)|²); +∞ when the value exceeds the double range.
inline double weighted_norm(const SpectralFunction& f, const WeightSpec& w) {
  f.validate();
  w.validate();
  return std::exp(log_weighted_norm(abs_eigenvalues(*f.modes), f.coef, w));
}

/// Weighted sum over the shell cutoff < |λ| ≤ extension·cutoff for a known
/// amplitude law: an estimate of what the truncation leaves out.
inline double truncation_tail_estimate(const SpectralModel& model, double cutoff, const DecayLaw& law,
                                       const WeightSpec& w, double extension = 4.0) {
  const ModeSet wide = enumerate_modes(model, cutoff * extension);
  std::vector<double> lam;
  std::vector<Complex> coef;
  for (const auto& m : wide.modes) {
    if (std::abs(m.lambda) <= cutoff) continue;
    lam.push_back(std::abs(m.lambda));
    coef.push_back(law.amplitude(m.nu));
  }
  if (lam.empty()) return 0.0;
  return std::exp(log_weighted_norm(lam, coef, w));
}

struct RadiusFit {
  double radius = 0;
  bool infinite = false;  // finite support: every radius works
  double residual = 0;
  std::size_t points = 0;
};

/// Largest A with ‖e^{A L^{1/2s}} f‖ < ∞, estimated as the least-squares
/// slope of −log|f̂| against ν^{1/s} over the top decade of ν among nonzero
/// coefficients. Non-decaying input gives radius 0.
inline RadiusFit gevrey_radius_fit(const SpectralFunction& f, double s) {
  f.validate();
  if (!(s >= 1)) throw std::invalid_argument("Gevrey order s must be >= 1");
  std::vector<double> nu, mag;
  for (std::size_t i = 0; i < f.coef.size(); ++i) {
    const double c = std::abs(f.coef[i]);
    if (c == 0.0) continue;
    nu.push_back((*f.modes)[i].nu);
    mag.push_back(c);
  }
  RadiusFit r;
  if (nu.empty()) throw std::invalid_argument("radius fit: all coefficients vanish");
  const double top = *std::max_element(nu.begin(), nu.end());
  std::vector<double> x, y;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] < top / 10.0) continue;
    x.push_back(std::pow(nu[i], 1.0 / s));
    y.push_back(-std::log(mag[i]));
  }
  r.points = x.size();
  const bool distinct = x.size() >= 2 && *std::min_element(x.begin(), x.end()) < *std::max_element(x.begin(), x.end());
  if (nu.size() == 1 || !distinct) {
    r.infinite = nu.size() == 1;
    r.radius = r.infinite ? std::numeric_limits<double>::infinity() : 0.0;
    return r;
  }
  const auto fit = fit_line(x, y);
  r.radius = std::max(0.0, fit.slope);
  r.residual = fit.rms_residual;
  return r;
}

/// Σ |λ|^{s} |c|² (0⁰ = 1).
inline double sobolev_sq(const std::vector<double>& abs_lambda, const std::vector<Complex>& c, double s) {
  const double l = log_weighted_norm(abs_lambda, c, WeightSpec::sobolev(s));
  return std::exp(2.0 * l);
}

/// Sample times shared by every trajectory; throws when the grids differ.
inline const std::vector<double>& common_times(const std::vector<ModeTrajectory>& trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("no trajectories");
  const auto& t = trajectories.front().t;
  for (const auto& tr : trajectories)
    if (tr.t != t) throw std::invalid_argument("trajectories are not recorded on a common time grid");
  return t;
}

/// Coefficients of u(t_i) or ∂ₜu(t_i) across modes.
inline std::vector<Complex> slice(const std::vector<ModeTrajectory>& trajectories, std::size_t i, bool derivative) {
  std::vector<Complex> c;
  c.reserve(trajectories.size());
  for (const auto& tr : trajectories) c.push_back(derivative ? tr.du(i) : tr.u(i));
  return c;
}

/// sup over the given times of ‖f(t)‖²_{H^s}.
inline double source_sup_sq(const SourceSpec& source, const ModeSet& modes, double s, const std::vector<double>& times,
                             const MollifiedFunction* mollified = nullptr) {
  if (source.is_zero()) return 0.0;
  const auto lam = abs_eigenvalues(modes);
  std::vector<RealFn> fns;
  for (std::size_t i = 0; i < modes.size(); ++i) fns.push_back(source.time_function(i, mollified));
  double sup = 0;
  std::vector<Complex> c(modes.size());
  for (double t : times) {
    for (std::size_t i = 0; i < modes.size(); ++i) c[i] = source.modal_factor(modes[i].nu) * fns[i](t);
    sup = std::max(sup, sobolev_sq(lam, c, s));
  }
  return sup;
}

struct AprioriReport {
  bool holds = true;
  double margin = std::numeric_limits<double>::infinity();  // min over t of rhs / lhs
  double constant = 0;
  std::vector<double> t, lhs;
  double rhs = 0;
};

/// ‖u(t)‖²_{H^{s+1}} + ‖∂ₜu(t)‖²_{H^s} ≤ C(‖u₀‖²_{H^{s+1}} + ‖u₁‖²_{H^s} + ‖f‖²_{C([0,T],H^s)})
/// at every recorded t, with the Gronwall constant
/// C = exp(T(sup|a′| + 1)/min(a₀,1))·max(a₁,1,T)/min(a₀,1).
inline AprioriReport apriori_estimate_check(const ModeSet& modes, const std::vector<ModeTrajectory>& trajectories,
                                            const CauchyData& data, double source_sup_sq_norm, double s, double a0,
                                            double a1, double sup_da, double T) {
  if (!(a0 > 0)) throw std::invalid_argument("a-priori estimate needs a strictly positive speed");
  if (trajectories.size() != modes.size() || data.u0.size() != modes.size())
    throw std::invalid_argument("a-priori estimate: sizes do not match the mode set");
  AprioriReport r;
  const double m0 = std::min(a0, 1.0);
  r.constant = std::exp(T * (sup_da + 1.0) / m0) * std::max({a1, 1.0, T}) / m0;
  const auto lam = abs_eigenvalues(modes);
  r.rhs = r.constant * (sobolev_sq(lam, data.u0, s + 1) + sobolev_sq(lam, data.u1, s) + source_sup_sq_norm);
  const auto& times = common_times(trajectories);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double lhs = sobolev_sq(lam, slice(trajectories, i, false), s + 1) + sobolev_sq(lam, slice(trajectories, i, true), s);
    r.t.push_back(times[i]);
    r.lhs.push_back(lhs);
    if (lhs > r.rhs * (1 + 1e-12)) r.holds = false;
    if (lhs > 0) r.margin = std::min(r.margin, r.rhs / lhs);
  }
  return r;
}

/// Norm time series of a solved family at the common sample times:
/// ‖u‖_{H^{s+1}}, ‖∂ₜu‖_{H^s}, then each extra weight applied to u.
struct NormSeries {
  std::vector<double> t;
  std::vector<double> u_norm, du_norm;
  std::vector<std::vector<double>> extra;  // extra[w][i]
};

inline NormSeries norm_series(const ModeSet& modes, const std::vector<ModeTrajectory>& trajectories, double s,
                              const std::vector<WeightSpec>& weights) {
  const auto& times = common_times(trajectories);
  const auto lam = abs_eigenvalues(modes);
  NormSeries ns;
  ns.t = times;
  ns.extra.resize(weights.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto u = slice(trajectories, i, false);
    ns.u_norm.push_back(std::exp(log_weighted_norm(lam, u, WeightSpec::sobolev(s + 1))));
    ns.du_norm.push_back(std::exp(log_weighted_norm(lam, slice(trajectories, i, true), WeightSpec::sobolev(s))));
    for (std::size_t w = 0; w < weights.size(); ++w) ns.extra[w].push_back(std::exp(log_weighted_norm(lam, u, weights[w])));
  }
  return ns;
}

}  // namespace wavelab
