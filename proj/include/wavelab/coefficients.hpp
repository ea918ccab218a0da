#pragma once

// Propagation speeds a(t), Friedrichs mollifiers, scale rules ω(ε), the
// mollified nets a_ε = a ∗ ψ_{ω(ε)}, and generators for sources and Cauchy
// data in coefficient space.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wavelab/fit.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/spectra.hpp"

namespace wavelab {

using RealFn = std::function<double(double)>;

struct Atom {
  double t = 0;     // location in [0, T]
  double mass = 0;  // c_j > 0
};

namespace speed {

/// Smooth speed given by closed forms for a and a'.
struct Analytic {
  RealFn value;
  RealFn derivative;
  double lower = 0;  // a₀ with a ≥ a₀ on [0,T]
  std::string label = "analytic";
};

/// Hölder-continuous speed of order α.
///   cusp:        a(t) = base + scale·|t − center|^α
///   oscillatory: a(t) = base + scale·Σ_{j<terms} 2^{−jα}(1 + cos(2^j·2πt))/2
struct Holder {
  enum class Family { Cusp, Oscillatory };
  Family family = Family::Cusp;
  double base = 1.0;
  double alpha = 0.5;
  double center = 0.5;
  double scale = 1.0;
  int terms = 16;
};

/// a(t) = (t − center)^{2m} + shift, with declared smoothness ℓ used as
/// bookkeeping for the Gevrey threshold 1 + ℓ/2.
struct WeaklyHyperbolic {
  double center = 0.0;
  int m = 1;
  double shift = 0.0;
  double smoothness = 2.0;
};

/// Positive measure: bounded density plus finitely many Dirac atoms.
struct Measure {
  RealFn density;  // empty means zero density
  double density_lower = 0;
  std::vector<Atom> atoms;
};

}  // namespace speed

class PropagationSpeed {
 public:
  using Variant = std::variant<speed::Analytic, speed::Holder, speed::WeaklyHyperbolic, speed::Measure>;

  PropagationSpeed(Variant v, double horizon) : v_(std::move(v)), T_(horizon) { validate(); }

  static PropagationSpeed constant(double c, double T = 1.0) {
    return {speed::Analytic{[c](double) { return c; }, [](double) { return 0.0; }, c, "constant"}, T};
  }
  /// offset + amplitude·sin(frequency·t + phase)
  static PropagationSpeed sinusoid(double offset, double amplitude, double frequency = 1.0, double phase = 0.0,
                                   double T = 1.0) {
    return {speed::Analytic{[=](double t) { return offset + amplitude * std::sin(frequency * t + phase); },
                            [=](double t) { return amplitude * frequency * std::cos(frequency * t + phase); },
                            offset - std::abs(amplitude), "sinusoid"},
            T};
  }
  static PropagationSpeed holder_cusp(double base, double alpha, double center = 0.5, double scale = 1.0,
                                      double T = 1.0) {
    return {speed::Holder{speed::Holder::Family::Cusp, base, alpha, center, scale, 0}, T};
  }
  static PropagationSpeed weakly_hyperbolic(double center, int m, double shift = 0.0, double smoothness = 2.0,
                                            double T = 1.0) {
    return {speed::WeaklyHyperbolic{center, m, shift, smoothness}, T};
  }
  static PropagationSpeed measure(RealFn density, double density_lower, std::vector<Atom> atoms, double T = 1.0) {
    return {speed::Measure{std::move(density), density_lower, std::move(atoms)}, T};
  }

  const Variant& variant() const { return v_; }
  double horizon() const { return T_; }

  bool is_measure() const { return std::holds_alternative<speed::Measure>(v_); }
  std::span<const Atom> atoms() const {
    if (auto* m = std::get_if<speed::Measure>(&v_)) return m->atoms;
    return {};
  }

  /// a₀ with a ≥ a₀ (for a measure, the density's lower bound).
  double lower_bound() const {
    return std::visit(
        [](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, speed::Analytic>) return s.lower;
          else if constexpr (std::is_same_v<S, speed::Holder>) return s.base;
          else if constexpr (std::is_same_v<S, speed::WeaklyHyperbolic>) return s.shift;
          else return s.density_lower;
        },
        v_);
  }
  bool strict() const { return lower_bound() > 0; }

  /// Hölder order of a (1 for Lipschitz families, +∞ for smooth ones).
  double holder_exponent() const {
    if (auto* h = std::get_if<speed::Holder>(&v_)) return h->alpha;
    return std::numeric_limits<double>::infinity();
  }

  /// Closed-form value on all of R (measure: density only). Used inside
  /// convolutions, which reach up to ω outside [0, T].
  double formula(double t) const {
    return std::visit(
        [t](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, speed::Analytic>) {
            return s.value(t);
          } else if constexpr (std::is_same_v<S, speed::Holder>) {
            if (s.family == speed::Holder::Family::Cusp) return s.base + s.scale * std::pow(std::abs(t - s.center), s.alpha);
            double w = 0;
            for (int j = 0; j < s.terms; ++j)
              w += std::pow(2.0, -double(j) * s.alpha) * 0.5 * (1.0 + std::cos(std::ldexp(2.0 * std::numbers::pi, j) * t));
            return s.base + s.scale * w;
          } else if constexpr (std::is_same_v<S, speed::WeaklyHyperbolic>) {
            return std::pow(t - s.center, 2 * s.m) + s.shift;
          } else {
            return s.density ? s.density(t) : 0.0;
          }
        },
        v_);
  }

  /// Closed-form derivative where one exists; throws for Hölder and measure speeds.
  double formula_derivative(double t) const {
    if (auto* a = std::get_if<speed::Analytic>(&v_)) {
      if (!a->derivative) throw std::logic_error("analytic speed without derivative");
      return a->derivative(t);
    }
    if (auto* w = std::get_if<speed::WeaklyHyperbolic>(&v_))
      return double(2 * w->m) * std::pow(t - w->center, 2 * w->m - 1);
    throw std::logic_error("speed has no pointwise derivative; mollify it first");
  }
  bool has_derivative() const {
    return std::holds_alternative<speed::Analytic>(v_) || std::holds_alternative<speed::WeaklyHyperbolic>(v_);
  }

  void validate() const {
    if (!(T_ > 0) || !std::isfinite(T_)) throw std::invalid_argument("speed horizon T must be > 0");
    std::visit(
        [this](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, speed::Analytic>) {
            if (!s.value) throw std::invalid_argument("analytic speed needs a value function");
            if (s.lower < 0) throw std::invalid_argument("analytic speed lower bound must be >= 0");
          } else if constexpr (std::is_same_v<S, speed::Holder>) {
            if (!(s.alpha > 0 && s.alpha < 2)) throw std::invalid_argument("Hölder exponent must lie in (0,2)");
            if (s.base < 0) throw std::invalid_argument("Hölder base must be >= 0");
            if (s.scale < 0) throw std::invalid_argument("Hölder scale must be >= 0");
          } else if constexpr (std::is_same_v<S, speed::WeaklyHyperbolic>) {
            if (s.m < 1) throw std::invalid_argument("weakly hyperbolic power m must be >= 1");
            if (s.shift < 0) throw std::invalid_argument("weakly hyperbolic shift must be >= 0");
          } else {
            if (s.density_lower < 0) throw std::invalid_argument("measure density must be >= 0");
            for (const auto& at : s.atoms) {
              if (!(at.mass > 0)) throw std::invalid_argument("measure atoms must have positive mass");
              if (at.t < 0 || at.t > T_) throw std::invalid_argument("measure atoms must lie in [0,T]");
            }
          }
        },
        v_);
  }

 private:
  Variant v_;
  double T_;
};

/// Point value a(t) on [0, T]. Evaluating a measure exactly at one of its
/// atoms is an error: the value only exists after mollification.
inline double sample_speed(const PropagationSpeed& a, double t) {
  const double T = a.horizon();
  const double slack = 1e-12 * std::max(1.0, T);
  if (t < -slack || t > T + slack) throw std::domain_error("sample_speed: t outside [0,T]");
  for (const auto& at : a.atoms())
    if (std::abs(t - at.t) <= slack) throw std::domain_error("sample_speed: evaluation at a Dirac atom; mollify first");
  return a.formula(t);
}

/// Even bump ψ(t) = N·exp(−p/(1−t²)) on (−1,1), zero outside, ∫ψ = 1.
/// p ("sharpness") distinguishes mollifiers; p = 1 is the standard profile.
class Mollifier {
 public:
  static constexpr int kMaxDerivative = 4;

  explicit Mollifier(double sharpness = 1.0) : p_(sharpness) {
    if (!(p_ > 0) || !std::isfinite(p_)) throw std::invalid_argument("mollifier sharpness must be > 0");
    const double mass = integrate_adaptive([this](double t) { return raw(t); }, -1.0, 1.0, 1e-14, 15);
    norm_ = 1.0 / mass;
    // ψ^{(k)} = N·P_k(t)·exp(−p/(1−t²)) / (1−t²)^{2k} with
    // P_{k+1} = (1−t²)² P_k' + 4k t (1−t²) P_k − 2p t P_k.
    polys_[0] = {1.0};
    for (int k = 0; k < kMaxDerivative; ++k) {
      const auto& P = polys_[std::size_t(k)];
      std::vector<double> dP(P.size() > 1 ? P.size() - 1 : 1, 0.0);
      for (std::size_t i = 1; i < P.size(); ++i) dP[i - 1] = double(i) * P[i];
      std::vector<double> next(P.size() + 4, 0.0);
      const std::array<double, 5> one_minus_t2_sq{1, 0, -2, 0, 1};
      for (std::size_t i = 0; i < dP.size(); ++i)
        for (std::size_t j = 0; j < one_minus_t2_sq.size(); ++j) next[i + j] += one_minus_t2_sq[j] * dP[i];
      for (std::size_t i = 0; i < P.size(); ++i) {
        next[i + 1] += (4.0 * double(k) - 2.0 * p_) * P[i];
        next[i + 3] += -4.0 * double(k) * P[i];
      }
      while (next.size() > 1 && next.back() == 0.0) next.pop_back();
      polys_[std::size_t(k) + 1] = std::move(next);
    }
  }

  double sharpness() const { return p_; }
  double normalisation() const { return norm_; }

  double operator()(double t) const { return derivative(t, 0); }

  /// k-th derivative, 0 ≤ k ≤ kMaxDerivative.
  double derivative(double t, int k) const {
    if (k < 0 || k > kMaxDerivative) throw std::invalid_argument("mollifier derivative order out of range");
    const double x = 1.0 - t * t;
    if (!(x > 0)) return 0.0;
    const double e = std::exp(-p_ / x);
    if (e == 0.0) return 0.0;
    const auto& P = polys_[std::size_t(k)];
    double poly = 0;
    for (std::size_t i = P.size(); i-- > 0;) poly = poly * t + P[i];
    return norm_ * poly * e / std::pow(x, 2 * k);
  }

  friend bool operator==(const Mollifier& a, const Mollifier& b) { return a.p_ == b.p_; }

 private:
  double raw(double t) const {
    const double x = 1.0 - t * t;
    return x > 0 ? std::exp(-p_ / x) : 0.0;
  }

  double p_;
  double norm_ = 1.0;
  std::array<std::vector<double>, kMaxDerivative + 1> polys_{};
};

/// ω(ε): either ε^p or constant/log(1/ε).
struct ScaleRule {
  enum class Kind { Power, Logarithmic };
  Kind kind = Kind::Power;
  double parameter = 1.0;  // p for Power, the constant for Logarithmic

  static ScaleRule power(double p = 1.0) { return {Kind::Power, p}; }
  static ScaleRule logarithmic(double constant = 1.0) { return {Kind::Logarithmic, constant}; }

  /// Largest ε accepted by the logarithmic rule.
  static double log_rule_max_epsilon() { return std::exp(-2.0); }

  void check(double eps) const {
    if (!(eps > 0 && eps < 1)) throw std::domain_error("epsilon must lie in (0,1)");
    if (kind == Kind::Logarithmic && eps > log_rule_max_epsilon())
      throw std::domain_error("logarithmic scale rule requires epsilon <= e^-2");
    if (!(parameter > 0)) throw std::domain_error("scale rule parameter must be > 0");
  }

  double omega(double eps) const {
    check(eps);
    if (kind == Kind::Power) return std::pow(eps, parameter);
    return parameter / std::log(1.0 / eps);
  }
};

/// g ∗ ψ_w + Σ c_j ψ_w(· − t_j), with ψ_w(t) = w^{-1} ψ(t/w). The smooth part
/// uses the 64-point Gauss–Legendre rule on supp ψ; derivatives move onto ψ.
class MollifiedFunction {
 public:
  MollifiedFunction(RealFn g, std::vector<Atom> atoms, Mollifier psi, double width)
      : g_(std::move(g)), atoms_(std::move(atoms)), psi_(std::move(psi)), w_(width) {
    if (!(w_ > 0) || !std::isfinite(w_)) throw std::invalid_argument("mollification width must be > 0");
    // Discrete kernel mass, so that constants are reproduced to rounding.
    discrete_mass_ = gauss_legendre_64().symmetric_sum([this](double tau) { return psi_(tau); });
  }

  double width() const { return w_; }
  const Mollifier& mollifier() const { return psi_; }

  /// ∂ₜᵏ of the mollified function at t.
  double derivative(double t, int k = 0) const {
    double smooth = 0;
    if (g_) {
      const auto& gl = gauss_legendre_64();
      smooth = gl.symmetric_sum([&](double tau) { return g_(t - w_ * tau) * psi_.derivative(tau, k); });
      smooth *= std::pow(w_, -k) / discrete_mass_;
    }
    double atoms = 0;
    for (const auto& at : atoms_) atoms += at.mass * std::pow(w_, -1 - k) * psi_.derivative((t - at.t) / w_, k);
    const double v = smooth + atoms;
    if (!std::isfinite(v)) throw std::runtime_error("mollification produced a non-finite value");
    return v;
  }
  double operator()(double t) const { return derivative(t, 0); }

 private:
  RealFn g_;
  std::vector<Atom> atoms_;
  Mollifier psi_;
  double w_;
  double discrete_mass_ = 1.0;
};

/// Member a_ε of the regularised net together with its scale.
struct MollifiedSpeed {
  MollifiedFunction net;
  double epsilon = 0;
  double omega = 0;
  double lower = 0;  // ã₀ = a₀·∫ψ = a₀

  double operator()(double t) const { return net(t); }
  double derivative(double t, int k = 1) const { return net.derivative(t, k); }
};

inline MollifiedSpeed mollify_speed(const PropagationSpeed& a, const Mollifier& psi, const ScaleRule& rule, double eps) {
  const double w = rule.omega(eps);
  RealFn g;
  std::vector<Atom> atoms;
  if (auto* m = std::get_if<speed::Measure>(&a.variant())) {
    g = m->density;
    atoms = m->atoms;
  } else {
    g = [a](double t) { return a.formula(t); };
  }
  return {MollifiedFunction(std::move(g), std::move(atoms), psi, w), eps, w, a.lower_bound()};
}

/// max |f| over a uniform grid of [t0, t1] with spacing at most `spacing`.
inline double sup_abs_on_grid(const RealFn& f, double t0, double t1, double spacing) {
  const auto n = std::size_t(std::ceil((t1 - t0) / spacing));
  double m = 0;
  for (std::size_t i = 0; i <= n; ++i) m = std::max(m, std::abs(f(t0 + (t1 - t0) * double(i) / double(n))));
  return m;
}

/// Grid spacing that resolves both [0,T] and a kernel of width w.
inline double resolving_spacing(double T, double w, double per_width = 20.0, std::size_t min_points = 2000) {
  return std::min(T / double(min_points), w / per_width);
}

struct ExponentReport {
  double exponent = 0;
  double residual = 0;
  bool degenerate = false;  // all values equal (or identically zero): exponent set to 0
  std::vector<double> epsilons;
  std::vector<double> scales;  // ω(ε) or ε, whatever the fit is against
  std::vector<double> values;
};

/// Slope of log sup_t |∂ₜᵏ a_ε| against log ω(ε) over the ε grid.
inline ExponentReport moderateness_bound_check(const PropagationSpeed& a, const Mollifier& psi, const ScaleRule& rule,
                                               int k, const std::vector<double>& eps_grid) {
  if (k < 0 || k > Mollifier::kMaxDerivative) throw std::invalid_argument("derivative order out of range");
  if (eps_grid.size() < 5) throw std::invalid_argument("moderateness check needs at least 5 epsilons");
  const auto [lo, hi] = std::minmax_element(eps_grid.begin(), eps_grid.end());
  if (*hi / *lo < 100.0 * (1 - 1e-12)) throw std::invalid_argument("epsilon grid must span at least two decades");
  ExponentReport rep;
  for (double eps : eps_grid) {
    const auto net = mollify_speed(a, psi, rule, eps);
    const double sup = sup_abs_on_grid([&](double t) { return net.derivative(t, k); }, 0.0, a.horizon(),
                                       resolving_spacing(a.horizon(), net.omega));
    rep.epsilons.push_back(eps);
    rep.scales.push_back(net.omega);
    rep.values.push_back(sup);
  }
  const auto fit = fit_loglog(rep.scales, rep.values);
  rep.exponent = fit.degenerate ? 0.0 : fit.slope;
  rep.residual = fit.rms_residual;
  rep.degenerate = fit.degenerate;
  return rep;
}

/// Amplitude law in ν used by data generators and separable sources.
struct DecayLaw {
  enum class Kind { Constant, Sobolev, Gevrey, Dual };
  Kind kind = Kind::Constant;
  double c = 1.0;
  double r = 0.0;    // Sobolev: c·ν^{−r} (ν < 1 treated as 1)
  double A = 1.0;    // Gevrey: c·exp(−A ν^{1/s})
  double eta = 1.0;  // Dual:   c·exp(+η ν^{1/s})
  double s = 1.0;

  double amplitude(double nu) const {
    switch (kind) {
      case Kind::Constant: return c;
      case Kind::Sobolev: return c * std::pow(std::max(nu, 1.0), -r);
      case Kind::Gevrey: return c * std::exp(-A * std::pow(nu, 1.0 / s));
      case Kind::Dual: return c * std::exp(eta * std::pow(nu, 1.0 / s));
    }
    return 0;
  }
};

struct InitialDataSpec {
  enum class Kind { Delta, Law, Random };
  Kind kind = Kind::Law;
  ModeIndex delta_mode;  // Delta
  DecayLaw law;          // Law, or the envelope for Random
  std::uint64_t seed = 0;
  std::complex<double> u0_weight = 1.0;
  std::complex<double> u1_weight = 0.0;
};

struct CauchyData {
  std::vector<std::complex<double>> u0, u1;  // one entry per mode, ModeSet order
};

/// Deterministic (û₀, û₁) per mode. Random draws are taken in ModeSet order
/// from a seeded mt19937_64, so the result does not depend on threading.
inline CauchyData generate_initial_data(const InitialDataSpec& spec, const ModeSet& modes) {
  CauchyData d;
  d.u0.assign(modes.size(), 0.0);
  d.u1.assign(modes.size(), 0.0);
  switch (spec.kind) {
    case InitialDataSpec::Kind::Delta: {
      bool found = false;
      for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i].index == spec.delta_mode) {
          d.u0[i] = spec.u0_weight;
          d.u1[i] = spec.u1_weight;
          found = true;
        }
      if (!found) throw std::invalid_argument("delta data: mode " + spec.delta_mode.to_string() + " not in mode set");
      break;
    }
    case InitialDataSpec::Kind::Law:
      for (std::size_t i = 0; i < modes.size(); ++i) {
        const double amp = spec.law.amplitude(modes[i].nu);
        d.u0[i] = spec.u0_weight * amp;
        d.u1[i] = spec.u1_weight * amp;
      }
      break;
    case InitialDataSpec::Kind::Random: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (std::size_t i = 0; i < modes.size(); ++i) {
        const double amp = spec.law.amplitude(modes[i].nu);
        const double a = normal(rng), b = normal(rng), c = normal(rng), e = normal(rng);
        d.u0[i] = spec.u0_weight * amp * std::complex<double>(a, b);
        d.u1[i] = spec.u1_weight * amp * std::complex<double>(c, e);
      }
      break;
    }
  }
  return d;
}

/// Source f̂(t, ξ): zero, separable g(t)·c(ξ), or per-mode tabulated samples
/// (linearly interpolated in t).
struct SourceSpec {
  enum class Kind { Zero, Separable, Tabulated };
  Kind kind = Kind::Zero;
  RealFn time_profile;  // g(t), defined on R
  DecayLaw modal;       // c(ξ) = modal.amplitude(ν)
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[mode][sample]
  bool mollify = false;  // regularise g with the speed's ψ and ω

  bool is_zero() const { return kind == Kind::Zero; }

  /// Per-mode time function f̂(·, ξ) for mode position i, optionally mollified.
  RealFn time_function(std::size_t mode_position, const MollifiedFunction* mollified_profile = nullptr) const {
    switch (kind) {
      case Kind::Zero: return {};
      case Kind::Separable:
        if (mollified_profile) return [m = *mollified_profile](double t) { return m(t); };
        return time_profile;
      case Kind::Tabulated: {
        if (mode_position >= values.size()) throw std::invalid_argument("tabulated source: missing mode row");
        return [ts = times, vs = values[mode_position]](double t) {
          if (t <= ts.front()) return vs.front();
          if (t >= ts.back()) return vs.back();
          const auto it = std::upper_bound(ts.begin(), ts.end(), t);
          const std::size_t j = std::size_t(it - ts.begin());
          const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
          return (1 - w) * vs[j - 1] + w * vs[j];
        };
      }
    }
    return {};
  }

  double modal_factor(double nu) const { return kind == Kind::Separable ? modal.amplitude(nu) : 1.0; }
};

}  // namespace wavelab
