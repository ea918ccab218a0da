#pragma once

// 2×2 algebra of the first-order system V' = iνA(t)V + F:
//   A = [[0,1],[a,0]],  S = diag(a,1),  Q_ε = S + ε²·diag(1,0),
// plus the regularised characteristic roots and the H-matrix built from them.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "wavelab/coefficients.hpp"
#include "wavelab/fit.hpp"

namespace wavelab {

template <class T>
struct Mat2 {
  std::array<std::array<T, 2>, 2> m{};

  constexpr T& operator()(int i, int j) { return m[std::size_t(i)][std::size_t(j)]; }
  constexpr const T& operator()(int i, int j) const { return m[std::size_t(i)][std::size_t(j)]; }

  static constexpr Mat2 diag(T a, T b) { return {{{{a, T{}}, {T{}, b}}}}; }

  friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
    return r;
  }
  friend constexpr Mat2 operator+(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j) = x(i, j) + y(i, j);
    return r;
  }
  friend constexpr Mat2 operator-(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j) = x(i, j) - y(i, j);
    return r;
  }
  friend constexpr Mat2 operator*(T s, const Mat2& x) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j) = s * x(i, j);
    return r;
  }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;

  constexpr Mat2 transpose() const { return {{{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}}; }
};

using RealMat2 = Mat2<double>;
using Vec2c = std::array<std::complex<double>, 2>;

/// Operator 2-norm of a real 2×2 matrix (largest singular value).
inline double spectral_norm(const RealMat2& M) {
  const double a = M(0, 0), b = M(0, 1), c = M(1, 0), d = M(1, 1);
  const double s = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * det * det));
  return std::sqrt(0.5 * (s + disc));
}

inline RealMat2 system_matrix(double a) { return {{{{0.0, 1.0}, {a, 0.0}}}}; }
inline RealMat2 symmetriser(double a) { return RealMat2::diag(a, 1.0); }
inline RealMat2 quasi_symmetriser(double a, double eps) { return RealMat2::diag(a + eps * eps, 1.0); }

/// S·A − Aᵀ·S. Both products are [[0,a],[a,0]], so every entry is exactly 0.
inline RealMat2 symmetriser_commutator(double a) {
  if (a < 0) throw std::domain_error("symmetriser_commutator: a must be >= 0");
  const RealMat2 A = system_matrix(a), S = symmetriser(a);
  return S * A - A.transpose() * S;
}

/// Q_ε·A − Aᵀ·Q_ε, expanded as (S·A − Aᵀ·S) + ε²(E·A − Aᵀ·E) with E = diag(1,0).
/// Forming a + ε² first would round; the split keeps every entry exact:
/// the result is [[0, ε²], [−ε², 0]] bit for bit.
inline RealMat2 quasi_commutator(double a, double eps) {
  if (a < 0 || !(eps > 0)) throw std::domain_error("quasi_commutator: need a >= 0 and eps > 0");
  const RealMat2 A = system_matrix(a);
  const RealMat2 E = RealMat2::diag(1.0, 0.0);
  const double e2 = eps * eps;
  return symmetriser_commutator(a) + e2 * (E * A - A.transpose() * E);
}

/// (M V, V) for real M and complex V.
inline std::complex<double> pairing(const RealMat2& M, const Vec2c& V) {
  std::complex<double> r = 0;
  for (int i = 0; i < 2; ++i) r += (M(i, 0) * V[0] + M(i, 1) * V[1]) * std::conj(V[std::size_t(i)]);
  return r;
}

struct QuasiBoundsReport {
  double energy = 0;          // (Q_ε V, V)
  double lower = 0;           // C^{-1} ε² |V|²
  double upper = 0;           // C |V|²
  double pairing = 0;         // |((Q_εA − A*Q_ε)V, V)|
  double pairing_bound = 0;   // ε (Q_ε V, V)
  double constant = 1;        // C = max(1, sup a + 1)
  bool lower_ok = false;
  bool upper_ok = false;
  bool pairing_ok = false;
  bool all_ok() const { return lower_ok && upper_ok && pairing_ok; }
};

/// Checks C^{-1}ε²|V|² ≤ (Q_εV,V) ≤ C|V|² and |((Q_εA−A*Q_ε)V,V)| ≤ ε(Q_εV,V).
/// `a_sup` is the supremum of a used in C (defaults to a_value).
inline QuasiBoundsReport quasi_energy_bounds(double a_value, double eps, const Vec2c& V, double a_sup = -1.0) {
  const double v1 = std::norm(V[0]), v2 = std::norm(V[1]);
  if (v1 + v2 == 0.0) throw std::invalid_argument("quasi_energy_bounds: V must be nonzero");
  QuasiBoundsReport r;
  const double sup = a_sup >= 0 ? a_sup : a_value;
  r.constant = std::max(1.0, sup + 1.0);
  r.energy = (a_value + eps * eps) * v1 + v2;
  r.lower = eps * eps * (v1 + v2) / r.constant;
  r.upper = r.constant * (v1 + v2);
  r.pairing = std::abs(pairing(quasi_commutator(a_value, eps), V));
  r.pairing_bound = eps * r.energy;
  // Relative slack of a few ulps for the rounded sums.
  constexpr double slack = 1e-14;
  r.lower_ok = r.lower <= r.energy * (1 + slack);
  r.upper_ok = r.energy <= r.upper * (1 + slack);
  r.pairing_ok = r.pairing <= r.pairing_bound * (1 + slack);
  return r;
}

/// Regularised characteristic roots λ₁(t,ε) < λ₂(t,ε) and the matrix
/// H = [[1,1],[λ₁,λ₂]].
///   Strict: λ₂ = λ = √a ∗ φ_ε, λ₁ = −λ  (H = [[1,1],[−λ,λ]])
///   Weak:   λ₁ = −(√a ∗ φ_ε) + ε^α,  λ₂ = (√a ∗ φ_ε) + 2ε^α
class RegularizedRoots {
 public:
  enum class Variant { Strict, Weak };

  struct Values {
    double l1, l2;    // roots
    double d1, d2;    // their t-derivatives
    double det;       // λ₂ − λ₁
  };

  RegularizedRoots(const PropagationSpeed& a, const Mollifier& phi, double eps, Variant variant, double alpha)
      : a_(a),
        root_net_([a](double t) { return std::sqrt(std::max(0.0, a.formula(t))); }, {}, phi, eps),
        eps_(eps),
        alpha_(alpha),
        variant_(variant) {
    if (!(eps > 0 && eps <= 1)) throw std::domain_error("root regularisation needs eps in (0,1]");
    if (a.is_measure()) throw std::invalid_argument("root regularisation needs a pointwise speed");
    if (variant == Variant::Strict && !a.strict())
      throw std::invalid_argument("strict root regularisation needs a >= a0 > 0");
    if (variant == Variant::Weak && !(alpha > 0 && alpha < 1))
      throw std::invalid_argument("weak root regularisation needs alpha in (0,1)");
    shift_ = variant == Variant::Weak ? std::pow(eps, alpha) : 0.0;
  }

  double epsilon() const { return eps_; }
  double alpha() const { return alpha_; }
  Variant variant() const { return variant_; }

  /// (√a ∗ φ_ε)(t) and its derivative.
  double mollified_root(double t, int k = 0) const { return root_net_.derivative(t, k); }

  Values at(double t) const {
    const double r = root_net_.derivative(t, 0);
    const double dr = root_net_.derivative(t, 1);
    if (variant_ == Variant::Strict) return {-r, r, -dr, dr, 2.0 * r};
    return {-r + shift_, r + 2.0 * shift_, -dr, dr, 2.0 * r + shift_};
  }

  RealMat2 H(double t) const {
    const auto v = at(t);
    return {{{{1.0, 1.0}, {v.l1, v.l2}}}};
  }

  struct Quantities {
    double log_det_rate;     // |∂ₜ det H / det H|
    double h_inv_dh;         // ‖H⁻¹ ∂ₜH‖
    double asymmetry;        // ‖H⁻¹AH − (H⁻¹AH)*‖
    double adjugate;         // ‖(det H) H⁻¹‖
  };

  /// The four quantities bounded in the Hölder energy estimate, at time t.
  Quantities quantities(double t) const {
    const auto v = at(t);
    const RealMat2 H{{{{1.0, 1.0}, {v.l1, v.l2}}}};
    const RealMat2 dH{{{{0.0, 0.0}, {v.d1, v.d2}}}};
    const RealMat2 adj{{{{v.l2, -1.0}, {-v.l1, 1.0}}}};  // (det H)·H⁻¹
    const RealMat2 Hinv = (1.0 / v.det) * adj;
    const RealMat2 B = Hinv * system_matrix(a_.formula(t)) * H;
    return {std::abs((v.d2 - v.d1) / v.det), spectral_norm(Hinv * dH), spectral_norm(B - B.transpose()),
            spectral_norm(adj)};
  }

 private:
  PropagationSpeed a_;
  MollifiedFunction root_net_;
  double eps_;
  double alpha_;
  Variant variant_;
  double shift_ = 0;
};

inline RegularizedRoots regularized_root(const PropagationSpeed& a, const Mollifier& phi, double eps,
                                         RegularizedRoots::Variant variant, double alpha) {
  return RegularizedRoots(a, phi, eps, variant, alpha);
}

struct RootExponent {
  std::string name;
  double target = 0;
  ExponentReport fit;
  bool within(double tol) const { return !fit.degenerate && std::abs(fit.exponent - target) <= tol; }
};

struct RootSuiteReport {
  std::array<RootExponent, 4> exponents;
  double tolerance = 0.15;
  double min_gap_margin = std::numeric_limits<double>::infinity();    // min_t (λ₂−λ₁) − ε^α (weak)
  double min_floor_margin = std::numeric_limits<double>::infinity();  // min_t λ − √a₀ (strict)
  bool gap_ok = true;
  bool floor_ok = true;
  bool derivatives_vanish = false;  // every t-derivative quantity identically zero
};

/// Sup over a t-grid of each estimate quantity for every ε, and the fitted
/// exponents against ε. Targets: α−1, α−1, α, α.
inline RootSuiteReport root_estimate_suite(const PropagationSpeed& a, const Mollifier& phi, double alpha,
                                           const std::vector<double>& eps_grid,
                                           RegularizedRoots::Variant variant = RegularizedRoots::Variant::Strict,
                                           double tolerance = 0.15) {
  if (eps_grid.size() < 2) throw std::invalid_argument("root suite needs at least two epsilons");
  RootSuiteReport rep;
  rep.tolerance = tolerance;
  const char* names[4] = {"log_det_rate", "h_inv_dh", "asymmetry", "adjugate"};
  const double targets[4] = {alpha - 1.0, alpha - 1.0, alpha, alpha};
  for (int q = 0; q < 4; ++q) rep.exponents[std::size_t(q)] = {names[q], targets[q], {}};
  const double T = a.horizon();
  bool all_zero = true;
  for (double eps : eps_grid) {
    const RegularizedRoots roots(a, phi, eps, variant, alpha);
    const double spacing = resolving_spacing(T, eps);
    const auto n = std::size_t(std::ceil(T / spacing));
    std::array<double, 4> sup{0, 0, 0, 0};
    const double shift = variant == RegularizedRoots::Variant::Weak ? std::pow(eps, alpha) : 0.0;
    const double floor = variant == RegularizedRoots::Variant::Strict ? std::sqrt(a.lower_bound()) : 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = T * double(i) / double(n);
      const auto qv = roots.quantities(t);
      sup[0] = std::max(sup[0], qv.log_det_rate);
      sup[1] = std::max(sup[1], qv.h_inv_dh);
      sup[2] = std::max(sup[2], qv.asymmetry);
      sup[3] = std::max(sup[3], qv.adjugate);
      const auto v = roots.at(t);
      if (variant == RegularizedRoots::Variant::Weak) {
        rep.min_gap_margin = std::min(rep.min_gap_margin, v.det - shift);
        if (v.det < shift) rep.gap_ok = false;
      } else {
        rep.min_floor_margin = std::min(rep.min_floor_margin, v.l2 - floor);
        if (v.l2 < floor * (1 - 1e-12)) rep.floor_ok = false;
      }
    }
    if (sup[0] != 0.0 || sup[1] != 0.0) all_zero = false;
    for (std::size_t q = 0; q < 4; ++q) {
      rep.exponents[q].fit.epsilons.push_back(eps);
      rep.exponents[q].fit.scales.push_back(eps);
      rep.exponents[q].fit.values.push_back(sup[q]);
    }
  }
  for (auto& e : rep.exponents) {
    const auto f = fit_loglog(e.fit.scales, e.fit.values);
    e.fit.exponent = f.degenerate ? 0.0 : f.slope;
    e.fit.residual = f.rms_residual;
    e.fit.degenerate = f.degenerate;
  }
  rep.derivatives_vanish = all_zero;
  return rep;
}

/// ∫₀ᵀ |a'(t)| / (a(t) + ε²) dt: the supremum over V of the integrand in
/// ∫ |(∂ₜQ_ε V, V)| / (Q_ε V, V) dt. Trapezoid rule on n intervals.
inline double quasi_log_derivative_integral(const RealFn& a, const RealFn& da, double eps, double T,
                                            std::size_t n = 20000) {
  double s = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = T * double(i) / double(n);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * std::abs(da(t)) / (a(t) + eps * eps);
  }
  return s * T / double(n);
}

}  // namespace wavelab
