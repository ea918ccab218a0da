#pragma once

// Closed-form eigenvalue laws for the model operators and finite mode sets.
//
// Everything lives in coefficient space: an operator is known only through
// λ_ξ, and the frequency of a mode is ν(ξ) = |λ_ξ|^{1/2}. When a shift c > 0
// is configured the operator is replaced by the one with eigenvalues |λ_ξ| + c.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wavelab/fit.hpp"

namespace wavelab {

struct ModeIndex {
  std::vector<std::int64_t> coords;

  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;

  /// "3" or "1;0;2" — safe inside a CSV field.
  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < coords.size(); ++i) os << (i ? ";" : "") << coords[i];
    return os.str();
  }
};

namespace model {

/// 2D Landau Hamiltonian, λ_n = (2n+1)B. Each level is infinitely degenerate;
/// `multiplicity` representatives per level are enumerated (index (n, j)).
struct Landau2D {
  double B = 1.0;
  std::int64_t multiplicity = 1;
};
/// Harmonic oscillator on R^d, λ_k = Σ (2k_j + 1).
struct HarmonicOscillator {
  int d = 1;
};
/// Landau-type Hamiltonian on R^{2d}, λ_k = Σ B_l (2k_l + 1).
struct AnisotropicHamiltonian {
  std::vector<double> B{1.0};
};
/// Laplacian on the torus (R/2πZ)^d, λ_k = |k|², k ∈ Z^d.
struct TorusLaplacian {
  int d = 1;
};
/// i d/dx on [0,1] with h f(0) = f(1): λ_ξ = −i ln h + 2πξ, ξ ∈ Z.
struct NonSelfAdjointFlow {
  double h = 2.0;
};
/// Explicit finite spectrum; index ξ is the table position.
struct Custom {
  std::vector<std::complex<double>> eigenvalues;
};

}  // namespace model

using ModelKind = std::variant<model::Landau2D, model::HarmonicOscillator, model::AnisotropicHamiltonian,
                               model::TorusLaplacian, model::NonSelfAdjointFlow, model::Custom>;

struct SpectralModel {
  ModelKind kind;
  double shift = 0.0;  // c ≥ 0; c > 0 switches on |λ| + c lifting

  /// Number of coordinates a ModeIndex must carry for this model.
  std::size_t index_dimension() const {
    return std::visit(
        [](const auto& m) -> std::size_t {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, model::Landau2D>) return m.multiplicity > 1 ? 2 : 1;
          else if constexpr (std::is_same_v<M, model::HarmonicOscillator>) return std::size_t(m.d);
          else if constexpr (std::is_same_v<M, model::AnisotropicHamiltonian>) return m.B.size();
          else if constexpr (std::is_same_v<M, model::TorusLaplacian>) return std::size_t(m.d);
          else return 1;
        },
        kind);
  }

  void validate() const {
    if (!(shift >= 0.0) || !std::isfinite(shift)) throw std::invalid_argument("model shift must be finite and >= 0");
    std::visit(
        [](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, model::Landau2D>) {
            if (!(m.B > 0)) throw std::invalid_argument("Landau2D: B must be > 0");
            if (m.multiplicity < 1) throw std::invalid_argument("Landau2D: multiplicity must be >= 1");
          } else if constexpr (std::is_same_v<M, model::HarmonicOscillator> ||
                               std::is_same_v<M, model::TorusLaplacian>) {
            if (m.d < 1) throw std::invalid_argument("dimension must be >= 1");
          } else if constexpr (std::is_same_v<M, model::AnisotropicHamiltonian>) {
            if (m.B.empty()) throw std::invalid_argument("AnisotropicHamiltonian: need at least one B");
            for (double b : m.B)
              if (!(b > 0)) throw std::invalid_argument("AnisotropicHamiltonian: every B must be > 0");
          } else if constexpr (std::is_same_v<M, model::NonSelfAdjointFlow>) {
            if (!(m.h > 0) || m.h == 1.0) throw std::invalid_argument("NonSelfAdjointFlow: need h > 0, h != 1");
          } else {
            for (auto z : m.eigenvalues)
              if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw std::invalid_argument("Custom: eigenvalues must be finite");
          }
        },
        kind);
  }
};

namespace detail {

inline void check_index(const SpectralModel& m, const ModeIndex& xi) {
  if (xi.coords.size() != m.index_dimension())
    throw std::invalid_argument("mode index has " + std::to_string(xi.coords.size()) + " coordinates, model expects " +
                                std::to_string(m.index_dimension()));
}

inline void require_nonnegative(const ModeIndex& xi, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    if (xi.coords[i] < 0) throw std::invalid_argument("mode index component must be >= 0 for this model");
}

inline std::complex<double> raw_eigenvalue(const SpectralModel& m, const ModeIndex& xi) {
  check_index(m, xi);
  return std::visit(
      [&](const auto& k) -> std::complex<double> {
        using M = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<M, model::Landau2D>) {
          require_nonnegative(xi, xi.coords.size());
          if (xi.coords.size() == 2 && xi.coords[1] >= k.multiplicity)
            throw std::invalid_argument("Landau2D: degeneracy index out of range");
          return (2.0 * double(xi.coords[0]) + 1.0) * k.B;
        } else if constexpr (std::is_same_v<M, model::HarmonicOscillator>) {
          require_nonnegative(xi, xi.coords.size());
          double s = 0;
          for (auto c : xi.coords) s += 2.0 * double(c) + 1.0;
          return s;
        } else if constexpr (std::is_same_v<M, model::AnisotropicHamiltonian>) {
          require_nonnegative(xi, xi.coords.size());
          double s = 0;
          for (std::size_t l = 0; l < k.B.size(); ++l) s += k.B[l] * (2.0 * double(xi.coords[l]) + 1.0);
          return s;
        } else if constexpr (std::is_same_v<M, model::TorusLaplacian>) {
          double s = 0;
          for (auto c : xi.coords) s += double(c) * double(c);
          return s;
        } else if constexpr (std::is_same_v<M, model::NonSelfAdjointFlow>) {
          return {2.0 * std::numbers::pi * double(xi.coords[0]), -std::log(k.h)};
        } else {
          if (xi.coords[0] < 0 || std::size_t(xi.coords[0]) >= k.eigenvalues.size())
            throw std::invalid_argument("Custom: index outside eigenvalue table");
          return k.eigenvalues[std::size_t(xi.coords[0])];
        }
      },
      m.kind);
}

}  // namespace detail

/// λ_ξ for the model, lifted to |λ_ξ| + c when a shift is configured.
inline std::complex<double> eigenvalue(const SpectralModel& m, const ModeIndex& xi) {
  const auto lam = detail::raw_eigenvalue(m, xi);
  if (m.shift > 0) return std::abs(lam) + m.shift;
  return lam;
}

/// ν(ξ) = |λ_ξ|^{1/2} after lifting.
inline double frequency(const SpectralModel& m, const ModeIndex& xi) { return std::sqrt(std::abs(eigenvalue(m, xi))); }

struct Mode {
  ModeIndex index;
  std::complex<double> lambda;
  double nu = 0;
};

struct ModeSet {
  SpectralModel model;
  std::vector<Mode> modes;  // ν ascending, ties broken by index
  double cutoff = 0;

  std::size_t size() const { return modes.size(); }
  bool empty() const { return modes.empty(); }
  const Mode& operator[](std::size_t i) const { return modes[i]; }
};

namespace detail {

// Visits every index with |λ_ξ| (after lifting) ≤ cutoff. The bounds used to
// prune each model's index space are exact consequences of its eigenvalue law.
template <class Visit>
void for_each_mode(const SpectralModel& m, double cutoff, Visit&& visit) {
  auto within = [&](const ModeIndex& xi) { return std::abs(eigenvalue(m, xi)) <= cutoff; };
  std::visit(
      [&](const auto& k) {
        using M = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<M, model::Landau2D>) {
          for (std::int64_t n = 0;; ++n) {
            ModeIndex xi{k.multiplicity > 1 ? std::vector<std::int64_t>{n, 0} : std::vector<std::int64_t>{n}};
            if (!within(xi)) break;
            for (std::int64_t j = 0; j < k.multiplicity; ++j) {
              if (k.multiplicity > 1) xi.coords[1] = j;
              visit(xi);
            }
          }
        } else if constexpr (std::is_same_v<M, model::HarmonicOscillator> ||
                             std::is_same_v<M, model::AnisotropicHamiltonian>) {
          std::vector<double> b;
          if constexpr (std::is_same_v<M, model::HarmonicOscillator>) b.assign(std::size_t(k.d), 1.0);
          else b = k.B;
          const std::size_t d = b.size();
          double base = 0;
          for (double bl : b) base += bl;
          // Σ b_l(2k_l+1) + c ≤ cutoff  ⇔  Σ 2 b_l k_l ≤ cutoff − c − Σ b_l
          const double budget = cutoff - m.shift - base;
          if (budget < 0) return;
          ModeIndex xi{std::vector<std::int64_t>(d, 0)};
          std::function<void(std::size_t, double)> rec = [&](std::size_t l, double left) {
            if (l == d) {
              if (within(xi)) visit(xi);
              return;
            }
            for (std::int64_t c = 0; 2.0 * b[l] * double(c) <= left + 1e-9 * (1 + cutoff); ++c) {
              xi.coords[l] = c;
              rec(l + 1, left - 2.0 * b[l] * double(c));
            }
            xi.coords[l] = 0;
          };
          rec(0, budget);
        } else if constexpr (std::is_same_v<M, model::TorusLaplacian>) {
          const double r2 = cutoff - m.shift;
          if (r2 < 0) return;
          const auto r = std::int64_t(std::floor(std::sqrt(r2))) + 1;
          const std::size_t d = std::size_t(k.d);
          ModeIndex xi{std::vector<std::int64_t>(d, 0)};
          std::function<void(std::size_t, double)> rec = [&](std::size_t l, double left) {
            if (l == d) {
              if (within(xi)) visit(xi);
              return;
            }
            for (std::int64_t c = -r; c <= r; ++c) {
              const double c2 = double(c) * double(c);
              if (c2 > left + 1e-9 * (1 + cutoff)) continue;
              xi.coords[l] = c;
              rec(l + 1, left - c2);
            }
            xi.coords[l] = 0;
          };
          rec(0, r2);
        } else if constexpr (std::is_same_v<M, model::NonSelfAdjointFlow>) {
          // |λ_ξ| ≥ 2π|ξ|, so |ξ| ≤ cutoff/(2π) bounds the search.
          const auto r = std::int64_t(std::floor(cutoff / (2.0 * std::numbers::pi))) + 1;
          for (std::int64_t x = -r; x <= r; ++x) {
            ModeIndex xi{{x}};
            if (within(xi)) visit(xi);
          }
        } else {
          for (std::size_t i = 0; i < k.eigenvalues.size(); ++i) {
            ModeIndex xi{{std::int64_t(i)}};
            if (within(xi)) visit(xi);
          }
        }
      },
      m.kind);
}

}  // namespace detail

/// All modes with |λ_ξ| ≤ cutoff, sorted by ν then index.
inline ModeSet enumerate_modes(const SpectralModel& m, double cutoff) {
  m.validate();
  if (!(cutoff > 0) || !std::isfinite(cutoff)) throw std::invalid_argument("enumerate_modes: cutoff must be > 0");
  ModeSet set{m, {}, cutoff};
  detail::for_each_mode(m, cutoff, [&](const ModeIndex& xi) {
    const auto lam = eigenvalue(m, xi);
    set.modes.push_back({xi, lam, std::sqrt(std::abs(lam))});
  });
  if (set.modes.empty()) throw std::invalid_argument("enumerate_modes: no eigenvalue below the cutoff");
  std::sort(set.modes.begin(), set.modes.end(), [](const Mode& a, const Mode& b) {
    if (a.nu != b.nu) return a.nu < b.nu;
    return a.index < b.index;
  });
  return set;
}

/// Weyl counting function N(λ) = #{ξ : |λ_ξ| ≤ λ} (zero when nothing lies below λ).
inline std::size_t weyl_count(const SpectralModel& m, double lambda) {
  m.validate();
  if (!(lambda > 0)) throw std::invalid_argument("weyl_count: lambda must be > 0");
  std::size_t n = 0;
  detail::for_each_mode(m, lambda, [&](const ModeIndex&) { ++n; });
  return n;
}

/// Slope of log N(λ) against log λ over an increasing grid.
inline LineFit weyl_exponent_fit(const SpectralModel& m, const std::vector<double>& lambda_grid) {
  if (lambda_grid.size() < 2) throw std::invalid_argument("weyl_exponent_fit: need at least two grid points");
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end()))
    throw std::invalid_argument("weyl_exponent_fit: grid must be increasing");
  std::vector<double> counts;
  counts.reserve(lambda_grid.size());
  for (double l : lambda_grid) counts.push_back(double(weyl_count(m, l)));
  return fit_loglog(lambda_grid, counts);
}

/// Up to `count` modes whose ν is closest to a log-spaced target grid on
/// [nu_min, nu_max]; duplicates are dropped, order stays ν-ascending.
inline ModeSet select_log_spaced(const ModeSet& set, std::size_t count, double nu_min, double nu_max) {
  ModeSet out{set.model, {}, set.cutoff};
  if (count == 0 || set.empty()) return out;
  std::vector<std::size_t> picked;
  const auto targets = count == 1 ? std::vector<double>{nu_min} : log_grid(nu_min, nu_max, count);
  for (double target : targets) {
    std::size_t best = set.size();
    double dist = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double nu = set[i].nu;
      if (nu < nu_min * (1 - 1e-12) || nu > nu_max * (1 + 1e-12) || !(nu > 0)) continue;
      const double d = std::abs(std::log(nu / target));
      if (best == set.size() || d < dist) best = i, dist = d;
    }
    if (best != set.size() && std::find(picked.begin(), picked.end(), best) == picked.end()) picked.push_back(best);
  }
  std::sort(picked.begin(), picked.end());
  for (auto i : picked) out.modes.push_back(set[i]);
  return out;
}

}  // namespace wavelab
