#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace wavelab {

/// Gauss–Legendre rule on [-1,1]. Nodes are stored as the positive half;
/// the rule is symmetric so odd integrands sum to exactly zero when summed
/// in mirrored pairs (see `symmetric_sum`).
template <std::size_t N>
struct GaussLegendre {
  static_assert(N % 2 == 0, "even order only");
  std::array<double, N / 2> nodes{};    // positive nodes, ascending
  std::array<double, N / 2> weights{};

  GaussLegendre() {
    constexpr std::size_t half = N / 2;
    for (std::size_t i = 0; i < half; ++i) {
      // Tricomi initial guess for the i-th largest root, then Newton.
      double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(N) + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
          p0 = p1;
          p1 = p2;
        }
        dp = double(N) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[half - 1 - i] = x;
      weights[half - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  /// ∫_{-1}^{1} f. Pairs f(x_i)+f(-x_i) are formed before accumulation.
  template <class F>
  auto symmetric_sum(F&& f) const {
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t i = 0; i < N / 2; ++i) acc += weights[i] * (f(nodes[i]) + f(-nodes[i]));
    return acc;
  }
};

/// Shared 64-point rule used by every convolution in the library.
inline const GaussLegendre<64>& gauss_legendre_64() {
  static const GaussLegendre<64> rule;
  return rule;
}

/// Adaptive Gauss–Kronrod integral of a real function.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 15) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, tol);
}

/// Adaptive integral of a complex-valued function, real and imaginary parts separately.
template <class F>
std::complex<double> integrate_adaptive_complex(F&& f, double a, double b, double tol = 1e-13,
                                                unsigned max_depth = 15) {
  const double re = integrate_adaptive([&](double t) { return std::real(f(t)); }, a, b, tol, max_depth);
  const double im = integrate_adaptive([&](double t) { return std::imag(f(t)); }, a, b, tol, max_depth);
  return {re, im};
}

}  // namespace wavelab
