// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/expint.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dnp/error.hpp"

namespace dnp {

double expint_e1(double x) {
  if (!(x > 0.0)) throw ArgumentError("expint_e1: argument must be positive");
  if (std::isinf(x)) return 0.0;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxIter = 1000;

  if (x <= 1.0) {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double sum = -std::numbers::egamma - std::log(x);
    double term = 1.0;
    for (int k = 1; k <= kMaxIter; ++k) {
      term *= -x / k;
      const double delta = -term / k;
      sum += delta;
      if (std::abs(delta) <= std::abs(sum) * kEps) return sum;
    }
    throw NumericError("expint_e1: series did not converge");
  }

  // E1(x) = exp(-x) / (x + 1 - 1^2 / (x + 3 - 2^2 / (x + 5 - ...)))
  constexpr double kTiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) <= kEps) return h * std::exp(-x);
  }
  throw NumericError("expint_e1: continued fraction did not converge");
}

}  // namespace dnp
