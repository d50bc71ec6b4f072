// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

namespace dnp {

/// Exponential integral E1(x) = int_x^inf exp(-t) / t dt for x > 0.
/// Power series for x <= 1, modified Lentz continued fraction above.
/// Throws ArgumentError for x <= 0 or NaN.
double expint_e1(double x);

}  // namespace dnp
