// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace helixmdc {

inline constexpr double kPmfFloor = 1.0 / 65536.0;  // 2^-16

double laplace_cdf(double x, double mu, double b);

// Probability of the unit bin around `symbol`: F(s+0.5) - F(s-0.5),
// floored at 2^-16. Throws on non-positive scale.
double laplace_pmf(long long symbol, double mu, double b);

// Bin of width `width` centered at y (continuous relaxation used for rate
// estimates). Unfloored value can be 0 in the tails.
double laplace_bin_prob(double y, double mu, double b, double width);
double laplace_bin_bits(double y, double mu, double b, double width);  // floored

// 16-bit quantized cumulative used by the range coder, defined for
// k in [lo, hi+1] over symbol alphabet [lo, hi].  The Laplace CDF is
// renormalized over [lo - 0.5, hi + 0.5] so cum(lo) = 0 and cum(hi+1) is
// a fixed total:
//   cum(k) = round((F(k-0.5) - F(lo-0.5)) / (F(hi+0.5) - F(lo-0.5))
//                  * (65536 - (hi-lo+2))) + (k - lo)
// Strictly increasing, so every symbol has frequency >= 1 (the 2^-16 floor).
uint32_t laplace_cum16(int k, double mu, double b, int lo, int hi);

}  // namespace helixmdc
