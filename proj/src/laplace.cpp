// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "laplace.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace helixmdc {

double laplace_cdf(double x, double mu, double b) {
  if (!(b > 0.0)) throw_invalid("laplace_cdf: scale must be positive");
  const double z = (x - mu) / b;
  return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double laplace_pmf(long long symbol, double mu, double b) {
  const double s = static_cast<double>(symbol);
  const double p = laplace_cdf(s + 0.5, mu, b) - laplace_cdf(s - 0.5, mu, b);
  return std::max(p, kPmfFloor);
}

double laplace_bin_prob(double y, double mu, double b, double width) {
  if (!(width > 0.0)) throw_invalid("laplace_bin_prob: width must be positive");
  return laplace_cdf(y + 0.5 * width, mu, b) -
         laplace_cdf(y - 0.5 * width, mu, b);
}

double laplace_bin_bits(double y, double mu, double b, double width) {
  return -std::log2(std::max(laplace_bin_prob(y, mu, b, width), kPmfFloor));
}

uint32_t laplace_cum16(int k, double mu, double b, int lo, int hi) {
  if (k < lo || k > hi + 1) throw_invalid("laplace_cum16: k out of range");
  const double mass = 65536.0 - static_cast<double>(hi - lo + 2);
  const double f_lo = laplace_cdf(lo - 0.5, mu, b);
  const double f_hi = laplace_cdf(hi + 0.5, mu, b);
  const double denom = f_hi - f_lo;
  // when mu is so far outside [lo, hi] that no mass remains, fall back
  // to a uniform table instead of dividing by zero
  const double f = denom > 1e-300
                       ? std::clamp((laplace_cdf(k - 0.5, mu, b) - f_lo) / denom,
                                    0.0, 1.0)
                       : static_cast<double>(k - lo) / (hi - lo + 1);
  return static_cast<uint32_t>(std::llround(f * mass)) +
         static_cast<uint32_t>(k - lo);
}

}  // namespace helixmdc
