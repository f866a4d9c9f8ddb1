// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "bicubic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "error.hpp"

namespace helixmdc {
namespace {

double cubic_kernel(double x) {
  constexpr double a = -0.75;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

}  // namespace

const Eigen::SparseMatrix<double>& bicubic_operator(int src_len, int dst_len) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, Eigen::SparseMatrix<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(src_len, dst_len);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(dst_len) * 4);
  const double scale = static_cast<double>(src_len) / dst_len;
  for (int i = 0; i < dst_len; ++i) {
    const double s = (i + 0.5) * scale - 0.5;
    const int base = static_cast<int>(std::floor(s));
    const double t = s - base;
    for (int j = -1; j <= 2; ++j) {
      const double w = cubic_kernel(t - j);
      if (w == 0.0) continue;
      const int idx = std::clamp(base + j, 0, src_len - 1);
      trips.emplace_back(i, idx, w);
    }
  }
  Eigen::SparseMatrix<double> m(dst_len, src_len);
  m.setFromTriplets(trips.begin(), trips.end());
  return cache.emplace(key, std::move(m)).first->second;
}

Eigen::MatrixXd upsample_bicubic_eval(const Eigen::MatrixXd& src, int out_rows,
                                      int out_cols) {
  if (out_rows < src.rows() || out_cols < src.cols())
    throw_invalid("upsample_bicubic: target smaller than source");
  const auto& R = bicubic_operator(static_cast<int>(src.rows()), out_rows);
  const auto& C = bicubic_operator(static_cast<int>(src.cols()), out_cols);
  return R * src * C.transpose();
}

}  // namespace helixmdc
