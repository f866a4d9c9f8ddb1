// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "tensor.hpp"

#include <cmath>

#include "bicubic.hpp"

namespace helixmdc {
namespace {

constexpr double kPmfFloor = 1.0 / 65536.0;  // 2^-16
constexpr double kLn2 = 0.6931471805599453;

// Laplace CDF at standardized z, and g(z) = dF/dz = 0.5 exp(-|z|).
inline double laplace_cdf_z(double z) {
  return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}
inline double laplace_g(double z) { return 0.5 * std::exp(-std::abs(z)); }

}  // namespace

double softplus_scalar(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

void Tape::check(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw_invalid("Tape: variable does not belong to this tape");
}

Var Tape::push(Mat value, std::function<void()> back) {
  Node n;
  n.grad = Mat::Zero(value.rows(), value.cols());
  n.value = std::move(value);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Mat value) { return push(std::move(value)); }
Var Tape::constant(Mat value) { return push(std::move(value)); }

const Mat& Tape::val(Var v) const {
  check(v);
  return nodes_[v.id].value;
}
const Mat& Tape::grad(Var v) const {
  check(v);
  return nodes_[v.id].grad;
}

Var Tape::add(Var a, Var b) {
  check(a); check(b);
  if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols())
    throw_invalid("add: shape mismatch");
  Var out{static_cast<int>(nodes_.size())};
  return push(val(a) + val(b), [this, a, b, out] {
    grad_mut(a) += grad(out);
    grad_mut(b) += grad(out);
  });
}

Var Tape::sub(Var a, Var b) {
  check(a); check(b);
  if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols())
    throw_invalid("sub: shape mismatch");
  Var out{static_cast<int>(nodes_.size())};
  return push(val(a) - val(b), [this, a, b, out] {
    grad_mut(a) += grad(out);
    grad_mut(b) -= grad(out);
  });
}

Var Tape::hadamard(Var a, Var b) {
  check(a); check(b);
  if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols())
    throw_invalid("hadamard: shape mismatch");
  Var out{static_cast<int>(nodes_.size())};
  return push(val(a).cwiseProduct(val(b)), [this, a, b, out] {
    grad_mut(a) += grad(out).cwiseProduct(val(b));
    grad_mut(b) += grad(out).cwiseProduct(val(a));
  });
}

Var Tape::scale(Var a, double s) {
  check(a);
  Var out{static_cast<int>(nodes_.size())};
  return push(val(a) * s, [this, a, s, out] { grad_mut(a) += grad(out) * s; });
}

Var Tape::add_const(Var a, double s) {
  check(a);
  Var out{static_cast<int>(nodes_.size())};
  return push(val(a).array() + s, [this, a, out] { grad_mut(a) += grad(out); });
}

Var Tape::matmul(Var a, Var b) {
  check(a); check(b);
  if (val(a).cols() != val(b).rows()) throw_invalid("matmul: inner dim mismatch");
  Var out{static_cast<int>(nodes_.size())};
  return push(val(a) * val(b), [this, a, b, out] {
    grad_mut(a).noalias() += grad(out) * val(b).transpose();
    grad_mut(b).noalias() += val(a).transpose() * grad(out);
  });
}

Var Tape::add_rowvec(Var m, Var row) {
  check(m); check(row);
  if (val(row).rows() != 1 || val(row).cols() != val(m).cols())
    throw_invalid("add_rowvec: bias shape mismatch");
  Var out{static_cast<int>(nodes_.size())};
  return push(val(m).rowwise() + val(row).row(0), [this, m, row, out] {
    grad_mut(m) += grad(out);
    grad_mut(row) += grad(out).colwise().sum();
  });
}

Var Tape::relu(Var a) {
  check(a);
  Var out{static_cast<int>(nodes_.size())};
  return push(val(a).cwiseMax(0.0), [this, a, out] {
    grad_mut(a).array() +=
        grad(out).array() * (val(a).array() > 0.0).cast<double>();
  });
}

Var Tape::softplus(Var a) {
  check(a);
  Mat v = val(a).unaryExpr([](double x) { return softplus_scalar(x); });
  Var out{static_cast<int>(nodes_.size())};
  return push(std::move(v), [this, a, out] {
    grad_mut(a).array() +=
        grad(out).array() *
        val(a).unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); })
            .array();
  });
}

Var Tape::sum(Var a) {
  check(a);
  Mat v(1, 1);
  v(0, 0) = val(a).sum();
  Var out{static_cast<int>(nodes_.size())};
  return push(std::move(v), [this, a, out] {
    grad_mut(a).array() += grad(out)(0, 0);
  });
}

Var Tape::mse(Var a, const Mat& target) {
  check(a);
  if (val(a).rows() != target.rows() || val(a).cols() != target.cols())
    throw_invalid("mse: shape mismatch");
  const double n = static_cast<double>(target.size());
  Mat v(1, 1);
  v(0, 0) = (val(a) - target).squaredNorm() / n;
  Var out{static_cast<int>(nodes_.size())};
  return push(std::move(v), [this, a, target, n, out] {
    grad_mut(a) += grad(out)(0, 0) * 2.0 / n * (val(a) - target);
  });
}

Var Tape::col(Var m, int j) {
  check(m);
  if (j < 0 || j >= val(m).cols()) throw_invalid("col: index out of range");
  Var out{static_cast<int>(nodes_.size())};
  return push(val(m).col(j), [this, m, j, out] {
    grad_mut(m).col(j) += grad(out);
  });
}

Var Tape::hstack(std::span<const Var> parts) {
  if (parts.empty()) throw_invalid("hstack: empty");
  int rows = -1, cols = 0;
  for (Var p : parts) {
    check(p);
    if (rows < 0) rows = static_cast<int>(val(p).rows());
    if (val(p).rows() != rows) throw_invalid("hstack: row mismatch");
    cols += static_cast<int>(val(p).cols());
  }
  Mat v(rows, cols);
  int c = 0;
  for (Var p : parts) {
    v.middleCols(c, val(p).cols()) = val(p);
    c += static_cast<int>(val(p).cols());
  }
  std::vector<Var> ps(parts.begin(), parts.end());
  Var out{static_cast<int>(nodes_.size())};
  return push(std::move(v), [this, ps, out] {
    int cc = 0;
    for (Var p : ps) {
      const int w = static_cast<int>(val(p).cols());
      grad_mut(p) += grad(out).middleCols(cc, w);
      cc += w;
    }
  });
}

Var Tape::reshape(Var a, int rows, int cols) {
  check(a);
  if (rows * cols != val(a).size()) throw_invalid("reshape: size mismatch");
  Mat v = Eigen::Map<const Mat>(val(a).data(), rows, cols);
  Var out{static_cast<int>(nodes_.size())};
  return push(std::move(v), [this, a, out] {
    const Mat& g = grad(out);
    grad_mut(a) += Eigen::Map<const Mat>(g.data(), val(a).rows(), val(a).cols());
  });
}

Var Tape::vec_raster(Var grid) {
  check(grid);
  Mat v = Eigen::Map<const Mat>(Mat(val(grid).transpose()).data(),
                                val(grid).size(), 1);
  Var out{static_cast<int>(nodes_.size())};
  return push(std::move(v), [this, grid, out] {
    const int r = static_cast<int>(val(grid).rows());
    const int c = static_cast<int>(val(grid).cols());
    grad_mut(grid) +=
        Eigen::Map<const Mat>(grad(out).data(), c, r).transpose();
  });
}

Var Tape::upsample_bicubic(Var a, int out_rows, int out_cols) {
  check(a);
  const int sr = static_cast<int>(val(a).rows());
  const int sc = static_cast<int>(val(a).cols());
  if (out_rows < sr || out_cols < sc)
    throw_invalid("upsample_bicubic: target smaller than source");
  const auto& R = bicubic_operator(sr, out_rows);
  const auto& C = bicubic_operator(sc, out_cols);
  Mat v = R * val(a) * C.transpose();
  Var out{static_cast<int>(nodes_.size())};
  return push(std::move(v), [this, a, &R, &C, out] {
    grad_mut(a) += R.transpose() * grad(out) * C;
  });
}

Var Tape::gather_context(Var grid, int rows, int cols) {
  check(grid);
  if (val(grid).rows() != rows || val(grid).cols() != cols)
    throw_invalid("gather_context: shape mismatch");
  const int n = rows * cols;
  const int k = static_cast<int>(kContextOffsets.size());
  Mat v = Mat::Zero(n, k);
  const Mat& g = val(grid);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;  // raster order
      for (int j = 0; j < k; ++j) {
        const int rr = r + kContextOffsets[j].first;
        const int cc = c + kContextOffsets[j].second;
        if (rr >= 0 && rr < rows && cc >= 0 && cc < cols) v(i, j) = g(rr, cc);
      }
    }
  }
  Var out{static_cast<int>(nodes_.size())};
  return push(std::move(v), [this, grid, rows, cols, k, out] {
    Mat& gg = grad_mut(grid);
    const Mat& go = grad(out);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const int i = r * cols + c;
        for (int j = 0; j < k; ++j) {
          const int rr = r + kContextOffsets[j].first;
          const int cc = c + kContextOffsets[j].second;
          if (rr >= 0 && rr < rows && cc >= 0 && cc < cols)
            gg(rr, cc) += go(i, j);
        }
      }
    }
  });
}

Var Tape::laplace_rate_bits(Var y, Var mu, Var sigma, const Mat& step) {
  check(y); check(mu); check(sigma);
  const int n = static_cast<int>(val(y).rows());
  if (val(y).cols() != 1 || val(mu).rows() != n || val(sigma).rows() != n ||
      step.rows() != n)
    throw_invalid("laplace_rate_bits: shape mismatch");
  if ((val(sigma).array() <= 0.0).any())
    throw_invalid("laplace_rate_bits: sigma must be positive");

  double bits = 0.0;
  for (int i = 0; i < n; ++i) {
    const double b = val(sigma)(i, 0);
    const double h = 0.5 * step(i, 0);
    const double zp = (val(y)(i, 0) + h - val(mu)(i, 0)) / b;
    const double zm = (val(y)(i, 0) - h - val(mu)(i, 0)) / b;
    const double p = std::max(laplace_cdf_z(zp) - laplace_cdf_z(zm), kPmfFloor);
    bits -= std::log2(p);
  }
  Mat v(1, 1);
  v(0, 0) = bits;
  Var out{static_cast<int>(nodes_.size())};
  return push(std::move(v), [this, y, mu, sigma, step, n, out] {
    const double go = grad(out)(0, 0);
    Mat& gy = grad_mut(y);
    Mat& gm = grad_mut(mu);
    Mat& gs = grad_mut(sigma);
    for (int i = 0; i < n; ++i) {
      const double b = val(sigma)(i, 0);
      const double h = 0.5 * step(i, 0);
      const double zp = (val(y)(i, 0) + h - val(mu)(i, 0)) / b;
      const double zm = (val(y)(i, 0) - h - val(mu)(i, 0)) / b;
      const double p = laplace_cdf_z(zp) - laplace_cdf_z(zm);
      if (p <= kPmfFloor) continue;  // floored: flat, no gradient
      const double gp = laplace_g(zp), gmz = laplace_g(zm);
      const double dp_dy = (gp - gmz) / b;
      const double dp_db = (-zp * gp + zm * gmz) / b;
      const double dbits_dp = -1.0 / (p * kLn2) * go;
      gy(i, 0) += dbits_dp * dp_dy;
      gm(i, 0) -= dbits_dp * dp_dy;
      gs(i, 0) += dbits_dp * dp_db;
    }
  });
}

void Tape::backward(Var loss) {
  check(loss);
  if (val(loss).size() != 1) throw_invalid("backward: loss must be scalar");
  nodes_[loss.id].grad(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i)
    if (nodes_[i].back) nodes_[i].back();
}

void Tape::clear() { nodes_.clear(); }

}  // namespace helixmdc
