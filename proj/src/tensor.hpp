// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "error.hpp"

namespace helixmdc {

using Mat = Eigen::MatrixXd;

// Handle into a Tape. Valid only for the tape that created it, until clear().
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Causal neighbor offsets (row delta, col delta) used by the autoregressive
// model: the raster-causal half of a 5x5 window, 12 pixels.
inline constexpr std::array<std::pair<int, int>, 12> kContextOffsets = {{
    {-2, -2}, {-2, -1}, {-2, 0}, {-2, 1}, {-2, 2},
    {-1, -2}, {-1, -1}, {-1, 0}, {-1, 1}, {-1, 2},
    {0, -2},  {0, -1},
}};

// Reverse-mode autodiff over dense matrices. Define-by-run: each forward op
// appends a node; backward() walks the nodes in reverse. Scalars are 1x1
// matrices. Single-threaded by design; use one Tape per training job.
class Tape {
 public:
  Var leaf(Mat value);
  Var constant(Mat value);  // like leaf, but grads are discarded by callers

  const Mat& val(Var v) const;
  const Mat& grad(Var v) const;

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var hadamard(Var a, Var b);
  Var scale(Var a, double s);
  Var add_const(Var a, double s);
  Var matmul(Var a, Var b);
  // m (r x c) plus a row vector (1 x c), broadcast over rows.
  Var add_rowvec(Var m, Var row);
  Var relu(Var a);
  Var softplus(Var a);
  Var sum(Var a);                 // scalar
  Var mse(Var a, const Mat& target);  // scalar, mean over all entries
  // Column j of m as an (r x 1) vector.
  Var col(Var m, int j);
  // Horizontal concatenation of same-row-count blocks.
  Var hstack(std::span<const Var> parts);
  // Reshape (no copy semantics needed; value is copied, grads routed back).
  Var reshape(Var a, int rows, int cols);
  // Grid (H x W) flattened to (H*W x 1) in raster (row-major) order.
  Var vec_raster(Var grid);
  // Bicubic upsampling (a = -0.75, half-pixel centers, clamped borders).
  Var upsample_bicubic(Var a, int out_rows, int out_cols);
  // For grid (H x W): rows are raster-ordered pixels, columns the 12 causal
  // context values, zero outside the grid.
  Var gather_context(Var grid, int rows, int cols);
  // Total rate in bits of continuous-bin Laplace likelihoods:
  //   sum_i -log2( max(F(y_i + step_i/2) - F(y_i - step_i/2), 2^-16) )
  // y, mu, sigma are (n x 1); step is a per-element positive bin width.
  Var laplace_rate_bits(Var y, Var mu, Var sigma, const Mat& step);

  void backward(Var loss);  // loss must be scalar
  void clear();
  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void()> back;  // empty for leaves
  };
  std::vector<Node> nodes_;

  Var push(Mat value, std::function<void()> back = {});
  Mat& grad_mut(Var v) { return nodes_[v.id].grad; }
  void check(Var v) const;
};

double softplus_scalar(double x);

}  // namespace helixmdc
