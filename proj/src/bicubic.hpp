// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace helixmdc {

// 1-D bicubic resampling operator (dst_len x src_len): Keys kernel with
// a = -0.75, half-pixel sample centers (align_corners = false), borders
// clamped. Cached internally; the reference is stable for the process
// lifetime.
const Eigen::SparseMatrix<double>& bicubic_operator(int src_len, int dst_len);

// 2-D bicubic upsampling of a grid to (out_rows x out_cols).
Eigen::MatrixXd upsample_bicubic_eval(const Eigen::MatrixXd& src, int out_rows,
                                      int out_cols);

}  // namespace helixmdc
