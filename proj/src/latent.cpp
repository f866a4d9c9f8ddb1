// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "latent.hpp"

#include <cmath>

namespace helixmdc {

std::vector<LevelShape> pyramid_shapes(int rows, int cols, int levels) {
  if (rows < 1 || cols < 1) throw_invalid("pyramid_shapes: empty image");
  if (levels < 1) throw_invalid("pyramid_shapes: need at least one level");
  std::vector<LevelShape> out(levels);
  int d = 1;
  for (int k = 0; k < levels; ++k) {
    out[k] = {(rows + d - 1) / d, (cols + d - 1) / d};
    d *= 2;
  }
  return out;
}

LatentPyramid make_zero_pyramid(int rows, int cols, int levels, int desc) {
  LatentPyramid p;
  p.description_index = desc;
  for (auto s : pyramid_shapes(rows, cols, levels))
    p.levels.push_back(Mat::Zero(s.rows, s.cols));
  return p;
}

long long quantize_scalar(double s, double step) {
  if (!(step > 0.0)) throw_invalid("quantize_scalar: step must be positive");
  return std::llround(s / step);
}

BlockGeometry block_geometry(int rows, int cols) {
  if (rows < 1 || cols < 1) throw_invalid("block_geometry: empty grid");
  BlockGeometry g;
  g.rows = rows;
  g.cols = cols;
  g.block_rows = (rows + kBlockSize - 1) / kBlockSize;
  g.block_cols = (cols + kBlockSize - 1) / kBlockSize;
  return g;
}

std::vector<Mat> split_blocks(const Mat& grid) {
  const auto g = block_geometry(static_cast<int>(grid.rows()),
                                static_cast<int>(grid.cols()));
  std::vector<Mat> blocks;
  blocks.reserve(g.count());
  for (int br = 0; br < g.block_rows; ++br) {
    for (int bc = 0; bc < g.block_cols; ++bc) {
      Mat b = Mat::Zero(kBlockSize, kBlockSize);
      const int r0 = br * kBlockSize, c0 = bc * kBlockSize;
      const int h = std::min(kBlockSize, g.rows - r0);
      const int w = std::min(kBlockSize, g.cols - c0);
      b.topLeftCorner(h, w) = grid.block(r0, c0, h, w);
      blocks.push_back(std::move(b));
    }
  }
  return blocks;
}

Mat merge_blocks(const std::vector<Mat>& blocks, int rows, int cols) {
  const auto g = block_geometry(rows, cols);
  if (static_cast<int>(blocks.size()) != g.count())
    throw_invalid("merge_blocks: block count mismatch");
  Mat grid(rows, cols);
  for (int br = 0; br < g.block_rows; ++br) {
    for (int bc = 0; bc < g.block_cols; ++bc) {
      const int r0 = br * kBlockSize, c0 = bc * kBlockSize;
      const int h = std::min(kBlockSize, rows - r0);
      const int w = std::min(kBlockSize, cols - c0);
      grid.block(r0, c0, h, w) =
          blocks[br * g.block_cols + bc].topLeftCorner(h, w);
    }
  }
  return grid;
}

int principal_owner(int block, int num_descriptions) {
  if (num_descriptions < 1) throw_invalid("principal_owner: N must be >= 1");
  return block % num_descriptions;
}

std::vector<int> assign_roles(int block_count, int num_descriptions) {
  if (block_count < 1) throw_invalid("assign_roles: M must be >= 1");
  if (num_descriptions < 1) throw_invalid("assign_roles: N must be >= 1");
  std::vector<int> owner(block_count);
  for (int b = 0; b < block_count; ++b)
    owner[b] = principal_owner(b, num_descriptions);
  return owner;
}

Mat step_map(LevelShape shape, int desc, int num_descriptions,
             double principal_step, double redundancy_step) {
  if (!(principal_step > 0.0) || !(redundancy_step > 0.0))
    throw_invalid("step_map: steps must be positive");
  if (principal_step > redundancy_step)
    throw_invalid("step_map: principal step must not exceed redundancy step");
  if (desc < 0 || desc >= num_descriptions)
    throw_invalid("step_map: description index out of range");
  const auto g = block_geometry(shape.rows, shape.cols);
  Mat steps(shape.rows, shape.cols);
  for (int r = 0; r < shape.rows; ++r) {
    for (int c = 0; c < shape.cols; ++c) {
      const int b = (r / kBlockSize) * g.block_cols + (c / kBlockSize);
      steps(r, c) = principal_owner(b, num_descriptions) == desc
                        ? principal_step
                        : redundancy_step;
    }
  }
  return steps;
}

Mat quantize_grid(const Mat& y, const Mat& steps, QuantizeMode mode,
                  std::mt19937_64* rng) {
  if (y.rows() != steps.rows() || y.cols() != steps.cols())
    throw_invalid("quantize_grid: shape mismatch");
  if ((steps.array() <= 0.0).any())
    throw_invalid("quantize_grid: steps must be positive");
  Mat out(y.rows(), y.cols());
  if (mode == QuantizeMode::kTrain) {
    if (!rng) throw_invalid("quantize_grid: train mode needs an rng");
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (Eigen::Index c = 0; c < y.cols(); ++c)
      for (Eigen::Index r = 0; r < y.rows(); ++r)
        out(r, c) = y(r, c) + steps(r, c) * u(*rng);
  } else {
    for (Eigen::Index c = 0; c < y.cols(); ++c)
      for (Eigen::Index r = 0; r < y.rows(); ++r)
        out(r, c) = steps(r, c) *
                    static_cast<double>(quantize_scalar(y(r, c), steps(r, c)));
  }
  return out;
}

IMat quantize_indices(const Mat& y, const Mat& steps) {
  if (y.rows() != steps.rows() || y.cols() != steps.cols())
    throw_invalid("quantize_indices: shape mismatch");
  IMat out(y.rows(), y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c)
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      long long q = quantize_scalar(y(r, c), steps(r, c));
      out(r, c) = static_cast<int>(
          std::clamp<long long>(q, kSymbolMin, kSymbolMax));
    }
  return out;
}

Mat dequantize(const IMat& indices, const Mat& steps) {
  if (indices.rows() != steps.rows() || indices.cols() != steps.cols())
    throw_invalid("dequantize: shape mismatch");
  return indices.cast<double>().cwiseProduct(steps);
}

Mat merge_central_level(const std::vector<Mat>& side_levels,
                        int num_descriptions) {
  if (static_cast<int>(side_levels.size()) != num_descriptions ||
      num_descriptions < 1)
    throw Error(ErrorCode::kInvalidArgument,
                "merge_central_level: need all N side levels");
  std::vector<const Mat*> ptrs;
  ptrs.reserve(side_levels.size());
  for (const auto& m : side_levels) ptrs.push_back(&m);
  LevelShape shape{static_cast<int>(side_levels[0].rows()),
                   static_cast<int>(side_levels[0].cols())};
  return substitute_level(ptrs, shape, num_descriptions, false);
}

Mat substitute_level(const std::vector<const Mat*>& side_levels,
                     LevelShape shape, int num_descriptions, bool zero_fill) {
  if (static_cast<int>(side_levels.size()) != num_descriptions)
    throw_invalid("substitute_level: side count mismatch");
  for (const Mat* m : side_levels)
    if (m && (m->rows() != shape.rows || m->cols() != shape.cols))
      throw_invalid("substitute_level: shape mismatch");
  const auto g = block_geometry(shape.rows, shape.cols);
  Mat central = Mat::Zero(shape.rows, shape.cols);
  for (int br = 0; br < g.block_rows; ++br) {
    for (int bc = 0; bc < g.block_cols; ++bc) {
      const int b = br * g.block_cols + bc;
      const int owner = principal_owner(b, num_descriptions);
      // Selection order: principal owner first, then surviving descriptions
      // by ascending index.
      const Mat* src = side_levels[owner];
      for (int j = 0; !src && j < num_descriptions; ++j) src = side_levels[j];
      if (!src) {
        if (zero_fill) continue;
        throw Error(ErrorCode::kUnrecoverableBlock,
                    "substitute_level: block lost in every description");
      }
      const int r0 = br * kBlockSize, c0 = bc * kBlockSize;
      const int h = std::min(kBlockSize, shape.rows - r0);
      const int w = std::min(kBlockSize, shape.cols - c0);
      central.block(r0, c0, h, w) = src->block(r0, c0, h, w);
    }
  }
  return central;
}

}  // namespace helixmdc
