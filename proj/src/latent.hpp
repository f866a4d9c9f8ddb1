// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "error.hpp"

namespace helixmdc {

using Mat = Eigen::MatrixXd;
using IMat = Eigen::MatrixXi;

inline constexpr int kBlockSize = 8;
// Latent symbol alphabet for entropy coding; indices are clamped here.
inline constexpr int kSymbolMin = -256;
inline constexpr int kSymbolMax = 255;

struct LevelShape {
  int rows = 0;
  int cols = 0;
};

// Dyadic pyramid shapes: level k is (ceil(H/2^k), ceil(W/2^k)).
std::vector<LevelShape> pyramid_shapes(int rows, int cols, int levels);

// One description's hierarchical latent set.
struct LatentPyramid {
  std::vector<Mat> levels;
  int description_index = 0;
};

LatentPyramid make_zero_pyramid(int rows, int cols, int levels, int desc);

// round(s / step); reconstruction is index * step.
long long quantize_scalar(double s, double step);

struct BlockGeometry {
  int rows = 0, cols = 0;        // grid shape
  int block_rows = 0, block_cols = 0;  // tiling shape
  int count() const { return block_rows * block_cols; }
};

BlockGeometry block_geometry(int rows, int cols);

// Row-major 8x8 tiling; edge blocks zero-padded.
std::vector<Mat> split_blocks(const Mat& grid);
// Inverse of split_blocks (padding discarded).
Mat merge_blocks(const std::vector<Mat>& blocks, int rows, int cols);

// Principal owner of block b among N descriptions (0-based round-robin).
int principal_owner(int block, int num_descriptions);
// owner per block index; throws on N < 1 or M < 1.
std::vector<int> assign_roles(int block_count, int num_descriptions);

// Per-pixel quantization step for description `desc` of `num_descriptions`:
// principal blocks get `principal_step`, redundancy blocks `redundancy_step`.
Mat step_map(LevelShape shape, int desc, int num_descriptions,
             double principal_step, double redundancy_step);

enum class QuantizeMode { kTrain, kInfer };

// Infer: element-wise round(y/step)*step. Train: y + step*u with
// u ~ U[-0.5, 0.5] (noise-relaxed quantization); rng required.
Mat quantize_grid(const Mat& y, const Mat& steps, QuantizeMode mode,
                  std::mt19937_64* rng = nullptr);

// Integer indices round(y/step), clamped to the coder alphabet.
IMat quantize_indices(const Mat& y, const Mat& steps);
Mat dequantize(const IMat& indices, const Mat& steps);

// Central level: per block, copy from the principal owner's side level.
Mat merge_central_level(const std::vector<Mat>& side_levels,
                        int num_descriptions);

// Central level under losses: per block, owner if available, else the first
// surviving description's redundancy block. A block available nowhere throws
// kUnrecoverableBlock unless zero_fill is set.
Mat substitute_level(const std::vector<const Mat*>& side_levels,
                     LevelShape shape, int num_descriptions,
                     bool zero_fill = false);

}  // namespace helixmdc
