// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "latent.hpp"

#include <random>
#include <set>

#include "doctest.h"

using namespace helixmdc;

TEST_CASE("pyramid shapes are ceil-dyadic") {
  const auto s = pyramid_shapes(512, 768, 6);
  REQUIRE(s.size() == 6);
  CHECK(s[0].rows == 512);
  CHECK(s[0].cols == 768);
  CHECK(s[5].rows == 16);
  CHECK(s[5].cols == 24);
  const auto odd = pyramid_shapes(5, 7, 3);
  CHECK(odd[1].rows == 3);
  CHECK(odd[1].cols == 4);
  CHECK(odd[2].rows == 2);
  CHECK(odd[2].cols == 2);
}

TEST_CASE("quantizer round bound") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::uniform_real_distribution<double> us(0.1, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const double y = u(rng), step = us(rng);
    const long long q = quantize_scalar(y, step);
    CHECK(std::abs(y - q * step) <= step / 2 + 1e-9);
  }
  CHECK_THROWS_AS(quantize_scalar(1.0, 0.0), Error);
  CHECK_THROWS_AS(quantize_scalar(1.0, -1.0), Error);
}

TEST_CASE("split/merge blocks round trip with zero padding") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto [r, c] : {std::pair{8, 8}, {13, 21}, {1, 1}, {16, 9}}) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = u(rng);
    const auto blocks = split_blocks(m);
    const auto g = block_geometry(r, c);
    REQUIRE(static_cast<int>(blocks.size()) == g.count());
    for (const auto& b : blocks) {
      CHECK(b.rows() == kBlockSize);
      CHECK(b.cols() == kBlockSize);
    }
    CHECK(merge_blocks(blocks, r, c) == m);
  }
}

TEST_CASE("role assignment is a round-robin partition") {
  for (int n = 1; n <= 4; ++n) {
    for (int blocks = 1; blocks <= 8; ++blocks) {
      const auto roles = assign_roles(blocks, n);
      REQUIRE(static_cast<int>(roles.size()) == blocks);
      std::vector<int> counts(n, 0);
      for (int b = 0; b < blocks; ++b) {
        CHECK(roles[b] == b % n);
        CHECK(roles[b] == principal_owner(b, n));
        ++counts[roles[b]];
      }
      // fair to within one block
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      CHECK(*hi - *lo <= 1);
    }
  }
}

TEST_CASE("step map marks principal fine, redundancy coarse") {
  const LevelShape shape{16, 24};
  const int n = 2;
  const Mat m0 = step_map(shape, 0, n, 1.0, 3.0);
  const Mat m1 = step_map(shape, 1, n, 1.0, 3.0);
  const auto g = block_geometry(shape.rows, shape.cols);
  for (int r = 0; r < shape.rows; ++r)
    for (int c = 0; c < shape.cols; ++c) {
      const int b = (r / kBlockSize) * g.block_cols + (c / kBlockSize);
      const int owner = principal_owner(b, n);
      CHECK(m0(r, c) == (owner == 0 ? 1.0 : 3.0));
      CHECK(m1(r, c) == (owner == 1 ? 1.0 : 3.0));
    }
  // every pixel is principal in exactly one description
  CHECK(((m0.array() == 1.0) != (m1.array() == 1.0)).all());
  CHECK_THROWS_AS(step_map(shape, 0, n, 2.0, 1.0), Error);  // coarser < finer
}

TEST_CASE("quantize modes") {
  std::mt19937_64 rng(3);
  Mat y(4, 4);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) y(i, j) = u(rng);
  const Mat steps = Mat::Constant(4, 4, 0.5);

  const Mat inferred = quantize_grid(y, steps, QuantizeMode::kInfer);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(inferred(i, j) == std::round(y(i, j) / 0.5) * 0.5);

  const Mat noisy = quantize_grid(y, steps, QuantizeMode::kTrain, &rng);
  CHECK(((noisy - y).array().abs() <= 0.25 + 1e-12).all());
  CHECK_THROWS_AS(quantize_grid(y, steps, QuantizeMode::kTrain, nullptr),
                  Error);

  const IMat idx = quantize_indices(y, steps);
  CHECK(dequantize(idx, steps) == inferred);
}

TEST_CASE("index clamping at the alphabet edge") {
  Mat y(1, 2);
  y << 1e6, -1e6;
  const Mat steps = Mat::Ones(1, 2);
  const IMat idx = quantize_indices(y, steps);
  CHECK(idx(0, 0) == kSymbolMax);
  CHECK(idx(0, 1) == kSymbolMin);
}

TEST_CASE("central merge picks principal blocks") {
  const LevelShape shape{16, 16};
  for (int n = 1; n <= 4; ++n) {
    std::vector<Mat> sides;
    for (int j = 0; j < n; ++j)
      sides.push_back(Mat::Constant(shape.rows, shape.cols, j + 1.0));
    const Mat central = merge_central_level(sides, n);
    const auto g = block_geometry(shape.rows, shape.cols);
    for (int r = 0; r < shape.rows; ++r)
      for (int c = 0; c < shape.cols; ++c) {
        const int b = (r / kBlockSize) * g.block_cols + (c / kBlockSize);
        CHECK(central(r, c) == principal_owner(b, n) + 1.0);
      }
  }
}

TEST_CASE("substitution order: owner, then ascending survivors") {
  const LevelShape shape{16, 16};  // 4 blocks, N=2: owners 0,1,0,1
  Mat a = Mat::Constant(16, 16, 1.0), b = Mat::Constant(16, 16, 2.0);

  // owner available: identical to merge
  CHECK(substitute_level({&a, &b}, shape, 2) ==
        merge_central_level({a, b}, 2));

  // description 0 lost: every block served by description 1
  CHECK(substitute_level({nullptr, &b}, shape, 2) == b);

  // both lost: throws, unless zero-fill requested
  CHECK_THROWS_AS(substitute_level({nullptr, nullptr}, shape, 2), Error);
  CHECK(substitute_level({nullptr, nullptr}, shape, 2, true) ==
        Mat::Zero(16, 16));
}

TEST_CASE("exhaustive small-case merge/substitute consistency") {
  // For M <= 8 blocks and N <= 4: substitution with all descriptions
  // present equals the central merge, block for block.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 1; n <= 4; ++n) {
    const LevelShape shape{16, 32};  // 2x4 = 8 blocks
    std::vector<Mat> sides;
    std::vector<const Mat*> ptrs;
    for (int j = 0; j < n; ++j) {
      Mat m(shape.rows, shape.cols);
      for (int r = 0; r < shape.rows; ++r)
        for (int c = 0; c < shape.cols; ++c) m(r, c) = u(rng);
      sides.push_back(std::move(m));
    }
    for (const auto& m : sides) ptrs.push_back(&m);
    CHECK(merge_central_level(sides, n) ==
          substitute_level(ptrs, shape, n, false));
  }
}
