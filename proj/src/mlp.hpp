// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "latent.hpp"
#include "tensor.hpp"

namespace helixmdc {

inline constexpr int kHiddenWidth = 16;
inline constexpr int kContextSize = 12;
inline constexpr double kSigmaEps = 1e-4;

// Fully connected network, ReLU between hidden layers, linear output.
// Weights are (in x out); biases (1 x out).
struct Mlp {
  std::vector<Mat> weights;
  std::vector<Mat> biases;

  static Mlp create(const std::vector<int>& widths, std::mt19937_64& rng);
  Mat forward(const Mat& x) const;
  int input_width() const { return static_cast<int>(weights.front().rows()); }
  int param_count() const;
  // Fixed serialization order: layer by layer, weights row-major, then bias.
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);
};

Mlp make_synthesis_mlp(int levels, std::mt19937_64& rng);  // L -> 16 -> 16 -> 3
Mlp make_arm_mlp(std::mt19937_64& rng);                    // 12 -> 16 -> 16 -> 2

// Raw ARM output to positive scale: softplus(raw) + 1e-4.
double sigma_from_raw(double raw);

// (mu, sigma) for one pixel from its 12 causal context values.
struct LaplaceParams {
  double mu = 0.0;
  double sigma = 0.0;
};
LaplaceParams arm_forward(const std::vector<double>& context, const Mlp& arm);

// Batched context gather over a grid, raster-ordered rows, zeros outside.
Mat gather_context_eval(const Mat& grid);
// Per-pixel (mu, sigma) over the whole grid, raster order, (n x 2).
Mat arm_forward_grid(const Mat& grid, const Mlp& arm);

// Reconstructed image channels (each rows x cols, clamped to [0,1]).
struct Planes {
  Mat r, g, b;
};
Planes synthesize_eval(const std::vector<Mat>& dequantized_levels,
                       const Mlp& synthesis, int rows, int cols,
                       bool clamp = true);

// Eq.-style model rate in bits of a quantized description: sum over levels of
// the floored Laplace bin bits, bin width = per-pixel step.
double rate_of_description_eval(const std::vector<Mat>& dequantized_levels,
                                const std::vector<Mat>& step_maps,
                                const Mlp& arm);

// Tape-side forward pass of an Mlp given leaf handles for its parameters.
struct MlpVars {
  std::vector<Var> weights;
  std::vector<Var> biases;
};
MlpVars register_mlp(Tape& tape, const Mlp& mlp);
Var mlp_forward_tape(Tape& tape, Var x, const MlpVars& vars);

}  // namespace helixmdc
