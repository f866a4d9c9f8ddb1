// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "image.hpp"
#include "latent.hpp"
#include "mlp.hpp"

namespace helixmdc {

struct TrainingConfig {
  int descriptions = 1;  // N
  int levels = 6;        // L
  double alpha = 0.1;    // redundancy factor
  double lambda = 5e-4;  // rate weight (bits/pixel), same for every description
  uint64_t seed = 0;
  int iterations = 10000;
  double lr_latents = 1e-2;
  double lr_params = 1e-3;
  double principal_step = 1.0;
  // step used for redundancy blocks while training; the final per-level
  // steps are picked from {2,3,4} in the post-training search
  double train_redundancy_step = 2.0;

  void validate() const;
};

struct DescriptionReport {
  double psnr_db = 0.0;
  double rate_bits = 0.0;  // model estimate over the latents
  double rate_nts = 0.0;   // filled once entropy coded (codec layer)
};

struct RdReport {
  double central_psnr_db = 0.0;
  std::vector<DescriptionReport> sides;
  double theta_rate_bits = 0.0;  // quantized synthesis parameters
  double psi_rate_bits = 0.0;    // quantized ARM parameters
};

// Everything the per-image optimization produces. Raw (unquantized) values
// plus the post-training quantization outcome.
struct TrainedState {
  int rows = 0, cols = 0;
  TrainingConfig config;
  Image target;
  std::vector<LatentPyramid> latents;  // one per description, real-valued
  Mlp synthesis, arm;                  // raw trained parameters

  // post-training outcome
  bool quantized = false;
  double theta_step = 0.0, psi_step = 0.0;
  double theta_laplace_scale = 0.0, psi_laplace_scale = 0.0;  // over indices
  std::vector<double> redundancy_steps;  // per level
  Mlp synthesis_q, arm_q;                // dequantized quantized models

  const Mlp& inference_synthesis() const {
    return quantized ? synthesis_q : synthesis;
  }
  const Mlp& inference_arm() const { return quantized ? arm_q : arm; }
  double redundancy_step(int level) const;
  // Per-level quantization step maps for one description.
  std::vector<Mat> step_maps(int desc) const;
  // Inference-quantized (round, clamp, rescale) latent levels.
  std::vector<Mat> dequantized_description(int desc) const;
  std::vector<IMat> description_indices(int desc) const;
  // Central pyramid merged from principal blocks.
  std::vector<Mat> central_levels() const;
};

// The training objective given its separately computed terms:
//   J = D0 + alpha * sum(Dj) + lambda * sum(Rj)
// with rates in bits/pixel. For N = 1 the side term collapses into the
// central one (side and central reconstructions coincide).
double combine_training_cost(double central_distortion,
                             std::span<const double> side_distortions,
                             std::span<const double> side_rates_bpp,
                             double alpha, double lambda);

struct CostTerms {
  double cost = 0.0;
  double central_distortion = 0.0;
  std::vector<double> side_distortions;
  std::vector<double> side_rate_bits;
};

// One noise-relaxed evaluation of the training cost (no gradients).
CostTerms training_cost(const TrainedState& state, std::mt19937_64& noise_rng);

struct TrainResult {
  TrainedState state;
  RdReport report;
  std::vector<double> cost_log;  // J_t every 50 iterations
};

// Per-image optimization: Adam on latents and both MLPs under the
// noise-relaxed cost, cosine learning-rate decay, then the post-training
// quantization search. Deterministic for a fixed config.
TrainResult train(const Image& image, const TrainingConfig& config);

// Post-training parameter quantization: exhaustive grid over parameter
// steps {2^-7..2^-2} for synthesis and ARM independently, then a per-level
// pass choosing redundancy steps from {2,3,4}. Fills the *_q models and
// never alters latents. Returns the achieved J_p.
double post_training_quantize(TrainedState& state);

// Inference-mode metrics using the quantized models.
RdReport rd_report(const TrainedState& state);

// Laplace-model rate estimate (bits) of a quantized parameter vector, and
// the fitted per-index scale.
struct ParamRate {
  double bits = 0.0;
  double laplace_scale = 1.0;
};
ParamRate param_rate_bits(const std::vector<long long>& indices);

std::vector<long long> quantize_params(const std::vector<double>& flat,
                                       double step);
std::vector<double> dequantize_params(const std::vector<long long>& indices,
                                      double step);

}  // namespace helixmdc
