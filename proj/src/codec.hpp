// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "channel.hpp"
#include "oligo.hpp"
#include "trainer.hpp"

namespace helixmdc {

// Storage-cost accounting over a set of oligo lines. Every nucleotide is
// charged: headers, separators, parity, and all stream types.
struct Metrics {
  int rows = 0, cols = 0;
  size_t oligo_count = 0;
  size_t total_nts = 0;
  size_t payload_nts = 0;
  double nts_per_pixel() const {
    return rows && cols ? static_cast<double>(total_nts) / (rows * cols) : 0.0;
  }
};

struct EncodedImage {
  std::vector<std::string> oligos;
  RdReport report;  // rate_nts filled with actual coded payload sizes
  Metrics metrics;
};

// Entropy coding of one latent level: the ARM is run in raster order over
// the dequantized grid (causal context only, so the decoder can mirror it),
// its (mu, sigma) mapped into index units and fed to the range coder over
// the alphabet [lo, hi].
std::vector<uint8_t> encode_level(const IMat& indices, const Mat& steps,
                                  const Mlp& arm, int lo, int hi);
IMat decode_level(std::span<const uint8_t> bytes, LevelShape shape,
                  const Mat& steps, const Mlp& arm, int lo, int hi);

// Side info blob carried by the GIO stream: geometry, config, quantization
// steps, Laplace scales for the parameter codebooks, and per-stream symbol
// bounds. Binary, little-endian, versioned.
struct SideInfo {
  int rows = 0, cols = 0;
  int descriptions = 1, levels = 6;
  double principal_step = 1.0;
  std::vector<double> redundancy_steps;       // per level
  double theta_step = 0.0, psi_step = 0.0;
  double theta_scale = 0.0, psi_scale = 0.0;  // quantized to 1/256 units
  int theta_lo = 0, theta_hi = 0, psi_lo = 0, psi_hi = 0;
  std::vector<std::pair<int, int>> latent_bounds;  // [desc*levels + level]
};

std::vector<uint8_t> serialize_side_info(const SideInfo& s);
SideInfo parse_side_info(std::span<const uint8_t> bytes);

// Full encoder back end: quantized state to oligo lines plus metrics.
EncodedImage encode_trained(const TrainedState& state, uint32_t id = 0);

struct DecodeResult {
  bool decodable = false;    // strict verdict (some description is complete)
  bool best_effort = false;  // reconstruction used substitution/zero-fill
  Image central;
  std::vector<std::optional<Image>> sides;  // complete descriptions only
  SideInfo info;
  Metrics metrics;       // over the surviving set
  size_t quarantined = 0;
};

// Throws kUndecodable when GIO, ARMO, or SynthO is incomplete; otherwise
// always produces a central image, substituting or zero-filling lost latent
// levels.
DecodeResult decode(const std::vector<std::string>& lines);

// Trained-state checkpoint (binary, bit-exact doubles). The quantized
// models are rebuilt on load.
void save_checkpoint(const TrainedState& state, const std::string& path);
TrainedState load_checkpoint(const std::string& path);

struct RobustnessResult {
  bool decodable = false;
  bool best_effort = false;
  double central_psnr_db = 0.0;
  std::vector<std::optional<double>> side_psnr_db;
  std::vector<std::optional<Image>> sides;
  Image central;
  LossReport loss;
};

// Encode, push through the loss scenario, decode what survives, and score
// against the state's target image. An undecodable surviving set yields
// decodable = false with no reconstructions (never a throw).
RobustnessResult evaluate_robustness(const TrainedState& state,
                                     const LossScenario& scenario,
                                     uint32_t id = 0);

Metrics metrics_of(const std::vector<std::string>& lines, int rows, int cols);

}  // namespace helixmdc
