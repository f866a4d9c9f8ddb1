// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"

namespace helixmdc {

// Carry-less range coder (Subbotin style) widened to 64-bit state with
// 32-bit renormalization margin; byte-oriented output. Total frequency per
// symbol model must not exceed 2^16. The tail is trimmed to 4 bytes: the
// decoder supplies up to 4 implicit zero bytes, reading further is an
// underflow error.
class RangeEncoder {
 public:
  void encode(uint32_t cum_freq, uint32_t freq, uint32_t total_freq);
  std::vector<uint8_t> finish();
  size_t bytes_emitted() const { return out_.size(); }

 private:
  std::vector<uint8_t> out_;
  uint64_t low_ = 0;
  uint64_t range_ = ~0ull;
  bool finished_ = false;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const uint8_t> bytes);
  // Cumulative-frequency target of the next symbol, in [0, total_freq).
  uint32_t decode_target(uint32_t total_freq);
  void decode_update(uint32_t cum_freq, uint32_t freq, uint32_t total_freq);

 private:
  uint8_t next_byte();
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
  int virtual_zeros_ = 0;
  uint64_t low_ = 0;
  uint64_t code_ = 0;
  uint64_t range_ = ~0ull;
};

}  // namespace helixmdc
