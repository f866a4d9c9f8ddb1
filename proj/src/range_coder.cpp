// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "range_coder.hpp"

namespace helixmdc {
namespace {

constexpr uint64_t kTop = 1ull << 56;
constexpr uint64_t kBot = 1ull << 32;
constexpr uint32_t kMaxTotal = 1u << 16;

}  // namespace

void RangeEncoder::encode(uint32_t cum_freq, uint32_t freq,
                          uint32_t total_freq) {
  if (finished_) throw_invalid("RangeEncoder: already finished");
  if (freq == 0 || total_freq > kMaxTotal || cum_freq + freq > total_freq)
    throw Error(ErrorCode::kInvalidArgument,
                "RangeEncoder: bad frequency interval (range overflow?)");
  range_ /= total_freq;
  low_ += cum_freq * range_;
  range_ *= freq;
  while ((low_ ^ (low_ + range_)) < kTop ||
         (range_ < kBot && ((range_ = -low_ & (kBot - 1)), true))) {
    out_.push_back(static_cast<uint8_t>(low_ >> 56));
    low_ <<= 8;
    range_ <<= 8;
  }
}

std::vector<uint8_t> RangeEncoder::finish() {
  if (finished_) throw_invalid("RangeEncoder: already finished");
  finished_ = true;
  // range_ >= 2^32 after renormalization, so [low_, low_+range_) contains a
  // multiple of 2^32; its top 4 bytes identify the interval and the decoder
  // reads the remaining bytes as zeros.
  const uint64_t code = (low_ + kBot - 1) & ~(kBot - 1);
  for (int i = 0; i < 4; ++i)
    out_.push_back(static_cast<uint8_t>(code >> (56 - 8 * i)));
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const uint8_t> bytes) : bytes_(bytes) {
  for (int i = 0; i < 8; ++i) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
  if (pos_ < bytes_.size()) return bytes_[pos_++];
  if (virtual_zeros_ < 4) {
    ++virtual_zeros_;
    return 0;
  }
  throw Error(ErrorCode::kCorruptData, "RangeDecoder: stream underflow");
}

uint32_t RangeDecoder::decode_target(uint32_t total_freq) {
  if (total_freq == 0 || total_freq > kMaxTotal)
    throw_invalid("RangeDecoder: bad total frequency");
  range_ /= total_freq;
  uint64_t t = (code_ - low_) / range_;
  if (t >= total_freq)
    throw Error(ErrorCode::kCorruptData, "RangeDecoder: corrupt stream");
  return static_cast<uint32_t>(t);
}

void RangeDecoder::decode_update(uint32_t cum_freq, uint32_t freq,
                                 uint32_t total_freq) {
  if (freq == 0 || cum_freq + freq > total_freq)
    throw_invalid("RangeDecoder: bad frequency interval");
  low_ += cum_freq * range_;
  range_ *= freq;
  while ((low_ ^ (low_ + range_)) < kTop ||
         (range_ < kBot && ((range_ = -low_ & (kBot - 1)), true))) {
    code_ = (code_ << 8) | next_byte();
    low_ <<= 8;
    range_ <<= 8;
  }
}

}  // namespace helixmdc
