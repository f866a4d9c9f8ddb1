// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "c3.hpp"

#include "dna.hpp"

namespace helixmdc {
namespace {

constexpr int kChunkBits = 65;
constexpr int kChunkDigits = 12;  // 48^12 > 2^65

}  // namespace

C3Code::C3Code() {
  lookup_.fill(-1);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        if (b == c) continue;
        std::string w{nt_char(a), nt_char(b), nt_char(c)};
        lookup_[a * 16 + b * 4 + c] = static_cast<int>(words_.size());
        words_.push_back(std::move(w));
      }
}

const C3Code& C3Code::instance() {
  static const C3Code code;
  return code;
}

const std::string& C3Code::codeword(int digit) const {
  if (digit < 0 || digit >= size()) throw_invalid("C3: digit out of range");
  return words_[digit];
}

int C3Code::digit(const std::string& tri) const {
  if (tri.size() != 3) throw_corrupt("C3: codeword must have 3 nucleotides");
  const int idx =
      nt_index(tri[0]) * 16 + nt_index(tri[1]) * 4 + nt_index(tri[2]);
  const int d = lookup_[idx];
  if (d < 0) throw_corrupt("C3: trinucleotide not in code: " + tri);
  return d;
}

bool C3Code::contains(const std::string& tri) const {
  if (tri.size() != 3) return false;
  for (char c : tri)
    if (std::string("ATCG").find(c) == std::string::npos) return false;
  return lookup_[nt_index(tri[0]) * 16 + nt_index(tri[1]) * 4 +
                 nt_index(tri[2])] >= 0;
}

std::string digits_to_dna(const std::vector<int>& digits) {
  const auto& code = C3Code::instance();
  std::string out;
  out.reserve(digits.size() * 3);
  for (int d : digits) out += code.codeword(d);
  return out;
}

std::vector<int> dna_to_digits(const std::string& seq) {
  if (seq.size() % 3 != 0)
    throw_corrupt("C3: sequence length not a multiple of 3");
  const auto& code = C3Code::instance();
  std::vector<int> out;
  out.reserve(seq.size() / 3);
  for (size_t i = 0; i < seq.size(); i += 3) {
    try {
      out.push_back(code.digit(seq.substr(i, 3)));
    } catch (const Error&) {
      throw Error(ErrorCode::kCorruptData,
                  "C3: corrupt codeword at position " + std::to_string(i));
    }
  }
  return out;
}

namespace {

using U128 = unsigned __int128;

void chunk_to_digits(U128 v, std::vector<int>& digits) {
  int d[kChunkDigits];
  for (int i = kChunkDigits - 1; i >= 0; --i) {
    d[i] = static_cast<int>(v % 48);
    v /= 48;
  }
  digits.insert(digits.end(), d, d + kChunkDigits);
}

}  // namespace

std::string transcode_to_dna(const std::vector<uint8_t>& bytes) {
  const size_t nbits = bytes.size() * 8;
  const size_t full = nbits / kChunkBits;
  const int residual = static_cast<int>(nbits % kChunkBits);

  std::vector<int> digits;
  digits.reserve(2 + (full + 1) * kChunkDigits);
  digits.push_back(residual / 48);
  digits.push_back(residual % 48);

  auto bit_at = [&](size_t i) -> int {
    return (bytes[i >> 3] >> (7 - (i & 7))) & 1;
  };
  size_t bit = 0;
  for (size_t c = 0; c < full; ++c) {
    U128 v = 0;
    for (int i = 0; i < kChunkBits; ++i) v = (v << 1) | bit_at(bit++);
    chunk_to_digits(v, digits);
  }
  if (residual > 0) {
    U128 v = 0;
    for (int i = 0; i < residual; ++i) v = (v << 1) | bit_at(bit++);
    v <<= (kChunkBits - residual);  // zero-pad low bits
    chunk_to_digits(v, digits);
  }
  return digits_to_dna(digits);
}

std::vector<uint8_t> transcode_from_dna(const std::string& seq) {
  const std::vector<int> digits = dna_to_digits(seq);
  if (digits.size() < 2) throw_corrupt("transcode_from_dna: missing header");
  const int residual = digits[0] * 48 + digits[1];
  if (residual > 64) throw_corrupt("transcode_from_dna: bad residual length");
  const size_t body = digits.size() - 2;
  if (body % kChunkDigits != 0)
    throw_corrupt("transcode_from_dna: truncated chunk");
  const size_t chunks = body / kChunkDigits;
  if (residual > 0 && chunks == 0)
    throw_corrupt("transcode_from_dna: framing mismatch");
  const size_t full = chunks - (residual > 0 ? 1 : 0);
  const size_t nbits = full * kChunkBits + residual;
  if (nbits % 8 != 0)
    throw_corrupt("transcode_from_dna: bit count not byte aligned");

  std::vector<uint8_t> bytes(nbits / 8, 0);
  size_t bit = 0;
  auto put_bit = [&](int b) {
    if (b) bytes[bit >> 3] |= static_cast<uint8_t>(0x80u >> (bit & 7));
    ++bit;
  };
  for (size_t c = 0; c < chunks; ++c) {
    U128 v = 0;
    for (int i = 0; i < kChunkDigits; ++i)
      v = v * 48 + digits[2 + c * kChunkDigits + i];
    if (v >> kChunkBits)
      throw_corrupt("transcode_from_dna: chunk value overflow");
    const int nb = (c == chunks - 1 && residual > 0) ? residual : kChunkBits;
    for (int i = 0; i < nb; ++i)
      put_bit(static_cast<int>((v >> (kChunkBits - 1 - i)) & 1));
  }
  return bytes;
}

}  // namespace helixmdc
