// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"

namespace helixmdc {

// Fixed-length DNA code of 48 trinucleotides: all codewords over {A,T,C,G}
// (in that order) whose 2nd and 3rd nucleotides differ, listed
// lexicographically. Any concatenation keeps homopolymer runs <= 3.
class C3Code {
 public:
  static const C3Code& instance();

  int size() const { return 48; }
  const std::string& codeword(int digit) const;       // 0..47
  // Digit of a trinucleotide; throws kCorruptData if not in the code.
  int digit(const std::string& trinucleotide) const;
  bool contains(const std::string& trinucleotide) const;

 private:
  C3Code();
  std::vector<std::string> words_;
  std::array<int, 64> lookup_;  // by 4*16 index, -1 if excluded
};

// Bitstream <-> DNA via base-48 digits. Framing: a 2-digit header carrying
// the residual bit count r in [0, 64], then the stream cut into 65-bit
// chunks of 12 digits each (48^12 > 2^65); the final partial chunk, if any,
// is zero-padded to 65 bits. Output is 3 nts per digit.
std::string transcode_to_dna(const std::vector<uint8_t>& bytes);
// Exact inverse; throws kCorruptData (with position) on unknown codewords
// or malformed framing.
std::vector<uint8_t> transcode_from_dna(const std::string& seq);

// Digit-level helpers (used by tests and the oligo layer).
std::string digits_to_dna(const std::vector<int>& digits);
std::vector<int> dna_to_digits(const std::string& seq);

}  // namespace helixmdc
