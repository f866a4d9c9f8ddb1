// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace helixmdc {

// Quaternary Shannon-Fano codebook: symbols sorted by descending frequency
// (ties broken by ascending symbol value) and recursively partitioned into
// four near-equal-probability groups, one nucleotide per group. Prefix-free
// by construction.
struct Sfc4Codebook {
  std::vector<long long> symbols;              // sorted order
  std::map<long long, std::string> codewords;  // over {A,T,C,G}

  const std::string& codeword(long long symbol) const;
  bool contains(long long symbol) const {
    return codewords.count(symbol) != 0;
  }
};

Sfc4Codebook build_sfc4(
    const std::vector<std::pair<long long, double>>& frequencies);

// Frequency table from a centered Laplace model over [lo, hi], the
// initialization used for quantized network parameters.
Sfc4Codebook build_sfc4_laplace(int lo, int hi, double scale);

// Lossless encode with a homopolymer post-filter: whenever the emitted
// stream reaches a run of 3 identical nucleotides and more output follows,
// the rotation nucleotide is inserted; the decoder removes it symmetrically.
std::string sfc4_encode(std::span<const long long> symbols,
                        const Sfc4Codebook& book);
// Decodes exactly `count` symbols, ignoring trailing padding.
std::vector<long long> sfc4_decode(const std::string& seq,
                                   const Sfc4Codebook& book, size_t count);

}  // namespace helixmdc
