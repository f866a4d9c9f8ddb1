// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"

namespace helixmdc {

// Nucleotide alphabet in codebook order.
inline constexpr char kNucleotides[4] = {'A', 'T', 'C', 'G'};
inline constexpr int kMaxHomopolymerRun = 3;

int nt_index(char nt);              // throws on non-ACGT
char nt_char(int index);            // 0..3
char rotate_nt(char nt);            // A->T->C->G->A

struct ConstraintViolation {
  size_t position = 0;
  int run_length = 0;
};

struct ConstraintReport {
  int max_run = 0;
  double gc_fraction = 0.0;
  std::vector<ConstraintViolation> violations;  // runs > kMaxHomopolymerRun
  bool ok() const { return violations.empty(); }
};

ConstraintReport validate_constraints(const std::string& seq);

// Goldman-style base-3 field coding: each trit picks the next nucleotide
// among the three that differ from the previous one, so adjacent symbols
// never repeat. `prev` seeds the chain and is updated to the last nt.
std::string encode_base3(uint64_t value, int width, char& prev);
uint64_t decode_base3(const std::string& seq, size_t pos, int width,
                      char& prev);

}  // namespace helixmdc
