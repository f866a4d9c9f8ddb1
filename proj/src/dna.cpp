// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "dna.hpp"

namespace helixmdc {

int nt_index(char nt) {
  switch (nt) {
    case 'A': return 0;
    case 'T': return 1;
    case 'C': return 2;
    case 'G': return 3;
  }
  throw Error(ErrorCode::kInvalidArgument,
              std::string("nt_index: not a nucleotide: '") + nt + "'");
}

char nt_char(int index) {
  if (index < 0 || index > 3) throw_invalid("nt_char: index out of range");
  return kNucleotides[index];
}

char rotate_nt(char nt) { return nt_char((nt_index(nt) + 1) % 4); }

ConstraintReport validate_constraints(const std::string& seq) {
  ConstraintReport rep;
  size_t gc = 0;
  int run = 0;
  size_t run_start = 0;
  for (size_t i = 0; i < seq.size(); ++i) {
    const char c = seq[i];
    nt_index(c);  // validates alphabet
    if (c == 'G' || c == 'C') ++gc;
    if (i > 0 && seq[i - 1] == c) {
      ++run;
    } else {
      // close previous run
      if (run > kMaxHomopolymerRun)
        rep.violations.push_back({run_start, run});
      run = 1;
      run_start = i;
    }
    rep.max_run = std::max(rep.max_run, run);
  }
  if (run > kMaxHomopolymerRun) rep.violations.push_back({run_start, run});
  rep.gc_fraction = seq.empty() ? 0.0 : static_cast<double>(gc) / seq.size();
  return rep;
}

std::string encode_base3(uint64_t value, int width, char& prev) {
  uint64_t cap = 1;
  for (int i = 0; i < width; ++i) cap *= 3;
  if (value >= cap) throw_invalid("encode_base3: value does not fit width");
  std::string trits(width, 0);
  for (int i = width - 1; i >= 0; --i) {
    trits[i] = static_cast<char>(value % 3);
    value /= 3;
  }
  std::string out;
  out.reserve(width);
  int p = nt_index(prev);
  for (int i = 0; i < width; ++i) {
    // trit t selects the (t+1)-th nucleotide after prev, skipping prev
    p = (p + 1 + trits[i]) % 4;
    out.push_back(nt_char(p));
  }
  if (width > 0) prev = out.back();
  return out;
}

uint64_t decode_base3(const std::string& seq, size_t pos, int width,
                      char& prev) {
  if (pos + width > seq.size()) throw_corrupt("decode_base3: truncated field");
  uint64_t value = 0;
  int p = nt_index(prev);
  for (int i = 0; i < width; ++i) {
    const int cur = nt_index(seq[pos + i]);
    int t = (cur - p + 4) % 4;
    if (t == 0) throw_corrupt("decode_base3: repeated nucleotide in field");
    value = value * 3 + (t - 1);
    p = cur;
  }
  if (width > 0) prev = seq[pos + width - 1];
  return value;
}

}  // namespace helixmdc
