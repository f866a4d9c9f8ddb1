// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "sfc4.hpp"

#include <algorithm>
#include <cmath>

#include "dna.hpp"
#include "laplace.hpp"

namespace helixmdc {
namespace {

struct WeightedSymbol {
  long long symbol;
  double prob;
};

void fano_partition(const std::vector<WeightedSymbol>& items, size_t begin,
                    size_t end, const std::string& prefix,
                    std::map<long long, std::string>& out) {
  const size_t n = end - begin;
  if (n == 1) {
    out[items[begin].symbol] = prefix.empty() ? "A" : prefix;
    return;
  }
  const size_t groups = std::min<size_t>(4, n);
  double total = 0.0;
  for (size_t i = begin; i < end; ++i) total += items[i].prob;

  size_t idx = begin;
  double remaining = total;
  for (size_t g = 0; g < groups; ++g) {
    const size_t groups_left = groups - g;
    const double target = remaining / groups_left;
    size_t start = idx;
    double acc = 0.0;
    // take at least one item; keep taking while it brings us closer to the
    // proportional share, leaving one item for each later group
    do {
      acc += items[idx++].prob;
    } while (idx < end - (groups_left - 1) &&
             std::abs(acc + items[idx].prob - target) < std::abs(acc - target));
    remaining -= acc;
    const std::string p = prefix + nt_char(static_cast<int>(g));
    if (idx - start == 1)
      out[items[start].symbol] = p;
    else
      fano_partition(items, start, idx, p, out);
  }
}

}  // namespace

const std::string& Sfc4Codebook::codeword(long long symbol) const {
  auto it = codewords.find(symbol);
  if (it == codewords.end())
    throw_invalid("SFC4: symbol not in codebook: " + std::to_string(symbol));
  return it->second;
}

Sfc4Codebook build_sfc4(
    const std::vector<std::pair<long long, double>>& frequencies) {
  std::vector<WeightedSymbol> items;
  double total = 0.0;
  for (auto& [sym, f] : frequencies) {
    if (f < 0.0) throw_invalid("SFC4: negative frequency");
    if (f > 0.0) {
      items.push_back({sym, f});
      total += f;
    }
  }
  if (items.empty()) throw_invalid("SFC4: empty alphabet");
  for (auto& it : items) it.prob /= total;
  std::stable_sort(items.begin(), items.end(),
                   [](const WeightedSymbol& a, const WeightedSymbol& b) {
                     if (a.prob != b.prob) return a.prob > b.prob;
                     return a.symbol < b.symbol;
                   });
  Sfc4Codebook book;
  for (auto& it : items) book.symbols.push_back(it.symbol);
  fano_partition(items, 0, items.size(), "", book.codewords);
  return book;
}

Sfc4Codebook build_sfc4_laplace(int lo, int hi, double scale) {
  if (lo > hi) throw_invalid("SFC4: empty symbol range");
  std::vector<std::pair<long long, double>> freqs;
  for (int k = lo; k <= hi; ++k) freqs.emplace_back(k, laplace_pmf(k, 0.0, scale));
  return build_sfc4(freqs);
}

std::string sfc4_encode(std::span<const long long> symbols,
                        const Sfc4Codebook& book) {
  std::string out;
  int run = 0;
  auto emit = [&](char nt) {
    if (run == kMaxHomopolymerRun) {
      // break the run before any further output
      out.push_back(rotate_nt(out.back()));
      run = 1;
    }
    if (!out.empty() && out.back() == nt)
      ++run;
    else
      run = 1;
    out.push_back(nt);
  };
  for (long long s : symbols)
    for (char nt : book.codeword(s)) emit(nt);
  return out;
}

std::vector<long long> sfc4_decode(const std::string& seq,
                                   const Sfc4Codebook& book, size_t count) {
  // decode trie
  struct Node {
    int child[4] = {-1, -1, -1, -1};
    int terminal = -1;
  };
  std::vector<Node> trie(1);
  for (size_t i = 0; i < book.symbols.size(); ++i) {
    int cur = 0;
    const std::string& cw = book.codewords.at(book.symbols[i]);
    for (char nt : cw) {
      int ch = trie[cur].child[nt_index(nt)];
      if (ch < 0) {
        ch = static_cast<int>(trie.size());
        trie[cur].child[nt_index(nt)] = ch;
        trie.emplace_back();
      }
      cur = ch;
    }
    trie[cur].terminal = static_cast<int>(i);
  }

  std::vector<long long> out;
  out.reserve(count);
  size_t pos = 0;
  int run = 0;
  char last = 0;
  auto next_nt = [&]() -> char {
    if (run == kMaxHomopolymerRun) {
      if (pos >= seq.size()) throw_corrupt("SFC4: truncated stream");
      if (seq[pos] != rotate_nt(last))
        throw_corrupt("SFC4: bad run-break nucleotide at position " +
                      std::to_string(pos));
      last = seq[pos++];
      run = 1;
    }
    if (pos >= seq.size()) throw_corrupt("SFC4: truncated stream");
    const char nt = seq[pos++];
    run = (nt == last) ? run + 1 : 1;
    last = nt;
    return nt;
  };
  while (out.size() < count) {
    int cur = 0;
    while (trie[cur].terminal < 0) {
      const int ch = trie[cur].child[nt_index(next_nt())];
      if (ch < 0) throw_corrupt("SFC4: undecodable prefix");
      cur = ch;
    }
    out.push_back(book.symbols[trie[cur].terminal]);
  }
  return out;
}

}  // namespace helixmdc
