// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "error.hpp"

namespace helixmdc {

inline constexpr int kOligoLength = 200;
// 200 minus orientation (1), header fields (35), separator (1), parity (4).
inline constexpr int kOligoPayloadCapacity = 159;

enum class OligoType : int { kGio = 0, kArmo = 1, kSyntho = 2, kDo = 3 };

const char* oligo_type_name(OligoType t);

// One 200-nt packet. Header fields are Goldman base-3 coded (no repeated
// adjacent nucleotides), the payload slice is carried verbatim, a separator
// nucleotide isolates header from payload, the tail holds two GF(4)
// checksums over the first 196 nts.
struct OligoRecord {
  char orientation = 'A';
  uint32_t id = 0;         // file label, < 3^8
  OligoType type = OligoType::kGio;
  uint32_t address = 0;    // slice index within the stream, < 3^8
  uint32_t count = 0;      // total records in the stream, < 3^8
  int description = 0;     // DO records; 0 otherwise
  int level = 0;           // DO records; 0 otherwise
  std::string payload;     // <= kOligoPayloadCapacity nts
};

std::string serialize_record(const OligoRecord& rec);
// Throws kCorruptData on length, alphabet, framing, or parity failure.
OligoRecord parse_record(const std::string& line);

// Two GF(4) checksums (plain sum, position-weighted sum) of a 196-nt prefix,
// returned as the 4-nt parity field encoding.
std::string parity_compute(const std::string& record_without_parity);
bool parity_check(const std::string& record);

// One payload stream to be cut into oligos.
struct PayloadStream {
  OligoType type = OligoType::kGio;
  int description = 0;
  int level = 0;
  std::string dna;
};

// Cuts every stream into records of at most kOligoPayloadCapacity nts.
// Empty streams produce no records.
std::vector<std::string> pack(const std::vector<PayloadStream>& streams,
                              uint32_t id = 0);

struct StreamKey {
  OligoType type;
  int description;
  int level;
  auto operator<=>(const StreamKey&) const = default;
};

struct StreamState {
  bool complete = false;
  uint32_t expected_count = 0;
  size_t received = 0;
  std::string payload;  // reassembled; valid when complete
};

struct ParseResult {
  std::map<StreamKey, StreamState> streams;
  size_t quarantined = 0;  // records failing parity or framing
  const StreamState* find(OligoType t, int desc = 0, int level = 0) const;
  bool stream_complete(OligoType t, int desc = 0, int level = 0) const;
};

// Tolerant reassembly: bad records are quarantined (counted as lost),
// duplicates ignored, order arbitrary.
ParseResult parse(const std::vector<std::string>& lines);

// The decodability rule: general info, ARM and synthesis streams complete,
// and at least one description with every latent level stream complete.
bool decodable_verdict(const ParseResult& r, int num_descriptions, int levels);

// Oligo text file I/O: one sequence per line; '>' comment lines ignored.
std::vector<std::string> read_oligo_file(const std::string& path);
void write_oligo_file(const std::string& path,
                      const std::vector<std::string>& lines);

}  // namespace helixmdc
