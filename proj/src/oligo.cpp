// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "oligo.hpp"

#include <fstream>

#include "dna.hpp"

namespace helixmdc {
namespace {

constexpr int kIdWidth = 8;
constexpr int kTypeWidth = 2;
constexpr int kAddrWidth = 8;
constexpr int kCountWidth = 8;
constexpr int kLenWidth = 5;
constexpr int kDescWidth = 2;
constexpr int kLevelWidth = 2;
constexpr int kHeaderEnd = 1 + kIdWidth + kTypeWidth + kAddrWidth +
                           kCountWidth + kLenWidth + kDescWidth + kLevelWidth;
constexpr int kPayloadStart = kHeaderEnd + 1;  // after separator
constexpr int kParityStart = kOligoLength - 4;
constexpr uint32_t kMaxFieldValue = 6561;  // 3^8

// GF(4) as GF(2)[x]/(x^2+x+1); addition is xor.
int gf4_mul(int a, int b) {
  static constexpr int table[4][4] = {{0, 0, 0, 0},
                                      {0, 1, 2, 3},
                                      {0, 2, 3, 1},
                                      {0, 3, 1, 2}};
  return table[a][b];
}

char pick_separator(char prev, char next_or_zero) {
  for (char c : kNucleotides)
    if (c != prev && c != next_or_zero) return c;
  throw_invalid("pick_separator: unreachable");
}

}  // namespace

const char* oligo_type_name(OligoType t) {
  switch (t) {
    case OligoType::kGio: return "GIO";
    case OligoType::kArmo: return "ARMO";
    case OligoType::kSyntho: return "SynthO";
    case OligoType::kDo: return "DO";
  }
  return "?";
}

std::string parity_compute(const std::string& prefix) {
  if (prefix.size() != static_cast<size_t>(kParityStart))
    throw_invalid("parity_compute: need exactly 196 nts");
  int c1 = 0, c2 = 0;
  for (size_t i = 0; i < prefix.size(); ++i) {
    const int v = nt_index(prefix[i]);
    c1 ^= v;
    c2 ^= gf4_mul(1 + static_cast<int>(i % 3), v);  // weights cycle 1,2,3
  }
  // sequenced explicitly: the second field's chain must seed off the first
  char prev = prefix.back();
  std::string parity = encode_base3(static_cast<uint64_t>(c1), 2, prev);
  parity += encode_base3(static_cast<uint64_t>(c2), 2, prev);
  return parity;
}

bool parity_check(const std::string& record) {
  if (record.size() != static_cast<size_t>(kOligoLength)) return false;
  try {
    return parity_compute(record.substr(0, kParityStart)) ==
           record.substr(kParityStart);
  } catch (const Error&) {
    return false;
  }
}

std::string serialize_record(const OligoRecord& rec) {
  if (rec.payload.size() > static_cast<size_t>(kOligoPayloadCapacity))
    throw_invalid("serialize_record: payload too long");
  if (rec.id >= kMaxFieldValue || rec.address >= kMaxFieldValue ||
      rec.count >= kMaxFieldValue)
    throw_invalid("serialize_record: field value out of range");
  if (rec.description < 0 || rec.description >= 9 || rec.level < 0 ||
      rec.level >= 9)
    throw_invalid("serialize_record: description/level out of range");
  for (char c : rec.payload) nt_index(c);

  std::string s;
  s.reserve(kOligoLength);
  s.push_back('A');  // forward orientation sentinel
  char prev = 'A';
  s += encode_base3(rec.id, kIdWidth, prev);
  s += encode_base3(static_cast<uint64_t>(rec.type), kTypeWidth, prev);
  s += encode_base3(rec.address, kAddrWidth, prev);
  s += encode_base3(rec.count, kCountWidth, prev);
  s += encode_base3(rec.payload.size(), kLenWidth, prev);
  s += encode_base3(static_cast<uint64_t>(rec.description), kDescWidth, prev);
  s += encode_base3(static_cast<uint64_t>(rec.level), kLevelWidth, prev);
  s.push_back(pick_separator(prev, rec.payload.empty() ? 0 : rec.payload[0]));
  s += rec.payload;
  // alternating pad, phase-shifted off the last emitted nucleotide
  const int pad = kOligoPayloadCapacity - static_cast<int>(rec.payload.size());
  const int base = nt_index(s.back());
  for (int i = 0; i < pad; ++i) s.push_back(nt_char((base + 1 + i) % 4));
  s += parity_compute(s);
  return s;
}

OligoRecord parse_record(const std::string& line) {
  if (line.size() != static_cast<size_t>(kOligoLength))
    throw_corrupt("parse_record: record must be 200 nts");
  for (char c : line) nt_index(c);
  if (!parity_check(line)) throw_corrupt("parse_record: parity failure");
  if (line[0] != 'A') throw_corrupt("parse_record: bad orientation nt");

  OligoRecord rec;
  rec.orientation = line[0];
  char prev = line[0];
  size_t pos = 1;
  auto field = [&](int width) {
    uint64_t v = decode_base3(line, pos, width, prev);
    pos += width;
    return v;
  };
  rec.id = static_cast<uint32_t>(field(kIdWidth));
  const uint64_t type = field(kTypeWidth);
  if (type > 3) throw_corrupt("parse_record: unknown oligo type");
  rec.type = static_cast<OligoType>(type);
  rec.address = static_cast<uint32_t>(field(kAddrWidth));
  rec.count = static_cast<uint32_t>(field(kCountWidth));
  const uint64_t len = field(kLenWidth);
  if (len > static_cast<uint64_t>(kOligoPayloadCapacity))
    throw_corrupt("parse_record: bad payload length");
  rec.description = static_cast<int>(field(kDescWidth));
  rec.level = static_cast<int>(field(kLevelWidth));
  rec.payload = line.substr(kPayloadStart, len);
  return rec;
}

std::vector<std::string> pack(const std::vector<PayloadStream>& streams,
                              uint32_t id) {
  std::vector<std::string> lines;
  for (const auto& st : streams) {
    for (char c : st.dna) nt_index(c);
    const size_t n = st.dna.size();
    if (n == 0) continue;
    const uint32_t count = static_cast<uint32_t>(
        (n + kOligoPayloadCapacity - 1) / kOligoPayloadCapacity);
    for (uint32_t a = 0; a < count; ++a) {
      OligoRecord rec;
      rec.id = id;
      rec.type = st.type;
      rec.address = a;
      rec.count = count;
      rec.description = st.description;
      rec.level = st.level;
      const size_t off = static_cast<size_t>(a) * kOligoPayloadCapacity;
      rec.payload = st.dna.substr(off, kOligoPayloadCapacity);
      lines.push_back(serialize_record(rec));
    }
  }
  return lines;
}

const StreamState* ParseResult::find(OligoType t, int desc, int level) const {
  auto it = streams.find(StreamKey{t, desc, level});
  return it == streams.end() ? nullptr : &it->second;
}

bool ParseResult::stream_complete(OligoType t, int desc, int level) const {
  const StreamState* s = find(t, desc, level);
  return s && s->complete;
}

ParseResult parse(const std::vector<std::string>& lines) {
  ParseResult result;
  std::map<StreamKey, std::map<uint32_t, std::string>> slices;
  std::map<StreamKey, uint32_t> counts;
  std::map<StreamKey, bool> conflicted;
  for (const auto& line : lines) {
    OligoRecord rec;
    try {
      rec = parse_record(line);
    } catch (const Error&) {
      ++result.quarantined;
      continue;
    }
    StreamKey key{rec.type, rec.description, rec.level};
    auto [it, fresh] = counts.emplace(key, rec.count);
    if (!fresh && it->second != rec.count) conflicted[key] = true;
    slices[key].emplace(rec.address, std::move(rec.payload));
  }
  for (auto& [key, by_addr] : slices) {
    StreamState st;
    st.expected_count = counts[key];
    st.received = by_addr.size();
    if (!conflicted[key] && st.expected_count > 0 &&
        by_addr.size() == st.expected_count &&
        by_addr.rbegin()->first == st.expected_count - 1) {
      st.complete = true;
      for (auto& [addr, payload] : by_addr) st.payload += payload;
    }
    result.streams.emplace(key, std::move(st));
  }
  return result;
}

bool decodable_verdict(const ParseResult& r, int num_descriptions,
                       int levels) {
  if (!r.stream_complete(OligoType::kGio) ||
      !r.stream_complete(OligoType::kArmo) ||
      !r.stream_complete(OligoType::kSyntho))
    return false;
  for (int d = 0; d < num_descriptions; ++d) {
    bool all = true;
    for (int k = 0; k < levels; ++k)
      if (!r.stream_complete(OligoType::kDo, d, k)) {
        all = false;
        break;
      }
    if (all) return true;
  }
  return false;
}

std::vector<std::string> read_oligo_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open oligo file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty() || line[0] == '>') continue;
    lines.push_back(line);
  }
  return lines;
}

void write_oligo_file(const std::string& path,
                      const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw_io("cannot write oligo file: " + path);
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw_io("write failure: " + path);
}

}  // namespace helixmdc
