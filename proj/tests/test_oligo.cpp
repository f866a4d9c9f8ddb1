// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "oligo.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "dna.hpp"
#include "doctest.h"

using namespace helixmdc;

namespace {

std::string random_payload(std::mt19937_64& rng, size_t max_len) {
  std::uniform_int_distribution<size_t> len(0, max_len);
  std::uniform_int_distribution<int> nt(0, 3);
  std::string p(len(rng), 'A');
  // avoid pre-existing homopolymer violations in the payload itself
  for (size_t i = 0; i < p.size(); ++i) {
    char c = nt_char(nt(rng));
    if (i >= 2 && p[i - 1] == c && p[i - 2] == c) c = rotate_nt(c);
    p[i] = c;
  }
  return p;
}

OligoRecord random_record(std::mt19937_64& rng) {
  std::uniform_int_distribution<uint32_t> field(0, 6560);
  std::uniform_int_distribution<int> small(0, 3);
  OligoRecord rec;
  rec.id = field(rng);
  rec.type = static_cast<OligoType>(small(rng));
  rec.address = field(rng);
  rec.count = field(rng);
  rec.description = small(rng);
  rec.level = small(rng);
  rec.payload = random_payload(rng, kOligoPayloadCapacity);
  return rec;
}

}  // namespace

TEST_CASE("serialize/parse round trip over fuzzed records") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const OligoRecord rec = random_record(rng);
    const std::string line = serialize_record(rec);
    REQUIRE(line.size() == static_cast<size_t>(kOligoLength));
    CHECK(validate_constraints(line).violations.empty());
    CHECK(parity_check(line));
    const OligoRecord back = parse_record(line);
    CHECK(back.id == rec.id);
    CHECK(back.type == rec.type);
    CHECK(back.address == rec.address);
    CHECK(back.count == rec.count);
    CHECK(back.description == rec.description);
    CHECK(back.level == rec.level);
    CHECK(back.payload == rec.payload);
  }
}

TEST_CASE("field range validation") {
  OligoRecord rec;
  rec.id = 6561;
  CHECK_THROWS_AS(serialize_record(rec), Error);
  rec.id = 0;
  rec.payload = std::string(kOligoPayloadCapacity + 1, 'A');
  CHECK_THROWS_AS(serialize_record(rec), Error);
}

TEST_CASE("single substitution detection: exhaustive positions") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const std::string line = serialize_record(random_record(rng));
    for (int pos = 0; pos < kOligoLength; ++pos) {
      for (char alt : kNucleotides) {
        if (alt == line[pos]) continue;
        std::string bad = line;
        bad[pos] = alt;
        // every substitution must be caught: parity (or framing) fails
        CHECK_THROWS_AS(parse_record(bad), Error);
      }
    }
  }
}

TEST_CASE("random substitution fuzz: 1000 corruptions, zero accepted") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pos(0, kOligoLength - 1);
  std::uniform_int_distribution<int> nt(0, 3);
  const std::string line = serialize_record(random_record(rng));
  int caught = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string bad = line;
    const int p = pos(rng);
    char alt = nt_char(nt(rng));
    while (alt == bad[p]) alt = rotate_nt(alt);
    bad[p] = alt;
    try {
      parse_record(bad);
    } catch (const Error&) {
      ++caught;
    }
  }
  CHECK(caught == 1000);
}

TEST_CASE("pack/parse reassembly round trip") {
  std::mt19937_64 rng(4);
  std::vector<PayloadStream> streams;
  streams.push_back({OligoType::kGio, 0, 0, random_payload(rng, 100)});
  streams.push_back({OligoType::kArmo, 0, 0, random_payload(rng, 900)});
  streams.push_back({OligoType::kDo, 1, 3, random_payload(rng, 2000)});
  streams.push_back({OligoType::kDo, 0, 2, ""});  // vanishes
  auto lines = pack(streams, 7);

  for (const auto& l : lines) {
    CHECK(l.size() == static_cast<size_t>(kOligoLength));
    CHECK(parse_record(l).id == 7);
  }

  std::shuffle(lines.begin(), lines.end(), rng);
  const ParseResult pr = parse(lines);
  CHECK(pr.quarantined == 0);
  for (const auto& st : streams) {
    const StreamState* s = pr.find(st.type, st.description, st.level);
    if (st.dna.empty()) {
      CHECK(s == nullptr);
      continue;
    }
    REQUIRE(s != nullptr);
    REQUIRE(s->complete);
    CHECK(s->payload == st.dna);
  }
}

TEST_CASE("parse tolerates garbage, duplicates, and missing slices") {
  std::mt19937_64 rng(5);
  std::vector<PayloadStream> streams{
      {OligoType::kDo, 0, 0, random_payload(rng, 700)}};
  auto lines = pack(streams, 0);
  REQUIRE(lines.size() >= 3);

  // duplicates are ignored
  auto dup = lines;
  dup.push_back(lines[0]);
  CHECK(parse(dup).stream_complete(OligoType::kDo, 0, 0));

  // corrupt line is quarantined, not fatal
  auto noisy = lines;
  noisy.push_back("GATTACA");
  const ParseResult pr = parse(noisy);
  CHECK(pr.quarantined == 1);
  CHECK(pr.stream_complete(OligoType::kDo, 0, 0));

  // dropping a slice leaves the stream incomplete
  auto missing = lines;
  missing.erase(missing.begin() + 1);
  const ParseResult pm = parse(missing);
  const StreamState* s = pm.find(OligoType::kDo, 0, 0);
  REQUIRE(s != nullptr);
  CHECK_FALSE(s->complete);
  CHECK(s->received == lines.size() - 1);
}

TEST_CASE("decodability verdict rule") {
  std::mt19937_64 rng(6);
  const int n_desc = 2, levels = 3;
  std::vector<PayloadStream> streams{
      {OligoType::kGio, 0, 0, random_payload(rng, 50)},
      {OligoType::kArmo, 0, 0, random_payload(rng, 50)},
      {OligoType::kSyntho, 0, 0, random_payload(rng, 50)},
  };
  for (int d = 0; d < n_desc; ++d)
    for (int k = 0; k < levels; ++k)
      streams.push_back({OligoType::kDo, d, k, random_payload(rng, 50)});
  const auto all = pack(streams, 0);
  CHECK(decodable_verdict(parse(all), n_desc, levels));

  auto drop_type = [&](OligoType t, int d, int k) {
    std::vector<std::string> kept;
    for (const auto& l : all) {
      const OligoRecord r = parse_record(l);
      if (r.type == t && r.description == d && r.level == k) continue;
      kept.push_back(l);
    }
    return kept;
  };
  // losing a shared stream is fatal
  CHECK_FALSE(decodable_verdict(parse(drop_type(OligoType::kArmo, 0, 0)),
                                n_desc, levels));
  // losing one level of one description: the other description carries it
  CHECK(decodable_verdict(parse(drop_type(OligoType::kDo, 0, 1)), n_desc,
                          levels));
  // losing one level in every description is fatal
  auto both = drop_type(OligoType::kDo, 0, 1);
  {
    std::vector<std::string> kept;
    for (const auto& l : both) {
      const OligoRecord r = parse_record(l);
      if (r.type == OligoType::kDo && r.description == 1 && r.level == 2)
        continue;
      kept.push_back(l);
    }
    both = kept;
  }
  CHECK_FALSE(decodable_verdict(parse(both), n_desc, levels));
}

TEST_CASE("oligo file io round trip with comments") {
  const std::string path = "/tmp/helixmdc_test_oligo_io.txt";
  std::mt19937_64 rng(7);
  const auto lines = pack({{OligoType::kGio, 0, 0, random_payload(rng, 300)}},
                          3);
  write_oligo_file(path, lines);
  {
    std::ofstream app(path, std::ios::app);
    app << "> a comment line\n\n";
  }
  CHECK(read_oligo_file(path) == lines);
  CHECK_THROWS_AS(read_oligo_file("/nonexistent/nope"), Error);
}
