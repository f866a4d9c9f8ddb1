// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "channel.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "error.hpp"

namespace helixmdc {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

OligoType type_from_name(const std::string& name) {
  if (name == "GIO") return OligoType::kGio;
  if (name == "ARMO") return OligoType::kArmo;
  if (name == "SynthO" || name == "SYNTHO") return OligoType::kSyntho;
  if (name == "DO") return OligoType::kDo;
  throw_invalid("scenario: unknown stream type '" + name + "'");
}

StreamSelector parse_selector(std::string spec) {
  StreamSelector sel;
  const size_t at = spec.find('@');
  if (at != std::string::npos) {
    sel.fraction = std::stod(spec.substr(at + 1));
    spec = spec.substr(0, at);
  }
  if (sel.fraction < 0.0 || sel.fraction > 1.0)
    throw_invalid("scenario: fraction must be in [0,1]");
  std::stringstream ss(spec);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(trim(part));
  if (parts.empty()) throw_invalid("scenario: empty stream selector");
  sel.type = type_from_name(parts[0]);
  if (parts.size() > 1) sel.description = std::stoi(parts[1]);
  if (parts.size() > 2) sel.level = std::stoi(parts[2]);
  if (parts.size() > 3) throw_invalid("scenario: bad stream selector");
  return sel;
}

}  // namespace

bool StreamSelector::matches(const OligoRecord& rec) const {
  if (rec.type != type) return false;
  if (description && rec.description != *description) return false;
  if (level && rec.level != *level) return false;
  return true;
}

LossScenario parse_scenario(const std::string& text) {
  LossScenario sc;
  bool mode_set = false;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw_invalid("scenario: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "mode") {
      if (value == "levels") sc.mode = LossScenario::Mode::kDropLevels;
      else if (value == "rate") sc.mode = LossScenario::Mode::kDropRate;
      else if (value == "streams") sc.mode = LossScenario::Mode::kDropStreams;
      else throw_invalid("scenario: unknown mode '" + value + "'");
      mode_set = true;
    } else if (key == "seed") {
      sc.seed = std::stoull(value);
    } else if (key == "rate") {
      sc.rate = std::stod(value);
      if (sc.rate < 0.0 || sc.rate > 1.0)
        throw_invalid("scenario: rate must be in [0,1]");
    } else if (key == "drop_level") {
      const size_t colon = value.find(':');
      if (colon == std::string::npos)
        throw_invalid("scenario: drop_level needs <desc>:<level>");
      sc.drop_levels.emplace_back(std::stoi(value.substr(0, colon)),
                                  std::stoi(value.substr(colon + 1)));
    } else if (key == "drop_stream") {
      sc.drop_streams.push_back(parse_selector(value));
    } else {
      throw_invalid("scenario: unknown key '" + key + "'");
    }
  }
  if (!mode_set) throw_invalid("scenario: missing mode");
  return sc;
}

LossScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

LossOutcome apply_loss(const std::vector<std::string>& oligo_lines,
                       const LossScenario& scenario) {
  LossOutcome out;
  std::mt19937_64 rng(scenario.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  out.report.total = oligo_lines.size();
  for (const auto& line : oligo_lines) {
    OligoRecord rec;
    bool parsed = true;
    try {
      rec = parse_record(line);
    } catch (const Error&) {
      parsed = false;
    }
    bool drop = false;
    if (parsed) {
      switch (scenario.mode) {
        case LossScenario::Mode::kDropLevels:
          if (rec.type == OligoType::kDo)
            for (auto& [d, k] : scenario.drop_levels)
              if (rec.description == d && rec.level == k) drop = true;
          break;
        case LossScenario::Mode::kDropRate:
          drop = u(rng) < scenario.rate;
          break;
        case LossScenario::Mode::kDropStreams:
          for (const auto& sel : scenario.drop_streams)
            if (sel.matches(rec) && u(rng) < sel.fraction) drop = true;
          break;
      }
      StreamKey key{rec.type, rec.description, rec.level};
      auto& sl = out.report.per_stream[key];
      ++sl.total;
      if (drop) ++sl.dropped;
    }
    if (drop)
      ++out.report.dropped;
    else
      out.surviving.push_back(line);
  }
  return out;
}

}  // namespace helixmdc
