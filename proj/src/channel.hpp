// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oligo.hpp"

namespace helixmdc {

// Oligo-level erasure scenarios. Three modes:
//   kDropLevels:  remove whole (description, level) latent streams
//   kDropRate:    drop each oligo independently with probability `rate`
//   kDropStreams: drop a fraction of each selected stream's oligos
struct StreamSelector {
  OligoType type = OligoType::kDo;
  std::optional<int> description;  // absent = any
  std::optional<int> level;
  double fraction = 1.0;
  bool matches(const OligoRecord& rec) const;
};

struct LossScenario {
  enum class Mode { kDropLevels, kDropRate, kDropStreams };
  Mode mode = Mode::kDropRate;
  uint64_t seed = 0;
  double rate = 0.0;                                  // kDropRate
  std::vector<std::pair<int, int>> drop_levels;       // kDropLevels
  std::vector<StreamSelector> drop_streams;           // kDropStreams
};

// Declarative key=value scenario text (lines; '#' comments):
//   mode = levels | rate | streams
//   seed = <uint>
//   rate = <0..1>
//   drop_level = <desc>:<level>            (repeatable)
//   drop_stream = <TYPE>[:<desc>[:<level>]][@<fraction>]   (repeatable)
LossScenario parse_scenario(const std::string& text);
LossScenario load_scenario(const std::string& path);

struct StreamLoss {
  size_t total = 0;
  size_t dropped = 0;
  double loss_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(dropped) / total;
  }
};

struct LossReport {
  std::map<StreamKey, StreamLoss> per_stream;
  size_t total = 0;
  size_t dropped = 0;
};

struct LossOutcome {
  std::vector<std::string> surviving;
  LossReport report;
};

// Deterministic under the scenario seed. Unparseable records survive
// untouched (they are already lost to the decoder).
LossOutcome apply_loss(const std::vector<std::string>& oligo_lines,
                       const LossScenario& scenario);

}  // namespace helixmdc
