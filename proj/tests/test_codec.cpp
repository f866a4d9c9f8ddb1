// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "codec.hpp"

#include <map>
#include <random>

#include "doctest.h"
#include "dna.hpp"

using namespace helixmdc;

namespace {

TrainedState trained64(int n_desc) {
  static std::map<int, TrainedState> cache;
  auto it = cache.find(n_desc);
  if (it == cache.end()) {
    const Image img =
        load_image(std::string(TEST_DATA_DIR) + "/photo_64.ppm");
    TrainingConfig cfg;
    cfg.descriptions = n_desc;
    cfg.levels = 4;
    cfg.iterations = 150;
    cfg.seed = 21;
    it = cache.emplace(n_desc, train(img, cfg).state).first;
  }
  return it->second;
}

}  // namespace

TEST_CASE("side info blob round trip") {
  SideInfo s;
  s.rows = 256;
  s.cols = 192;
  s.descriptions = 2;
  s.levels = 3;
  s.principal_step = 1.0;
  s.redundancy_steps = {2.0, 3.0, 4.0};
  s.theta_step = 0.03125;
  s.psi_step = 0.0078125;
  s.theta_scale = 4.5;
  s.psi_scale = 0.25;
  s.theta_lo = -120;
  s.theta_hi = 90;
  s.psi_lo = -3;
  s.psi_hi = 5;
  for (int i = 0; i < 6; ++i) s.latent_bounds.emplace_back(-i - 1, i);
  const auto bytes = serialize_side_info(s);
  const SideInfo back = parse_side_info(bytes);
  CHECK(back.rows == s.rows);
  CHECK(back.cols == s.cols);
  CHECK(back.descriptions == s.descriptions);
  CHECK(back.redundancy_steps == s.redundancy_steps);
  CHECK(back.theta_step == s.theta_step);
  CHECK(back.theta_scale == s.theta_scale);
  CHECK(back.psi_lo == s.psi_lo);
  CHECK(back.latent_bounds == s.latent_bounds);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(parse_side_info(bad), Error);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(parse_side_info(bad), Error);
  bad = bytes;
  bad.push_back(0);
  CHECK_THROWS_AS(parse_side_info(bad), Error);
}

TEST_CASE("latent level entropy coding round trips") {
  std::mt19937_64 rng(1);
  const Mlp arm = make_arm_mlp(rng);
  std::uniform_int_distribution<int> sym(-20, 20);
  for (int trial = 0; trial < 20; ++trial) {
    const LevelShape shape{3 + trial % 9, 2 + (trial * 7) % 11};
    IMat idx(shape.rows, shape.cols);
    for (int r = 0; r < shape.rows; ++r)
      for (int c = 0; c < shape.cols; ++c) idx(r, c) = sym(rng);
    const Mat steps = Mat::Constant(shape.rows, shape.cols,
                                    trial % 2 ? 1.0 : 2.0);
    const int lo = std::min(0, idx.minCoeff());
    const int hi = std::max(0, idx.maxCoeff());
    const auto bytes = encode_level(idx, steps, arm, lo, hi);
    const IMat back = decode_level(bytes, shape, steps, arm, lo, hi);
    REQUIRE(back == idx);
  }
}

TEST_CASE("encode/decode closure: decoder equals the encoder exactly") {
  const TrainedState st = trained64(1);
  const EncodedImage enc = encode_trained(st, 5);

  // every emitted line is constraint-clean
  for (const auto& l : enc.oligos) {
    CHECK(l.size() == static_cast<size_t>(kOligoLength));
    CHECK(validate_constraints(l).violations.empty());
  }

  const DecodeResult dr = decode(enc.oligos);
  CHECK(dr.decodable);
  CHECK_FALSE(dr.best_effort);
  CHECK(dr.quarantined == 0);
  CHECK(dr.info.rows == st.rows);

  // bit-exact closure against the encoder-side reconstruction
  const Planes p =
      synthesize_eval(st.central_levels(), st.synthesis_q, st.rows, st.cols);
  CHECK(dr.central.r == p.r);
  CHECK(dr.central.g == p.g);
  CHECK(dr.central.b == p.b);
  REQUIRE(dr.sides.size() == 1);
  REQUIRE(dr.sides[0].has_value());
  CHECK(dr.sides[0]->r == p.r);  // N=1: side and central coincide

  // metrics accounting
  CHECK(enc.metrics.oligo_count == enc.oligos.size());
  CHECK(enc.metrics.total_nts == enc.oligos.size() * kOligoLength);
  CHECK(enc.metrics.nts_per_pixel() > 0.0);
}

TEST_CASE("N=2 closure and per-description rate accounting") {
  const TrainedState st = trained64(2);
  const EncodedImage enc = encode_trained(st);
  const DecodeResult dr = decode(enc.oligos);
  CHECK(dr.decodable);
  REQUIRE(dr.sides.size() == 2);
  CHECK(dr.sides[0].has_value());
  CHECK(dr.sides[1].has_value());
  for (const auto& side : enc.report.sides) CHECK(side.rate_nts > 0.0);

  // dropping every oligo of description 0's levels leaves a decodable set
  std::vector<std::string> partial;
  for (const auto& l : enc.oligos) {
    const OligoRecord r = parse_record(l);
    if (r.type == OligoType::kDo && r.description == 0) continue;
    partial.push_back(l);
  }
  const DecodeResult deg = decode(partial);
  CHECK(deg.decodable);
  CHECK(deg.best_effort);
  CHECK_FALSE(deg.sides[0].has_value());
  REQUIRE(deg.sides[1].has_value());
  // with description 0 gone, the central substitutes description 1 wholesale
  CHECK(deg.central.r == deg.sides[1]->r);
}

TEST_CASE("decode without shared streams is undecodable") {
  const TrainedState st = trained64(1);
  const EncodedImage enc = encode_trained(st);
  std::vector<std::string> no_gio;
  for (const auto& l : enc.oligos)
    if (parse_record(l).type != OligoType::kGio) no_gio.push_back(l);
  try {
    decode(no_gio);
    FAIL("expected kUndecodable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUndecodable);
  }
}

TEST_CASE("checkpoint round trip is bit-exact") {
  const TrainedState st = trained64(2);
  const std::string path = "/tmp/helixmdc_test_ckpt.bin";
  save_checkpoint(st, path);
  const TrainedState back = load_checkpoint(path);
  CHECK(back.rows == st.rows);
  CHECK(back.config.descriptions == 2);
  CHECK(back.config.lambda == st.config.lambda);
  for (int j = 0; j < 2; ++j)
    for (size_t k = 0; k < st.latents[j].levels.size(); ++k)
      CHECK(back.latents[j].levels[k] == st.latents[j].levels[k]);
  CHECK(back.synthesis.flatten() == st.synthesis.flatten());
  CHECK(back.arm.flatten() == st.arm.flatten());
  REQUIRE(back.quantized);
  CHECK(back.theta_step == st.theta_step);
  CHECK(back.redundancy_steps == st.redundancy_steps);
  // rebuilt quantized models produce identical encodings
  const EncodedImage a = encode_trained(st);
  const EncodedImage b = encode_trained(back);
  CHECK(a.oligos == b.oligos);

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt"), Error);
}

TEST_CASE("robustness: no loss reproduces the clean report exactly") {
  const TrainedState st = trained64(2);
  LossScenario s;  // default: drop rate 0
  const RobustnessResult res = evaluate_robustness(st, s);
  CHECK(res.decodable);
  CHECK_FALSE(res.best_effort);
  const RdReport clean = rd_report(st);
  CHECK(res.central_psnr_db == clean.central_psnr_db);
  REQUIRE(res.side_psnr_db.size() == 2);
  for (int j = 0; j < 2; ++j) {
    REQUIRE(res.side_psnr_db[j].has_value());
    CHECK(*res.side_psnr_db[j] ==
          doctest::Approx(clean.sides[j].psnr_db).epsilon(1e-12));
  }
}

TEST_CASE("robustness: dropping everything is undecodable, not fatal") {
  const TrainedState st = trained64(1);
  LossScenario s;
  s.mode = LossScenario::Mode::kDropRate;
  s.rate = 1.0;
  const RobustnessResult res = evaluate_robustness(st, s);
  CHECK_FALSE(res.decodable);
  CHECK(res.central.rows == 0);
  CHECK(res.loss.dropped == res.loss.total);
}
