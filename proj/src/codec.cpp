// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "c3.hpp"
#include "laplace.hpp"
#include "range_coder.hpp"
#include "sfc4.hpp"
#include "tensor.hpp"

namespace helixmdc {
namespace {

class ByteWriter {
 public:
  void u8(uint8_t v) { out_.push_back(v); }
  void u16(uint16_t v) {
    u8(v & 0xff);
    u8(v >> 8);
  }
  void u32(uint32_t v) {
    u16(v & 0xffff);
    u16(v >> 16);
  }
  void u64(uint64_t v) {
    u32(static_cast<uint32_t>(v));
    u32(static_cast<uint32_t>(v >> 32));
  }
  void i16(int v) {
    if (v < -32768 || v > 32767) throw_invalid("side info: i16 overflow");
    u16(static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void tag(const char* m, size_t n) {
    out_.insert(out_.end(), m, m + n);
  }
  std::vector<uint8_t> take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> b) : b_(b) {}
  uint8_t u8() {
    if (pos_ >= b_.size()) throw_corrupt("blob: truncated");
    return b_[pos_++];
  }
  uint16_t u16() {
    uint16_t lo = u8();
    return static_cast<uint16_t>(lo | (u8() << 8));
  }
  uint32_t u32() {
    uint32_t lo = u16();
    return lo | (static_cast<uint32_t>(u16()) << 16);
  }
  uint64_t u64() {
    uint64_t lo = u32();
    return lo | (static_cast<uint64_t>(u32()) << 32);
  }
  int i16() { return static_cast<int16_t>(u16()); }
  double f64() { return std::bit_cast<double>(u64()); }
  void expect(const char* m, size_t n) {
    for (size_t i = 0; i < n; ++i)
      if (u8() != static_cast<uint8_t>(m[i])) throw_corrupt("blob: bad magic");
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  std::span<const uint8_t> b_;
  size_t pos_ = 0;
};

double check_finite_step(double s, const char* what) {
  if (!std::isfinite(s) || !(s > 0.0))
    throw_corrupt(std::string(what) + ": bad step");
  return s;
}

// 1/256-unit fixed point used for the parameter codebook scales, so both
// sides build identical codebooks.
double quantize_scale(double s) {
  const double q = std::max(1.0, std::round(s * 256.0)) / 256.0;
  if (q > 255.0) throw_invalid("parameter scale out of range");
  return q;
}

std::pair<int, int> index_bounds(const std::vector<long long>& idx) {
  long long lo = 0, hi = 0;
  for (long long v : idx) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {static_cast<int>(lo), static_cast<int>(hi)};
}

std::pair<int, int> grid_bounds(const IMat& m) {
  int lo = std::min(0, m.minCoeff());
  int hi = std::max(0, m.maxCoeff());
  return {lo, hi};
}

Mlp quantized_copy(const Mlp& m, double step) {
  Mlp q = m;
  q.unflatten(dequantize_params(quantize_params(m.flatten(), step), step));
  return q;
}

Image planes_to_image(const Planes& p, int rows, int cols) {
  return Image{rows, cols, p.r, p.g, p.b};
}

constexpr char kSideInfoMagic[] = "HMDC";
constexpr char kCheckpointMagic[] = "HMDCCKPT";

}  // namespace

std::vector<uint8_t> serialize_side_info(const SideInfo& s) {
  ByteWriter w;
  w.tag(kSideInfoMagic, 4);
  w.u8(1);  // version
  w.u16(static_cast<uint16_t>(s.rows));
  w.u16(static_cast<uint16_t>(s.cols));
  w.u8(static_cast<uint8_t>(s.descriptions));
  w.u8(static_cast<uint8_t>(s.levels));
  w.f64(s.principal_step);
  for (double r : s.redundancy_steps) w.f64(r);
  w.f64(s.theta_step);
  w.f64(s.psi_step);
  w.u16(static_cast<uint16_t>(std::lround(s.theta_scale * 256.0)));
  w.u16(static_cast<uint16_t>(std::lround(s.psi_scale * 256.0)));
  w.i16(s.theta_lo);
  w.i16(s.theta_hi);
  w.i16(s.psi_lo);
  w.i16(s.psi_hi);
  if (s.latent_bounds.size() !=
      static_cast<size_t>(s.descriptions) * s.levels)
    throw_invalid("side info: bounds count mismatch");
  for (auto [lo, hi] : s.latent_bounds) {
    w.i16(lo);
    w.i16(hi);
  }
  return w.take();
}

SideInfo parse_side_info(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect(kSideInfoMagic, 4);
  if (r.u8() != 1) throw_corrupt("side info: unsupported version");
  SideInfo s;
  s.rows = r.u16();
  s.cols = r.u16();
  s.descriptions = r.u8();
  s.levels = r.u8();
  if (s.rows < 1 || s.cols < 1 || s.descriptions < 1 || s.levels < 1)
    throw_corrupt("side info: bad geometry");
  s.principal_step = check_finite_step(r.f64(), "side info principal");
  for (int k = 0; k < s.levels; ++k)
    s.redundancy_steps.push_back(
        check_finite_step(r.f64(), "side info redundancy"));
  s.theta_step = check_finite_step(r.f64(), "side info theta");
  s.psi_step = check_finite_step(r.f64(), "side info psi");
  s.theta_scale = r.u16() / 256.0;
  s.psi_scale = r.u16() / 256.0;
  if (!(s.theta_scale > 0.0) || !(s.psi_scale > 0.0))
    throw_corrupt("side info: bad parameter scale");
  s.theta_lo = r.i16();
  s.theta_hi = r.i16();
  s.psi_lo = r.i16();
  s.psi_hi = r.i16();
  if (s.theta_lo > s.theta_hi || s.psi_lo > s.psi_hi)
    throw_corrupt("side info: bad parameter bounds");
  for (int i = 0; i < s.descriptions * s.levels; ++i) {
    int lo = r.i16(), hi = r.i16();
    if (lo > hi || lo < kSymbolMin || hi > kSymbolMax)
      throw_corrupt("side info: bad latent bounds");
    s.latent_bounds.emplace_back(lo, hi);
  }
  if (!r.done()) throw_corrupt("side info: trailing bytes");
  return s;
}

std::vector<uint8_t> encode_level(const IMat& indices, const Mat& steps,
                                  const Mlp& arm, int lo, int hi) {
  if (lo > hi || lo < kSymbolMin || hi > kSymbolMax)
    throw_invalid("encode_level: bad alphabet");
  const Mat deq = dequantize(indices, steps);
  const Mat ms = arm_forward_grid(deq, arm);
  RangeEncoder enc;
  Eigen::Index i = 0;
  for (int r = 0; r < indices.rows(); ++r)
    for (int c = 0; c < indices.cols(); ++c, ++i) {
      const double step = steps(r, c);
      const double mu = ms(i, 0) / step;
      const double b = ms(i, 1) / step;
      const int s = indices(r, c);
      if (s < lo || s > hi)
        throw Error(ErrorCode::kInternal, "encode_level: symbol outside alphabet");
      const uint32_t c0 = laplace_cum16(s, mu, b, lo, hi);
      const uint32_t c1 = laplace_cum16(s + 1, mu, b, lo, hi);
      enc.encode(c0, c1 - c0, laplace_cum16(hi + 1, mu, b, lo, hi));
    }
  return enc.finish();
}

IMat decode_level(std::span<const uint8_t> bytes, LevelShape shape,
                  const Mat& steps, const Mlp& arm, int lo, int hi) {
  if (lo > hi || lo < kSymbolMin || hi > kSymbolMax)
    throw_corrupt("decode_level: bad alphabet");
  RangeDecoder dec(bytes);
  IMat idx(shape.rows, shape.cols);
  Mat deq = Mat::Zero(shape.rows, shape.cols);
  std::vector<double> ctx(kContextSize);
  for (int r = 0; r < shape.rows; ++r)
    for (int c = 0; c < shape.cols; ++c) {
      for (size_t o = 0; o < kContextOffsets.size(); ++o) {
        const int rr = r + kContextOffsets[o].first;
        const int cc = c + kContextOffsets[o].second;
        ctx[o] = (rr >= 0 && cc >= 0 && cc < shape.cols) ? deq(rr, cc) : 0.0;
      }
      const LaplaceParams p = arm_forward(ctx, arm);
      const double step = steps(r, c);
      const double mu = p.mu / step;
      const double b = p.sigma / step;
      const uint32_t total = laplace_cum16(hi + 1, mu, b, lo, hi);
      const uint32_t target = dec.decode_target(total);
      // cum16 is strictly increasing in the symbol; binary search the bin.
      int a = lo, z = hi;
      while (a < z) {
        const int m = a + (z - a + 1) / 2;
        if (laplace_cum16(m, mu, b, lo, hi) <= target)
          a = m;
        else
          z = m - 1;
      }
      const uint32_t c0 = laplace_cum16(a, mu, b, lo, hi);
      const uint32_t c1 = laplace_cum16(a + 1, mu, b, lo, hi);
      dec.decode_update(c0, c1 - c0, total);
      idx(r, c) = a;
      deq(r, c) = a * step;
    }
  return idx;
}

EncodedImage encode_trained(const TrainedState& st, uint32_t id) {
  if (!st.quantized)
    throw_invalid("encode: state not quantized (run post_training_quantize)");
  const auto& cfg = st.config;
  const auto shapes = pyramid_shapes(st.rows, st.cols, cfg.levels);

  SideInfo si;
  si.rows = st.rows;
  si.cols = st.cols;
  si.descriptions = cfg.descriptions;
  si.levels = cfg.levels;
  si.principal_step = cfg.principal_step;
  for (int k = 0; k < cfg.levels; ++k)
    si.redundancy_steps.push_back(st.redundancy_step(k));
  si.theta_step = st.theta_step;
  si.psi_step = st.psi_step;
  si.theta_scale = quantize_scale(st.theta_laplace_scale);
  si.psi_scale = quantize_scale(st.psi_laplace_scale);

  const auto theta_idx = quantize_params(st.synthesis.flatten(), st.theta_step);
  const auto psi_idx = quantize_params(st.arm.flatten(), st.psi_step);
  std::tie(si.theta_lo, si.theta_hi) = index_bounds(theta_idx);
  std::tie(si.psi_lo, si.psi_hi) = index_bounds(psi_idx);

  std::vector<PayloadStream> streams;
  std::vector<std::vector<std::string>> do_dna(cfg.descriptions);
  for (int j = 0; j < cfg.descriptions; ++j) {
    const auto steps = st.step_maps(j);
    const auto idx = st.description_indices(j);
    for (int k = 0; k < cfg.levels; ++k) {
      auto [lo, hi] = grid_bounds(idx[k]);
      si.latent_bounds.emplace_back(lo, hi);
      do_dna[j].push_back(transcode_to_dna(
          encode_level(idx[k], steps[k], st.arm_q, lo, hi)));
    }
  }

  streams.push_back({OligoType::kGio, 0, 0,
                     transcode_to_dna(serialize_side_info(si))});
  const auto psi_book =
      build_sfc4_laplace(si.psi_lo, si.psi_hi, si.psi_scale);
  streams.push_back({OligoType::kArmo, 0, 0, sfc4_encode(psi_idx, psi_book)});
  const auto theta_book =
      build_sfc4_laplace(si.theta_lo, si.theta_hi, si.theta_scale);
  streams.push_back(
      {OligoType::kSyntho, 0, 0, sfc4_encode(theta_idx, theta_book)});
  for (int j = 0; j < cfg.descriptions; ++j)
    for (int k = 0; k < cfg.levels; ++k)
      streams.push_back({OligoType::kDo, j, k, std::move(do_dna[j][k])});

  EncodedImage out;
  out.oligos = pack(streams, id);
  out.report = rd_report(st);
  for (int j = 0; j < cfg.descriptions; ++j) {
    double nts = 0.0;
    for (const auto& s : streams)
      if (s.type == OligoType::kDo && s.description == j)
        nts += static_cast<double>(s.dna.size());
    out.report.sides[j].rate_nts = nts;
  }
  out.metrics = metrics_of(out.oligos, st.rows, st.cols);
  return out;
}

Metrics metrics_of(const std::vector<std::string>& lines, int rows, int cols) {
  Metrics m;
  m.rows = rows;
  m.cols = cols;
  m.oligo_count = lines.size();
  for (const auto& l : lines) {
    m.total_nts += l.size();
    try {
      m.payload_nts += parse_record(l).payload.size();
    } catch (const Error&) {
      // unparseable: counts toward storage, payload unknown
    }
  }
  return m;
}

DecodeResult decode(const std::vector<std::string>& lines) {
  const ParseResult pr = parse(lines);
  auto require = [&](OligoType t, const char* name) -> const StreamState* {
    const StreamState* s = pr.find(t);
    if (!s || !s->complete)
      throw Error(ErrorCode::kUndecodable,
                  std::string("decode: ") + name + " stream incomplete");
    return s;
  };
  const StreamState* gio = require(OligoType::kGio, "general info");
  const StreamState* armo = require(OligoType::kArmo, "ARM");
  const StreamState* syntho = require(OligoType::kSyntho, "synthesis");

  DecodeResult out;
  out.quarantined = pr.quarantined;
  out.info = parse_side_info(transcode_from_dna(gio->payload));
  const SideInfo& si = out.info;
  const auto shapes = pyramid_shapes(si.rows, si.cols, si.levels);

  std::mt19937_64 dummy(0);
  Mlp synthesis = make_synthesis_mlp(si.levels, dummy);
  Mlp arm = make_arm_mlp(dummy);
  const auto theta_book =
      build_sfc4_laplace(si.theta_lo, si.theta_hi, si.theta_scale);
  const auto psi_book =
      build_sfc4_laplace(si.psi_lo, si.psi_hi, si.psi_scale);
  synthesis.unflatten(dequantize_params(
      sfc4_decode(syntho->payload, theta_book, synthesis.param_count()),
      si.theta_step));
  arm.unflatten(dequantize_params(
      sfc4_decode(armo->payload, psi_book, arm.param_count()), si.psi_step));

  // [desc][level]: dequantized grid, or nullopt for lost streams
  std::vector<std::vector<std::optional<Mat>>> grids(
      si.descriptions, std::vector<std::optional<Mat>>(si.levels));
  bool all_present = true;
  for (int j = 0; j < si.descriptions; ++j)
    for (int k = 0; k < si.levels; ++k) {
      const StreamState* s = pr.find(OligoType::kDo, j, k);
      if (!s || !s->complete) {
        all_present = false;
        continue;
      }
      const auto [lo, hi] = si.latent_bounds[j * si.levels + k];
      const Mat steps = step_map(shapes[k], j, si.descriptions,
                                 si.principal_step, si.redundancy_steps[k]);
      const IMat idx = decode_level(transcode_from_dna(s->payload), shapes[k],
                                    steps, arm, lo, hi);
      grids[j][k] = dequantize(idx, steps);
    }

  out.decodable = decodable_verdict(pr, si.descriptions, si.levels);
  out.best_effort = !all_present;

  for (int j = 0; j < si.descriptions; ++j) {
    const bool complete = std::all_of(grids[j].begin(), grids[j].end(),
                                      [](const auto& g) { return bool(g); });
    if (!complete) {
      out.sides.emplace_back(std::nullopt);
      continue;
    }
    std::vector<Mat> levels;
    for (auto& g : grids[j]) levels.push_back(*g);
    out.sides.emplace_back(planes_to_image(
        synthesize_eval(levels, synthesis, si.rows, si.cols, true), si.rows,
        si.cols));
  }

  std::vector<Mat> central;
  for (int k = 0; k < si.levels; ++k) {
    std::vector<const Mat*> ptrs;
    for (int j = 0; j < si.descriptions; ++j)
      ptrs.push_back(grids[j][k] ? &*grids[j][k] : nullptr);
    central.push_back(
        substitute_level(ptrs, shapes[k], si.descriptions, /*zero_fill=*/true));
  }
  out.central = planes_to_image(
      synthesize_eval(central, synthesis, si.rows, si.cols, true), si.rows,
      si.cols);
  out.metrics = metrics_of(lines, si.rows, si.cols);
  return out;
}

void save_checkpoint(const TrainedState& st, const std::string& path) {
  ByteWriter w;
  w.tag(kCheckpointMagic, 8);
  w.u8(1);
  w.u32(static_cast<uint32_t>(st.rows));
  w.u32(static_cast<uint32_t>(st.cols));
  const auto& c = st.config;
  w.u32(static_cast<uint32_t>(c.descriptions));
  w.u32(static_cast<uint32_t>(c.levels));
  w.f64(c.alpha);
  w.f64(c.lambda);
  w.u64(c.seed);
  w.u32(static_cast<uint32_t>(c.iterations));
  w.f64(c.lr_latents);
  w.f64(c.lr_params);
  w.f64(c.principal_step);
  w.f64(c.train_redundancy_step);
  auto write_mat = [&](const Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index cc = 0; cc < m.cols(); ++cc) w.f64(m(r, cc));
  };
  write_mat(st.target.r);
  write_mat(st.target.g);
  write_mat(st.target.b);
  for (const auto& pyr : st.latents)
    for (const auto& lv : pyr.levels) write_mat(lv);
  auto write_mlp = [&](const Mlp& m) {
    const auto flat = m.flatten();
    w.u32(static_cast<uint32_t>(flat.size()));
    for (double v : flat) w.f64(v);
  };
  write_mlp(st.synthesis);
  write_mlp(st.arm);
  w.u8(st.quantized ? 1 : 0);
  if (st.quantized) {
    w.f64(st.theta_step);
    w.f64(st.psi_step);
    w.f64(st.theta_laplace_scale);
    w.f64(st.psi_laplace_scale);
    for (int k = 0; k < c.levels; ++k) w.f64(st.redundancy_step(k));
  }
  const auto bytes = w.take();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw_io("cannot open checkpoint for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw_io("checkpoint write failed: " + path);
}

TrainedState load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw_io("cannot open checkpoint: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  ByteReader r(bytes);
  r.expect(kCheckpointMagic, 8);
  if (r.u8() != 1) throw_corrupt("checkpoint: unsupported version");
  TrainedState st;
  st.rows = static_cast<int>(r.u32());
  st.cols = static_cast<int>(r.u32());
  TrainingConfig& c = st.config;
  c.descriptions = static_cast<int>(r.u32());
  c.levels = static_cast<int>(r.u32());
  c.alpha = r.f64();
  c.lambda = r.f64();
  c.seed = r.u64();
  c.iterations = static_cast<int>(r.u32());
  c.lr_latents = r.f64();
  c.lr_params = r.f64();
  c.principal_step = r.f64();
  c.train_redundancy_step = r.f64();
  c.validate();
  if (st.rows < 1 || st.cols < 1 || st.rows > 65535 || st.cols > 65535)
    throw_corrupt("checkpoint: bad geometry");
  auto read_mat = [&](int rows, int cols) {
    Mat m(rows, cols);
    for (int rr = 0; rr < rows; ++rr)
      for (int cc = 0; cc < cols; ++cc) m(rr, cc) = r.f64();
    return m;
  };
  st.target.rows = st.rows;
  st.target.cols = st.cols;
  st.target.r = read_mat(st.rows, st.cols);
  st.target.g = read_mat(st.rows, st.cols);
  st.target.b = read_mat(st.rows, st.cols);
  const auto shapes = pyramid_shapes(st.rows, st.cols, c.levels);
  for (int j = 0; j < c.descriptions; ++j) {
    LatentPyramid pyr;
    pyr.description_index = j;
    for (int k = 0; k < c.levels; ++k)
      pyr.levels.push_back(read_mat(shapes[k].rows, shapes[k].cols));
    st.latents.push_back(std::move(pyr));
  }
  std::mt19937_64 dummy(0);
  auto read_mlp = [&](Mlp m) {
    const uint32_t n = r.u32();
    if (n != static_cast<uint32_t>(m.param_count()))
      throw_corrupt("checkpoint: parameter count mismatch");
    std::vector<double> flat(n);
    for (auto& v : flat) v = r.f64();
    m.unflatten(flat);
    return m;
  };
  st.synthesis = read_mlp(make_synthesis_mlp(c.levels, dummy));
  st.arm = read_mlp(make_arm_mlp(dummy));
  if (r.u8()) {
    st.quantized = true;
    st.theta_step = check_finite_step(r.f64(), "checkpoint theta");
    st.psi_step = check_finite_step(r.f64(), "checkpoint psi");
    st.theta_laplace_scale = r.f64();
    st.psi_laplace_scale = r.f64();
    for (int k = 0; k < c.levels; ++k)
      st.redundancy_steps.push_back(
          check_finite_step(r.f64(), "checkpoint redundancy"));
    st.synthesis_q = quantized_copy(st.synthesis, st.theta_step);
    st.arm_q = quantized_copy(st.arm, st.psi_step);
  }
  if (!r.done()) throw_corrupt("checkpoint: trailing bytes");
  return st;
}

RobustnessResult evaluate_robustness(const TrainedState& st,
                                     const LossScenario& scenario,
                                     uint32_t id) {
  const EncodedImage enc = encode_trained(st, id);
  LossOutcome lost = apply_loss(enc.oligos, scenario);
  RobustnessResult res;
  res.loss = std::move(lost.report);
  DecodeResult dr;
  try {
    dr = decode(lost.surviving);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUndecodable) return res;
    throw;
  }
  res.decodable = dr.decodable;
  res.best_effort = dr.best_effort;
  res.central = std::move(dr.central);
  res.central_psnr_db = psnr_db(mse(st.target, res.central));
  for (auto& side : dr.sides) {
    if (side)
      res.side_psnr_db.emplace_back(psnr_db(mse(st.target, *side)));
    else
      res.side_psnr_db.emplace_back(std::nullopt);
    res.sides.push_back(std::move(side));
  }
  return res;
}

}  // namespace helixmdc
