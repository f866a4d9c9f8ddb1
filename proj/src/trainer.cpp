// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bicubic.hpp"
#include "laplace.hpp"
#include "tensor.hpp"

namespace helixmdc {
namespace {

Mat target_matrix(const Image& img) {
  const Eigen::Index n = static_cast<Eigen::Index>(img.rows) * img.cols;
  Mat t(n, 3);
  for (int y = 0; y < img.rows; ++y)
    for (int x = 0; x < img.cols; ++x) {
      const Eigen::Index i = static_cast<Eigen::Index>(y) * img.cols + x;
      t(i, 0) = img.r(y, x);
      t(i, 1) = img.g(y, x);
      t(i, 2) = img.b(y, x);
    }
  return t;
}

// 1 where `desc` owns the pixel's block, else 0.
Mat owner_mask(LevelShape shape, int desc, int n_desc) {
  const auto g = block_geometry(shape.rows, shape.cols);
  Mat m(shape.rows, shape.cols);
  for (int r = 0; r < shape.rows; ++r)
    for (int c = 0; c < shape.cols; ++c) {
      const int b = (r / kBlockSize) * g.block_cols + (c / kBlockSize);
      m(r, c) = principal_owner(b, n_desc) == desc ? 1.0 : 0.0;
    }
  return m;
}

struct GraphRefs {
  Var cost;
  std::vector<std::vector<Var>> latent_leaves;  // [desc][level]
  MlpVars synth, arm;
  CostTerms terms;
};

// Noise-relaxed training graph. `noise[j][k]` is added to description j's
// level-k latents (already scaled by the quantization step map); empty noise
// means a clean pass.
GraphRefs build_graph(Tape& tape, const TrainedState& st, const Mat& target3,
                      const std::vector<std::vector<Mat>>& noise) {
  const auto& cfg = st.config;
  const int N = cfg.descriptions, L = cfg.levels;
  const auto shapes = pyramid_shapes(st.rows, st.cols, L);
  const Eigen::Index npix = static_cast<Eigen::Index>(st.rows) * st.cols;

  GraphRefs g;
  g.synth = register_mlp(tape, st.synthesis);
  g.arm = register_mlp(tape, st.arm);

  std::vector<std::vector<Var>> noisy(N);
  g.latent_leaves.resize(N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < L; ++k) {
      Var leaf = tape.leaf(st.latents[j].levels[k]);
      g.latent_leaves[j].push_back(leaf);
      Var v = leaf;
      if (!noise.empty()) v = tape.add(v, tape.constant(noise[j][k]));
      noisy[j].push_back(v);
    }

  auto synthesize = [&](const std::vector<Var>& levels) {
    std::vector<Var> cols;
    for (int k = 0; k < L; ++k)
      cols.push_back(
          tape.vec_raster(tape.upsample_bicubic(levels[k], st.rows, st.cols)));
    Var features = tape.hstack(cols);
    return mlp_forward_tape(tape, features, g.synth);
  };

  // central latents: per block the principal owner's values
  std::vector<Var> central;
  if (N > 1) {
    for (int k = 0; k < L; ++k) {
      Var acc{};
      for (int j = 0; j < N; ++j) {
        Var masked = tape.hadamard(
            noisy[j][k], tape.constant(owner_mask(shapes[k], j, N)));
        acc = acc.valid() ? tape.add(acc, masked) : masked;
      }
      central.push_back(acc);
    }
  } else {
    central = noisy[0];
  }

  Var d0 = tape.mse(synthesize(central), target3);
  g.terms.central_distortion = tape.val(d0)(0, 0);

  std::vector<Var> side_d;
  if (N > 1)
    for (int j = 0; j < N; ++j) {
      Var dj = tape.mse(synthesize(noisy[j]), target3);
      side_d.push_back(dj);
      g.terms.side_distortions.push_back(tape.val(dj)(0, 0));
    }

  std::vector<Var> rates;
  for (int j = 0; j < N; ++j) {
    const auto steps = st.step_maps(j);
    Var rj{};
    for (int k = 0; k < L; ++k) {
      Var ctx = tape.gather_context(noisy[j][k], shapes[k].rows,
                                    shapes[k].cols);
      Var out = mlp_forward_tape(tape, ctx, g.arm);
      Var mu = tape.col(out, 0);
      Var sigma = tape.add_const(tape.softplus(tape.col(out, 1)), kSigmaEps);
      Var y = tape.vec_raster(noisy[j][k]);
      Mat step_col = Eigen::Map<const Mat>(
          Mat(steps[k].transpose()).data(), steps[k].size(), 1);
      Var rk = tape.laplace_rate_bits(y, mu, sigma, step_col);
      rj = rj.valid() ? tape.add(rj, rk) : rk;
    }
    rates.push_back(rj);
    g.terms.side_rate_bits.push_back(tape.val(rj)(0, 0));
  }

  // J = D0 + alpha * sum Dj + lambda * sum Rj (rates in bits/pixel)
  Var cost = d0;
  for (Var dj : side_d)
    cost = tape.add(cost, tape.scale(dj, cfg.alpha));
  for (Var rj : rates)
    cost = tape.add(cost,
                    tape.scale(rj, cfg.lambda / static_cast<double>(npix)));
  g.cost = cost;
  g.terms.cost = tape.val(cost)(0, 0);
  return g;
}

struct AdamSlot {
  Mat m, v;
  double lr = 0.0;
};

class Adam {
 public:
  Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : b1_(beta1), b2_(beta2), eps_(eps) {}

  void track(Mat* param, double lr) {
    slots_.push_back({Mat::Zero(param->rows(), param->cols()),
                      Mat::Zero(param->rows(), param->cols()), lr});
    params_.push_back(param);
  }

  void step(const std::vector<const Mat*>& grads, double decay) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, t_);
    const double c2 = 1.0 - std::pow(b2_, t_);
    for (size_t i = 0; i < params_.size(); ++i) {
      AdamSlot& s = slots_[i];
      const Mat& g = *grads[i];
      s.m = b1_ * s.m + (1.0 - b1_) * g;
      s.v = b2_ * s.v + (1.0 - b2_) * g.cwiseProduct(g);
      params_[i]->array() -=
          (s.lr * decay) * (s.m.array() / c1) /
          ((s.v.array() / c2).sqrt() + eps_);
    }
  }

 private:
  double b1_, b2_, eps_;
  int t_ = 0;
  std::vector<AdamSlot> slots_;
  std::vector<Mat*> params_;
};

constexpr std::array<double, 3> kRedundancyCandidates = {2.0, 3.0, 4.0};
// Fraction of the schedule trained under noise relaxation before switching
// to hard rounding with straight-through gradients.
constexpr double kStraightThroughPhase = 0.8;

double clamp_redundancy(double s) {
  double best = kRedundancyCandidates[0];
  for (double c : kRedundancyCandidates)
    if (std::abs(c - s) < std::abs(best - s)) best = c;
  return best;
}

}  // namespace

void TrainingConfig::validate() const {
  if (descriptions < 1) throw_invalid("config: N must be >= 1");
  if (levels < 1) throw_invalid("config: L must be >= 1");
  if (alpha < 0.0 || alpha > 1.0) throw_invalid("config: alpha must be in [0,1]");
  if (!(lambda > 0.0)) throw_invalid("config: lambda must be positive");
  if (iterations < 1) throw_invalid("config: iterations must be >= 1");
  if (!(principal_step > 0.0) || !(train_redundancy_step >= principal_step))
    throw_invalid("config: bad quantization steps");
}

double TrainedState::redundancy_step(int level) const {
  if (!redundancy_steps.empty()) return redundancy_steps[level];
  return config.train_redundancy_step;
}

std::vector<Mat> TrainedState::step_maps(int desc) const {
  const auto shapes = pyramid_shapes(rows, cols, config.levels);
  std::vector<Mat> maps;
  for (int k = 0; k < config.levels; ++k)
    maps.push_back(step_map(shapes[k], desc, config.descriptions,
                            config.principal_step, redundancy_step(k)));
  return maps;
}

std::vector<IMat> TrainedState::description_indices(int desc) const {
  const auto maps = step_maps(desc);
  std::vector<IMat> out;
  for (int k = 0; k < config.levels; ++k)
    out.push_back(quantize_indices(latents[desc].levels[k], maps[k]));
  return out;
}

std::vector<Mat> TrainedState::dequantized_description(int desc) const {
  const auto maps = step_maps(desc);
  const auto idx = description_indices(desc);
  std::vector<Mat> out;
  for (int k = 0; k < config.levels; ++k)
    out.push_back(dequantize(idx[k], maps[k]));
  return out;
}

std::vector<Mat> TrainedState::central_levels() const {
  const int N = config.descriptions;
  std::vector<std::vector<Mat>> sides;
  for (int j = 0; j < N; ++j) sides.push_back(dequantized_description(j));
  if (N == 1) return sides[0];
  std::vector<Mat> central;
  for (int k = 0; k < config.levels; ++k) {
    std::vector<Mat> lv;
    for (int j = 0; j < N; ++j) lv.push_back(sides[j][k]);
    central.push_back(merge_central_level(lv, N));
  }
  return central;
}

double combine_training_cost(double central_distortion,
                             std::span<const double> side_distortions,
                             std::span<const double> side_rates_bpp,
                             double alpha, double lambda) {
  double j = central_distortion;
  for (double d : side_distortions) j += alpha * d;
  for (double r : side_rates_bpp) j += lambda * r;
  return j;
}

CostTerms training_cost(const TrainedState& state, std::mt19937_64& noise_rng) {
  const auto& cfg = state.config;
  const auto shapes = pyramid_shapes(state.rows, state.cols, cfg.levels);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<std::vector<Mat>> noise(cfg.descriptions);
  for (int j = 0; j < cfg.descriptions; ++j) {
    const auto steps = state.step_maps(j);
    for (int k = 0; k < cfg.levels; ++k) {
      Mat n(shapes[k].rows, shapes[k].cols);
      for (Eigen::Index c = 0; c < n.cols(); ++c)
        for (Eigen::Index r = 0; r < n.rows(); ++r)
          n(r, c) = steps[k](r, c) * u(noise_rng);
      noise[j].push_back(std::move(n));
    }
  }
  Tape tape;
  return build_graph(tape, state, target_matrix(state.target), noise).terms;
}

TrainResult train(const Image& image, const TrainingConfig& config) {
  config.validate();
  const int min_dim = 1 << (config.levels - 1);
  if (image.rows < min_dim || image.cols < min_dim)
    throw_invalid("train: image too small for " +
                  std::to_string(config.levels) + " levels");

  TrainResult result;
  TrainedState& st = result.state;
  st.rows = image.rows;
  st.cols = image.cols;
  st.config = config;
  st.target = image;

  std::mt19937_64 init_rng(config.seed);
  st.synthesis = make_synthesis_mlp(config.levels, init_rng);
  st.arm = make_arm_mlp(init_rng);
  for (int j = 0; j < config.descriptions; ++j)
    st.latents.push_back(
        make_zero_pyramid(st.rows, st.cols, config.levels, j));

  Adam adam;
  for (int j = 0; j < config.descriptions; ++j)
    for (auto& lv : st.latents[j].levels) adam.track(&lv, config.lr_latents);
  for (auto& w : st.synthesis.weights) adam.track(&w, config.lr_params);
  for (auto& b : st.synthesis.biases) adam.track(&b, config.lr_params);
  for (auto& w : st.arm.weights) adam.track(&w, config.lr_params);
  for (auto& b : st.arm.biases) adam.track(&b, config.lr_params);

  const Mat target3 = target_matrix(image);
  const auto shapes = pyramid_shapes(st.rows, st.cols, config.levels);
  std::mt19937_64 noise_rng(config.seed + 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> u(-0.5, 0.5);

  std::vector<std::vector<Mat>> step_maps;
  for (int j = 0; j < config.descriptions; ++j)
    step_maps.push_back(st.step_maps(j));

  // Final phase: hard rounding with straight-through gradients. Setting the
  // additive term to round(x)-x makes the forward pass see the quantized
  // latents while the leaf gradient passes through unchanged.
  const int ste_start =
      static_cast<int>(kStraightThroughPhase * config.iterations);

  Tape tape;
  for (int it = 0; it < config.iterations; ++it) {
    std::vector<std::vector<Mat>> noise(config.descriptions);
    for (int j = 0; j < config.descriptions; ++j)
      for (int k = 0; k < config.levels; ++k) {
        Mat n(shapes[k].rows, shapes[k].cols);
        for (Eigen::Index c = 0; c < n.cols(); ++c)
          for (Eigen::Index r = 0; r < n.rows(); ++r) {
            const double step = step_maps[j][k](r, c);
            if (it >= ste_start) {
              const double x = st.latents[j].levels[k](r, c);
              n(r, c) = quantize_scalar(x, step) * step - x;
            } else {
              n(r, c) = step * u(noise_rng);
            }
          }
        noise[j].push_back(std::move(n));
      }

    tape.clear();
    GraphRefs g = build_graph(tape, st, target3, noise);
    tape.backward(g.cost);

    std::vector<const Mat*> grads;
    for (int j = 0; j < config.descriptions; ++j)
      for (Var v : g.latent_leaves[j]) grads.push_back(&tape.grad(v));
    for (Var v : g.synth.weights) grads.push_back(&tape.grad(v));
    for (Var v : g.synth.biases) grads.push_back(&tape.grad(v));
    for (Var v : g.arm.weights) grads.push_back(&tape.grad(v));
    for (Var v : g.arm.biases) grads.push_back(&tape.grad(v));

    const double decay =
        0.5 * (1.0 + std::cos(std::numbers::pi * it / config.iterations));
    adam.step(grads, decay);
    if (it % 50 == 0) result.cost_log.push_back(g.terms.cost);
  }

  post_training_quantize(st);
  result.report = rd_report(st);
  return result;
}

std::vector<long long> quantize_params(const std::vector<double>& flat,
                                       double step) {
  if (!(step > 0.0)) throw_invalid("quantize_params: step must be positive");
  std::vector<long long> idx;
  idx.reserve(flat.size());
  for (double p : flat)
    idx.push_back(std::clamp<long long>(quantize_scalar(p, step), -32000, 32000));
  return idx;
}

std::vector<double> dequantize_params(const std::vector<long long>& indices,
                                      double step) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (long long i : indices) out.push_back(i * step);
  return out;
}

ParamRate param_rate_bits(const std::vector<long long>& indices) {
  ParamRate pr;
  double mean_abs = 0.0;
  for (long long i : indices) mean_abs += std::abs(static_cast<double>(i));
  mean_abs /= std::max<size_t>(indices.size(), 1);
  pr.laplace_scale = std::max(mean_abs, 0.05);
  for (long long i : indices)
    pr.bits += -std::log2(laplace_pmf(i, 0.0, pr.laplace_scale));
  return pr;
}

namespace {

Mlp quantized_mlp(const Mlp& m, double step) {
  Mlp q = m;
  q.unflatten(dequantize_params(quantize_params(m.flatten(), step), step));
  return q;
}

// Full inference-mode J_p of the current quantized configuration.
double post_training_cost(const TrainedState& st) {
  const auto& cfg = st.config;
  const Mat target3 = target_matrix(st.target);
  const Eigen::Index npix = static_cast<Eigen::Index>(st.rows) * st.cols;

  auto distortion = [&](const std::vector<Mat>& levels) {
    Planes p = synthesize_eval(levels, st.synthesis_q, st.rows, st.cols, true);
    Image rec{st.rows, st.cols, p.r, p.g, p.b};
    return mse(st.target, rec);
  };

  std::vector<double> side_d, side_r;
  for (int j = 0; j < cfg.descriptions; ++j) {
    const auto deq = st.dequantized_description(j);
    if (cfg.descriptions > 1) side_d.push_back(distortion(deq));
    side_r.push_back(
        rate_of_description_eval(deq, st.step_maps(j), st.arm_q) / npix);
  }
  const double d0 = distortion(st.central_levels());

  const double header_bits =
      param_rate_bits(quantize_params(st.synthesis.flatten(), st.theta_step))
          .bits +
      param_rate_bits(quantize_params(st.arm.flatten(), st.psi_step)).bits;
  double j = combine_training_cost(d0, side_d, side_r, cfg.alpha, cfg.lambda);
  j += cfg.lambda * cfg.descriptions * header_bits / npix;
  return j;
}

}  // namespace

double post_training_quantize(TrainedState& st) {
  std::vector<double> step_grid;
  for (int e = -7; e <= -2; ++e) step_grid.push_back(std::ldexp(1.0, e));

  if (st.redundancy_steps.empty())
    st.redundancy_steps.assign(st.config.levels,
                               clamp_redundancy(st.config.train_redundancy_step));
  st.quantized = true;

  // Parameter steps: the distortion part depends only on theta, the latent
  // rate only on psi, so the two grids separate.
  st.psi_step = step_grid.back();
  st.arm_q = quantized_mlp(st.arm, st.psi_step);
  double best_ts = step_grid[0];
  double best = std::numeric_limits<double>::infinity();
  for (double ts : step_grid) {
    st.theta_step = ts;
    st.synthesis_q = quantized_mlp(st.synthesis, ts);
    const double j = post_training_cost(st);
    if (j < best) {
      best = j;
      best_ts = ts;
    }
  }
  st.theta_step = best_ts;
  st.synthesis_q = quantized_mlp(st.synthesis, best_ts);

  double best_ps = step_grid[0];
  best = std::numeric_limits<double>::infinity();
  for (double ps : step_grid) {
    st.psi_step = ps;
    st.arm_q = quantized_mlp(st.arm, ps);
    const double j = post_training_cost(st);
    if (j < best) {
      best = j;
      best_ps = ps;
    }
  }
  st.psi_step = best_ps;
  st.arm_q = quantized_mlp(st.arm, best_ps);

  // Redundancy steps: one coordinate pass per level.
  if (st.config.descriptions > 1) {
    for (int k = 0; k < st.config.levels; ++k) {
      double best_step = st.redundancy_steps[k];
      best = std::numeric_limits<double>::infinity();
      for (double cand : kRedundancyCandidates) {
        st.redundancy_steps[k] = cand;
        const double j = post_training_cost(st);
        if (j < best) {
          best = j;
          best_step = cand;
        }
      }
      st.redundancy_steps[k] = best_step;
    }
  }

  st.theta_laplace_scale =
      param_rate_bits(quantize_params(st.synthesis.flatten(), st.theta_step))
          .laplace_scale;
  st.psi_laplace_scale =
      param_rate_bits(quantize_params(st.arm.flatten(), st.psi_step))
          .laplace_scale;
  return post_training_cost(st);
}

RdReport rd_report(const TrainedState& st) {
  if (!st.quantized)
    throw_invalid("rd_report: run post_training_quantize first");
  RdReport rep;
  auto reconstruct = [&](const std::vector<Mat>& levels) {
    Planes p = synthesize_eval(levels, st.synthesis_q, st.rows, st.cols, true);
    return Image{st.rows, st.cols, p.r, p.g, p.b};
  };
  rep.central_psnr_db = psnr_db(mse(st.target, reconstruct(st.central_levels())));
  for (int j = 0; j < st.config.descriptions; ++j) {
    DescriptionReport dr;
    const auto deq = st.dequantized_description(j);
    dr.psnr_db = psnr_db(mse(st.target, reconstruct(deq)));
    dr.rate_bits = rate_of_description_eval(deq, st.step_maps(j), st.arm_q);
    rep.sides.push_back(dr);
  }
  rep.theta_rate_bits =
      param_rate_bits(quantize_params(st.synthesis.flatten(), st.theta_step))
          .bits;
  rep.psi_rate_bits =
      param_rate_bits(quantize_params(st.arm.flatten(), st.psi_step)).bits;
  return rep;
}

}  // namespace helixmdc
