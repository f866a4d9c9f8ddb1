// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp.hpp"

#include <cmath>

#include "bicubic.hpp"
#include "laplace.hpp"

namespace helixmdc {
namespace {

Mat raster_column(const Mat& grid) {
  Mat t = grid.transpose();
  return Eigen::Map<const Mat>(t.data(), grid.size(), 1);
}

Mat raster_to_grid(const Mat& column, int rows, int cols) {
  return Eigen::Map<const Mat>(column.data(), cols, rows).transpose();
}

}  // namespace

Mlp Mlp::create(const std::vector<int>& widths, std::mt19937_64& rng) {
  if (widths.size() < 2) throw_invalid("Mlp: need at least two layer widths");
  Mlp m;
  for (size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fin = widths[l], fout = widths[l + 1];
    if (fin < 1 || fout < 1) throw_invalid("Mlp: widths must be positive");
    const double bound = std::sqrt(6.0 / (fin + fout));
    std::uniform_real_distribution<double> u(-bound, bound);
    Mat w(fin, fout);
    for (int c = 0; c < fout; ++c)
      for (int r = 0; r < fin; ++r) w(r, c) = u(rng);
    m.weights.push_back(std::move(w));
    m.biases.push_back(Mat::Zero(1, fout));
  }
  return m;
}

Mat Mlp::forward(const Mat& x) const {
  if (x.cols() != weights.front().rows())
    throw_invalid("Mlp::forward: input width mismatch");
  Mat h = x;
  for (size_t l = 0; l < weights.size(); ++l) {
    h = (h * weights[l]).rowwise() + biases[l].row(0);
    if (l + 1 < weights.size()) h = h.cwiseMax(0.0);
  }
  return h;
}

int Mlp::param_count() const {
  int n = 0;
  for (size_t l = 0; l < weights.size(); ++l)
    n += static_cast<int>(weights[l].size() + biases[l].size());
  return n;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (size_t l = 0; l < weights.size(); ++l) {
    const Mat& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    for (Eigen::Index c = 0; c < biases[l].cols(); ++c)
      out.push_back(biases[l](0, c));
  }
  return out;
}

void Mlp::unflatten(const std::vector<double>& flat) {
  if (static_cast<int>(flat.size()) != param_count())
    throw_invalid("Mlp::unflatten: size mismatch");
  size_t i = 0;
  for (size_t l = 0; l < weights.size(); ++l) {
    Mat& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[i++];
    for (Eigen::Index c = 0; c < biases[l].cols(); ++c)
      biases[l](0, c) = flat[i++];
  }
}

Mlp make_synthesis_mlp(int levels, std::mt19937_64& rng) {
  return Mlp::create({levels, kHiddenWidth, kHiddenWidth, 3}, rng);
}

Mlp make_arm_mlp(std::mt19937_64& rng) {
  return Mlp::create({kContextSize, kHiddenWidth, kHiddenWidth, 2}, rng);
}

double sigma_from_raw(double raw) { return softplus_scalar(raw) + kSigmaEps; }

LaplaceParams arm_forward(const std::vector<double>& context, const Mlp& arm) {
  if (static_cast<int>(context.size()) != kContextSize)
    throw_invalid("arm_forward: context must have 12 values");
  Mat x(1, kContextSize);
  for (int i = 0; i < kContextSize; ++i) x(0, i) = context[i];
  Mat out = arm.forward(x);
  return {out(0, 0), sigma_from_raw(out(0, 1))};
}

Mat gather_context_eval(const Mat& grid) {
  const int rows = static_cast<int>(grid.rows());
  const int cols = static_cast<int>(grid.cols());
  Mat v = Mat::Zero(static_cast<Eigen::Index>(rows) * cols, kContextSize);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      for (int j = 0; j < kContextSize; ++j) {
        const int rr = r + kContextOffsets[j].first;
        const int cc = c + kContextOffsets[j].second;
        if (rr >= 0 && rr < rows && cc >= 0 && cc < cols) v(i, j) = grid(rr, cc);
      }
    }
  return v;
}

Mat arm_forward_grid(const Mat& grid, const Mlp& arm) {
  Mat out = arm.forward(gather_context_eval(grid));
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    out(i, 1) = sigma_from_raw(out(i, 1));
  return out;
}

Planes synthesize_eval(const std::vector<Mat>& dequantized_levels,
                       const Mlp& synthesis, int rows, int cols, bool clamp) {
  const int levels = static_cast<int>(dequantized_levels.size());
  if (levels != synthesis.input_width())
    throw_invalid("synthesize_eval: level count does not match model input");
  Mat features(static_cast<Eigen::Index>(rows) * cols, levels);
  for (int k = 0; k < levels; ++k)
    features.col(k) =
        raster_column(upsample_bicubic_eval(dequantized_levels[k], rows, cols));
  Mat out = synthesis.forward(features);
  if (clamp) out = out.cwiseMax(0.0).cwiseMin(1.0);
  Planes p;
  p.r = raster_to_grid(out.col(0), rows, cols);
  p.g = raster_to_grid(out.col(1), rows, cols);
  p.b = raster_to_grid(out.col(2), rows, cols);
  return p;
}

double rate_of_description_eval(const std::vector<Mat>& dequantized_levels,
                                const std::vector<Mat>& step_maps,
                                const Mlp& arm) {
  if (dequantized_levels.size() != step_maps.size())
    throw_invalid("rate_of_description_eval: level/step count mismatch");
  double bits = 0.0;
  for (size_t k = 0; k < dequantized_levels.size(); ++k) {
    const Mat& grid = dequantized_levels[k];
    const Mat params = arm_forward_grid(grid, arm);
    const int cols = static_cast<int>(grid.cols());
    for (int r = 0; r < grid.rows(); ++r)
      for (int c = 0; c < cols; ++c) {
        const int i = r * cols + c;
        bits += laplace_bin_bits(grid(r, c), params(i, 0), params(i, 1),
                                 step_maps[k](r, c));
      }
  }
  return bits;
}

MlpVars register_mlp(Tape& tape, const Mlp& mlp) {
  MlpVars v;
  for (size_t l = 0; l < mlp.weights.size(); ++l) {
    v.weights.push_back(tape.leaf(mlp.weights[l]));
    v.biases.push_back(tape.leaf(mlp.biases[l]));
  }
  return v;
}

Var mlp_forward_tape(Tape& tape, Var x, const MlpVars& vars) {
  Var h = x;
  for (size_t l = 0; l < vars.weights.size(); ++l) {
    h = tape.add_rowvec(tape.matmul(h, vars.weights[l]), vars.biases[l]);
    if (l + 1 < vars.weights.size()) h = tape.relu(h);
  }
  return h;
}

}  // namespace helixmdc
