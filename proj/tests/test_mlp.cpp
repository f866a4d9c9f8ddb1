// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bicubic.hpp"
#include "doctest.h"

using namespace helixmdc;

TEST_CASE("architectures and parameter counts") {
  std::mt19937_64 rng(1);
  const Mlp synth = make_synthesis_mlp(6, rng);
  CHECK(synth.input_width() == 6);
  CHECK(synth.param_count() == 6 * 16 + 16 + 16 * 16 + 16 + 16 * 3 + 3);
  const Mlp arm = make_arm_mlp(rng);
  CHECK(arm.input_width() == kContextSize);
  CHECK(arm.param_count() == 12 * 16 + 16 + 16 * 16 + 16 + 16 * 2 + 2);
}

TEST_CASE("initialization: Glorot bounds, zero biases") {
  std::mt19937_64 rng(2);
  const Mlp m = make_arm_mlp(rng);
  for (size_t l = 0; l < m.weights.size(); ++l) {
    const double fan_in = static_cast<double>(m.weights[l].rows());
    const double fan_out = static_cast<double>(m.weights[l].cols());
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    CHECK((m.weights[l].array().abs() <= bound).all());
    CHECK((m.biases[l].array() == 0.0).all());
  }
}

TEST_CASE("forward matches a hand computation") {
  std::mt19937_64 rng(3);
  Mlp m = Mlp::create({2, 2, 1}, rng);
  m.weights[0] << 1.0, -1.0, 0.5, 2.0;
  m.biases[0] << 0.25, -0.5;
  m.weights[1] << 3.0, -2.0;
  m.biases[1] << 0.125;
  Mat x(1, 2);
  x << 1.0, 2.0;
  // hidden pre: (1*1 + 2*0.5 + 0.25, 1*-1 + 2*2 - 0.5) = (2.25, 2.5)
  // out: 2.25*3 + 2.5*-2 + 0.125 = 1.875
  CHECK(m.forward(x)(0, 0) == doctest::Approx(1.875).epsilon(1e-12));
}

TEST_CASE("flatten/unflatten round trip") {
  std::mt19937_64 rng(4);
  Mlp m = make_synthesis_mlp(4, rng);
  const auto flat = m.flatten();
  CHECK(static_cast<int>(flat.size()) == m.param_count());
  Mlp m2 = make_synthesis_mlp(4, rng);  // different values
  m2.unflatten(flat);
  for (size_t l = 0; l < m.weights.size(); ++l) {
    CHECK(m2.weights[l] == m.weights[l]);
    CHECK(m2.biases[l] == m.biases[l]);
  }
  auto bad = flat;
  bad.pop_back();
  CHECK_THROWS_AS(m2.unflatten(bad), Error);
}

TEST_CASE("sigma_from_raw is positive and matches softplus") {
  CHECK(sigma_from_raw(-100.0) == doctest::Approx(1e-4));
  CHECK(sigma_from_raw(0.0) == doctest::Approx(std::log(2.0) + 1e-4));
  // softplus adds its 1e-4 floor even for large inputs
  CHECK(std::abs(sigma_from_raw(50.0) - 50.0) < 2e-4);
}

TEST_CASE("arm_forward_grid agrees with per-pixel arm_forward") {
  std::mt19937_64 rng(5);
  const Mlp arm = make_arm_mlp(rng);
  std::uniform_real_distribution<double> u(-2, 2);
  Mat grid(5, 7);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 7; ++c) grid(r, c) = u(rng);
  const Mat batch = arm_forward_grid(grid, arm);
  REQUIRE(batch.rows() == 35);
  std::vector<double> ctx(kContextSize);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 7; ++c) {
      for (size_t o = 0; o < kContextOffsets.size(); ++o) {
        const int rr = r + kContextOffsets[o].first;
        const int cc = c + kContextOffsets[o].second;
        ctx[o] = (rr >= 0 && cc >= 0 && cc < 7) ? grid(rr, cc) : 0.0;
      }
      const LaplaceParams p = arm_forward(ctx, arm);
      CHECK(batch(r * 7 + c, 0) == doctest::Approx(p.mu).epsilon(1e-12));
      CHECK(batch(r * 7 + c, 1) == doctest::Approx(p.sigma).epsilon(1e-12));
      CHECK(p.sigma >= 1e-4);
    }
}

TEST_CASE("ARM causality: future edits leave past predictions unchanged") {
  std::mt19937_64 rng(6);
  const Mlp arm = make_arm_mlp(rng);
  Mat grid = Mat::Zero(6, 6);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) grid(r, c) = u(rng);
  const Mat before = arm_forward_grid(grid, arm);
  const int er = 3, ec = 3;  // edited pixel
  grid(er, ec) += 10.0;
  const Mat after = arm_forward_grid(grid, arm);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      const int i = r * 6 + c;
      if (r < er || (r == er && c <= ec)) {
        // raster-before-or-at the edit: prediction cannot depend on it
        CHECK(after(i, 0) == before(i, 0));
        CHECK(after(i, 1) == before(i, 1));
      }
    }
}

namespace {

double keys_weight(double s) {
  constexpr double a = -0.75;
  s = std::abs(s);
  if (s < 1.0) return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0;
  if (s < 2.0) return (((s - 5.0) * s + 8.0) * s - 4.0) * a;
  return 0.0;
}

// direct convolution oracle: half-pixel centers, clamped borders
double keys_sample(const Mat& row, double x) {
  const int base = static_cast<int>(std::floor(x));
  double acc = 0.0;
  for (int k = base - 1; k <= base + 2; ++k) {
    const int kc = std::clamp(k, 0, static_cast<int>(row.cols()) - 1);
    acc += keys_weight(x - k) * row(0, kc);
  }
  return acc;
}

}  // namespace

TEST_CASE("bicubic operator rows sum to one and match a direct oracle") {
  const auto& op = bicubic_operator(5, 11);
  for (int i = 0; i < op.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < op.cols(); ++j) s += op.coeff(i, j);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  Mat row(1, 8);
  for (int j = 0; j < 8; ++j) row(0, j) = unif(rng);
  const Mat up = upsample_bicubic_eval(row, 1, 16);
  for (int j = 0; j < 16; ++j) {
    const double x = (j + 0.5) / 2.0 - 0.5;  // source coordinate
    CHECK(up(0, j) == doctest::Approx(keys_sample(row, x)).epsilon(1e-12));
  }
}

TEST_CASE("synthesize_eval clamps to [0,1] and uses all levels") {
  std::mt19937_64 rng(7);
  const Mlp synth = make_synthesis_mlp(2, rng);
  std::vector<Mat> levels{Mat::Constant(4, 4, 30.0), Mat::Constant(2, 2, 30.0)};
  const Planes p = synthesize_eval(levels, synth, 4, 4, true);
  CHECK((p.r.array() >= 0.0).all());
  CHECK((p.r.array() <= 1.0).all());
  CHECK(p.g.rows() == 4);
  CHECK(p.b.cols() == 4);
  // changing the coarse level alone changes the output
  const Planes q = synthesize_eval(
      {levels[0], Mat::Constant(2, 2, -30.0)}, synth, 4, 4, false);
  CHECK(p.r != q.r);
}

TEST_CASE("rate_of_description_eval equals the summed bin bits") {
  std::mt19937_64 rng(8);
  const Mlp arm = make_arm_mlp(rng);
  std::uniform_int_distribution<int> di(-3, 3);
  Mat grid(3, 4);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) grid(r, c) = di(rng);
  const Mat steps = Mat::Ones(3, 4);
  const double got = rate_of_description_eval({grid}, {steps}, arm);
  const Mat ms = arm_forward_grid(grid, arm);
  double expect = 0.0;
  auto cdf = [](double x, double m, double b) {
    const double z = (x - m) / b;
    return z < 0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
  };
  int i = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c, ++i) {
      const double p = cdf(grid(r, c) + 0.5, ms(i, 0), ms(i, 1)) -
                       cdf(grid(r, c) - 0.5, ms(i, 0), ms(i, 1));
      expect += -std::log2(std::max(p, 1.0 / 65536.0));
    }
  CHECK(got == doctest::Approx(expect).epsilon(1e-10));
}
