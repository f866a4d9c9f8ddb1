// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Links only the public C API.
//
// Exit codes: 0 success, 2 invalid argument, 3 undecodable oligo set,
// 4 I/O failure, 5 corrupt data, 6 internal error.
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "helixmdc/helixmdc.h"

namespace {

int exit_code(hmdc_status s) {
  switch (s) {
    case HMDC_OK:
      return 0;
    case HMDC_INVALID_ARGUMENT:
      return 2;
    case HMDC_UNDECODABLE:
      return 3;
    case HMDC_IO_ERROR:
      return 4;
    case HMDC_CORRUPT_DATA:
      return 5;
    case HMDC_INTERNAL:
      break;
  }
  return 6;
}

int finish(hmdc_status s) {
  if (s != HMDC_OK) std::fprintf(stderr, "error: %s\n", hmdc_last_error());
  return exit_code(s);
}

using ConfigPtr = std::unique_ptr<hmdc_config, decltype(&hmdc_config_destroy)>;

struct TrainFlags {
  long long descriptions = 1;
  long long levels = 6;
  long long iterations = 4000;
  long long seed = 0;
  double alpha = 0.1;
  std::vector<double> lambdas;  // encode uses the first, sweep all
};

void add_train_flags(CLI::App* app, TrainFlags* f, bool sweep) {
  app->add_option("--descriptions,-N", f->descriptions,
                  "number of descriptions");
  app->add_option("--levels,-L", f->levels, "latent hierarchy levels");
  app->add_option("--alpha", f->alpha, "side-distortion weight in [0,1]");
  auto* lam = app->add_option("--lambda", f->lambdas,
                              "rate weight (bits/pixel tradeoff)");
  if (!sweep) lam->expected(0, 1);
  app->add_option("--seed", f->seed, "training seed");
  app->add_option("--iterations", f->iterations, "training iterations");
}

ConfigPtr make_config(const TrainFlags& f, hmdc_status* err) {
  ConfigPtr cfg(hmdc_config_create(), &hmdc_config_destroy);
  hmdc_status s = HMDC_OK;
  auto set_i = [&](const char* k, long long v) {
    if (s == HMDC_OK) s = hmdc_config_set_int(cfg.get(), k, v);
  };
  set_i("descriptions", f.descriptions);
  set_i("levels", f.levels);
  set_i("iterations", f.iterations);
  set_i("seed", f.seed);
  if (s == HMDC_OK) s = hmdc_config_set_double(cfg.get(), "alpha", f.alpha);
  if (s == HMDC_OK && !f.lambdas.empty())
    s = hmdc_config_set_double(cfg.get(), "lambda", f.lambdas.front());
  *err = s;
  return cfg;
}

void print_metrics(const hmdc_metrics& m, bool encoded) {
  if (encoded)
    std::printf("central %.3f dB, side mean %.3f dB, %.4f bits/px, "
                "%.4f nts/px, %llu oligos\n",
                m.central_psnr_db, m.side_psnr_db_mean, m.rate_bpp,
                m.nts_per_pixel, m.oligo_count);
  else
    std::printf("decodable=%d best_effort=%d, %.4f nts/px, %llu oligos\n",
                m.decodable, m.best_effort, m.nts_per_pixel, m.oligo_count);
}

int sweep_threads() {
  const char* env = std::getenv("HELIX_MDC_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helix-mdc: neural image codec for DNA data storage"};
  app.require_subcommand(1);

  std::string input, output, csv, checkpoint, scenario, format = "ppm";

  auto* enc = app.add_subcommand("encode", "train on an image, emit oligos");
  TrainFlags ef;
  enc->add_option("--input,-i", input, "PPM/PNG image")->required();
  enc->add_option("--output,-o", output, "oligo file")->required();
  enc->add_option("--csv", csv, "rate-distortion CSV");
  enc->add_option("--checkpoint", checkpoint, "trained-state checkpoint");
  add_train_flags(enc, &ef, false);

  auto* dec = app.add_subcommand("decode", "reconstruct an image from oligos");
  dec->add_option("--input,-i", input, "oligo file")->required();
  dec->add_option("--output,-o", output, "image path (.ppm or .png)")
      ->required();

  auto* sim = app.add_subcommand(
      "simulate", "loss scenario on a checkpoint or an oligo file");
  auto* sim_ckpt = sim->add_option("--checkpoint", checkpoint,
                                   "encoder checkpoint (scored reconstruction)");
  sim->add_option("--oligos,-i", input,
                  "oligo file (writes surviving lines to --output)")
      ->excludes(sim_ckpt);
  sim->add_option("--scenario", scenario, "loss scenario file")->required();
  sim->add_option("--output,-o", output,
                  "image prefix (checkpoint) or oligo file (oligos)");
  sim->add_option("--csv", csv, "loss/PSNR CSV");
  sim->add_option("--format", format, "image format: ppm or png")
      ->check(CLI::IsMember({"ppm", "png"}));

  auto* swp = app.add_subcommand("sweep", "rate-distortion sweep");
  TrainFlags sf;
  swp->add_option("--input,-i", input, "PPM/PNG image")->required();
  swp->add_option("--output,-o", output, "CSV path")->required();
  std::vector<long long> sweep_descs{1};
  add_train_flags(swp, &sf, true);
  swp->add_option("--sweep-descriptions", sweep_descs,
                  "description counts to sweep (default: just -N)");

  auto* val = app.add_subcommand("validate", "check oligo-file constraints");
  val->add_option("--input,-i", input, "oligo file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (enc->parsed()) {
    hmdc_status s;
    ConfigPtr cfg = make_config(ef, &s);
    if (s != HMDC_OK) return finish(s);
    hmdc_metrics m{};
    s = hmdc_encode(input.c_str(), cfg.get(), output.c_str(),
                    csv.empty() ? nullptr : csv.c_str(),
                    checkpoint.empty() ? nullptr : checkpoint.c_str(), &m);
    if (s == HMDC_OK) print_metrics(m, true);
    return finish(s);
  }

  if (dec->parsed()) {
    hmdc_metrics m{};
    const hmdc_status s = hmdc_decode(input.c_str(), output.c_str(), &m);
    if (s == HMDC_OK) print_metrics(m, false);
    return finish(s);
  }

  if (sim->parsed()) {
    if (checkpoint.empty()) {
      if (input.empty() || output.empty()) {
        std::fprintf(stderr,
                     "error: simulate needs --checkpoint, or --oligos with "
                     "--output\n");
        return 2;
      }
      const hmdc_status s = hmdc_simulate_oligos(input.c_str(),
                                                 scenario.c_str(),
                                                 output.c_str());
      if (s == HMDC_OK) std::printf("wrote %s\n", output.c_str());
      return finish(s);
    }
    hmdc_metrics m{};
    const hmdc_status s = hmdc_simulate(
        checkpoint.c_str(), scenario.c_str(),
        output.empty() ? nullptr : output.c_str(), format.c_str(),
        csv.empty() ? nullptr : csv.c_str(), &m);
    if (s == HMDC_OK)
      std::printf("central %.3f dB, side mean %.3f dB, decodable=%d "
                  "best_effort=%d\n",
                  m.central_psnr_db, m.side_psnr_db_mean, m.decodable,
                  m.best_effort);
    return finish(s);
  }

  if (swp->parsed()) {
    hmdc_status s;
    if (sf.lambdas.empty()) sf.lambdas.push_back(2e-3);
    ConfigPtr cfg = make_config(sf, &s);
    if (s != HMDC_OK) return finish(s);
    std::vector<int> descs;
    if (swp->count("--sweep-descriptions") == 0)
      descs.push_back(static_cast<int>(sf.descriptions));
    else
      for (long long d : sweep_descs) descs.push_back(static_cast<int>(d));
    s = hmdc_sweep(input.c_str(), cfg.get(), sf.lambdas.data(),
                   sf.lambdas.size(), descs.data(), descs.size(),
                   output.c_str(), sweep_threads());
    if (s == HMDC_OK) std::printf("wrote %s\n", output.c_str());
    return finish(s);
  }

  // validate
  size_t total = 0, bad = 0;
  const hmdc_status s = hmdc_validate(input.c_str(), &total, &bad);
  std::printf("%zu oligos, %zu invalid\n", total, bad);
  return finish(s);
}
