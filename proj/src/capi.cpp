// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "helixmdc/helixmdc.h"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "codec.hpp"
#include "dna.hpp"

namespace {

using namespace helixmdc;

thread_local std::string g_error;

hmdc_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidArgument:
      return HMDC_INVALID_ARGUMENT;
    case ErrorCode::kIoError:
      return HMDC_IO_ERROR;
    case ErrorCode::kCorruptData:
      return HMDC_CORRUPT_DATA;
    case ErrorCode::kUndecodable:
    case ErrorCode::kUnrecoverableBlock:
      return HMDC_UNDECODABLE;
    case ErrorCode::kInternal:
      break;
  }
  return HMDC_INTERNAL;
}

template <typename F>
hmdc_status guard(F&& f) {
  try {
    g_error.clear();
    return f();
  } catch (const Error& e) {
    g_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_error = e.what();
    return HMDC_INTERNAL;
  }
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw_io("cannot open for writing: " + path);
  return f;
}

void require(const void* p, const char* name) {
  if (!p) throw_invalid(std::string(name) + " must not be null");
}

// Long-format CSV of an encoder run: metric,description,value.
void write_rd_csv(const std::string& path, const RdReport& rep,
                  const Metrics& m) {
  auto f = open_out(path);
  f << "metric,description,value\n";
  f << "central_psnr_db,," << fmt6(rep.central_psnr_db) << "\n";
  const double npix = static_cast<double>(m.rows) * m.cols;
  for (size_t j = 0; j < rep.sides.size(); ++j) {
    f << "side_psnr_db," << j << "," << fmt6(rep.sides[j].psnr_db) << "\n";
    f << "side_rate_bpp," << j << ","
      << fmt6(rep.sides[j].rate_bits / npix) << "\n";
    f << "side_rate_nts," << j << "," << fmt6(rep.sides[j].rate_nts) << "\n";
  }
  f << "theta_rate_bits,," << fmt6(rep.theta_rate_bits) << "\n";
  f << "psi_rate_bits,," << fmt6(rep.psi_rate_bits) << "\n";
  f << "nts_per_pixel,," << fmt6(m.nts_per_pixel()) << "\n";
  f << "oligo_count,," << m.oligo_count << "\n";
  if (!f) throw_io("csv write failed: " + path);
}

void fill_metrics(hmdc_metrics* out, const RdReport& rep, const Metrics& m) {
  if (!out) return;
  *out = {};
  out->central_psnr_db = rep.central_psnr_db;
  double n = 0, sum = 0;
  const double npix = static_cast<double>(m.rows) * m.cols;
  for (const auto& s : rep.sides) {
    sum += s.psnr_db;
    out->rate_bpp += npix > 0 ? s.rate_bits / npix : 0.0;
    ++n;
  }
  out->side_psnr_db_mean = n > 0 ? sum / n : 0.0;
  out->nts_per_pixel = m.nts_per_pixel();
  out->oligo_count = m.oligo_count;
  out->decodable = 1;
}

}  // namespace

extern "C" {

struct hmdc_config {
  TrainingConfig cfg;
};

const char* hmdc_last_error(void) { return g_error.c_str(); }

hmdc_config* hmdc_config_create(void) { return new hmdc_config{}; }

void hmdc_config_destroy(hmdc_config* cfg) { delete cfg; }

hmdc_status hmdc_config_set_int(hmdc_config* cfg, const char* key,
                                long long value) {
  return guard([&]() {
    require(cfg, "cfg");
    require(key, "key");
    const std::string k = key;
    if (k == "descriptions")
      cfg->cfg.descriptions = static_cast<int>(value);
    else if (k == "levels")
      cfg->cfg.levels = static_cast<int>(value);
    else if (k == "iterations")
      cfg->cfg.iterations = static_cast<int>(value);
    else if (k == "seed")
      cfg->cfg.seed = static_cast<uint64_t>(value);
    else
      throw_invalid("unknown int config key: " + k);
    cfg->cfg.validate();
    return HMDC_OK;
  });
}

hmdc_status hmdc_config_set_double(hmdc_config* cfg, const char* key,
                                   double value) {
  return guard([&]() {
    require(cfg, "cfg");
    require(key, "key");
    const std::string k = key;
    if (k == "alpha")
      cfg->cfg.alpha = value;
    else if (k == "lambda")
      cfg->cfg.lambda = value;
    else
      throw_invalid("unknown double config key: " + k);
    cfg->cfg.validate();
    return HMDC_OK;
  });
}

hmdc_status hmdc_encode(const char* image_path, const hmdc_config* cfg,
                        const char* oligo_path, const char* csv_path,
                        const char* checkpoint_path, hmdc_metrics* metrics) {
  return guard([&]() {
    require(image_path, "image_path");
    require(cfg, "cfg");
    require(oligo_path, "oligo_path");
    const Image img = load_image(image_path);
    TrainResult tr = train(img, cfg->cfg);
    EncodedImage enc = encode_trained(tr.state);
    write_oligo_file(oligo_path, enc.oligos);
    if (csv_path) write_rd_csv(csv_path, enc.report, enc.metrics);
    if (checkpoint_path) save_checkpoint(tr.state, checkpoint_path);
    fill_metrics(metrics, enc.report, enc.metrics);
    return HMDC_OK;
  });
}

hmdc_status hmdc_decode(const char* oligo_path, const char* image_path,
                        hmdc_metrics* metrics) {
  return guard([&]() {
    require(oligo_path, "oligo_path");
    require(image_path, "image_path");
    const auto lines = read_oligo_file(oligo_path);
    DecodeResult dr = decode(lines);
    save_image(dr.central, image_path);
    if (metrics) {
      *metrics = {};
      metrics->nts_per_pixel = dr.metrics.nts_per_pixel();
      metrics->oligo_count = dr.metrics.oligo_count;
      metrics->decodable = dr.decodable ? 1 : 0;
      metrics->best_effort = dr.best_effort ? 1 : 0;
    }
    return HMDC_OK;
  });
}

hmdc_status hmdc_simulate(const char* checkpoint_path,
                          const char* scenario_path,
                          const char* output_prefix, const char* format,
                          const char* csv_path, hmdc_metrics* metrics) {
  return guard([&]() {
    require(checkpoint_path, "checkpoint_path");
    require(scenario_path, "scenario_path");
    const TrainedState st = load_checkpoint(checkpoint_path);
    const LossScenario scenario = load_scenario(scenario_path);
    const RobustnessResult res = evaluate_robustness(st, scenario);
    const bool reconstructed = res.central.rows > 0;

    if (csv_path) {
      auto f = open_out(csv_path);
      f << "record,type,description,level,value\n";
      for (const auto& [key, loss] : res.loss.per_stream)
        f << "stream_loss," << oligo_type_name(key.type) << ","
          << key.description << "," << key.level << ","
          << fmt6(loss.loss_fraction()) << "\n";
      f << "oligo_loss,,,,"
        << fmt6(res.loss.total == 0
                    ? 0.0
                    : static_cast<double>(res.loss.dropped) / res.loss.total)
        << "\n";
      f << "decodable,,,," << (res.decodable ? 1 : 0) << "\n";
      if (reconstructed) {
        f << "psnr_db,central,,," << fmt6(res.central_psnr_db) << "\n";
        for (size_t j = 0; j < res.side_psnr_db.size(); ++j)
          if (res.side_psnr_db[j])
            f << "psnr_db,side," << j << ",," << fmt6(*res.side_psnr_db[j])
              << "\n";
      }
      if (!f) throw_io("csv write failed: " + std::string(csv_path));
    }

    if (!reconstructed) {
      if (metrics) *metrics = {};
      throw Error(ErrorCode::kUndecodable,
                  "simulate: surviving oligos are undecodable");
    }
    if (output_prefix) {
      const std::string ext =
          format && std::string(format) == "png" ? ".png" : ".ppm";
      save_image(res.central, std::string(output_prefix) + "_central" + ext);
      for (size_t j = 0; j < res.sides.size(); ++j)
        if (res.sides[j])
          save_image(*res.sides[j], std::string(output_prefix) + "_side" +
                                        std::to_string(j) + ext);
    }
    if (metrics) {
      *metrics = {};
      metrics->central_psnr_db = res.central_psnr_db;
      double n = 0, sum = 0;
      for (const auto& p : res.side_psnr_db)
        if (p) {
          sum += *p;
          ++n;
        }
      metrics->side_psnr_db_mean = n > 0 ? sum / n : 0.0;
      metrics->decodable = res.decodable ? 1 : 0;
      metrics->best_effort = res.best_effort ? 1 : 0;
    }
    return HMDC_OK;
  });
}

hmdc_status hmdc_simulate_oligos(const char* oligo_path,
                                 const char* scenario_path,
                                 const char* surviving_path) {
  return guard([&]() {
    require(oligo_path, "oligo_path");
    require(scenario_path, "scenario_path");
    require(surviving_path, "surviving_path");
    const auto lines = read_oligo_file(oligo_path);
    const LossOutcome out = apply_loss(lines, load_scenario(scenario_path));
    write_oligo_file(surviving_path, out.surviving);
    return HMDC_OK;
  });
}

hmdc_status hmdc_sweep(const char* image_path, const hmdc_config* base_cfg,
                       const double* lambdas, size_t lambda_count,
                       const int* descriptions, size_t description_count,
                       const char* csv_path, int max_threads) {
  return guard([&]() {
    require(image_path, "image_path");
    require(base_cfg, "base_cfg");
    require(lambdas, "lambdas");
    require(descriptions, "descriptions");
    require(csv_path, "csv_path");
    if (lambda_count == 0 || description_count == 0)
      throw_invalid("sweep: empty grid");
    const Image img = load_image(image_path);

    struct Job {
      TrainingConfig cfg;
      RdReport report;
      Metrics metrics;
    };
    std::vector<Job> jobs;
    for (size_t d = 0; d < description_count; ++d)
      for (size_t l = 0; l < lambda_count; ++l) {
        Job j;
        j.cfg = base_cfg->cfg;
        j.cfg.descriptions = descriptions[d];
        j.cfg.lambda = lambdas[l];
        j.cfg.validate();
        jobs.push_back(std::move(j));
      }

    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::string first_error;
    auto worker = [&]() {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        try {
          TrainResult tr = train(img, jobs[i].cfg);
          EncodedImage enc = encode_trained(tr.state);
          jobs[i].report = std::move(enc.report);
          jobs[i].metrics = enc.metrics;
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (first_error.empty()) first_error = e.what();
          return;
        }
      }
    };
    const size_t threads = std::min<size_t>(
        jobs.size(), max_threads > 0 ? static_cast<size_t>(max_threads) : 1);
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (!first_error.empty())
      throw Error(ErrorCode::kInternal, "sweep job failed: " + first_error);

    auto f = open_out(csv_path);
    f << "lambda,descriptions,central_psnr_db,side_mean_psnr_db,"
         "rate_bpp,nts_per_pixel\n";
    for (const auto& j : jobs) {
      double sum = 0, bits = 0;
      for (const auto& s : j.report.sides) {
        sum += s.psnr_db;
        bits += s.rate_bits;
      }
      const double npix = static_cast<double>(j.metrics.rows) * j.metrics.cols;
      f << fmt6(j.cfg.lambda) << "," << j.cfg.descriptions << ","
        << fmt6(j.report.central_psnr_db) << ","
        << fmt6(sum / j.report.sides.size()) << "," << fmt6(bits / npix)
        << "," << fmt6(j.metrics.nts_per_pixel()) << "\n";
    }
    if (!f) throw_io("csv write failed: " + std::string(csv_path));
    return HMDC_OK;
  });
}

hmdc_status hmdc_validate(const char* oligo_path, size_t* total_lines,
                          size_t* bad_lines) {
  return guard([&]() {
    require(oligo_path, "oligo_path");
    const auto lines = read_oligo_file(oligo_path);
    size_t bad = 0;
    for (const auto& l : lines) {
      bool ok = l.size() == kOligoLength;
      if (ok) {
        const ConstraintReport rep = validate_constraints(l);
        ok = rep.violations.empty();
      }
      if (ok) {
        try {
          parse_record(l);
        } catch (const Error&) {
          ok = false;
        }
      }
      if (!ok) ++bad;
    }
    if (total_lines) *total_lines = lines.size();
    if (bad_lines) *bad_lines = bad;
    if (bad > 0)
      throw_corrupt(std::to_string(bad) + " of " +
                    std::to_string(lines.size()) + " oligos invalid");
    return HMDC_OK;
  });
}

}  // extern "C"
