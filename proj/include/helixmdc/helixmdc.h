/* Copyright 2026 the helix-mdc authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the helix-mdc codec: per-image INR compression with
 * multiple-description coding, DNA-constrained entropy coding, 200-nt oligo
 * packing, and an erasure-channel simulator.
 *
 * All functions returning hmdc_status set a thread-local message retrievable
 * with hmdc_last_error() on failure. Paths are UTF-8. Images are 8-bit RGB
 * PPM (P6) or PNG, chosen by file extension.
 */
#ifndef HELIXMDC_H_
#define HELIXMDC_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  HMDC_OK = 0,
  HMDC_INVALID_ARGUMENT = 1,
  HMDC_IO_ERROR = 2,
  HMDC_CORRUPT_DATA = 3,
  HMDC_UNDECODABLE = 4,
  HMDC_INTERNAL = 5
} hmdc_status;

/* Message for the last failing call on this thread; empty string if none. */
const char* hmdc_last_error(void);

/* Opaque training/encoding configuration. Keys for the setters:
 *   int keys:    "descriptions", "levels", "iterations", "seed"
 *   double keys: "alpha", "lambda"
 * Unknown keys or out-of-range values fail with HMDC_INVALID_ARGUMENT. */
typedef struct hmdc_config hmdc_config;

hmdc_config* hmdc_config_create(void);
void hmdc_config_destroy(hmdc_config* cfg);
hmdc_status hmdc_config_set_int(hmdc_config* cfg, const char* key,
                                long long value);
hmdc_status hmdc_config_set_double(hmdc_config* cfg, const char* key,
                                   double value);

typedef struct {
  double central_psnr_db;
  double side_psnr_db_mean; /* mean over produced side reconstructions */
  double rate_bpp;          /* model-estimated latent bits per pixel, summed */
  double nts_per_pixel;     /* all oligo nucleotides / pixel count */
  unsigned long long oligo_count;
  int decodable;   /* decode/simulate: strict completeness verdict */
  int best_effort; /* decode/simulate: substitution or zero-fill used */
} hmdc_metrics;

/* Train on the image and write the packed oligo file. Optionally writes a
 * rate-distortion CSV (header documented in the README) and a binary
 * checkpoint of the trained state. csv_path and checkpoint_path may be NULL;
 * metrics may be NULL. */
hmdc_status hmdc_encode(const char* image_path, const hmdc_config* cfg,
                        const char* oligo_path, const char* csv_path,
                        const char* checkpoint_path, hmdc_metrics* metrics);

/* Decode an oligo file to an image. Returns HMDC_UNDECODABLE when the
 * general-info, ARM, or synthesis stream is incomplete. When at least one
 * latent stream is lost but decoding remains possible, the reconstruction is
 * best-effort and flagged in the metrics. */
hmdc_status hmdc_decode(const char* oligo_path, const char* image_path,
                        hmdc_metrics* metrics);

/* Apply a loss scenario to a checkpointed encoding and score the surviving
 * reconstruction against the original. Writes <output_prefix>_central.<ext>
 * and <output_prefix>_side<j>.<ext> for every surviving description
 * (ext = "ppm" or "png"), plus a per-stream loss CSV when csv_path is not
 * NULL. output_prefix may be NULL to skip the images. */
hmdc_status hmdc_simulate(const char* checkpoint_path,
                          const char* scenario_path,
                          const char* output_prefix, const char* format,
                          const char* csv_path, hmdc_metrics* metrics);

/* Apply a loss scenario to an oligo file, writing the surviving lines. */
hmdc_status hmdc_simulate_oligos(const char* oligo_path,
                                 const char* scenario_path,
                                 const char* surviving_path);

/* Rate-distortion sweep: trains one job per (lambda, descriptions) pair and
 * appends one CSV row each. max_threads <= 0 means one job at a time. */
hmdc_status hmdc_sweep(const char* image_path, const hmdc_config* base_cfg,
                       const double* lambdas, size_t lambda_count,
                       const int* descriptions, size_t description_count,
                       const char* csv_path, int max_threads);

/* Check every line of an oligo file: length, alphabet, homopolymer and
 * parity constraints. Fills counts if the pointers are non-NULL; returns
 * HMDC_CORRUPT_DATA when any line fails. */
hmdc_status hmdc_validate(const char* oligo_path, size_t* total_lines,
                          size_t* bad_lines);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HELIXMDC_H_ */
