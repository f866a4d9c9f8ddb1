// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>

#include "error.hpp"

namespace helixmdc {

// 8-bit RGB image lifted to [0,1] doubles, one matrix per channel.
struct Image {
  int rows = 0;
  int cols = 0;
  Eigen::MatrixXd r, g, b;
};

Image load_image(const std::string& path);        // PPM (P6) or PNG
void save_image(const Image& img, const std::string& path);  // by extension

double mse(const Image& a, const Image& b);
double psnr_db(double mse_value);

}  // namespace helixmdc
