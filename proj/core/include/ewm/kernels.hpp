//==============================================================================
// Copyright (c) 2026 The ewmeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//==============================================================================
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ewm {

/// Interleaved H×W×C float image. Flow fields use C = 2 with channel 0 the
/// horizontal (x) displacement and channel 1 the vertical (y) displacement.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<float> data;

  Image() = default;
  Image(std::size_t h, std::size_t w, std::size_t c, float fill = 0.0f)
      : height(h), width(w), channels(c), data(h * w * c, fill) {}

  float& at(std::size_t y, std::size_t x, std::size_t c = 0) {
    return data[(y * width + x) * channels + c];
  }
  float at(std::size_t y, std::size_t x, std::size_t c = 0) const {
    return data[(y * width + x) * channels + c];
  }
  std::size_t pixel_count() const { return height * width; }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

/// Monotone alignment between a reference and a predicted sequence, stored
/// as 0-based (reference index, prediction index) pairs.
struct AlignmentPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct DtwResult {
  double cost = 0.0;  // sqrt of the minimal summed squared distance
  AlignmentPath path;
};

/// Polynomial kernel k(x, y) = (gamma * <x, y> + c0)^degree.
struct KernelSpec {
  double gamma = 1.0;
  double c0 = 0.0;
  int degree = 2;
};

namespace kernels {

double dot(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const double> a, std::span<const double> b);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Mean SSIM over all fully-contained Gaussian windows of two single-channel
/// images.
double ssim(const Image& a, const Image& b, const SsimParams& params = {});

/// Backward bilinear sampling: out(p) = image(p + flow(p)), sample positions
/// clamped to the image border.
Image warp(const Image& image, const Image& flow);

DtwResult dtw_min_cost(std::span<const Point2> reference, std::span<const Point2> prediction);
double ndtw(std::span<const Point2> reference, std::span<const Point2> prediction);

double poly_kernel(std::span<const double> a, std::span<const double> b, const KernelSpec& spec);

/// Unbiased MMD^2: within-set kernel means exclude the diagonal, the cross
/// term includes every pair. The value can be negative.
double mmd2_poly_unbiased(const std::vector<std::vector<double>>& x,
                          const std::vector<std::vector<double>>& y, const KernelSpec& spec = {});

/// 1 / (1 + exp(-alpha * (x / center - 1))).
double logistic(double x, double alpha, double center);

double pearson(std::span<const double> x, std::span<const double> y);

/// Mean of the two central order statistics for even counts.
double median(std::vector<double> values);

/// BT.601 luma of an RGB image with channels in [0, 1].
Image to_gray(const Image& rgb);

}  // namespace kernels
}  // namespace ewm
