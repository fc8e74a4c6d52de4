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
#include "ewm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ewm/error.hpp"

namespace ewm::kernels {
namespace {

void require_same_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size));
  const double center = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    w[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Separable "valid" filtering of a single-channel plane.
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t h, std::size_t w,
                                 const std::vector<double>& kernel) {
  const std::size_t k = kernel.size();
  const std::size_t oh = h - k + 1;
  const std::size_t ow = w - k + 1;
  std::vector<double> rows(h * ow, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) acc += kernel[i] * plane[y * w + x + i];
      rows[y * ow + x] = acc;
    }
  }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) acc += kernel[i] * rows[(y + i) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dims(a.size(), b.size(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  require_same_dims(a.size(), b.size(), "cosine");
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) throw DegenerateInputError("cosine: zero-norm vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double ssim(const Image& a, const Image& b, const SsimParams& params) {
  if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
    throw ShapeError("ssim: image shapes differ");
  }
  if (a.channels != 1) throw ShapeError("ssim: expects single-channel images");
  const auto win = static_cast<std::size_t>(params.window);
  if (a.height < win || a.width < win) {
    throw ShapeError("ssim: image smaller than the " + std::to_string(win) + "px window");
  }
  const std::size_t n = a.data.size();
  std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = a.data[i];
    pb[i] = b.data[i];
    paa[i] = pa[i] * pa[i];
    pbb[i] = pb[i] * pb[i];
    pab[i] = pa[i] * pb[i];
  }
  const auto kernel = gaussian_window(params.window, params.sigma);
  const auto mu_a = filter_valid(pa, a.height, a.width, kernel);
  const auto mu_b = filter_valid(pb, a.height, a.width, kernel);
  const auto e_aa = filter_valid(paa, a.height, a.width, kernel);
  const auto e_bb = filter_valid(pbb, a.height, a.width, kernel);
  const auto e_ab = filter_valid(pab, a.height, a.width, kernel);

  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

Image warp(const Image& image, const Image& flow) {
  if (flow.height != image.height || flow.width != image.width || flow.channels != 2) {
    throw ShapeError("warp: flow must be H x W x 2 matching the image");
  }
  Image out(image.height, image.width, image.channels);
  const double max_x = static_cast<double>(image.width - 1);
  const double max_y = static_cast<double>(image.height - 1);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      const double sx = std::clamp(static_cast<double>(x) + flow.at(y, x, 0), 0.0, max_x);
      const double sy = std::clamp(static_cast<double>(y) + flow.at(y, x, 1), 0.0, max_y);
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const auto y0 = static_cast<std::size_t>(std::floor(sy));
      const std::size_t x1 = std::min(x0 + 1, image.width - 1);
      const std::size_t y1 = std::min(y0 + 1, image.height - 1);
      const double wx = sx - static_cast<double>(x0);
      const double wy = sy - static_cast<double>(y0);
      for (std::size_t c = 0; c < image.channels; ++c) {
        if (wx == 0.0 && wy == 0.0) {
          out.at(y, x, c) = image.at(y0, x0, c);
          continue;
        }
        const double top = (1.0 - wx) * image.at(y0, x0, c) + wx * image.at(y0, x1, c);
        const double bottom = (1.0 - wx) * image.at(y1, x0, c) + wx * image.at(y1, x1, c);
        out.at(y, x, c) = static_cast<float>((1.0 - wy) * top + wy * bottom);
      }
    }
  }
  return out;
}

DtwResult dtw_min_cost(std::span<const Point2> reference, std::span<const Point2> prediction) {
  const std::size_t n = reference.size();
  const std::size_t m = prediction.size();
  if (n == 0 || m == 0) throw SampleSizeError("dtw: empty sequence");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> acc(n * m, kInf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double dx = reference[i].x - prediction[j].x;
      const double dy = reference[i].y - prediction[j].y;
      const double local = dx * dx + dy * dy;
      double best = 0.0;
      if (i > 0 || j > 0) {
        best = kInf;
        if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
        if (i > 0) best = std::min(best, at(i - 1, j));
        if (j > 0) best = std::min(best, at(i, j - 1));
      }
      at(i, j) = local + best;
    }
  }

  DtwResult result;
  result.cost = std::sqrt(at(n - 1, m - 1));
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  result.path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    result.path.pairs.emplace_back(i, j);
  }
  std::reverse(result.path.pairs.begin(), result.path.pairs.end());
  return result;
}

double ndtw(std::span<const Point2> reference, std::span<const Point2> prediction) {
  return dtw_min_cost(reference, prediction).cost / static_cast<double>(reference.size());
}

double poly_kernel(std::span<const double> a, std::span<const double> b, const KernelSpec& spec) {
  return std::pow(spec.gamma * dot(a, b) + spec.c0, spec.degree);
}

double mmd2_poly_unbiased(const std::vector<std::vector<double>>& x,
                          const std::vector<std::vector<double>>& y, const KernelSpec& spec) {
  if (x.size() < 2 || y.size() < 2) {
    throw SampleSizeError("mmd2: both sets need at least 2 samples (got " +
                          std::to_string(x.size()) + ", " + std::to_string(y.size()) + ")");
  }
  if (spec.degree != 2) throw ValidationError("mmd2: only degree-2 polynomial kernels supported");
  const std::size_t dim = x.front().size();
  for (const auto& v : x) require_same_dims(v.size(), dim, "mmd2");
  for (const auto& v : y) require_same_dims(v.size(), dim, "mmd2");

  auto within = [&](const std::vector<std::vector<double>>& s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (i != j) sum += poly_kernel(s[i], s[j], spec);
      }
    }
    const auto k = static_cast<double>(s.size());
    return sum / (k * (k - 1.0));
  };
  double cross = 0.0;
  for (const auto& a : x) {
    for (const auto& b : y) cross += poly_kernel(a, b, spec);
  }
  cross *= 2.0 / static_cast<double>(x.size() * y.size());
  return within(x) + within(y) - cross;
}

double logistic(double x, double alpha, double center) {
  if (!(alpha > 0.0)) throw RangeError("logistic: alpha must be > 0");
  if (!(center > 0.0)) throw RangeError("logistic: center must be > 0");
  return 1.0 / (1.0 + std::exp(-alpha * (x / center - 1.0)));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_same_dims(x.size(), y.size(), "pearson");
  if (x.size() < 3) throw SampleSizeError("pearson: need at least 3 paired values");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double median(std::vector<double> values) {
  if (values.empty()) throw SampleSizeError("median: empty input");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Image to_gray(const Image& rgb) {
  if (rgb.channels != 3) throw ShapeError("to_gray: expects 3 channels");
  Image out(rgb.height, rgb.width, 1);
  for (std::size_t p = 0; p < rgb.pixel_count(); ++p) {
    const float* px = &rgb.data[p * 3];
    out.data[p] = static_cast<float>(0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]);
  }
  return out;
}

}  // namespace ewm::kernels
