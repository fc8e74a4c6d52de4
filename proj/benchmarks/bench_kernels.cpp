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
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ewm/kernels.hpp"

namespace {

using namespace ewm;

std::vector<Point2> points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 64.0);
  std::vector<Point2> out(n);
  for (auto& p : out) p = {u(rng), u(rng)};
  return out;
}

Image noise(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Image img(h, w, c);
  for (auto& v : img.data) v = u(rng);
  return img;
}

void BM_Dtw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto r = points(n, 1);
  const auto p = points(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dtw_min_cost(r, p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dtw)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNSquared);

void BM_Mmd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  auto make = [&] {
    std::vector<std::vector<double>> s(n, std::vector<double>(1024));
    for (auto& v : s) {
      for (auto& e : v) e = g(rng);
    }
    return s;
  };
  const auto x = make();
  const auto y = make();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::mmd2_poly_unbiased(x, y));
}
BENCHMARK(BM_Mmd)->Arg(2)->Arg(8)->Arg(32);

void BM_Ssim(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto a = noise(side, side, 1, 4);
  const auto b = noise(side, side, 1, 5);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(256);

void BM_Warp(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto img = noise(side, side, 3, 6);
  auto flow = noise(side, side, 2, 7);
  for (auto& v : flow.data) v = (v - 0.5f) * 8.0f;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::warp(img, flow));
}
BENCHMARK(BM_Warp)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
