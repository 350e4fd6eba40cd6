// Copyright 2026 The genmetric Authors
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

#include <benchmark/benchmark.h>

#include <random>

#include "genmetric/metrics.hpp"

namespace {

genmetric::Matrix gaussian(int n, int m, std::uint64_t seed) {
  genmetric::Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  genmetric::Matrix x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = z(rng);
  return x;
}

void BM_MomentStats(benchmark::State& state) {
  const auto x = gaussian(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(genmetric::moment_stats(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MomentStats)->Args({5000, 16})->Args({5000, 64});

void BM_Fid(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto a = genmetric::moment_stats(gaussian(4 * m, m, 2));
  const auto b = genmetric::moment_stats(gaussian(4 * m, m, 3));
  for (auto _ : state) benchmark::DoNotOptimize(genmetric::fid(a, b));
}
BENCHMARK(BM_Fid)->Arg(16)->Arg(64)->Arg(256);

void BM_Kid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = gaussian(n, 32, 4), b = gaussian(n, 32, 5);
  for (auto _ : state) benchmark::DoNotOptimize(genmetric::kid(a, b));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Kid)->RangeMultiplier(2)->Range(256, 2048)->Complexity(benchmark::oNSquared);

void BM_InceptionScore(benchmark::State& state) {
  genmetric::Matrix p = gaussian(10000, 10, 6).array().exp();
  for (int i = 0; i < p.rows(); ++i) p.row(i) /= p.row(i).sum();
  for (auto _ : state) benchmark::DoNotOptimize(genmetric::inception_style_score(p, 10));
}
BENCHMARK(BM_InceptionScore);

}  // namespace
