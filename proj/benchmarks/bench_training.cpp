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

#include "genmetric/classifier.hpp"
#include "genmetric/dataset.hpp"
#include "genmetric/evaluation.hpp"
#include "genmetric/generators.hpp"

namespace {

using namespace genmetric;

GaussianClassConditional task(int k, int d) {
  Matrix means = Matrix::Zero(k, d);
  for (int c = 0; c < k; ++c) means(c, c % d) = 3.0;
  return GaussianClassConditional::isotropic(means, 1.0, Vector::Constant(k, 1.0 / k));
}

void BM_SampleReplacementSet(benchmark::State& state) {
  const auto g = task(10, 16);
  Rng rng(1);
  const LabeledDataset templ = sample_balanced(g, static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(build_replacement_set(g, templ, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleReplacementSet)->Arg(10000);

void BM_TrainEpoch(benchmark::State& state) {
  const auto g = task(10, 16);
  Rng rng(2);
  const LabeledDataset ds = sample_balanced(g, 5000, rng);
  ClassifierConfig cfg;
  cfg.hidden = state.range(0) ? std::vector<int>{static_cast<int>(state.range(0))}
                              : std::vector<int>{};
  cfg.epochs = 1;
  cfg.warmup_epochs = 0;
  cfg.decay_epochs = {};
  for (auto _ : state) benchmark::DoNotOptimize(train(ds, cfg));
  state.SetItemsProcessed(state.iterations() * 5000);
}
BENCHMARK(BM_TrainEpoch)->Arg(0)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EvaluateTopk(benchmark::State& state) {
  const auto g = task(10, 16);
  Rng rng(3);
  const LabeledDataset ds = sample_balanced(g, 10000, rng);
  ClassifierModel model(16, 10, {64}, Activation::kRelu, Vector::Zero(16), Vector::Ones(16));
  model.initialize(rng);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_topk(model, ds, 5));
}
BENCHMARK(BM_EvaluateTopk)->Unit(benchmark::kMillisecond);

}  // namespace
