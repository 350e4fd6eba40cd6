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

#pragma once

#include <cstdint>
#include <vector>

#include "genmetric/classifier.hpp"
#include "genmetric/dataset.hpp"
#include "genmetric/generators.hpp"

namespace genmetric {

/// Accuracy of one classifier trained on some training set and evaluated on
/// real test data.
struct TrainEvalResult {
  double top1 = 0.0;
  double topk = 0.0;
  Vector per_class_top1;
  Vector per_class_topk;
  TrainResult trained;
};

/// Trains on `train_set` with `config` and reports top-1/top-k on real_test.
TrainEvalResult evaluate_training_set(const LabeledDataset& train_set,
                                      const LabeledDataset& real_test,
                                      const ClassifierConfig& config, int k);

/// Classification Accuracy Score: train on a replacement set drawn from
/// `gen` (template: real_train), evaluate on real_test.
TrainEvalResult cas(const ConditionalGenerator& gen,
                    const LabeledDataset& real_train,
                    const LabeledDataset& real_test,
                    const ClassifierConfig& config, int k,
                    std::uint64_t sample_seed);

/// Same procedure trained directly on real_train.
TrainEvalResult real_baseline(const LabeledDataset& real_train,
                              const LabeledDataset& real_test,
                              const ClassifierConfig& config, int k);

struct NasPoint {
  double fraction = 0.0;
  std::size_t train_size = 0;
  double top1 = 0.0;
  double topk = 0.0;
};

/// Naive Augmentation Score: one train/evaluate cycle per fraction on the
/// real set extended with synthetic samples.
std::vector<NasPoint> nas(const LabeledDataset& real_train,
                          const ConditionalGenerator& gen,
                          const std::vector<double>& fractions,
                          const LabeledDataset& real_test,
                          const ClassifierConfig& config, int k,
                          std::uint64_t sample_seed);

struct GanTestResult {
  double top1 = 0.0;
  double topk = 0.0;
  std::size_t test_size = 0;
};

/// Class-balanced synthetic set of `size` rows (remainder to the lowest
/// classes).
LabeledDataset sample_balanced(const ConditionalGenerator& gen,
                               std::size_t size, Rng& rng);

/// Real-trained classifier evaluated on freshly generated samples.
GanTestResult gan_test(const ClassifierModel& real_model,
                       const ConditionalGenerator& gen,
                       std::size_t synthetic_test_size, int k,
                       std::uint64_t sample_seed);
GanTestResult gan_test(const LabeledDataset& real_train,
                       const ConditionalGenerator& gen,
                       std::size_t synthetic_test_size,
                       const ClassifierConfig& config, int k,
                       std::uint64_t sample_seed);

struct GapRow {
  Label label = 0;
  double model_acc = 0.0;
  double real_acc = 0.0;
  double gap = 0.0;        // model - real
  bool flag_zero = false;  // model accuracy exactly 0
};

/// Rows sorted ascending by gap, ties toward the lower label; classes with a
/// NaN accuracy sort last.
std::vector<GapRow> per_class_gap(const Vector& model_per_class,
                                  const Vector& real_per_class);

}  // namespace genmetric
