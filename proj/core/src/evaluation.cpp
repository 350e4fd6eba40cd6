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

#include "genmetric/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genmetric/error.hpp"

namespace genmetric {

namespace {

void check_compatible(const LabeledDataset& train, const LabeledDataset& test,
                      int k) {
  if (train.dim() != test.dim() || train.num_classes() != test.num_classes()) {
    throw ConfigError("train and test sets differ in D or K");
  }
  if (k < 1 || k > train.num_classes()) {
    throw ConfigError("top-k value out of range");
  }
}

}  // namespace

TrainEvalResult evaluate_training_set(const LabeledDataset& train_set,
                                      const LabeledDataset& real_test,
                                      const ClassifierConfig& config, int k) {
  check_compatible(train_set, real_test, k);
  TrainResult trained = train(train_set, config);
  const AccuracyResult top1 = evaluate_topk(trained.model, real_test, 1);
  const AccuracyResult topk = evaluate_topk(trained.model, real_test, k);
  return {top1.accuracy, topk.accuracy, top1.per_class, topk.per_class,
          std::move(trained)};
}

TrainEvalResult cas(const ConditionalGenerator& gen,
                    const LabeledDataset& real_train,
                    const LabeledDataset& real_test,
                    const ClassifierConfig& config, int k,
                    std::uint64_t sample_seed) {
  check_compatible(real_train, real_test, k);
  Rng rng(sample_seed);
  const LabeledDataset synthetic = build_replacement_set(gen, real_train, rng);
  return evaluate_training_set(synthetic, real_test, config, k);
}

TrainEvalResult real_baseline(const LabeledDataset& real_train,
                              const LabeledDataset& real_test,
                              const ClassifierConfig& config, int k) {
  check_compatible(real_train, real_test, k);
  return evaluate_training_set(real_train, real_test, config, k);
}

std::vector<NasPoint> nas(const LabeledDataset& real_train,
                          const ConditionalGenerator& gen,
                          const std::vector<double>& fractions,
                          const LabeledDataset& real_test,
                          const ClassifierConfig& config, int k,
                          std::uint64_t sample_seed) {
  check_compatible(real_train, real_test, k);
  for (double f : fractions) {
    if (!(f > 0.0)) throw ConfigError("NAS fractions must be positive");
  }
  std::vector<NasPoint> out;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    // Each fraction gets its own stream so results don't depend on list order.
    Rng rng(sample_seed + 0x9e3779b97f4a7c15ULL * (i + 1));
    const LabeledDataset augmented =
        build_augmented_set(real_train, gen, fractions[i], rng);
    const TrainEvalResult r = evaluate_training_set(augmented, real_test, config, k);
    out.push_back({fractions[i], augmented.size(), r.top1, r.topk});
  }
  return out;
}

LabeledDataset sample_balanced(const ConditionalGenerator& gen,
                               std::size_t size, Rng& rng) {
  const auto classes = static_cast<std::size_t>(gen.num_classes());
  if (size < 1) throw ConfigError("synthetic set size must be >= 1");
  FeatureMatrix features(static_cast<Eigen::Index>(size), gen.dim());
  std::vector<Label> labels;
  labels.reserve(size);
  for (std::size_t c = 0; c < classes; ++c) {
    const std::size_t count = size / classes + (c < size % classes ? 1 : 0);
    for (std::size_t j = 0; j < count; ++j) {
      const Vector x = gen.sample(static_cast<Label>(c), rng);
      if (!x.allFinite()) throw Error("generator produced a non-finite sample");
      features.row(static_cast<Eigen::Index>(labels.size())) =
          x.transpose().cast<float>();
      labels.push_back(static_cast<Label>(c));
    }
  }
  return LabeledDataset(std::move(features), std::move(labels),
                        gen.num_classes(), "synthetic");
}

GanTestResult gan_test(const ClassifierModel& real_model,
                       const ConditionalGenerator& gen,
                       std::size_t synthetic_test_size, int k,
                       std::uint64_t sample_seed) {
  if (gen.dim() != real_model.input_dim() ||
      gen.num_classes() != real_model.num_classes()) {
    throw ConfigError("generator does not match the classifier shape");
  }
  Rng rng(sample_seed);
  const LabeledDataset synthetic = sample_balanced(gen, synthetic_test_size, rng);
  return {evaluate_topk(real_model, synthetic, 1).accuracy,
          evaluate_topk(real_model, synthetic, k).accuracy, synthetic.size()};
}

GanTestResult gan_test(const LabeledDataset& real_train,
                       const ConditionalGenerator& gen,
                       std::size_t synthetic_test_size,
                       const ClassifierConfig& config, int k,
                       std::uint64_t sample_seed) {
  const TrainResult trained = train(real_train, config);
  return gan_test(trained.model, gen, synthetic_test_size, k, sample_seed);
}

std::vector<GapRow> per_class_gap(const Vector& model_per_class,
                                  const Vector& real_per_class) {
  if (model_per_class.size() != real_per_class.size()) {
    throw ConfigError("per-class vectors differ in length");
  }
  std::vector<GapRow> rows;
  for (Eigen::Index c = 0; c < model_per_class.size(); ++c) {
    GapRow row;
    row.label = static_cast<Label>(c);
    row.model_acc = model_per_class(c);
    row.real_acc = real_per_class(c);
    row.gap = row.model_acc - row.real_acc;
    row.flag_zero = row.model_acc == 0.0;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const GapRow& a, const GapRow& b) {
    const bool a_nan = std::isnan(a.gap);
    const bool b_nan = std::isnan(b.gap);
    if (a_nan || b_nan) return !a_nan && b_nan;
    return a.gap < b.gap;
  });
  return rows;
}

}  // namespace genmetric
