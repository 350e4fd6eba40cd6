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
#include <filesystem>
#include <span>
#include <vector>

#include "genmetric/dataset.hpp"
#include "genmetric/types.hpp"

namespace genmetric {

enum class Activation { kTanh, kRelu };

/// Architecture plus momentum-SGD schedule. An empty `hidden` list is a
/// linear softmax model.
struct ClassifierConfig {
  std::vector<int> hidden = {64};
  Activation activation = Activation::kRelu;
  int epochs = 30;
  int batch_size = 64;
  double peak_lr = 0.1;
  int warmup_epochs = 3;
  std::vector<int> decay_epochs = {15, 25};
  double decay_factor = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Learning rate for `epoch`: a linear ramp peak*(e+1)/warmup during warmup,
/// then peak * factor^(number of decay epochs <= e).
double lr_at(const ClassifierConfig& config, int epoch);

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

/// Softmax MLP with the training-set standardization baked in. Inputs to
/// every public method are raw (unstandardized) features.
class ClassifierModel {
 public:
  ClassifierModel(int input_dim, int num_classes, std::vector<int> hidden,
                  Activation activation, Vector feature_mean,
                  Vector feature_scale);

  /// Glorot-uniform weights and zero biases drawn from `rng`.
  void initialize(Rng& rng);

  int input_dim() const { return input_dim_; }
  int num_classes() const { return num_classes_; }
  const std::vector<int>& hidden() const { return hidden_; }
  Activation activation() const { return activation_; }
  const Vector& feature_mean() const { return feature_mean_; }
  const Vector& feature_scale() const { return feature_scale_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// Parameters flattened layer by layer, each layer as its weight matrix in
  /// row-major order followed by its bias.
  std::size_t num_parameters() const;
  Vector flat_parameters() const;
  void set_flat_parameters(const Vector& params);

  /// Rows of `x` standardized with the stored mean and scale.
  Matrix standardize(const Matrix& x) const;
  /// Raw logits, one row per input row.
  Matrix logits(const Matrix& x) const;
  /// Softmax rows.
  Matrix predict_proba(const Matrix& x) const;
  Vector predict_proba(const Vector& x) const;
  /// Last hidden activation; the standardized input for a linear model.
  Matrix penultimate(const Matrix& x) const;
  int penultimate_dim() const;

  friend bool operator==(const ClassifierModel& a, const ClassifierModel& b);

 private:
  friend struct ModelAccess;

  int input_dim_;
  int num_classes_;
  std::vector<int> hidden_;
  Activation activation_;
  Vector feature_mean_;
  Vector feature_scale_;
  std::vector<DenseLayer> layers_;
};

/// Per-epoch diagnostics from train().
struct TrainingTrace {
  double initial_loss = 0.0;        // mean cross-entropy before any update
  std::vector<double> epoch_loss;   // mean cross-entropy over each epoch
  std::vector<double> epoch_lr;
  double final_train_accuracy = 0.0;
};

struct TrainResult {
  ClassifierModel model;
  TrainingTrace trace;
};

/// Momentum SGD on mean cross-entropy plus weight decay. Deterministic for a
/// fixed config (seed drives both initialization and shuffling). Throws
/// DivergenceError if the loss becomes non-finite.
TrainResult train(const LabeledDataset& ds, const ClassifierConfig& config);

struct LossGradient {
  double loss = 0.0;
  Vector gradient;  // in flat_parameters() order
};

/// Mean cross-entropy over the batch plus 0.5 * weight_decay * sum of squared
/// weights (biases excluded), with its gradient.
LossGradient loss_and_gradient(const ClassifierModel& model,
                               const Matrix& features,
                               std::span<const Label> labels,
                               double weight_decay = 0.0);

/// The k most probable labels, descending; ties go to the lower label.
std::vector<Label> topk_labels(const Vector& probs, int k);
std::vector<Label> predict_topk(const ClassifierModel& model, const Vector& x,
                                int k);

AccuracyResult evaluate_topk(const ClassifierModel& model,
                             const LabeledDataset& ds, int k);

/// Single file: magic line, little-endian u64 header length, JSON header,
/// then every parameter as little-endian float32 in flat order.
void save_model(const ClassifierModel& model,
                const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

/// Dataset features as a double matrix.
Matrix to_matrix(const FeatureMatrix& features);

}  // namespace genmetric
