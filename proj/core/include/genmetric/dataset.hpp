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
#include <string>
#include <utility>
#include <vector>

#include "genmetric/types.hpp"

namespace genmetric {

class ConditionalGenerator;

/// N labeled feature vectors of dimension D over K classes. Immutable once
/// constructed; the constructor enforces every invariant (labels in range,
/// finite features, N, D >= 1, K >= 2).
class LabeledDataset {
 public:
  LabeledDataset(FeatureMatrix features, std::vector<Label> labels,
                 int num_classes, std::string name = "dataset");

  std::size_t size() const { return labels_.size(); }
  int dim() const { return static_cast<int>(features_.cols()); }
  int num_classes() const { return num_classes_; }
  const std::string& name() const { return name_; }

  const FeatureMatrix& features() const { return features_; }
  const std::vector<Label>& labels() const { return labels_; }
  Label label(std::size_t i) const { return labels_[i]; }
  /// Row i widened to double.
  Vector row(std::size_t i) const;

  /// Same rows, different name.
  LabeledDataset renamed(std::string name) const;

  friend bool operator==(const LabeledDataset& a, const LabeledDataset& b);

 private:
  FeatureMatrix features_;
  std::vector<Label> labels_;
  int num_classes_;
  std::string name_;
};

/// Dataset directory layout.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kFeatureFile = "features.f32le";
inline constexpr const char* kLabelFile = "labels.u32le";
inline constexpr int kManifestVersion = 1;

/// 64-bit FNV-1a over the feature payload bytes followed by the label
/// payload bytes, both little-endian.
std::uint64_t payload_checksum(const LabeledDataset& ds);

/// Writes manifest.json, features.f32le and labels.u32le into `dir`
/// (created if needed).
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& dir);

/// Throws IoError for missing files, CorruptionError for length or checksum
/// mismatches, ConfigError for invalid contents.
LabeledDataset load_dataset(const std::filesystem::path& dir);

std::vector<std::size_t> class_histogram(const LabeledDataset& ds);

/// Replaces every example of `templ` with a generator draw of the same
/// class. Row order, labels and histogram are preserved.
LabeledDataset build_replacement_set(const ConditionalGenerator& gen,
                                     const LabeledDataset& templ, Rng& rng);

/// Real rows unchanged, followed by floor(fraction * count_c) synthetic rows
/// for each class c in ascending class order.
LabeledDataset build_augmented_set(const LabeledDataset& real,
                                   const ConditionalGenerator& gen,
                                   double fraction, Rng& rng);

/// Number of synthetic rows build_augmented_set adds for a class with
/// `class_count` real examples.
std::size_t augmented_count(std::size_t class_count, double fraction);

struct SplitResult {
  LabeledDataset train;
  LabeledDataset test;
};

/// Per class, round(test_fraction * count) randomly chosen examples go to
/// test. Both halves keep the original relative row order.
SplitResult stratified_split(const LabeledDataset& ds, double test_fraction,
                             Rng& rng);

/// Row subset in the given order.
LabeledDataset select_rows(const LabeledDataset& ds,
                           const std::vector<std::size_t>& rows,
                           std::string name);

}  // namespace genmetric
