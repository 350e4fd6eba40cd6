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
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace genmetric {

using Label = std::uint32_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Row-major float storage for dataset features; rows are examples. Matches
/// the on-disk layout so save/load is a straight copy.
using FeatureMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Every stochastic operation takes one of these explicitly.
using Rng = std::mt19937_64;

}  // namespace genmetric

namespace genmetric {

/// Top-k (or Bayes) accuracy with its per-class breakdown. Classes without
/// examples carry NaN in `per_class` and zero in `class_counts`.
struct AccuracyResult {
  double accuracy = 0.0;
  Vector per_class;
  std::vector<std::size_t> class_counts;
};

}  // namespace genmetric
