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
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "genmetric/classifier.hpp"
#include "genmetric/types.hpp"

namespace genmetric {

/// Feature space in which FID and KID are computed.
struct EmbedderSpec {
  enum class Kind { kIdentity, kProjection, kPenultimate };
  Kind kind = Kind::kPenultimate;
  int dim = 0;  // projection output dimension
  std::optional<std::uint64_t> seed;  // projection matrix seed

  std::string kind_name() const;
};

class Embedder {
 public:
  /// `model` is required for kPenultimate and ignored otherwise.
  Embedder(const EmbedderSpec& spec, int input_dim,
           std::shared_ptr<const ClassifierModel> model = nullptr);

  Matrix embed(const Matrix& x) const;
  Matrix embed(const FeatureMatrix& x) const;
  int output_dim() const { return output_dim_; }
  const EmbedderSpec& spec() const { return spec_; }
  /// M x D projection matrix (kProjection only).
  const Matrix& projection() const { return projection_; }

 private:
  EmbedderSpec spec_;
  int input_dim_;
  int output_dim_;
  Matrix projection_;
  std::shared_ptr<const ClassifierModel> model_;
};

struct MomentStats {
  Vector mean;
  Matrix cov;
  std::size_t n = 0;
};

/// Mean and unbiased (N - 1) covariance of the rows. Requires N >= 2.
MomentStats moment_stats(const Matrix& features);

/// Eigenvalues below this are treated as zero in sqrtm_psd.
inline constexpr double kEigenClampTolerance = 1e-10;

/// Principal square root of a symmetric PSD matrix via symmetric
/// eigendecomposition. Throws ConfigError if `a` is not symmetric within
/// 1e-8 (relative to its largest entry).
Matrix sqrtm_psd(const Matrix& a);

/// ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}), with the cross term
/// taken as tr(sqrtm(S_a^{1/2} S_b S_a^{1/2})). Results in [-1e-6, 0) are
/// clamped to 0.
double fid(const MomentStats& a, const MomentStats& b);

struct ScoreSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over splits
};

/// exp(mean KL(p(y|x) || p(y))) per split, with p(y) the split's row mean.
/// Rows beyond splits * floor(N / splits) are dropped.
ScoreSummary inception_style_score(const Matrix& probs, int splits);

struct KidParams {
  int degree = 3;
  double coef = 1.0;
  double scale = 0.0;  // 0 means 1 / M
};

double polynomial_kernel(const Vector& x, const Vector& y,
                         const KidParams& params);

/// Unbiased MMD^2 between the row sets of `a` and `b` under
/// (scale <x, y> + coef)^degree; within-set diagonals are excluded.
double kid(const Matrix& a, const Matrix& b, const KidParams& params = {});

/// Mean over rows of sum_k (p_k - onehot_k)^2.
double brier_score(const Matrix& probs, std::span<const Label> labels);

/// Sample Pearson correlation. Throws ConfigError on length mismatch,
/// fewer than 2 points, or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace genmetric
