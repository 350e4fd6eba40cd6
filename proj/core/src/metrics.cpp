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

#include "genmetric/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "genmetric/error.hpp"

namespace genmetric {

// Embedding -----------------------------------------------------------------

std::string EmbedderSpec::kind_name() const {
  switch (kind) {
    case Kind::kIdentity:
      return "identity";
    case Kind::kProjection:
      return "projection";
    case Kind::kPenultimate:
      return "penultimate";
  }
  return "unknown";
}

Embedder::Embedder(const EmbedderSpec& spec, int input_dim,
                   std::shared_ptr<const ClassifierModel> model)
    : spec_(spec), input_dim_(input_dim), model_(std::move(model)) {
  if (input_dim_ < 1) throw ConfigError("embedder input dimension must be >= 1");
  switch (spec_.kind) {
    case EmbedderSpec::Kind::kIdentity:
      output_dim_ = input_dim_;
      break;
    case EmbedderSpec::Kind::kProjection: {
      if (!spec_.seed) throw ConfigError("projection embedder needs a seed");
      if (spec_.dim < 1 || spec_.dim > input_dim_) {
        throw ConfigError("projection dimension must lie in [1, D]");
      }
      output_dim_ = spec_.dim;
      Rng rng(*spec_.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      const double norm = 1.0 / std::sqrt(static_cast<double>(input_dim_));
      projection_.resize(output_dim_, input_dim_);
      for (int r = 0; r < output_dim_; ++r) {
        for (int c = 0; c < input_dim_; ++c) projection_(r, c) = normal(rng) * norm;
      }
      break;
    }
    case EmbedderSpec::Kind::kPenultimate:
      if (!model_) throw ConfigError("penultimate embedder needs a classifier");
      if (model_->input_dim() != input_dim_) {
        throw ConfigError("classifier input dimension does not match");
      }
      output_dim_ = model_->penultimate_dim();
      break;
  }
}

Matrix Embedder::embed(const Matrix& x) const {
  if (x.cols() != input_dim_) throw ConfigError("embedder dimension mismatch");
  switch (spec_.kind) {
    case EmbedderSpec::Kind::kIdentity:
      return x;
    case EmbedderSpec::Kind::kProjection:
      return x * projection_.transpose();
    case EmbedderSpec::Kind::kPenultimate:
      return model_->penultimate(x);
  }
  return x;
}

Matrix Embedder::embed(const FeatureMatrix& x) const {
  return embed(Matrix(x.cast<double>()));
}

// Moments and FID -----------------------------------------------------------

MomentStats moment_stats(const Matrix& features) {
  if (features.rows() < 2) throw ConfigError("moment_stats needs N >= 2");
  MomentStats s;
  s.n = static_cast<std::size_t>(features.rows());
  s.mean = features.colwise().mean().transpose();
  const Matrix centered = features.rowwise() - s.mean.transpose();
  const Matrix cov = centered.transpose() * centered /
                     static_cast<double>(features.rows() - 1);
  s.cov = 0.5 * (cov + cov.transpose());
  return s;
}

Matrix sqrtm_psd(const Matrix& a) {
  if (a.rows() != a.cols()) throw ConfigError("sqrtm_psd needs a square matrix");
  if (a.size() == 0) return a;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (!a.allFinite() ||
      (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw ConfigError("sqrtm_psd input is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.transpose()));
  Vector root = eig.eigenvalues();
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    root(i) = root(i) < kEigenClampTolerance ? 0.0 : std::sqrt(root(i));
  }
  const Matrix& v = eig.eigenvectors();
  const Matrix r = v * root.asDiagonal() * v.transpose();
  return 0.5 * (r + r.transpose());
}

double fid(const MomentStats& a, const MomentStats& b) {
  if (a.mean.size() != b.mean.size() || a.cov.rows() != b.cov.rows()) {
    throw ConfigError("FID inputs have different dimensions");
  }
  const Matrix a_half = sqrtm_psd(a.cov);
  Matrix inner = a_half * b.cov * a_half;
  inner = 0.5 * (inner + inner.transpose());
  const double cross = sqrtm_psd(inner).trace();
  const double value = (a.mean - b.mean).squaredNorm() + a.cov.trace() +
                       b.cov.trace() - 2.0 * cross;
  if (value < 0.0 && value >= -1e-6) return 0.0;
  return value;
}

// Inception-style score -----------------------------------------------------

ScoreSummary inception_style_score(const Matrix& probs, int splits) {
  constexpr double kFloor = 1e-12;
  if (splits < 1) throw ConfigError("splits must be >= 1");
  if (probs.rows() < splits) throw ConfigError("fewer rows than splits");
  if ((probs.array() < -1e-6).any() ||
      ((probs.rowwise().sum().array() - 1.0).abs() > 1e-6).any()) {
    throw ConfigError("score rows must lie on the simplex");
  }
  const Eigen::Index part = probs.rows() / splits;
  std::vector<double> scores;
  for (int s = 0; s < splits; ++s) {
    const auto block = probs.middleRows(s * part, part);
    const Vector marginal = block.colwise().mean().transpose();
    double kl_sum = 0.0;
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      for (Eigen::Index c = 0; c < block.cols(); ++c) {
        const double p = block(i, c);
        if (p <= 0.0) continue;
        kl_sum += p * (std::log(std::max(p, kFloor)) -
                       std::log(std::max(marginal(c), kFloor)));
      }
    }
    scores.push_back(std::exp(kl_sum / static_cast<double>(part)));
  }
  ScoreSummary out;
  for (double v : scores) out.mean += v;
  out.mean /= static_cast<double>(scores.size());
  if (scores.size() > 1) {
    double ss = 0.0;
    for (double v : scores) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(scores.size() - 1));
  }
  return out;
}

// KID -----------------------------------------------------------------------

namespace {

double resolved_scale(const KidParams& p, Eigen::Index dim) {
  return p.scale > 0.0 ? p.scale : 1.0 / static_cast<double>(dim);
}

// Sum of kernel values over all (i, j) pairs, optionally skipping i == j
// (only meaningful when x and y are the same matrix).
double kernel_sum(const Matrix& x, const Matrix& y, const KidParams& p,
                  bool skip_diagonal) {
  constexpr Eigen::Index kBlock = 256;
  const double scale = resolved_scale(p, x.cols());
  double total = 0.0;
  for (Eigen::Index start = 0; start < x.rows(); start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, x.rows() - start);
    Matrix k = (scale * (x.middleRows(start, rows) * y.transpose())).array() + p.coef;
    const Matrix base = k;
    for (int d = 1; d < p.degree; ++d) k.array() *= base.array();
    if (skip_diagonal) {
      for (Eigen::Index i = 0; i < rows; ++i) k(i, start + i) = 0.0;
    }
    total += k.sum();
  }
  return total;
}

}  // namespace

double polynomial_kernel(const Vector& x, const Vector& y,
                         const KidParams& params) {
  if (x.size() != y.size()) throw ConfigError("kernel dimension mismatch");
  return std::pow(resolved_scale(params, x.size()) * x.dot(y) + params.coef,
                  params.degree);
}

double kid(const Matrix& a, const Matrix& b, const KidParams& params) {
  if (a.cols() != b.cols()) throw ConfigError("KID inputs differ in dimension");
  if (a.rows() < 2 || b.rows() < 2) throw ConfigError("KID needs >= 2 rows each");
  if (params.degree < 1) throw ConfigError("KID degree must be >= 1");
  const auto m = static_cast<double>(a.rows());
  const auto n = static_cast<double>(b.rows());
  const double kxx = kernel_sum(a, a, params, true) / (m * (m - 1.0));
  const double kyy = kernel_sum(b, b, params, true) / (n * (n - 1.0));
  const double kxy = kernel_sum(a, b, params, false) / (m * n);
  return kxx + kyy - 2.0 * kxy;
}

// Brier and correlation -----------------------------------------------------

double brier_score(const Matrix& probs, std::span<const Label> labels) {
  if (static_cast<std::size_t>(probs.rows()) != labels.size() || labels.empty()) {
    throw ConfigError("brier_score needs one label per row");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const Label y = labels[static_cast<std::size_t>(i)];
    if (y >= static_cast<Label>(probs.cols())) throw ConfigError("label out of range");
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      const double target = static_cast<Label>(c) == y ? 1.0 : 0.0;
      total += (probs(i, c) - target) * (probs(i, c) - target);
    }
  }
  return total / static_cast<double>(probs.rows());
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ConfigError("pearson length mismatch");
  if (xs.size() < 2) throw ConfigError("pearson needs >= 2 points");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw ConfigError("pearson undefined for zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace genmetric
