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

#include <memory>
#include <string>
#include <vector>

#include "genmetric/dataset.hpp"
#include "genmetric/types.hpp"

namespace genmetric {

/// p(x | y) for y in [0, K). Implementations are immutable; all randomness
/// comes from the caller's Rng.
class ConditionalGenerator {
 public:
  virtual ~ConditionalGenerator() = default;

  virtual int num_classes() const = 0;
  virtual int dim() const = 0;
  virtual std::string kind() const = 0;

  /// One draw x ~ p(x | label). Throws ConfigError for an out-of-range label.
  Vector sample(Label label, Rng& rng) const;

  /// Draw used for the `slot`-th example of class `label` when building a
  /// replacement set. Defaults to an independent sample().
  virtual Vector sample_for_slot(Label label, std::size_t slot, Rng& rng) const;

  virtual bool has_exact_likelihood() const { return false; }

  /// ln p(x | label) in nats. Throws CapabilityError unless
  /// has_exact_likelihood().
  virtual double log_likelihood(const Vector& x, Label label) const;

 protected:
  void check_label(Label label) const;
  virtual Vector draw(Label label, Rng& rng) const = 0;
};

using GeneratorPtr = std::shared_ptr<const ConditionalGenerator>;

/// Gaussian class conditionals N(mean_c, cov_c) with class priors.
class GaussianClassConditional final : public ConditionalGenerator {
 public:
  /// `means` is K x D (one row per class). Covariances must be symmetric with
  /// minimum eigenvalue >= kMinEigenvalue.
  GaussianClassConditional(Matrix means, std::vector<Matrix> covariances,
                           Vector priors);

  /// Shared sigma^2 I covariance; any sigma > 0 is accepted.
  static GaussianClassConditional isotropic(Matrix means, double sigma,
                                            Vector priors);

  static constexpr double kMinEigenvalue = 1e-9;

  int num_classes() const override { return static_cast<int>(means_.rows()); }
  int dim() const override { return static_cast<int>(means_.cols()); }
  std::string kind() const override { return "gaussian"; }
  bool has_exact_likelihood() const override { return true; }
  double log_likelihood(const Vector& x, Label label) const override;

  const Matrix& means() const { return means_; }
  const Matrix& covariance(Label c) const { return covariances_[c]; }
  const Vector& priors() const { return priors_; }

 protected:
  Vector draw(Label label, Rng& rng) const override;

 private:
  GaussianClassConditional() = default;
  void finish_init();

  Matrix means_;
  std::vector<Matrix> covariances_;
  std::vector<Matrix> cholesky_;  // lower factors
  std::vector<double> log_det_;
  Vector priors_;
};

/// With probability p a draw from `base`, otherwise a uniform draw from the
/// axis-aligned box [low, high]. The box must carry negligible base density;
/// this is checked by sampling at construction.
class NoiseMixtureGenerator final : public ConditionalGenerator {
 public:
  NoiseMixtureGenerator(GeneratorPtr base, double mix_prob, Vector low,
                        Vector high);

  /// Largest base density allowed at a sampled box point.
  static constexpr double kMaxBaseDensity = 1e-12;

  int num_classes() const override { return base_->num_classes(); }
  int dim() const override { return base_->dim(); }
  std::string kind() const override { return "noise_mixture"; }
  bool has_exact_likelihood() const override {
    return base_->has_exact_likelihood();
  }
  double log_likelihood(const Vector& x, Label label) const override;

  const ConditionalGenerator& base() const { return *base_; }
  double mix_prob() const { return mix_prob_; }
  bool in_box(const Vector& x) const;
  /// ln of the uniform box density, -sum ln(high - low).
  double log_box_density() const { return log_box_density_; }

 protected:
  Vector draw(Label label, Rng& rng) const override;

 private:
  GeneratorPtr base_;
  double mix_prob_;
  Vector low_;
  Vector high_;
  double log_box_density_;
};

/// Returns stored examples of the requested class.
class MemorizingGenerator final : public ConditionalGenerator {
 public:
  enum class Mode {
    /// Uniform with replacement among the class's source rows.
    kResample,
    /// Slot j of class c returns the j-th source row of class c (cyclically),
    /// so a replacement set over the source is an exact copy of it.
    kIdentityCopy,
  };

  explicit MemorizingGenerator(LabeledDataset source,
                               Mode mode = Mode::kResample);

  int num_classes() const override { return source_.num_classes(); }
  int dim() const override { return source_.dim(); }
  std::string kind() const override { return "memorizer"; }
  Vector sample_for_slot(Label label, std::size_t slot,
                         Rng& rng) const override;

  const LabeledDataset& source() const { return source_; }
  Mode mode() const { return mode_; }

 protected:
  Vector draw(Label label, Rng& rng) const override;

 private:
  LabeledDataset source_;
  Mode mode_;
  std::vector<std::vector<std::size_t>> rows_by_class_;
};

enum class Nonlinearity { kIdentity, kTanh };

/// x = f(W_c z + b_c) with z a truncated standard normal latent of
/// dimension L (every coordinate restricted to [-2 tau, 2 tau]).
class TruncatedLatentGenerator final : public ConditionalGenerator {
 public:
  /// weights[c] is D x L, biases[c] has length D.
  TruncatedLatentGenerator(int latent_dim, std::vector<Matrix> weights,
                           std::vector<Vector> biases,
                           Nonlinearity nonlinearity, double tau);

  int num_classes() const override { return static_cast<int>(weights_.size()); }
  int dim() const override { return static_cast<int>(biases_.front().size()); }
  std::string kind() const override { return "truncated_latent"; }

  double tau() const { return tau_; }
  int latent_dim() const { return latent_dim_; }
  TruncatedLatentGenerator with_tau(double tau) const;

 protected:
  Vector draw(Label label, Rng& rng) const override;

 private:
  int latent_dim_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
  Nonlinearity nonlinearity_;
  double tau_;
};

/// i.i.d. standard normal coordinates conditioned on [-2 tau, 2 tau]; any
/// coordinate falling outside is redrawn. Throws ConfigError for tau <= 0.
Vector truncated_normal_sample(double tau, int dim, Rng& rng);

struct Posterior {
  Vector probs;
  /// Every class had zero joint density at x; `probs` is uniform.
  bool degenerate = false;
};

/// p(y | x) = p(x | y) p(y) / p(x), evaluated in log space.
Posterior bayes_posterior(const ConditionalGenerator& gen, const Vector& x,
                          const Vector& priors);

/// Top-1 accuracy of the Bayes posterior argmax (ties to the lowest class).
AccuracyResult bayes_classify(const ConditionalGenerator& gen,
                              const LabeledDataset& ds, const Vector& priors);

}  // namespace genmetric
