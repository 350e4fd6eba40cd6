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

#include "genmetric/generators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "genmetric/error.hpp"

namespace genmetric {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

Vector standard_normal(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(dim);
  for (int i = 0; i < dim; ++i) z(i) = normal(rng);
  return z;
}

}  // namespace

// ConditionalGenerator ------------------------------------------------------

Vector ConditionalGenerator::sample(Label label, Rng& rng) const {
  check_label(label);
  return draw(label, rng);
}

Vector ConditionalGenerator::sample_for_slot(Label label, std::size_t /*slot*/,
                                             Rng& rng) const {
  return sample(label, rng);
}

double ConditionalGenerator::log_likelihood(const Vector& /*x*/,
                                            Label /*label*/) const {
  throw CapabilityError(kind() + " generator has no exact likelihood");
}

void ConditionalGenerator::check_label(Label label) const {
  if (label >= static_cast<Label>(num_classes())) {
    throw ConfigError("class " + std::to_string(label) + " out of range [0, " +
                      std::to_string(num_classes()) + ")");
  }
}

// GaussianClassConditional -------------------------------------------------

GaussianClassConditional::GaussianClassConditional(
    Matrix means, std::vector<Matrix> covariances, Vector priors) {
  means_ = std::move(means);
  covariances_ = std::move(covariances);
  priors_ = std::move(priors);
  if (static_cast<std::size_t>(means_.rows()) != covariances_.size()) {
    throw ConfigError("need one covariance per class");
  }
  for (const Matrix& cov : covariances_) {
    if (cov.rows() != means_.cols() || cov.cols() != means_.cols()) {
      throw ConfigError("covariance shape does not match mean dimension");
    }
    if (!cov.allFinite() ||
        (cov - cov.transpose()).cwiseAbs().maxCoeff() >
            1e-12 * (1.0 + cov.cwiseAbs().maxCoeff())) {
      throw ConfigError("covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < kMinEigenvalue) {
      throw ConfigError("degenerate covariance (min eigenvalue below 1e-9)");
    }
  }
  finish_init();
}

GaussianClassConditional GaussianClassConditional::isotropic(Matrix means,
                                                             double sigma,
                                                             Vector priors) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be positive");
  }
  GaussianClassConditional g;
  const auto d = means.cols();
  g.covariances_.assign(static_cast<std::size_t>(means.rows()),
                        Matrix::Identity(d, d) * sigma * sigma);
  g.means_ = std::move(means);
  g.priors_ = std::move(priors);
  g.finish_init();
  return g;
}

void GaussianClassConditional::finish_init() {
  if (means_.rows() < 2 || means_.cols() < 1) {
    throw ConfigError("gaussian generator needs K >= 2 classes and D >= 1");
  }
  if (!means_.allFinite()) throw ConfigError("non-finite class mean");
  if (priors_.size() != means_.rows()) {
    throw ConfigError("priors length must equal class count");
  }
  if ((priors_.array() < 0.0).any() || std::abs(priors_.sum() - 1.0) > 1e-12) {
    throw ConfigError("priors must be a probability vector");
  }
  cholesky_.clear();
  log_det_.clear();
  for (const Matrix& cov : covariances_) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw ConfigError("covariance is not positive definite");
    }
    Matrix l = llt.matrixL();
    log_det_.push_back(2.0 * l.diagonal().array().log().sum());
    cholesky_.push_back(std::move(l));
  }
}

double GaussianClassConditional::log_likelihood(const Vector& x,
                                                Label label) const {
  check_label(label);
  if (x.size() != means_.cols()) throw ConfigError("dimension mismatch");
  const Vector diff = x - means_.row(label).transpose();
  const Vector white =
      cholesky_[label].triangularView<Eigen::Lower>().solve(diff);
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det_[label] +
                 white.squaredNorm());
}

Vector GaussianClassConditional::draw(Label label, Rng& rng) const {
  return means_.row(label).transpose() +
         cholesky_[label] * standard_normal(dim(), rng);
}

// NoiseMixtureGenerator ----------------------------------------------------

NoiseMixtureGenerator::NoiseMixtureGenerator(GeneratorPtr base,
                                             double mix_prob, Vector low,
                                             Vector high)
    : base_(std::move(base)),
      mix_prob_(mix_prob),
      low_(std::move(low)),
      high_(std::move(high)) {
  if (!base_) throw ConfigError("noise mixture needs a base generator");
  if (!(mix_prob_ > 0.0 && mix_prob_ <= 1.0)) {
    throw ConfigError("mix_prob must lie in (0, 1]");
  }
  if (low_.size() != base_->dim() || high_.size() != base_->dim()) {
    throw ConfigError("noise box dimension does not match base generator");
  }
  if (!low_.allFinite() || !high_.allFinite() ||
      !(high_.array() > low_.array()).all()) {
    throw ConfigError("noise box must satisfy high > low componentwise");
  }
  log_box_density_ = -(high_ - low_).array().log().sum();

  // Sampling check that the box sits outside the base support.
  constexpr int kChecks = 256;
  Rng check_rng(0x6e6f697365626f78ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < base_->num_classes(); ++c) {
    const auto label = static_cast<Label>(c);
    for (int i = 0; i < kChecks; ++i) {
      if (base_->has_exact_likelihood()) {
        Vector u(low_.size());
        for (Eigen::Index j = 0; j < u.size(); ++j) {
          u(j) = low_(j) + (high_(j) - low_(j)) * unit(check_rng);
        }
        if (base_->log_likelihood(u, label) > std::log(kMaxBaseDensity)) {
          throw ConfigError("noise box overlaps the support of class " +
                            std::to_string(c));
        }
      } else if (in_box(base_->sample(label, check_rng))) {
        throw ConfigError("base samples of class " + std::to_string(c) +
                          " fall inside the noise box");
      }
    }
  }
}

bool NoiseMixtureGenerator::in_box(const Vector& x) const {
  return (x.array() >= low_.array()).all() && (x.array() <= high_.array()).all();
}

double NoiseMixtureGenerator::log_likelihood(const Vector& x,
                                             Label label) const {
  check_label(label);
  const double from_base = std::log(mix_prob_) + base_->log_likelihood(x, label);
  if (!in_box(x) || mix_prob_ == 1.0) return from_base;
  return log_add_exp(from_base, std::log1p(-mix_prob_) + log_box_density_);
}

Vector NoiseMixtureGenerator::draw(Label label, Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (mix_prob_ == 1.0 || unit(rng) < mix_prob_) return base_->sample(label, rng);
  Vector u(low_.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    u(j) = low_(j) + (high_(j) - low_(j)) * unit(rng);
  }
  return u;
}

// MemorizingGenerator ------------------------------------------------------

MemorizingGenerator::MemorizingGenerator(LabeledDataset source, Mode mode)
    : source_(std::move(source)), mode_(mode) {
  rows_by_class_.resize(static_cast<std::size_t>(source_.num_classes()));
  for (std::size_t i = 0; i < source_.size(); ++i) {
    rows_by_class_[source_.label(i)].push_back(i);
  }
  for (std::size_t c = 0; c < rows_by_class_.size(); ++c) {
    if (rows_by_class_[c].empty()) {
      throw ConfigError("memorizer source has no example of class " +
                        std::to_string(c));
    }
  }
}

Vector MemorizingGenerator::draw(Label label, Rng& rng) const {
  const auto& rows = rows_by_class_[label];
  std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
  return source_.row(rows[pick(rng)]);
}

Vector MemorizingGenerator::sample_for_slot(Label label, std::size_t slot,
                                            Rng& rng) const {
  check_label(label);
  if (mode_ == Mode::kResample) return draw(label, rng);
  const auto& rows = rows_by_class_[label];
  return source_.row(rows[slot % rows.size()]);
}

// TruncatedLatentGenerator -------------------------------------------------

Vector truncated_normal_sample(double tau, int dim, Rng& rng) {
  if (!(tau > 0.0)) throw ConfigError("truncation tau must be positive");
  if (dim < 0) throw ConfigError("negative dimension");
  const double bound = 2.0 * tau;
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(dim);
  for (int i = 0; i < dim; ++i) {
    double v;
    do {
      v = normal(rng);
    } while (v < -bound || v > bound);
    z(i) = v;
  }
  return z;
}

TruncatedLatentGenerator::TruncatedLatentGenerator(
    int latent_dim, std::vector<Matrix> weights, std::vector<Vector> biases,
    Nonlinearity nonlinearity, double tau)
    : latent_dim_(latent_dim),
      weights_(std::move(weights)),
      biases_(std::move(biases)),
      nonlinearity_(nonlinearity),
      tau_(tau) {
  if (latent_dim_ < 1) throw ConfigError("latent_dim must be >= 1");
  if (!(tau_ > 0.0) || !std::isfinite(tau_)) {
    throw ConfigError("truncation tau must be positive");
  }
  if (weights_.size() < 2 || weights_.size() != biases_.size()) {
    throw ConfigError("need one weight/bias pair per class, K >= 2");
  }
  const auto d = biases_.front().size();
  if (d < 1) throw ConfigError("output dimension must be >= 1");
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    if (weights_[c].rows() != d || weights_[c].cols() != latent_dim_ ||
        biases_[c].size() != d) {
      throw ConfigError("class " + std::to_string(c) +
                        ": weight must be D x L and bias length D");
    }
    if (!weights_[c].allFinite() || !biases_[c].allFinite()) {
      throw ConfigError("non-finite latent map");
    }
  }
}

TruncatedLatentGenerator TruncatedLatentGenerator::with_tau(double tau) const {
  return TruncatedLatentGenerator(latent_dim_, weights_, biases_,
                                  nonlinearity_, tau);
}

Vector TruncatedLatentGenerator::draw(Label label, Rng& rng) const {
  Vector x = weights_[label] * truncated_normal_sample(tau_, latent_dim_, rng) +
             biases_[label];
  if (nonlinearity_ == Nonlinearity::kTanh) x = x.array().tanh();
  return x;
}

// Bayes inference ----------------------------------------------------------

Posterior bayes_posterior(const ConditionalGenerator& gen, const Vector& x,
                          const Vector& priors) {
  const int k = gen.num_classes();
  if (!gen.has_exact_likelihood()) {
    throw CapabilityError(gen.kind() + " generator has no exact likelihood");
  }
  if (priors.size() != k || (priors.array() < 0.0).any() ||
      std::abs(priors.sum() - 1.0) > 1e-9) {
    throw ConfigError("priors must be a probability vector of length K");
  }
  Vector log_joint(k);
  for (int c = 0; c < k; ++c) {
    log_joint(c) = priors(c) > 0.0
                       ? gen.log_likelihood(x, static_cast<Label>(c)) +
                             std::log(priors(c))
                       : kNegInf;
  }
  const double m = log_joint.maxCoeff();
  Posterior post;
  if (!(m > kNegInf) || std::isnan(m)) {
    post.probs = Vector::Constant(k, 1.0 / k);
    post.degenerate = true;
    return post;
  }
  post.probs = (log_joint.array() - m).exp();
  post.probs /= post.probs.sum();
  return post;
}

AccuracyResult bayes_classify(const ConditionalGenerator& gen,
                              const LabeledDataset& ds, const Vector& priors) {
  const auto k = static_cast<std::size_t>(ds.num_classes());
  std::vector<std::size_t> correct(k, 0);
  AccuracyResult result;
  result.class_counts.assign(k, 0);
  std::size_t total_correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Posterior post = bayes_posterior(gen, ds.row(i), priors);
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < post.probs.size(); ++c) {
      if (post.probs(c) > post.probs(best)) best = c;
    }
    const Label truth = ds.label(i);
    ++result.class_counts[truth];
    if (static_cast<Label>(best) == truth) {
      ++correct[truth];
      ++total_correct;
    }
  }
  result.accuracy =
      static_cast<double>(total_correct) / static_cast<double>(ds.size());
  result.per_class = Vector(static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) {
    result.per_class(static_cast<Eigen::Index>(c)) =
        result.class_counts[c] == 0
            ? std::numeric_limits<double>::quiet_NaN()
            : static_cast<double>(correct[c]) /
                  static_cast<double>(result.class_counts[c]);
  }
  return result;
}

}  // namespace genmetric
