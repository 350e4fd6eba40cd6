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

#include "genmetric/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "genmetric/error.hpp"

namespace genmetric {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ModelAccess {
  static std::vector<DenseLayer>& layers(ClassifierModel& m) {
    return m.layers_;
  }
};

namespace {

Matrix activate(const Matrix& z, Activation act) {
  if (act == Activation::kTanh) return z.array().tanh().matrix();
  return z.cwiseMax(0.0);
}

// Derivative expressed through the pre-activation.
Matrix activation_grad(const Matrix& z, Activation act) {
  if (act == Activation::kTanh) {
    return (1.0 - z.array().tanh().square()).matrix();
  }
  return (z.array() > 0.0).cast<double>().matrix();
}

Matrix affine(const Matrix& a, const DenseLayer& layer) {
  Matrix z = a * layer.weight.transpose();
  z.rowwise() += layer.bias.transpose();
  return z;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p = logits;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double m = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

struct BatchResult {
  double cross_entropy = 0.0;  // mean, without weight decay
  double loss = 0.0;           // cross_entropy + decay term
  std::vector<DenseLayer> grads;
};

// Forward and backward on already-standardized inputs.
BatchResult batch_loss_grad(const std::vector<DenseLayer>& layers,
                            Activation act, const Matrix& x,
                            std::span<const Label> labels,
                            double weight_decay) {
  const auto n = x.rows();
  std::vector<Matrix> pre;   // pre-activations per layer
  std::vector<Matrix> post;  // layer inputs
  post.push_back(x);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    pre.push_back(affine(post.back(), layers[l]));
    if (l + 1 < layers.size()) post.push_back(activate(pre.back(), act));
  }
  const Matrix& logits = pre.back();

  BatchResult r;
  Matrix delta(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = logits.row(i).maxCoeff();
    const auto shifted = (logits.row(i).array() - m).eval();
    const double lse = std::log(shifted.exp().sum());
    const Label y = labels[static_cast<std::size_t>(i)];
    r.cross_entropy += lse - shifted(y);
    delta.row(i) = (shifted - lse).exp().matrix();
    delta(i, y) -= 1.0;
  }
  r.cross_entropy /= static_cast<double>(n);
  delta /= static_cast<double>(n);

  double decay = 0.0;
  for (const auto& layer : layers) decay += layer.weight.squaredNorm();
  r.loss = r.cross_entropy + 0.5 * weight_decay * decay;

  r.grads.resize(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    r.grads[l].weight = delta.transpose() * post[l] + weight_decay * layers[l].weight;
    r.grads[l].bias = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * layers[l].weight).cwiseProduct(
          activation_grad(pre[l - 1], act));
    }
  }
  return r;
}

Vector flatten(const std::vector<DenseLayer>& layers) {
  std::size_t total = 0;
  for (const auto& l : layers) total += l.weight.size() + l.bias.size();
  Vector flat(static_cast<Eigen::Index>(total));
  Eigen::Index pos = 0;
  for (const auto& l : layers) {
    Eigen::Map<RowMajorMatrix>(flat.data() + pos, l.weight.rows(),
                               l.weight.cols()) = l.weight;
    pos += l.weight.size();
    flat.segment(pos, l.bias.size()) = l.bias;
    pos += l.bias.size();
  }
  return flat;
}

void unflatten(const Vector& flat, std::vector<DenseLayer>& layers) {
  Eigen::Index pos = 0;
  for (auto& l : layers) {
    l.weight = Eigen::Map<const RowMajorMatrix>(flat.data() + pos,
                                                l.weight.rows(), l.weight.cols());
    pos += l.weight.size();
    l.bias = flat.segment(pos, l.bias.size());
    pos += l.bias.size();
  }
}

const char* activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

}  // namespace

Matrix to_matrix(const FeatureMatrix& features) {
  return features.cast<double>();
}

// Config and schedule -------------------------------------------------------

void ClassifierConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(peak_lr > 0.0)) throw ConfigError("peak_lr must be positive");
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be >= 0");
  for (std::size_t i = 0; i < decay_epochs.size(); ++i) {
    if (decay_epochs[i] >= epochs || decay_epochs[i] < 0 ||
        (i > 0 && decay_epochs[i] <= decay_epochs[i - 1])) {
      throw ConfigError(
          "decay_epochs must be strictly increasing and below epochs");
    }
  }
  if (!(decay_factor > 0.0 && decay_factor < 1.0)) {
    throw ConfigError("decay_factor must lie in (0, 1)");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden widths must be >= 1");
  }
}

double lr_at(const ClassifierConfig& config, int epoch) {
  if (epoch < 0 || epoch >= config.epochs) {
    throw ConfigError("epoch " + std::to_string(epoch) + " out of range");
  }
  if (epoch < config.warmup_epochs) {
    return config.peak_lr * static_cast<double>(epoch + 1) /
           static_cast<double>(config.warmup_epochs);
  }
  const auto decays = std::count_if(config.decay_epochs.begin(),
                                    config.decay_epochs.end(),
                                    [epoch](int e) { return e <= epoch; });
  return config.peak_lr * std::pow(config.decay_factor, static_cast<double>(decays));
}

// Model ---------------------------------------------------------------------

ClassifierModel::ClassifierModel(int input_dim, int num_classes,
                                 std::vector<int> hidden, Activation activation,
                                 Vector feature_mean, Vector feature_scale)
    : input_dim_(input_dim),
      num_classes_(num_classes),
      hidden_(std::move(hidden)),
      activation_(activation),
      feature_mean_(std::move(feature_mean)),
      feature_scale_(std::move(feature_scale)) {
  if (input_dim_ < 1 || num_classes_ < 2) {
    throw ConfigError("classifier needs D >= 1 and K >= 2");
  }
  if (feature_mean_.size() != input_dim_ || feature_scale_.size() != input_dim_) {
    throw ConfigError("standardization vectors must have length D");
  }
  if (!(feature_scale_.array() > 0.0).all()) {
    throw ConfigError("standardization scale must be positive");
  }
  int fan_in = input_dim_;
  std::vector<int> widths = hidden_;
  widths.push_back(num_classes_);
  for (int w : widths) {
    if (w < 1) throw ConfigError("layer widths must be >= 1");
    layers_.push_back({Matrix::Zero(w, fan_in), Vector::Zero(w)});
    fan_in = w;
  }
}

void ClassifierModel::initialize(Rng& rng) {
  for (auto& layer : layers_) {
    const double limit = std::sqrt(
        6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    // Row-major fill so the draw order matches the flat parameter order.
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = dist(rng);
      }
    }
    layer.bias.setZero();
  }
}

std::size_t ClassifierModel::num_parameters() const {
  std::size_t total = 0;
  for (const auto& l : layers_) total += l.weight.size() + l.bias.size();
  return total;
}

Vector ClassifierModel::flat_parameters() const { return flatten(layers_); }

void ClassifierModel::set_flat_parameters(const Vector& params) {
  if (static_cast<std::size_t>(params.size()) != num_parameters()) {
    throw ConfigError("parameter vector has the wrong length");
  }
  unflatten(params, layers_);
}

Matrix ClassifierModel::standardize(const Matrix& x) const {
  if (x.cols() != input_dim_) {
    throw ConfigError("input dimension " + std::to_string(x.cols()) +
                      " differs from model dimension " +
                      std::to_string(input_dim_));
  }
  Matrix s = x.rowwise() - feature_mean_.transpose();
  return s.array().rowwise() / feature_scale_.transpose().array();
}

Matrix ClassifierModel::logits(const Matrix& x) const {
  Matrix a = standardize(x);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    a = affine(a, layers_[l]);
    if (l + 1 < layers_.size()) a = activate(a, activation_);
  }
  return a;
}

Matrix ClassifierModel::predict_proba(const Matrix& x) const {
  return softmax_rows(logits(x));
}

Vector ClassifierModel::predict_proba(const Vector& x) const {
  if (x.size() != input_dim_) {
    throw ConfigError("input dimension " + std::to_string(x.size()) +
                      " differs from model dimension " +
                      std::to_string(input_dim_));
  }
  return predict_proba(Matrix(x.transpose())).row(0).transpose();
}

Matrix ClassifierModel::penultimate(const Matrix& x) const {
  Matrix a = standardize(x);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    a = activate(affine(a, layers_[l]), activation_);
  }
  return a;
}

int ClassifierModel::penultimate_dim() const {
  return hidden_.empty() ? input_dim_ : hidden_.back();
}

bool operator==(const ClassifierModel& a, const ClassifierModel& b) {
  if (a.input_dim_ != b.input_dim_ || a.num_classes_ != b.num_classes_ ||
      a.hidden_ != b.hidden_ || a.activation_ != b.activation_ ||
      a.feature_mean_ != b.feature_mean_ ||
      a.feature_scale_ != b.feature_scale_) {
    return false;
  }
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    if (a.layers_[l].weight != b.layers_[l].weight ||
        a.layers_[l].bias != b.layers_[l].bias) {
      return false;
    }
  }
  return true;
}

// Loss and training ---------------------------------------------------------

LossGradient loss_and_gradient(const ClassifierModel& model,
                               const Matrix& features,
                               std::span<const Label> labels,
                               double weight_decay) {
  if (features.rows() == 0 ||
      static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw ConfigError("batch must be nonempty with one label per row");
  }
  for (Label y : labels) {
    if (y >= static_cast<Label>(model.num_classes())) {
      throw ConfigError("batch label out of range");
    }
  }
  BatchResult r = batch_loss_grad(model.layers(), model.activation(),
                                  model.standardize(features), labels,
                                  weight_decay);
  return {r.loss, flatten(r.grads)};
}

TrainResult train(const LabeledDataset& ds, const ClassifierConfig& config) {
  config.validate();
  const Matrix x = to_matrix(ds.features());
  const auto n = x.rows();

  const Vector mean = x.colwise().mean().transpose();
  Vector scale =
      ((x.rowwise() - mean.transpose()).array().square().colwise().sum() /
       static_cast<double>(n))
          .sqrt()
          .transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (!(scale(j) > 1e-12)) scale(j) = 1.0;
  }

  Rng rng(config.seed);
  ClassifierModel model(ds.dim(), ds.num_classes(), config.hidden,
                        config.activation, mean, scale);
  model.initialize(rng);
  auto& layers = ModelAccess::layers(model);

  const Matrix xs = model.standardize(x);
  const std::vector<Label>& labels = ds.labels();

  TrainingTrace trace;
  trace.initial_loss =
      batch_loss_grad(layers, config.activation, xs, labels, 0.0).cross_entropy;

  std::vector<DenseLayer> velocity;
  for (const auto& l : layers) {
    velocity.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()),
                        Vector::Zero(l.bias.size())});
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(config.batch_size);
  Matrix xb;
  std::vector<Label> yb;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = lr_at(config, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_ce = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t m = std::min(batch, order.size() - start);
      xb.resize(static_cast<Eigen::Index>(m), xs.cols());
      yb.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        xb.row(static_cast<Eigen::Index>(i)) =
            xs.row(static_cast<Eigen::Index>(order[start + i]));
        yb[i] = labels[order[start + i]];
      }
      BatchResult r = batch_loss_grad(layers, config.activation, xb, yb,
                                      config.weight_decay);
      if (!std::isfinite(r.loss)) {
        throw DivergenceError(
            "training diverged (non-finite loss) at epoch " +
                std::to_string(epoch),
            epoch);
      }
      epoch_ce += r.cross_entropy * static_cast<double>(m);
      for (std::size_t l = 0; l < layers.size(); ++l) {
        velocity[l].weight = config.momentum * velocity[l].weight + r.grads[l].weight;
        velocity[l].bias = config.momentum * velocity[l].bias + r.grads[l].bias;
        layers[l].weight -= lr * velocity[l].weight;
        layers[l].bias -= lr * velocity[l].bias;
      }
    }
    trace.epoch_loss.push_back(epoch_ce / static_cast<double>(n));
    trace.epoch_lr.push_back(lr);
  }
  trace.final_train_accuracy = evaluate_topk(model, ds, 1).accuracy;
  return {std::move(model), std::move(trace)};
}

// Prediction ----------------------------------------------------------------

std::vector<Label> topk_labels(const Vector& probs, int k) {
  if (k < 1 || k > probs.size()) {
    throw ConfigError("k=" + std::to_string(k) + " out of range [1, " +
                      std::to_string(probs.size()) + "]");
  }
  std::vector<Label> idx(static_cast<std::size_t>(probs.size()));
  std::iota(idx.begin(), idx.end(), Label{0});
  std::stable_sort(idx.begin(), idx.end(), [&probs](Label a, Label b) {
    return probs(a) > probs(b);
  });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

std::vector<Label> predict_topk(const ClassifierModel& model, const Vector& x,
                                int k) {
  return topk_labels(model.predict_proba(x), k);
}

AccuracyResult evaluate_topk(const ClassifierModel& model,
                             const LabeledDataset& ds, int k) {
  const int classes = model.num_classes();
  if (k < 1 || k > classes) {
    throw ConfigError("k=" + std::to_string(k) + " out of range [1, " +
                      std::to_string(classes) + "]");
  }
  if (ds.num_classes() != classes || ds.dim() != model.input_dim()) {
    throw ConfigError("dataset shape does not match the model");
  }
  const Matrix probs = model.predict_proba(to_matrix(ds.features()));
  const auto kc = static_cast<std::size_t>(ds.num_classes());
  std::vector<std::size_t> correct(kc, 0);
  AccuracyResult result;
  result.class_counts.assign(kc, 0);
  std::size_t total = 0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const Label y = ds.label(static_cast<std::size_t>(i));
    const double py = probs(i, y);
    // Rank under the lower-label tie rule.
    int rank = 0;
    for (int c = 0; c < classes; ++c) {
      const double pc = probs(i, c);
      if (pc > py || (pc == py && c < static_cast<int>(y))) ++rank;
    }
    ++result.class_counts[y];
    if (rank < k) {
      ++correct[y];
      ++total;
    }
  }
  result.accuracy = static_cast<double>(total) / static_cast<double>(ds.size());
  result.per_class = Vector(static_cast<Eigen::Index>(kc));
  for (std::size_t c = 0; c < kc; ++c) {
    result.per_class(static_cast<Eigen::Index>(c)) =
        result.class_counts[c] == 0
            ? std::numeric_limits<double>::quiet_NaN()
            : static_cast<double>(correct[c]) /
                  static_cast<double>(result.class_counts[c]);
  }
  return result;
}

// Serialization -------------------------------------------------------------

namespace {
constexpr char kModelMagic[] = "genmetric-classifier\n";
}

void save_model(const ClassifierModel& model,
                const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little);
  nlohmann::ordered_json header;
  header["version"] = 1;
  header["input_dim"] = model.input_dim();
  header["num_classes"] = model.num_classes();
  header["hidden"] = model.hidden();
  header["activation"] = activation_name(model.activation());
  header["num_parameters"] = model.num_parameters();
  header["feature_mean"] = std::vector<double>(
      model.feature_mean().data(),
      model.feature_mean().data() + model.feature_mean().size());
  header["feature_scale"] = std::vector<double>(
      model.feature_scale().data(),
      model.feature_scale().data() + model.feature_scale().size());
  const std::string text = header.dump();
  const std::uint64_t len = text.size();

  const Vector flat = model.flat_parameters();
  std::vector<float> payload(static_cast<std::size_t>(flat.size()));
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    payload[static_cast<std::size_t>(i)] = static_cast<float>(flat(i));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kModelMagic, sizeof(kModelMagic) - 1);
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!out) throw IoError("write failed: " + path.string());
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string magic(sizeof(kModelMagic) - 1, '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || magic != kModelMagic) {
    throw CorruptionError("not a classifier file: " + path.string());
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || len > (1u << 30)) throw CorruptionError("bad header length");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw CorruptionError("truncated header");

  try {
    const auto header = nlohmann::json::parse(text);
    const auto mean = header.at("feature_mean").get<std::vector<double>>();
    const auto scale = header.at("feature_scale").get<std::vector<double>>();
    const std::string act = header.at("activation").get<std::string>();
    if (act != "tanh" && act != "relu") {
      throw CorruptionError("unknown activation " + act);
    }
    ClassifierModel model(
        header.at("input_dim").get<int>(), header.at("num_classes").get<int>(),
        header.at("hidden").get<std::vector<int>>(),
        act == "tanh" ? Activation::kTanh : Activation::kRelu,
        Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size())),
        Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size())));
    if (header.at("num_parameters").get<std::size_t>() != model.num_parameters()) {
      throw CorruptionError("parameter count does not match architecture");
    }
    std::vector<float> payload(model.num_parameters());
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!in) throw CorruptionError("truncated weight payload");
    if (in.peek() != std::char_traits<char>::eof()) {
      throw CorruptionError("trailing bytes after weight payload");
    }
    Vector flat(static_cast<Eigen::Index>(payload.size()));
    for (std::size_t i = 0; i < payload.size(); ++i) {
      flat(static_cast<Eigen::Index>(i)) = payload[i];
    }
    model.set_flat_parameters(flat);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError("malformed model header: " + std::string(e.what()));
  }
}

}  // namespace genmetric
