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

#include "genmetric/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "genmetric/error.hpp"
#include "genmetric/generators.hpp"

namespace genmetric {

namespace {

static_assert(std::endian::native == std::endian::little,
              "payload I/O assumes a little-endian host");

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    throw ConfigError("dataset dimensions overflow");
  }
  return a * b;
}

void write_file(const std::filesystem::path& path, const void* data,
                std::size_t len) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(len));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

LabeledDataset::LabeledDataset(FeatureMatrix features, std::vector<Label> labels,
                               int num_classes, std::string name)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      name_(std::move(name)) {
  if (num_classes_ < 2) throw ConfigError("dataset needs at least 2 classes");
  if (labels_.empty()) throw ConfigError("dataset is empty");
  if (features_.cols() < 1) throw ConfigError("feature dimension must be >= 1");
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw ConfigError("feature rows and label count differ");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= static_cast<Label>(num_classes_)) {
      throw ConfigError("label " + std::to_string(labels_[i]) + " at row " +
                        std::to_string(i) + " is not below K=" +
                        std::to_string(num_classes_));
    }
  }
  if (!features_.allFinite()) throw ConfigError("non-finite feature value");
}

Vector LabeledDataset::row(std::size_t i) const {
  return features_.row(static_cast<Eigen::Index>(i)).transpose().cast<double>();
}

LabeledDataset LabeledDataset::renamed(std::string name) const {
  LabeledDataset copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

bool operator==(const LabeledDataset& a, const LabeledDataset& b) {
  if (a.num_classes_ != b.num_classes_ || a.labels_ != b.labels_ ||
      a.features_.rows() != b.features_.rows() ||
      a.features_.cols() != b.features_.cols()) {
    return false;
  }
  // Bitwise so that -0.0f and 0.0f are distinguished.
  return std::memcmp(a.features_.data(), b.features_.data(),
                     sizeof(float) * a.features_.size()) == 0;
}

std::uint64_t payload_checksum(const LabeledDataset& ds) {
  std::uint64_t h = fnv1a(ds.features().data(),
                          sizeof(float) * ds.features().size(), kFnvOffset);
  return fnv1a(ds.labels().data(), sizeof(Label) * ds.labels().size(), h);
}

void save_dataset(const LabeledDataset& ds, const std::filesystem::path& dir) {
  const std::size_t n = ds.size();
  const std::size_t d = static_cast<std::size_t>(ds.dim());
  const std::size_t feature_bytes = checked_mul(checked_mul(n, d), sizeof(float));
  const std::size_t label_bytes = checked_mul(n, sizeof(Label));

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  write_file(dir / kFeatureFile, ds.features().data(), feature_bytes);
  write_file(dir / kLabelFile, ds.labels().data(), label_bytes);

  nlohmann::ordered_json manifest;
  manifest["version"] = kManifestVersion;
  manifest["name"] = ds.name();
  manifest["n"] = n;
  manifest["d"] = d;
  manifest["k"] = ds.num_classes();
  manifest["feature_file"] = kFeatureFile;
  manifest["label_file"] = kLabelFile;
  manifest["byte_order"] = "little";
  manifest["checksum"] = hex64(payload_checksum(ds));
  const std::string text = manifest.dump(2) + "\n";
  write_file(dir / kManifestFile, text.data(), text.size());
}

LabeledDataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestFile;
  if (!std::filesystem::exists(manifest_path)) {
    throw IoError("missing manifest: " + manifest_path.string());
  }
  nlohmann::json manifest;
  try {
    const auto bytes = read_file(manifest_path);
    manifest = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest " + manifest_path.string() + ": " +
                      e.what());
  }

  std::size_t n = 0, d = 0;
  int k = 0;
  std::string feature_file, label_file, byte_order, checksum, name;
  try {
    if (manifest.at("version").get<int>() != kManifestVersion) {
      throw ConfigError("unsupported manifest version");
    }
    n = manifest.at("n").get<std::size_t>();
    d = manifest.at("d").get<std::size_t>();
    k = manifest.at("k").get<int>();
    feature_file = manifest.at("feature_file").get<std::string>();
    label_file = manifest.at("label_file").get<std::string>();
    byte_order = manifest.at("byte_order").get<std::string>();
    checksum = manifest.at("checksum").get<std::string>();
    name = manifest.value("name", dir.filename().string());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid manifest " + manifest_path.string() + ": " +
                      e.what());
  }
  if (byte_order != "little") throw ConfigError("byte_order must be little");

  const std::size_t feature_bytes = checked_mul(checked_mul(n, d), sizeof(float));
  const std::size_t label_bytes = checked_mul(n, sizeof(Label));

  const auto features_raw = read_file(dir / feature_file);
  const auto labels_raw = read_file(dir / label_file);
  if (features_raw.size() != feature_bytes) {
    throw CorruptionError("feature file holds " +
                          std::to_string(features_raw.size()) +
                          " bytes, manifest implies " +
                          std::to_string(feature_bytes));
  }
  if (labels_raw.size() != label_bytes) {
    throw CorruptionError("label file holds " +
                          std::to_string(labels_raw.size()) +
                          " bytes, manifest implies " +
                          std::to_string(label_bytes));
  }

  FeatureMatrix features(static_cast<Eigen::Index>(n),
                         static_cast<Eigen::Index>(d));
  std::memcpy(features.data(), features_raw.data(), feature_bytes);
  std::vector<Label> labels(n);
  std::memcpy(labels.data(), labels_raw.data(), label_bytes);

  std::uint64_t h = fnv1a(features_raw.data(), feature_bytes, kFnvOffset);
  h = fnv1a(labels_raw.data(), label_bytes, h);
  if (hex64(h) != checksum) {
    throw CorruptionError("checksum mismatch in " + dir.string() +
                          ": manifest " + checksum + ", payload " + hex64(h));
  }
  return LabeledDataset(std::move(features), std::move(labels), k,
                        std::move(name));
}

std::vector<std::size_t> class_histogram(const LabeledDataset& ds) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(ds.num_classes()), 0);
  for (Label l : ds.labels()) ++counts[l];
  return counts;
}

LabeledDataset select_rows(const LabeledDataset& ds,
                           const std::vector<std::size_t>& rows,
                           std::string name) {
  FeatureMatrix features(static_cast<Eigen::Index>(rows.size()), ds.dim());
  std::vector<Label> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    features.row(static_cast<Eigen::Index>(i)) =
        ds.features().row(static_cast<Eigen::Index>(rows[i]));
    labels[i] = ds.label(rows[i]);
  }
  return LabeledDataset(std::move(features), std::move(labels),
                        ds.num_classes(), std::move(name));
}

namespace {

void check_generator_fits(const ConditionalGenerator& gen,
                          const LabeledDataset& ds) {
  if (gen.dim() != ds.dim()) {
    throw ConfigError("generator dimension " + std::to_string(gen.dim()) +
                      " differs from dataset dimension " +
                      std::to_string(ds.dim()));
  }
  if (gen.num_classes() < ds.num_classes()) {
    throw ConfigError("generator covers " + std::to_string(gen.num_classes()) +
                      " classes, dataset needs " +
                      std::to_string(ds.num_classes()));
  }
}

void store_row(FeatureMatrix& m, Eigen::Index row, const Vector& x) {
  if (!x.allFinite()) throw Error("generator produced a non-finite sample");
  m.row(row) = x.transpose().cast<float>();
}

}  // namespace

LabeledDataset build_replacement_set(const ConditionalGenerator& gen,
                                     const LabeledDataset& templ, Rng& rng) {
  check_generator_fits(gen, templ);
  FeatureMatrix features(static_cast<Eigen::Index>(templ.size()), templ.dim());
  std::vector<std::size_t> slot(static_cast<std::size_t>(templ.num_classes()), 0);
  for (std::size_t i = 0; i < templ.size(); ++i) {
    const Label c = templ.label(i);
    store_row(features, static_cast<Eigen::Index>(i),
              gen.sample_for_slot(c, slot[c]++, rng));
  }
  return LabeledDataset(std::move(features), templ.labels(),
                        templ.num_classes(), templ.name() + "/replaced");
}

std::size_t augmented_count(std::size_t class_count, double fraction) {
  // The epsilon keeps products such as 0.29 * 100 from flooring to 28.
  return static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(class_count) + 1e-9));
}

LabeledDataset build_augmented_set(const LabeledDataset& real,
                                   const ConditionalGenerator& gen,
                                   double fraction, Rng& rng) {
  if (!(fraction > 0.0) || !std::isfinite(fraction)) {
    throw ConfigError("augmentation fraction must be positive");
  }
  check_generator_fits(gen, real);
  const auto hist = class_histogram(real);
  std::size_t extra = 0;
  for (std::size_t c : hist) extra += augmented_count(c, fraction);

  const auto n = static_cast<Eigen::Index>(real.size());
  FeatureMatrix features(n + static_cast<Eigen::Index>(extra), real.dim());
  features.topRows(n) = real.features();
  std::vector<Label> labels = real.labels();
  labels.reserve(real.size() + extra);

  Eigen::Index row = n;
  for (std::size_t c = 0; c < hist.size(); ++c) {
    const std::size_t m = augmented_count(hist[c], fraction);
    for (std::size_t j = 0; j < m; ++j) {
      store_row(features, row++, gen.sample(static_cast<Label>(c), rng));
      labels.push_back(static_cast<Label>(c));
    }
  }
  return LabeledDataset(std::move(features), std::move(labels),
                        real.num_classes(), real.name() + "/augmented");
}

SplitResult stratified_split(const LabeledDataset& ds, double test_fraction,
                             Rng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  const auto hist = class_histogram(ds);
  for (std::size_t c = 0; c < hist.size(); ++c) {
    if (hist[c] < 2) {
      throw ConfigError("class " + std::to_string(c) +
                        " has fewer than 2 examples");
    }
  }
  std::vector<std::vector<std::size_t>> by_class(hist.size());
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.label(i)].push_back(i);

  std::vector<bool> is_test(ds.size(), false);
  for (auto& rows : by_class) {
    const auto m = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(rows.size())));
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t j = 0; j < m; ++j) is_test[rows[j]] = true;
  }
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (is_test[i] ? test_rows : train_rows).push_back(i);
  }
  if (train_rows.empty() || test_rows.empty()) {
    throw ConfigError("split leaves an empty partition");
  }
  return {select_rows(ds, train_rows, ds.name() + "/train"),
          select_rows(ds, test_rows, ds.name() + "/test")};
}

}  // namespace genmetric
