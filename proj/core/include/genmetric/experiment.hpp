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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genmetric/classifier.hpp"
#include "genmetric/dataset.hpp"
#include "genmetric/evaluation.hpp"
#include "genmetric/metrics.hpp"

namespace genmetric {

struct MetricToggles {
  bool is = true;
  bool fid = true;
  bool kid = true;
  bool nas = true;
  bool gan_test = true;
  /// Opt-in: per-class FID is strongly biased at per-class sample sizes.
  bool per_class_fid = false;
};

struct SweepSpec {
  /// JSON pointer into the generator document ("tau" is shorthand for
  /// "/tau").
  std::string variable;
  std::vector<double> values;
};

/// One experiment, fully resolved (defaults filled, paths absolute).
struct ExperimentConfig {
  std::filesystem::path real_data;
  std::optional<std::filesystem::path> real_test;
  double test_fraction = 0.2;
  nlohmann::json generator;
  ClassifierConfig classifier;
  bool classifier_seed_given = false;
  EmbedderSpec embedder;
  MetricToggles metrics;
  int top_k = 0;  // 0 resolves to min(5, K) once the data is loaded
  int is_splits = 10;
  std::size_t gan_test_size = 2000;
  std::vector<double> nas_fractions = {0.25, 0.5, 1.0};
  std::optional<SweepSpec> sweep;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::filesystem::path base_dir = ".";
};

/// Parses and validates a config document. Relative paths resolve against
/// `base_dir`; referenced paths must exist. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical resolved form, embedded in every report.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

struct ExperimentData {
  LabeledDataset train;
  LabeledDataset test;
  int top_k;
};

/// Loads real data (splitting when no test set is given) and resolves top_k.
ExperimentData load_experiment_data(const ExperimentConfig& config);

/// Cross-checks the config against loaded data: generator shape (every
/// sweep point included) and embedder dimension. Throws ConfigError.
void check_experiment(const ExperimentConfig& config, const ExperimentData& data);

/// Named seeds used by a run, all derived from the master seed.
struct RunSeeds {
  std::uint64_t split = 0;
  std::uint64_t classifier = 0;
  std::uint64_t replacement = 0;
  std::uint64_t nas = 0;
  std::uint64_t gan_test = 0;
  std::uint64_t projection = 0;

  nlohmann::ordered_json to_json() const;
};

/// `point` distinguishes sweep grid points (0 for a plain evaluation).
RunSeeds derive_run_seeds(const ExperimentConfig& config, std::uint64_t point);

struct EvaluationReport {
  std::string run_id;
  std::string created_at;
  int k = 1;
  bool baseline_only = false;

  double baseline_top1 = 0.0;
  double baseline_topk = 0.0;
  double baseline_brier = 0.0;
  Vector baseline_per_class;

  double cas_top1 = 0.0;
  double cas_topk = 0.0;
  double cas_brier = 0.0;
  Vector cas_per_class;
  double cas_final_train_loss = 0.0;
  std::vector<GapRow> per_class;

  std::optional<ScoreSummary> is;
  std::optional<double> fid;
  std::optional<double> kid;
  std::optional<Vector> per_class_fid;
  std::optional<GanTestResult> gan_test;
  std::vector<NasPoint> nas;
  /// Trace of the synthetic (replacement set) feature covariance.
  double synthetic_cov_trace = 0.0;

  std::string embedder;
  RunSeeds seeds;
  nlohmann::ordered_json config;
  std::vector<std::string> warnings;
};

/// Baseline classifier trained on real data, shared across CAS runs.
struct BaselineRun {
  TrainEvalResult result;
  std::shared_ptr<const ClassifierModel> model;
  double brier = 0.0;
};

BaselineRun run_baseline(const ExperimentConfig& config,
                         const ExperimentData& data, const RunSeeds& seeds);

/// Full evaluation of one generator document against the real data.
EvaluationReport run_evaluation(const ExperimentConfig& config,
                                const ExperimentData& data,
                                const nlohmann::json& generator_doc,
                                const BaselineRun& baseline,
                                const RunSeeds& seeds);

/// Report holding only the real-data baseline.
EvaluationReport baseline_report(const ExperimentConfig& config,
                                 const ExperimentData& data,
                                 const BaselineRun& baseline,
                                 const RunSeeds& seeds);

struct SweepRow {
  double value = 0.0;
  double cas_top1 = 0.0;
  double cas_topk = 0.0;
  double is_mean = 0.0;
  double is_std = 0.0;
  double fid = 0.0;
  double kid = 0.0;
  double cov_trace = 0.0;
};

struct SweepResult {
  std::string variable;
  std::vector<SweepRow> rows;
  /// Unset when undefined (fewer than two points or zero variance).
  std::optional<double> pearson_cas_fid;
  std::optional<double> pearson_cas_is;
  std::optional<double> pearson_cas_kid;
  std::optional<double> pearson_castopk_fid;
  std::vector<RunSeeds> seeds;
  nlohmann::ordered_json config;
};

/// Generator document with the sweep variable set to `value`.
nlohmann::json apply_sweep_value(const nlohmann::json& generator_doc,
                                 const std::string& variable, double value);

/// One evaluation per grid value, run on up to `threads` workers; rows come
/// back in grid order.
SweepResult run_sweep(const ExperimentConfig& config,
                      const ExperimentData& data, int threads = 1);

/// Pearson correlation, or nullopt where it is undefined.
std::optional<double> try_pearson(const std::vector<double>& xs,
                                  const std::vector<double>& ys);

// Output files ---------------------------------------------------------------

nlohmann::ordered_json report_to_json(const EvaluationReport& report);
std::string summary_csv(const EvaluationReport& report);
std::string per_class_csv(const std::vector<GapRow>& rows);
std::string sweep_csv(const SweepResult& sweep);
nlohmann::ordered_json sweep_to_json(const SweepResult& sweep);

/// Writes report.json, summary.csv and (unless baseline-only) per_class.csv.
void write_report_files(const EvaluationReport& report,
                        const std::filesystem::path& dir);
/// Writes sweep.csv and sweep.json.
void write_sweep_files(const SweepResult& sweep,
                       const std::filesystem::path& dir);

/// Fixed-precision formatting used by every CSV ("nan" for NaN).
std::string format_number(double v);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

}  // namespace genmetric
