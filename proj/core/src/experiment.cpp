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

#include "genmetric/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "genmetric/error.hpp"
#include "genmetric/generator_spec.hpp"
#include "genmetric/seed.hpp"

namespace genmetric {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& doc, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!doc.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? (base / path).lexically_normal() : path;
}

void require_dataset_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / kManifestFile)) {
    throw ConfigError("dataset not found: " + dir.string());
  }
}

ClassifierConfig parse_classifier(const json& doc, bool& seed_given) {
  reject_unknown(doc, "classifier",
                 {"architecture", "hidden", "activation", "epochs",
                  "batch_size", "peak_lr", "warmup_epochs", "decay_epochs",
                  "decay_factor", "momentum", "weight_decay", "seed"});
  ClassifierConfig c;
  const std::string arch = doc.value("architecture", "multilayer");
  if (arch == "linear") {
    c.hidden.clear();
  } else if (arch == "multilayer") {
    c.hidden = doc.value("hidden", c.hidden);
  } else {
    throw ConfigError("classifier architecture must be linear or multilayer");
  }
  if (arch == "linear" && doc.contains("hidden")) {
    throw ConfigError("linear classifier takes no hidden widths");
  }
  const std::string act = doc.value("activation", "relu");
  if (act == "relu") {
    c.activation = Activation::kRelu;
  } else if (act == "tanh") {
    c.activation = Activation::kTanh;
  } else {
    throw ConfigError("activation must be relu or tanh");
  }
  c.epochs = doc.value("epochs", c.epochs);
  c.batch_size = doc.value("batch_size", c.batch_size);
  c.peak_lr = doc.value("peak_lr", c.peak_lr);
  c.warmup_epochs = doc.value("warmup_epochs", c.warmup_epochs);
  c.decay_epochs = doc.value("decay_epochs", c.decay_epochs);
  c.decay_factor = doc.value("decay_factor", c.decay_factor);
  c.momentum = doc.value("momentum", c.momentum);
  c.weight_decay = doc.value("weight_decay", c.weight_decay);
  seed_given = doc.contains("seed");
  if (seed_given) c.seed = doc.at("seed").get<std::uint64_t>();
  c.validate();
  return c;
}

EmbedderSpec parse_embedder(const json& doc) {
  reject_unknown(doc, "embedder", {"kind", "dim", "seed"});
  EmbedderSpec e;
  const std::string kind = doc.value("kind", "penultimate");
  if (kind == "identity") {
    e.kind = EmbedderSpec::Kind::kIdentity;
  } else if (kind == "projection") {
    e.kind = EmbedderSpec::Kind::kProjection;
    if (!doc.contains("dim")) throw ConfigError("projection embedder needs dim");
    e.dim = doc.at("dim").get<int>();
    if (e.dim < 1) throw ConfigError("projection dim must be >= 1");
  } else if (kind == "penultimate") {
    e.kind = EmbedderSpec::Kind::kPenultimate;
  } else {
    throw ConfigError("embedder kind must be identity, projection or penultimate");
  }
  if (doc.contains("seed")) e.seed = doc.at("seed").get<std::uint64_t>();
  return e;
}

MetricToggles parse_metrics(const json& doc) {
  reject_unknown(doc, "metrics",
                 {"is", "fid", "kid", "nas", "gan_test", "per_class_fid"});
  MetricToggles m;
  m.is = doc.value("is", m.is);
  m.fid = doc.value("fid", m.fid);
  m.kid = doc.value("kid", m.kid);
  m.nas = doc.value("nas", m.nas);
  m.gan_test = doc.value("gan_test", m.gan_test);
  m.per_class_fid = doc.value("per_class_fid", m.per_class_fid);
  return m;
}

std::string normalize_pointer(const std::string& variable) {
  if (variable.empty()) throw ConfigError("sweep variable is empty");
  return variable.front() == '/' ? variable : "/" + variable;
}

ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string hex_id(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

const char* activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

}  // namespace

// Config ---------------------------------------------------------------------

ExperimentConfig parse_config(const json& doc,
                              const std::filesystem::path& base_dir) {
  try {
    reject_unknown(doc, "config",
                   {"real_data", "real_test", "test_fraction", "generator",
                    "classifier", "embedder", "metrics", "top_k", "is_splits",
                    "gan_test_size", "nas_fractions", "sweep", "seed",
                    "output_dir"});
    ExperimentConfig c;
    c.base_dir = base_dir;
    if (!doc.contains("real_data")) throw ConfigError("config needs real_data");
    c.real_data = resolve(base_dir, doc.at("real_data").get<std::string>());
    require_dataset_dir(c.real_data);
    if (doc.contains("real_test")) {
      c.real_test = resolve(base_dir, doc.at("real_test").get<std::string>());
      require_dataset_dir(*c.real_test);
    }
    c.test_fraction = doc.value("test_fraction", c.test_fraction);
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
      throw ConfigError("test_fraction must lie in (0, 1)");
    }

    if (!doc.contains("generator")) throw ConfigError("config needs generator");
    const json& gen = doc.at("generator");
    if (gen.is_string()) {
      const auto path = resolve(base_dir, gen.get<std::string>());
      std::ifstream in(path);
      if (!in) throw ConfigError("generator file not found: " + path.string());
      try {
        c.generator = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError("malformed generator file " + path.string() + ": " +
                          e.what());
      }
    } else {
      c.generator = gen;
    }

    c.classifier = parse_classifier(doc.value("classifier", json::object()),
                                    c.classifier_seed_given);
    c.embedder = parse_embedder(doc.value("embedder", json::object()));
    c.metrics = parse_metrics(doc.value("metrics", json::object()));
    c.top_k = doc.value("top_k", c.top_k);
    if (c.top_k < 0) throw ConfigError("top_k must be >= 1");
    c.is_splits = doc.value("is_splits", c.is_splits);
    if (c.is_splits < 1) throw ConfigError("is_splits must be >= 1");
    c.gan_test_size = doc.value("gan_test_size", c.gan_test_size);
    if (c.gan_test_size < 1) throw ConfigError("gan_test_size must be >= 1");
    c.nas_fractions = doc.value("nas_fractions", c.nas_fractions);
    for (double f : c.nas_fractions) {
      if (!(f > 0.0) || !std::isfinite(f)) {
        throw ConfigError("nas_fractions must be positive");
      }
    }
    if (doc.contains("sweep")) {
      const json& s = doc.at("sweep");
      reject_unknown(s, "sweep", {"variable", "values"});
      SweepSpec sweep;
      sweep.variable = normalize_pointer(s.at("variable").get<std::string>());
      sweep.values = s.at("values").get<std::vector<double>>();
      if (sweep.values.empty()) throw ConfigError("sweep grid is empty");
      c.sweep = std::move(sweep);
    }
    c.seed = doc.value("seed", c.seed);
    c.output_dir = resolve(base_dir, doc.value("output_dir", std::string("out")));
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config not found: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  const auto base = path.has_parent_path() ? path.parent_path()
                                           : std::filesystem::path(".");
  return parse_config(doc, base);
}

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json out;
  out["real_data"] = c.real_data.generic_string();
  out["real_test"] =
      c.real_test ? ordered_json(c.real_test->generic_string()) : ordered_json(nullptr);
  out["test_fraction"] = c.test_fraction;
  out["generator"] = c.generator;

  ordered_json cls;
  cls["architecture"] = c.classifier.hidden.empty() ? "linear" : "multilayer";
  cls["hidden"] = c.classifier.hidden;
  cls["activation"] = activation_name(c.classifier.activation);
  cls["epochs"] = c.classifier.epochs;
  cls["batch_size"] = c.classifier.batch_size;
  cls["peak_lr"] = c.classifier.peak_lr;
  cls["warmup_epochs"] = c.classifier.warmup_epochs;
  cls["decay_epochs"] = c.classifier.decay_epochs;
  cls["decay_factor"] = c.classifier.decay_factor;
  cls["momentum"] = c.classifier.momentum;
  cls["weight_decay"] = c.classifier.weight_decay;
  cls["seed"] = c.classifier_seed_given ? ordered_json(c.classifier.seed)
                                        : ordered_json(nullptr);
  out["classifier"] = cls;

  ordered_json emb;
  emb["kind"] = c.embedder.kind_name();
  if (c.embedder.kind == EmbedderSpec::Kind::kProjection) emb["dim"] = c.embedder.dim;
  emb["seed"] = optional_json(c.embedder.seed);
  out["embedder"] = emb;

  ordered_json m;
  m["is"] = c.metrics.is;
  m["fid"] = c.metrics.fid;
  m["kid"] = c.metrics.kid;
  m["nas"] = c.metrics.nas;
  m["gan_test"] = c.metrics.gan_test;
  m["per_class_fid"] = c.metrics.per_class_fid;
  out["metrics"] = m;

  out["top_k"] = c.top_k;
  out["is_splits"] = c.is_splits;
  out["gan_test_size"] = c.gan_test_size;
  out["nas_fractions"] = c.nas_fractions;
  if (c.sweep) {
    out["sweep"] = {{"variable", c.sweep->variable}, {"values", c.sweep->values}};
  } else {
    out["sweep"] = nullptr;
  }
  out["seed"] = c.seed;
  return out;
}

// Data and seeds -------------------------------------------------------------

RunSeeds derive_run_seeds(const ExperimentConfig& config, std::uint64_t point) {
  RunSeeds s;
  s.split = derive_seed(config.seed, "split");
  s.classifier = config.classifier_seed_given
                     ? config.classifier.seed
                     : derive_seed(config.seed, "classifier");
  s.replacement = derive_seed(config.seed, "replacement", point);
  s.nas = derive_seed(config.seed, "nas", point);
  s.gan_test = derive_seed(config.seed, "gan_test", point);
  s.projection = config.embedder.seed ? *config.embedder.seed
                                      : derive_seed(config.seed, "projection");
  return s;
}

ordered_json RunSeeds::to_json() const {
  ordered_json out;
  out["split"] = split;
  out["classifier"] = classifier;
  out["replacement"] = replacement;
  out["nas"] = nas;
  out["gan_test"] = gan_test;
  out["projection"] = projection;
  return out;
}

ExperimentData load_experiment_data(const ExperimentConfig& config) {
  LabeledDataset real = load_dataset(config.real_data);
  auto finish = [&config](LabeledDataset train, LabeledDataset test) {
    if (train.dim() != test.dim() || train.num_classes() != test.num_classes()) {
      throw ConfigError("real train and test sets differ in D or K");
    }
    int k = config.top_k == 0 ? std::min(5, train.num_classes()) : config.top_k;
    if (k > train.num_classes()) {
      throw ConfigError("top_k=" + std::to_string(k) + " exceeds K=" +
                        std::to_string(train.num_classes()));
    }
    return ExperimentData{std::move(train), std::move(test), k};
  };
  if (config.real_test) {
    return finish(std::move(real), load_dataset(*config.real_test));
  }
  Rng rng(derive_run_seeds(config, 0).split);
  SplitResult split = stratified_split(real, config.test_fraction, rng);
  return finish(std::move(split.train), std::move(split.test));
}

void check_experiment(const ExperimentConfig& config,
                      const ExperimentData& data) {
  std::vector<json> docs;
  if (config.sweep) {
    for (double v : config.sweep->values) {
      docs.push_back(apply_sweep_value(config.generator, config.sweep->variable, v));
    }
  } else {
    docs.push_back(config.generator);
  }
  for (const json& doc : docs) {
    const GeneratorPtr gen = generator_from_json(doc, {&data.train, config.base_dir});
    if (gen->dim() != data.train.dim() ||
        gen->num_classes() != data.train.num_classes()) {
      throw ConfigError("generator shape (D=" + std::to_string(gen->dim()) +
                        ", K=" + std::to_string(gen->num_classes()) +
                        ") does not match the real data (D=" +
                        std::to_string(data.train.dim()) + ", K=" +
                        std::to_string(data.train.num_classes()) + ")");
    }
  }
  if (config.embedder.kind == EmbedderSpec::Kind::kProjection &&
      config.embedder.dim > data.train.dim()) {
    throw ConfigError("projection dim exceeds the feature dimension");
  }
}

// Runs -----------------------------------------------------------------------

namespace {

ClassifierConfig seeded(const ExperimentConfig& config, const RunSeeds& seeds) {
  ClassifierConfig c = config.classifier;
  c.seed = seeds.classifier;
  return c;
}

double brier_on(const ClassifierModel& model, const LabeledDataset& ds) {
  return brier_score(model.predict_proba(to_matrix(ds.features())), ds.labels());
}

EmbedderSpec resolved_embedder(const ExperimentConfig& config,
                               const RunSeeds& seeds) {
  EmbedderSpec spec = config.embedder;
  if (spec.kind == EmbedderSpec::Kind::kProjection) spec.seed = seeds.projection;
  return spec;
}

Matrix rows_of_class(const Matrix& m, const LabeledDataset& ds, Label c) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.label(i) == c) idx.push_back(static_cast<Eigen::Index>(i));
  }
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  }
  return out;
}

}  // namespace

BaselineRun run_baseline(const ExperimentConfig& config,
                         const ExperimentData& data, const RunSeeds& seeds) {
  BaselineRun run{real_baseline(data.train, data.test, seeded(config, seeds),
                                data.top_k),
                  nullptr, 0.0};
  run.model = std::make_shared<const ClassifierModel>(run.result.trained.model);
  run.brier = brier_on(*run.model, data.test);
  return run;
}

EvaluationReport baseline_report(const ExperimentConfig& config,
                                 const ExperimentData& data,
                                 const BaselineRun& baseline,
                                 const RunSeeds& seeds) {
  EvaluationReport r;
  r.run_id = "baseline-" + hex_id(derive_seed(config.seed, "run_id"));
  r.created_at = utc_timestamp();
  r.k = data.top_k;
  r.baseline_only = true;
  r.baseline_top1 = baseline.result.top1;
  r.baseline_topk = baseline.result.topk;
  r.baseline_brier = baseline.brier;
  r.baseline_per_class = baseline.result.per_class_top1;
  r.embedder = config.embedder.kind_name();
  r.seeds = seeds;
  r.config = config_to_json(config);
  return r;
}

EvaluationReport run_evaluation(const ExperimentConfig& config,
                                const ExperimentData& data,
                                const json& generator_doc,
                                const BaselineRun& baseline,
                                const RunSeeds& seeds) {
  EvaluationReport r = baseline_report(config, data, baseline, seeds);
  r.run_id = "eval-" + hex_id(seeds.replacement);
  r.baseline_only = false;
  r.config["generator"] = generator_doc;

  const GeneratorPtr gen =
      generator_from_json(generator_doc, {&data.train, config.base_dir});
  const ClassifierConfig cls = seeded(config, seeds);

  Rng rng(seeds.replacement);
  const LabeledDataset synthetic = build_replacement_set(*gen, data.train, rng);
  const TrainEvalResult cas_run =
      evaluate_training_set(synthetic, data.test, cls, data.top_k);
  r.cas_top1 = cas_run.top1;
  r.cas_topk = cas_run.topk;
  r.cas_per_class = cas_run.per_class_top1;
  r.cas_brier = brier_on(cas_run.trained.model, data.test);
  r.cas_final_train_loss = cas_run.trained.trace.epoch_loss.back();
  r.per_class = per_class_gap(cas_run.per_class_top1,
                              baseline.result.per_class_top1);

  const Matrix synthetic_x = to_matrix(synthetic.features());
  r.synthetic_cov_trace = moment_stats(synthetic_x).cov.trace();

  if (config.metrics.is) {
    if (synthetic.size() >= static_cast<std::size_t>(config.is_splits)) {
      r.is = inception_style_score(baseline.model->predict_proba(synthetic_x),
                                   config.is_splits);
    } else {
      r.warnings.push_back("IS skipped: fewer synthetic rows than splits");
    }
  }

  if (config.metrics.fid || config.metrics.kid || config.metrics.per_class_fid) {
    const Embedder embedder(resolved_embedder(config, seeds), data.train.dim(),
                            baseline.model);
    const Matrix real_e = embedder.embed(data.train.features());
    const Matrix synth_e = embedder.embed(synthetic_x);
    if (config.metrics.fid) {
      r.fid = fid(moment_stats(real_e), moment_stats(synth_e));
    }
    if (config.metrics.kid) r.kid = kid(real_e, synth_e);
    if (config.metrics.per_class_fid) {
      r.warnings.push_back(
          "per-class FID is strongly biased at per-class sample sizes");
      Vector per(data.train.num_classes());
      for (int c = 0; c < data.train.num_classes(); ++c) {
        const Matrix a = rows_of_class(real_e, data.train, static_cast<Label>(c));
        const Matrix b = rows_of_class(synth_e, synthetic, static_cast<Label>(c));
        per(c) = (a.rows() >= 2 && b.rows() >= 2)
                     ? fid(moment_stats(a), moment_stats(b))
                     : std::numeric_limits<double>::quiet_NaN();
      }
      r.per_class_fid = per;
    }
  }

  if (config.metrics.nas && !config.nas_fractions.empty()) {
    r.nas = nas(data.train, *gen, config.nas_fractions, data.test, cls,
                data.top_k, seeds.nas);
  }
  if (config.metrics.gan_test) {
    r.gan_test = gan_test(*baseline.model, *gen, config.gan_test_size,
                          data.top_k, seeds.gan_test);
  }
  return r;
}

// Sweep ----------------------------------------------------------------------

json apply_sweep_value(const json& generator_doc, const std::string& variable,
                       double value) {
  const json::json_pointer ptr(normalize_pointer(variable));
  if (!generator_doc.contains(ptr)) {
    throw ConfigError("sweep variable " + ptr.to_string() +
                      " is not present in the generator document");
  }
  json doc = generator_doc;
  doc[ptr] = value;
  return doc;
}

std::optional<double> try_pearson(const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
  for (double v : xs) {
    if (!std::isfinite(v)) return std::nullopt;
  }
  for (double v : ys) {
    if (!std::isfinite(v)) return std::nullopt;
  }
  try {
    return pearson(xs, ys);
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

SweepResult run_sweep(const ExperimentConfig& config,
                      const ExperimentData& data, int threads) {
  if (!config.sweep) throw ConfigError("config has no sweep section");
  const auto& grid = config.sweep->values;
  ExperimentConfig point_config = config;
  point_config.metrics.nas = false;
  point_config.metrics.gan_test = false;
  point_config.metrics.per_class_fid = false;

  const BaselineRun baseline =
      run_baseline(point_config, data, derive_run_seeds(config, 0));

  std::vector<std::optional<EvaluationReport>> reports(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        const json doc =
            apply_sweep_value(config.generator, config.sweep->variable, grid[i]);
        reports[i] = run_evaluation(point_config, data, doc, baseline,
                                    derive_run_seeds(config, i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(workers, grid.size()); ++t) {
      pool.emplace_back(worker);
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  SweepResult out;
  out.variable = config.sweep->variable;
  out.config = config_to_json(config);
  std::vector<double> cas1, cask, fids, iss, kids;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const EvaluationReport& r = *reports[i];
    SweepRow row;
    row.value = grid[i];
    row.cas_top1 = r.cas_top1;
    row.cas_topk = r.cas_topk;
    row.is_mean = r.is ? r.is->mean : kNaN;
    row.is_std = r.is ? r.is->std : kNaN;
    row.fid = r.fid.value_or(kNaN);
    row.kid = r.kid.value_or(kNaN);
    row.cov_trace = r.synthetic_cov_trace;
    out.rows.push_back(row);
    out.seeds.push_back(r.seeds);
    cas1.push_back(row.cas_top1);
    cask.push_back(row.cas_topk);
    fids.push_back(row.fid);
    iss.push_back(row.is_mean);
    kids.push_back(row.kid);
  }
  out.pearson_cas_fid = try_pearson(cas1, fids);
  out.pearson_cas_is = try_pearson(cas1, iss);
  out.pearson_cas_kid = try_pearson(cas1, kids);
  out.pearson_castopk_fid = try_pearson(cask, fids);
  return out;
}

// Output ---------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json report_to_json(const EvaluationReport& r) {
  ordered_json out;
  out["run_id"] = r.run_id;
  out["created_at"] = r.created_at;
  out["k"] = r.k;
  out["embedder"] = r.embedder;

  ordered_json base;
  base["top1"] = r.baseline_top1;
  base["topk"] = r.baseline_topk;
  base["brier"] = r.baseline_brier;
  base["per_class_top1"] = vector_json(r.baseline_per_class);
  out["baseline"] = base;

  if (r.baseline_only) {
    out["cas"] = nullptr;
  } else {
    ordered_json cas;
    cas["top1"] = r.cas_top1;
    cas["topk"] = r.cas_topk;
    cas["brier"] = r.cas_brier;
    cas["final_train_loss"] = r.cas_final_train_loss;
    cas["per_class_top1"] = vector_json(r.cas_per_class);
    out["cas"] = cas;

    ordered_json metrics;
    metrics["is_mean"] = r.is ? ordered_json(r.is->mean) : ordered_json(nullptr);
    metrics["is_std"] = r.is ? ordered_json(r.is->std) : ordered_json(nullptr);
    metrics["fid"] = optional_json(r.fid);
    metrics["kid"] = optional_json(r.kid);
    metrics["synthetic_cov_trace"] = r.synthetic_cov_trace;
    metrics["eig_clamp_tol"] = kEigenClampTolerance;
    metrics["per_class_fid"] =
        r.per_class_fid ? vector_json(*r.per_class_fid) : ordered_json(nullptr);
    out["metrics"] = metrics;

    if (r.gan_test) {
      out["gan_test"] = {{"top1", r.gan_test->top1},
                         {"topk", r.gan_test->topk},
                         {"test_size", r.gan_test->test_size}};
    } else {
      out["gan_test"] = nullptr;
    }
    ordered_json nas = ordered_json::array();
    for (const auto& p : r.nas) {
      ordered_json row;
      row["fraction"] = p.fraction;
      row["train_size"] = p.train_size;
      row["top1"] = p.top1;
      row["topk"] = p.topk;
      nas.push_back(row);
    }
    out["nas"] = nas;

    ordered_json per = ordered_json::array();
    for (const auto& g : r.per_class) {
      ordered_json row;
      row["class"] = g.label;
      row["model_acc"] = g.model_acc;
      row["real_acc"] = g.real_acc;
      row["gap"] = g.gap;
      row["flag_zero"] = g.flag_zero;
      per.push_back(row);
    }
    out["per_class"] = per;
  }
  out["warnings"] = r.warnings;
  out["seeds"] = r.seeds.to_json();
  out["config"] = r.config;
  return out;
}

std::string summary_csv(const EvaluationReport& r) {
  std::ostringstream os;
  os << "metric,value\n";
  auto row = [&os](const std::string& name, double v) {
    os << name << ',' << format_number(v) << '\n';
  };
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  row("k", r.k);
  row("baseline_top1", r.baseline_top1);
  row("baseline_topk", r.baseline_topk);
  row("baseline_brier", r.baseline_brier);
  if (r.baseline_only) return os.str();
  row("cas_top1", r.cas_top1);
  row("cas_topk", r.cas_topk);
  row("cas_brier", r.cas_brier);
  row("is_mean", r.is ? r.is->mean : kNaN);
  row("is_std", r.is ? r.is->std : kNaN);
  row("fid", r.fid.value_or(kNaN));
  row("kid", r.kid.value_or(kNaN));
  row("gan_test_top1", r.gan_test ? r.gan_test->top1 : kNaN);
  row("gan_test_topk", r.gan_test ? r.gan_test->topk : kNaN);
  for (const auto& p : r.nas) {
    char name[64];
    std::snprintf(name, sizeof(name), "nas_top1@%g", p.fraction);
    row(name, p.top1);
    std::snprintf(name, sizeof(name), "nas_topk@%g", p.fraction);
    row(name, p.topk);
  }
  return os.str();
}

std::string per_class_csv(const std::vector<GapRow>& rows) {
  std::ostringstream os;
  os << "class,model_acc,real_acc,gap,flag_zero\n";
  for (const auto& g : rows) {
    os << g.label << ',' << format_number(g.model_acc) << ','
       << format_number(g.real_acc) << ',' << format_number(g.gap) << ','
       << (g.flag_zero ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "value,cas_top1,cas_topk,is_mean,is_std,fid,kid,cov_trace\n";
  for (const auto& r : sweep.rows) {
    os << format_number(r.value) << ',' << format_number(r.cas_top1) << ','
       << format_number(r.cas_topk) << ',' << format_number(r.is_mean) << ','
       << format_number(r.is_std) << ',' << format_number(r.fid) << ','
       << format_number(r.kid) << ',' << format_number(r.cov_trace) << '\n';
  }
  return os.str();
}

ordered_json sweep_to_json(const SweepResult& sweep) {
  ordered_json out;
  out["variable"] = sweep.variable;
  ordered_json rows = ordered_json::array();
  for (const auto& r : sweep.rows) {
    ordered_json row;
    row["value"] = r.value;
    row["cas_top1"] = r.cas_top1;
    row["cas_topk"] = r.cas_topk;
    row["is_mean"] = r.is_mean;
    row["is_std"] = r.is_std;
    row["fid"] = r.fid;
    row["kid"] = r.kid;
    row["cov_trace"] = r.cov_trace;
    rows.push_back(row);
  }
  out["rows"] = rows;
  ordered_json corr;
  corr["cas_top1_vs_fid"] = optional_json(sweep.pearson_cas_fid);
  corr["cas_top1_vs_is"] = optional_json(sweep.pearson_cas_is);
  corr["cas_top1_vs_kid"] = optional_json(sweep.pearson_cas_kid);
  corr["cas_topk_vs_fid"] = optional_json(sweep.pearson_castopk_fid);
  corr["undefined"] = !sweep.pearson_cas_fid || !sweep.pearson_cas_is;
  out["correlations"] = corr;
  ordered_json seeds = ordered_json::array();
  for (const auto& s : sweep.seeds) seeds.push_back(s.to_json());
  out["seeds"] = seeds;
  out["config"] = sweep.config;
  return out;
}

void write_report_files(const EvaluationReport& report,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", report_to_json(report).dump(2) + "\n");
  write_text(dir / "summary.csv", summary_csv(report));
  if (!report.baseline_only) {
    write_text(dir / "per_class.csv", per_class_csv(report.per_class));
  }
}

void write_sweep_files(const SweepResult& sweep,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "sweep.csv", sweep_csv(sweep));
  write_text(dir / "sweep.json", sweep_to_json(sweep).dump(2) + "\n");
}

}  // namespace genmetric
