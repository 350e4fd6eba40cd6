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

#include <doctest.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "genmetric/error.hpp"
#include "genmetric/experiment.hpp"
#include "genmetric/generator_spec.hpp"
#include "genmetric/plot.hpp"
#include "genmetric/seed.hpp"
#include "test_util.hpp"

using namespace genmetric;
using nlohmann::json;
using genmetric::testing::rows_matrix;

namespace {

std::size_t count_matches(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  return static_cast<std::size_t>(
      std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator()));
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json gaussian_doc() {
  return json::parse(R"({"kind": "gaussian", "means": [[0, 0], [3, 0], [0, 3]], "sigma": 1.0})");
}

// Small three-class dataset written to `dir`.
std::filesystem::path write_real(const std::filesystem::path& dir) {
  const auto g = GaussianClassConditional::isotropic(
      rows_matrix({{0.0, 0.0}, {3.0, 0.0}, {0.0, 3.0}}), 1.0, Vector::Constant(3, 1.0 / 3));
  const auto path = dir / "real";
  save_dataset(testing::sample_dataset(g, 60, 1, "real"), path);
  return path;
}

json minimal_config() {
  return json::parse(R"({
    "real_data": "real",
    "generator": {"kind": "memorizer", "source": "train", "mode": "identity"},
    "classifier": {"hidden": [8], "epochs": 4, "batch_size": 16, "peak_lr": 0.05,
                   "warmup_epochs": 1, "decay_epochs": [3]},
    "metrics": {"nas": false},
    "is_splits": 2,
    "gan_test_size": 90,
    "top_k": 2,
    "seed": 5
  })");
}

}  // namespace

TEST_CASE("derive_seed") {
  CHECK(derive_seed(42, "train", 0) == derive_seed(42, "train", 0));
  CHECK(derive_seed(42, "train", 0) != derive_seed(42, "train", 1));
  CHECK(derive_seed(42, "train", 0) != derive_seed(42, "sample", 0));
  CHECK(derive_seed(42, "train", 0) != derive_seed(43, "train", 0));

  const std::vector<std::string> labels = {"split", "classifier", "replacement", "nas",
                                           "gan_test", "projection", "train", "sample",
                                           "", "a", "b", "ab", "ba"};
  std::set<std::uint64_t> seen;
  std::size_t total = 0;
  for (std::uint64_t master : {0ull, 1ull, 42ull, ~0ull}) {
    for (const auto& l : labels) {
      for (std::uint64_t i = 0; i < 64; ++i) {
        seen.insert(derive_seed(master, l, i));
        ++total;
      }
    }
  }
  CHECK(seen.size() == total);
}

TEST_CASE("generator_from_json") {
  const auto g = generator_from_json(gaussian_doc());
  CHECK(g->kind() == "gaussian");
  CHECK(g->num_classes() == 3);
  CHECK(g->dim() == 2);

  json bad = gaussian_doc();
  bad["extra"] = 1;
  CHECK_THROWS_AS(generator_from_json(bad), ConfigError);
  CHECK_THROWS_AS(generator_from_json(json::parse(R"({"kind": "nope"})")), ConfigError);
  json both = gaussian_doc();
  both["covariances"] = json::array();
  CHECK_THROWS_AS(generator_from_json(both), ConfigError);

  const json mix = {{"kind", "noise_mixture"}, {"base", gaussian_doc()}, {"p", 0.5},
                    {"low", {20.0, 20.0}}, {"high", {25.0, 25.0}}};
  CHECK(generator_from_json(mix)->kind() == "noise_mixture");

  const auto tl = generator_from_json(json::parse(R"({
    "kind": "truncated_latent", "latent_dim": 1, "tau": 0.5, "nonlinearity": "tanh",
    "classes": [{"weight": [[1], [0]], "bias": [0, 0]}, {"weight": [[0], [1]], "bias": [1, 1]}]
  })"));
  CHECK(tl->dim() == 2);
  CHECK(tl->num_classes() == 2);

  const json mem = json::parse(R"({"kind": "memorizer", "source": "train"})");
  CHECK_THROWS_AS(generator_from_json(mem), ConfigError);
  const auto ds = testing::make_dataset({{0.0f}, {1.0f}}, {0, 1}, 2);
  GeneratorContext ctx;
  ctx.real_train = &ds;
  CHECK(generator_from_json(mem, ctx)->kind() == "memorizer");
}

TEST_CASE("apply_sweep_value") {
  const json doc = json::parse(R"({"kind": "truncated_latent", "tau": 1.0, "base": {"p": 0.1}})");
  CHECK(apply_sweep_value(doc, "/tau", 0.2)["tau"] == 0.2);
  CHECK(apply_sweep_value(doc, "/base/p", 0.7)["base"]["p"] == 0.7);
  CHECK(doc["tau"] == 1.0);
  CHECK_THROWS_AS(apply_sweep_value(doc, "/missing", 1.0), ConfigError);
}

TEST_CASE("parse_config") {
  testing::TempDir tmp;
  write_real(tmp.path());
  const ExperimentConfig c = parse_config(minimal_config(), tmp.path());
  CHECK(c.real_data == tmp.path() / "real");
  CHECK(c.classifier.hidden == std::vector<int>{8});
  CHECK(c.classifier.epochs == 4);
  CHECK(c.top_k == 2);
  CHECK_FALSE(c.metrics.nas);
  CHECK(c.metrics.fid);
  CHECK(c.seed == 5);

  auto expect_error = [&](auto mutate) {
    json doc = minimal_config();
    mutate(doc);
    CHECK_THROWS_AS(parse_config(doc, tmp.path()), ConfigError);
  };
  expect_error([](json& d) { d["real_data"] = "does-not-exist"; });
  expect_error([](json& d) { d.erase("generator"); });
  expect_error([](json& d) { d["unknown_key"] = 1; });
  expect_error([](json& d) { d["classifier"]["epochs"] = 0; });
  expect_error([](json& d) { d["classifier"]["momentum"] = 1.5; });
  expect_error([](json& d) { d["nas_fractions"] = {0.5, -1.0}; });
  expect_error([](json& d) { d["sweep"] = {{"variable", "tau"}, {"values", json::array()}}; });
  expect_error([](json& d) { d["embedder"] = {{"kind", "bogus"}}; });
  expect_error([](json& d) { d["top_k"] = "five"; });
  expect_error([](json& d) { d["generator"] = "missing.json"; });
}

TEST_CASE("check_experiment catches shape errors") {
  testing::TempDir tmp;
  write_real(tmp.path());
  json doc = minimal_config();
  doc["top_k"] = 4;
  auto c = parse_config(doc, tmp.path());
  CHECK_THROWS_AS(load_experiment_data(c), ConfigError);

  doc = minimal_config();
  doc["generator"] = json::parse(R"({"kind": "gaussian", "means": [[0], [1], [2]], "sigma": 1})");
  c = parse_config(doc, tmp.path());
  const auto data = load_experiment_data(c);
  CHECK(data.train.size() + data.test.size() == 180);
  CHECK_THROWS_AS(check_experiment(c, data), ConfigError);
}

TEST_CASE("derived run seeds") {
  testing::TempDir tmp;
  write_real(tmp.path());
  const auto c = parse_config(minimal_config(), tmp.path());
  const RunSeeds a = derive_run_seeds(c, 0), b = derive_run_seeds(c, 1);
  CHECK(a.classifier == b.classifier);
  CHECK(a.replacement != b.replacement);
  CHECK(a.to_json() == derive_run_seeds(c, 0).to_json());

  json doc = minimal_config();
  doc["classifier"]["seed"] = 1234;
  CHECK(derive_run_seeds(parse_config(doc, tmp.path()), 0).classifier == 1234);
}

TEST_CASE("evaluation report with an identity-copy memorizer") {
  testing::TempDir tmp;
  write_real(tmp.path());
  const auto c = parse_config(minimal_config(), tmp.path());
  const auto data = load_experiment_data(c);
  check_experiment(c, data);
  const RunSeeds seeds = derive_run_seeds(c, 0);
  const BaselineRun baseline = run_baseline(c, data, seeds);
  const EvaluationReport r = run_evaluation(c, data, c.generator, baseline, seeds);
  CHECK(r.cas_top1 == r.baseline_top1);
  CHECK(r.cas_topk == r.baseline_topk);
  CHECK(r.per_class.size() == 3);
  REQUIRE(r.fid.has_value());
  CHECK(*r.fid == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.nas.empty());
  REQUIRE(r.gan_test.has_value());

  const auto j = report_to_json(r);
  for (const char* key : {"config", "seeds", "cas", "baseline", "per_class", "metrics"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["cas"]["top1"] == j["baseline"]["top1"]);

  write_report_files(r, tmp.path() / "out");
  const std::string per_class = read_file(tmp.path() / "out" / "per_class.csv");
  CHECK(per_class.rfind("class,model_acc,real_acc,gap,flag_zero\n", 0) == 0);
  CHECK(count_matches(per_class, "\n") == 4);
  const std::string summary = read_file(tmp.path() / "out" / "summary.csv");
  CHECK(summary.rfind("metric,value\n", 0) == 0);
  CHECK(summary.find("cas_top1,") != std::string::npos);
  CHECK(std::filesystem::exists(tmp.path() / "out" / "report.json"));

  // Baseline-only report skips the per-class table.
  const auto only = baseline_report(c, data, baseline, seeds);
  write_report_files(only, tmp.path() / "base");
  CHECK_FALSE(std::filesystem::exists(tmp.path() / "base" / "per_class.csv"));
}

TEST_CASE("CSV formatting") {
  std::vector<GapRow> rows = {{2, 0.0, 0.9, -0.9, true}, {0, 0.5, 0.25, 0.25, false}};
  CHECK(per_class_csv(rows) ==
        "class,model_acc,real_acc,gap,flag_zero\n"
        "2,0.000000,0.900000,-0.900000,1\n"
        "0,0.500000,0.250000,0.250000,0\n");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(1.0 / 3.0) == "0.333333");

  SweepResult s;
  s.variable = "/tau";
  s.rows = {{0.2, 0.5, 0.75, 1.5, 0.1, 2.0, 0.01, 0.3}};
  CHECK(sweep_csv(s) ==
        "value,cas_top1,cas_topk,is_mean,is_std,fid,kid,cov_trace\n"
        "0.200000,0.500000,0.750000,1.500000,0.100000,2.000000,0.010000,0.300000\n");
  const auto parsed = parse_sweep_csv(sweep_csv(s));
  REQUIRE(parsed.rows.size() == 1);
  CHECK(parsed.rows[0].fid == 2.0);
}

TEST_CASE("single-point sweep reports undefined correlations") {
  CHECK_FALSE(try_pearson({0.5}, {1.0}).has_value());
  CHECK_FALSE(try_pearson({0.5, 0.5}, {1.0, 2.0}).has_value());
  CHECK(try_pearson({0.1, 0.5}, {1.0, 2.0}).has_value());
  SweepResult s;
  s.variable = "/tau";
  s.rows = {{0.2, 0.5, 0.75, 1.5, 0.1, 2.0, 0.01, 0.3}};
  const auto j = sweep_to_json(s);
  CHECK(j["correlations"]["undefined"] == true);
}

TEST_CASE("SVG charts") {
  const std::vector<GapRow> rows = {{1, 0.0, 0.9, -0.9, true},
                                    {0, 0.8, 0.85, -0.05, false},
                                    {2, 0.9, 0.9, 0.0, false}};
  const std::string svg = per_class_chart_svg(rows);
  CHECK(count_matches(svg, "<rect class=\"bar ") == 6);
  CHECK(count_matches(svg, "<rect ") == 6);
  CHECK(svg.find(kRealColor) != std::string::npos);
  CHECK(svg.find(kModelColor) != std::string::npos);
  CHECK(svg == per_class_chart_svg(rows));

  testing::TempDir tmp;
  {
    std::ofstream(tmp.path() / "per_class.csv") << per_class_csv(rows);
  }
  const auto written = plot_file(tmp.path() / "per_class.csv", tmp.path() / "plots");
  REQUIRE(written.size() == 1);
  CHECK(read_file(written[0]) == svg);

  {
    std::ofstream(tmp.path() / "broken.csv") << "class,model_acc\n1,2\n";
  }
  CHECK_THROWS_AS(plot_file(tmp.path() / "broken.csv", tmp.path() / "plots"), ConfigError);

  const std::string nas = nas_chart_svg({{0.25, 100, 0.8, 0.9}, {1.0, 160, 0.82, 0.91}}, 0.79);
  CHECK(nas.find("<polyline") != std::string::npos);
}
