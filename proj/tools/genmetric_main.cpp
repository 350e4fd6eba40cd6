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

// genmetric: classification-accuracy-based evaluation of conditional
// generators, with sample-statistics metrics for comparison.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "genmetric/dataset.hpp"
#include "genmetric/error.hpp"
#include "genmetric/evaluation.hpp"
#include "genmetric/experiment.hpp"
#include "genmetric/generator_spec.hpp"
#include "genmetric/plot.hpp"

namespace fs = std::filesystem;
using namespace genmetric;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct GlobalOptions {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

struct Prepared {
  ExperimentConfig config;
  ExperimentData data;
  fs::path out_dir;
};

// --out-dir beats GENMETRIC_OUT_DIR beats the config's output_dir.
fs::path output_dir(const GlobalOptions& opts, const ExperimentConfig& config) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (const char* env = std::getenv("GENMETRIC_OUT_DIR"); env && *env) return env;
  return config.output_dir;
}

Prepared prepare(const fs::path& config_path, const GlobalOptions& opts) {
  ExperimentConfig config = load_config(config_path);
  if (opts.seed) config.seed = *opts.seed;
  ExperimentData data = load_experiment_data(config);
  check_experiment(config, data);
  fs::path out = output_dir(opts, config);
  return {std::move(config), std::move(data), std::move(out)};
}

void report_error(const std::exception& e) {
  std::cerr << "genmetric: error: " << e.what() << '\n';
}

// Runs `prepare_step` then `run_step`, mapping failures to exit codes.
template <typename PrepareFn, typename RunFn>
int guarded(PrepareFn prepare_step, RunFn run_step) {
  std::optional<decltype(prepare_step())> prepared;
  try {
    prepared.emplace(prepare_step());
  } catch (const Error& e) {
    report_error(e);
    return kExitConfig;
  }
  try {
    run_step(*prepared);
  } catch (const ConfigError& e) {
    report_error(e);
    return kExitConfig;
  } catch (const std::exception& e) {
    report_error(e);
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_evaluate(const fs::path& config_path, const GlobalOptions& opts) {
  return guarded([&] { return prepare(config_path, opts); },
                 [&](const Prepared& p) {
                   const RunSeeds seeds = derive_run_seeds(p.config, 0);
                   const BaselineRun baseline = run_baseline(p.config, p.data, seeds);
                   const EvaluationReport report = run_evaluation(
                       p.config, p.data, p.config.generator, baseline, seeds);
                   write_report_files(report, p.out_dir);
                   for (const auto& w : report.warnings) {
                     std::cerr << "genmetric: warning: " << w << '\n';
                   }
                   std::cout << "baseline top-1 " << format_number(report.baseline_top1)
                             << "  CAS top-1 " << format_number(report.cas_top1)
                             << "  (top-" << report.k << ": "
                             << format_number(report.baseline_topk) << " vs "
                             << format_number(report.cas_topk) << ")\n"
                             << "wrote " << (p.out_dir / "report.json").string()
                             << '\n';
                 });
}

int cmd_baseline(const fs::path& config_path, const GlobalOptions& opts) {
  return guarded([&] { return prepare(config_path, opts); },
                 [&](const Prepared& p) {
                   const RunSeeds seeds = derive_run_seeds(p.config, 0);
                   const BaselineRun baseline = run_baseline(p.config, p.data, seeds);
                   const EvaluationReport report =
                       baseline_report(p.config, p.data, baseline, seeds);
                   write_report_files(report, p.out_dir);
                   std::cout << "baseline top-1 " << format_number(report.baseline_top1)
                             << "  top-" << report.k << ' '
                             << format_number(report.baseline_topk) << '\n';
                 });
}

int cmd_sweep(const fs::path& config_path, const GlobalOptions& opts) {
  return guarded(
      [&] {
        Prepared p = prepare(config_path, opts);
        if (!p.config.sweep) throw ConfigError("config has no sweep section");
        return p;
      },
      [&](const Prepared& p) {
        const SweepResult sweep = run_sweep(p.config, p.data, opts.threads);
        write_sweep_files(sweep, p.out_dir);
        std::cout << sweep_csv(sweep);
        auto show = [](const char* name, const std::optional<double>& r) {
          std::cout << name << ' '
                    << (r ? format_number(*r) : std::string("undefined")) << '\n';
        };
        show("pearson(cas_top1, fid)", sweep.pearson_cas_fid);
        show("pearson(cas_top1, is)", sweep.pearson_cas_is);
      });
}

int cmd_plot(const fs::path& input, const GlobalOptions& opts) {
  return guarded(
      [&] {
        if (!fs::exists(input)) throw ConfigError("no such file: " + input.string());
        fs::path out = opts.out_dir.empty()
                           ? (input.has_parent_path() ? input.parent_path() : ".")
                           : fs::path(opts.out_dir);
        return out;
      },
      [&](const fs::path& out) {
        for (const auto& f : plot_file(input, out)) {
          std::cout << "wrote " << f.string() << '\n';
        }
      });
}

int cmd_generate(const fs::path& spec_path, std::size_t per_class,
                 const GlobalOptions& opts) {
  return guarded(
      [&] {
        std::ifstream in(spec_path);
        if (!in) throw ConfigError("generator file not found: " + spec_path.string());
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError(std::string("malformed generator file: ") + e.what());
        }
        if (opts.out_dir.empty()) throw ConfigError("generate needs --out-dir");
        if (per_class < 1) throw ConfigError("--per-class must be >= 1");
        GeneratorContext ctx;
        ctx.base_dir = spec_path.has_parent_path() ? spec_path.parent_path() : ".";
        return generator_from_json(doc, ctx);
      },
      [&](const GeneratorPtr& gen) {
        Rng rng(opts.seed.value_or(0));
        const std::size_t total = per_class * static_cast<std::size_t>(gen->num_classes());
        const LabeledDataset ds =
            sample_balanced(*gen, total, rng).renamed(spec_path.stem().string());
        save_dataset(ds, opts.out_dir);
        std::cout << "wrote " << ds.size() << " examples to " << opts.out_dir << '\n';
      });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"genmetric: evaluate conditional generators by classification "
               "accuracy and sample statistics"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opts;
  app.add_option("--out-dir", opts.out_dir, "Output directory (overrides config "
                                            "and GENMETRIC_OUT_DIR)");
  app.add_option("--seed", opts.seed, "Master seed override");
  app.add_option("--threads", opts.threads, "Worker threads for sweeps")
      ->check(CLI::PositiveNumber);

  std::string config_path;
  auto* evaluate = app.add_subcommand("evaluate", "CAS, baseline, NAS, GAN-test, IS/FID/KID");
  evaluate->add_option("config", config_path, "Experiment config (JSON)")->required();
  auto* baseline = app.add_subcommand("baseline", "Real-data classifier baseline only");
  baseline->add_option("config", config_path, "Experiment config (JSON)")->required();
  auto* sweep = app.add_subcommand("sweep", "Evaluate over a generator parameter grid");
  sweep->add_option("config", config_path, "Experiment config (JSON)")->required();

  std::string plot_input;
  auto* plot = app.add_subcommand("plot", "SVG charts from report.json, sweep.json or CSV");
  plot->add_option("file", plot_input, "Input file")->required();

  std::string gen_spec;
  std::size_t per_class = 1000;
  auto* generate = app.add_subcommand("generate", "Write a dataset sampled from a generator");
  generate->add_option("generator", gen_spec, "Generator document (JSON)")->required();
  generate->add_option("--per-class", per_class, "Examples per class");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*evaluate) return cmd_evaluate(config_path, opts);
  if (*baseline) return cmd_baseline(config_path, opts);
  if (*sweep) return cmd_sweep(config_path, opts);
  if (*plot) return cmd_plot(plot_input, opts);
  if (*generate) return cmd_generate(gen_spec, per_class, opts);
  return kExitConfig;
}
