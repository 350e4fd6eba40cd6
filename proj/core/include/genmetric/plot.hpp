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

#include <filesystem>
#include <string>
#include <vector>

#include "genmetric/evaluation.hpp"
#include "genmetric/experiment.hpp"

namespace genmetric {

inline constexpr const char* kRealColor = "#1f77b4";   // blue
inline constexpr const char* kModelColor = "#d62728";  // red

/// Grouped bars per class (real then model), classes in the given row order.
/// Every bar is a <rect class="bar ...">.
std::string per_class_chart_svg(const std::vector<GapRow>& rows);

/// NAS accuracy against augmentation fraction with the baseline as a dashed
/// reference line.
std::string nas_chart_svg(const std::vector<NasPoint>& points,
                          double baseline_top1);

/// CAS top-1 and top-k across a sweep grid.
std::string sweep_chart_svg(const SweepResult& sweep);

/// Parses per_class.csv. Throws ConfigError on a malformed file.
std::vector<GapRow> parse_per_class_csv(const std::string& text);
/// Parses sweep.csv.
SweepResult parse_sweep_csv(const std::string& text);

/// Renders charts for a report.json, sweep.json, per_class.csv or sweep.csv
/// into `out_dir`; returns the files written. A report without NAS points
/// yields no NAS chart.
std::vector<std::filesystem::path> plot_file(
    const std::filesystem::path& input, const std::filesystem::path& out_dir);

}  // namespace genmetric
