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

#include "genmetric/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "genmetric/error.hpp"

namespace genmetric {

namespace {

constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr double kPlotHeight = 240.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& os, double width, double height,
              const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
     << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width)
     << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"" << num(width / 2) << "\" y=\"20\" text-anchor=\"middle\""
     << " font-size=\"14\">" << escape(title) << "</text>\n";
}

// Y axis for accuracies in [0, 1] with ticks every 0.2.
void unit_y_axis(std::ostringstream& os, double x0, double x1) {
  const double base = kMarginTop + kPlotHeight;
  for (int t = 0; t <= 5; ++t) {
    const double v = t * 0.2;
    const double y = base - v * kPlotHeight;
    os << "<line class=\"grid\" x1=\"" << num(x0) << "\" y1=\"" << num(y)
       << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y)
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(y + 4)
       << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  os << "<line class=\"axis\" x1=\"" << num(x0) << "\" y1=\"" << num(kMarginTop)
     << "\" x2=\"" << num(x0) << "\" y2=\"" << num(base)
     << "\" stroke=\"black\"/>\n";
  os << "<line class=\"axis\" x1=\"" << num(x0) << "\" y1=\"" << num(base)
     << "\" x2=\"" << num(x1) << "\" y2=\"" << num(base)
     << "\" stroke=\"black\"/>\n";
}

double unit_y(double v) {
  const double clamped = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
  return kMarginTop + kPlotHeight - clamped * kPlotHeight;
}

void legend(std::ostringstream& os, double x, double y) {
  os << "<g class=\"legend\">\n"
     << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\""
     << num(x + 14) << "\" y2=\"" << num(y) << "\" stroke=\"" << kRealColor
     << "\" stroke-width=\"6\"/>\n"
     << "<text x=\"" << num(x + 18) << "\" y=\"" << num(y + 4)
     << "\">real</text>\n"
     << "<line x1=\"" << num(x + 60) << "\" y1=\"" << num(y) << "\" x2=\""
     << num(x + 74) << "\" y2=\"" << num(y) << "\" stroke=\"" << kModelColor
     << "\" stroke-width=\"6\"/>\n"
     << "<text x=\"" << num(x + 78) << "\" y=\"" << num(y + 4)
     << "\">model</text>\n</g>\n";
}

struct Series {
  std::string name;
  std::string color;
  std::vector<double> ys;
};

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::vector<double>& xs,
                       const std::vector<Series>& series,
                       std::optional<double> reference) {
  const double plot_width = 420.0;
  const double width = kMarginLeft + plot_width + kMarginRight;
  const double height = kMarginTop + kPlotHeight + kMarginBottom;
  std::ostringstream os;
  open_svg(os, width, height, title);
  unit_y_axis(os, kMarginLeft, kMarginLeft + plot_width);

  double lo = *std::min_element(xs.begin(), xs.end());
  double hi = *std::max_element(xs.begin(), xs.end());
  if (hi - lo <= 0.0) {
    lo -= 0.5;
    hi += 0.5;
  }
  auto px = [&](double x) {
    return kMarginLeft + 10.0 + (x - lo) / (hi - lo) * (plot_width - 20.0);
  };
  const double base = kMarginTop + kPlotHeight;
  for (double x : xs) {
    os << "<text x=\"" << num(px(x)) << "\" y=\"" << num(base + 16)
       << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
  }
  os << "<text x=\"" << num(kMarginLeft + plot_width / 2) << "\" y=\""
     << num(base + 36) << "\" text-anchor=\"middle\">" << escape(x_label)
     << "</text>\n";
  if (reference) {
    os << "<line class=\"reference\" x1=\"" << num(kMarginLeft) << "\" y1=\""
       << num(unit_y(*reference)) << "\" x2=\"" << num(kMarginLeft + plot_width)
       << "\" y2=\"" << num(unit_y(*reference)) << "\" stroke=\"" << kRealColor
       << "\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (const auto& s : series) {
    os << "<polyline class=\"series\" data-name=\"" << escape(s.name)
       << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      os << (i ? " " : "") << num(px(xs[i])) << ',' << num(unit_y(s.ys[i]));
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      os << "<circle class=\"point\" cx=\"" << num(px(xs[i])) << "\" cy=\""
         << num(unit_y(s.ys[i])) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("bad number '" + s + "'");
  }
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text,
                                               const std::string& header,
                                               std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ConfigError("unexpected CSV header (want '" + header + "')");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != columns) throw ConfigError("malformed CSV row: " + line);
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << svg;
}

constexpr const char* kPerClassHeader = "class,model_acc,real_acc,gap,flag_zero";
constexpr const char* kSweepHeader =
    "value,cas_top1,cas_topk,is_mean,is_std,fid,kid,cov_trace";

}  // namespace

std::string per_class_chart_svg(const std::vector<GapRow>& rows) {
  const double group = 36.0;
  const double bar = 14.0;
  const double plot_width = std::max(200.0, group * static_cast<double>(rows.size()));
  const double width = kMarginLeft + plot_width + kMarginRight;
  const double height = kMarginTop + kPlotHeight + kMarginBottom;
  std::ostringstream os;
  open_svg(os, width, height, "Per-class accuracy: real vs model (sorted by gap)");
  unit_y_axis(os, kMarginLeft, kMarginLeft + plot_width);
  const double base = kMarginTop + kPlotHeight;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const GapRow& r = rows[i];
    const double x = kMarginLeft + group * static_cast<double>(i) + 4.0;
    const double y_real = unit_y(r.real_acc);
    const double y_model = unit_y(r.model_acc);
    os << "<rect class=\"bar real\" data-class=\"" << r.label << "\" x=\""
       << num(x) << "\" y=\"" << num(y_real) << "\" width=\"" << num(bar)
       << "\" height=\"" << num(base - y_real) << "\" fill=\"" << kRealColor
       << "\"/>\n";
    os << "<rect class=\"bar model\" data-class=\"" << r.label << "\" x=\""
       << num(x + bar) << "\" y=\"" << num(y_model) << "\" width=\"" << num(bar)
       << "\" height=\"" << num(base - y_model) << "\" fill=\"" << kModelColor
       << "\"/>\n";
    os << "<text x=\"" << num(x + bar) << "\" y=\"" << num(base + 14)
       << "\" text-anchor=\"middle\">" << r.label << (r.flag_zero ? "*" : "")
       << "</text>\n";
  }
  legend(os, kMarginLeft, height - 12.0);
  os << "</svg>\n";
  return os.str();
}

std::string nas_chart_svg(const std::vector<NasPoint>& points,
                          double baseline_top1) {
  if (points.empty()) throw ConfigError("no NAS points to plot");
  std::vector<double> xs;
  Series top1{"nas_top1", kModelColor, {}};
  for (const auto& p : points) {
    xs.push_back(p.fraction);
    top1.ys.push_back(p.top1);
  }
  return line_chart("Naive augmentation: top-1 vs added fraction",
                    "synthetic fraction", xs, {top1}, baseline_top1);
}

std::string sweep_chart_svg(const SweepResult& sweep) {
  if (sweep.rows.empty()) throw ConfigError("no sweep rows to plot");
  std::vector<double> xs;
  Series top1{"cas_top1", kModelColor, {}};
  Series topk{"cas_topk", kRealColor, {}};
  for (const auto& r : sweep.rows) {
    xs.push_back(r.value);
    top1.ys.push_back(r.cas_top1);
    topk.ys.push_back(r.cas_topk);
  }
  return line_chart("CAS across sweep", sweep.variable.empty() ? "value" : sweep.variable,
                    xs, {top1, topk}, std::nullopt);
}

std::vector<GapRow> parse_per_class_csv(const std::string& text) {
  std::vector<GapRow> out;
  for (const auto& cells : csv_rows(text, kPerClassHeader, 5)) {
    GapRow r;
    const double label = parse_double(cells[0]);
    if (!(label >= 0.0) || label != std::floor(label)) {
      throw ConfigError("bad class label '" + cells[0] + "'");
    }
    r.label = static_cast<Label>(label);
    r.model_acc = parse_double(cells[1]);
    r.real_acc = parse_double(cells[2]);
    r.gap = parse_double(cells[3]);
    if (cells[4] != "0" && cells[4] != "1") throw ConfigError("bad flag_zero");
    r.flag_zero = cells[4] == "1";
    out.push_back(r);
  }
  return out;
}

SweepResult parse_sweep_csv(const std::string& text) {
  SweepResult out;
  for (const auto& cells : csv_rows(text, kSweepHeader, 8)) {
    SweepRow r;
    r.value = parse_double(cells[0]);
    r.cas_top1 = parse_double(cells[1]);
    r.cas_topk = parse_double(cells[2]);
    r.is_mean = parse_double(cells[3]);
    r.is_std = parse_double(cells[4]);
    r.fid = parse_double(cells[5]);
    r.kid = parse_double(cells[6]);
    r.cov_trace = parse_double(cells[7]);
    out.rows.push_back(r);
  }
  return out;
}

std::vector<std::filesystem::path> plot_file(
    const std::filesystem::path& input, const std::filesystem::path& out_dir) {
  const std::string text = read_text(input);
  std::vector<std::filesystem::path> written;
  std::filesystem::create_directories(out_dir);

  if (input.extension() == ".csv") {
    const std::string header = text.substr(0, text.find('\n'));
    if (header == kPerClassHeader) {
      written.push_back(out_dir / "per_class.svg");
      write_svg(written.back(), per_class_chart_svg(parse_per_class_csv(text)));
    } else if (header == kSweepHeader) {
      const SweepResult sweep = parse_sweep_csv(text);
      if (sweep.rows.empty()) throw ConfigError("sweep.csv has no rows");
      written.push_back(out_dir / "sweep.svg");
      write_svg(written.back(), sweep_chart_svg(sweep));
    } else {
      throw ConfigError("unrecognized CSV: " + input.string());
    }
    return written;
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON " + input.string() + ": " + e.what());
  }
  try {
    if (doc.contains("per_class")) {
      std::vector<GapRow> rows;
      for (const auto& r : doc.at("per_class")) {
        GapRow g;
        g.label = r.at("class").get<Label>();
        auto value = [](const nlohmann::json& v) {
          return v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                             : v.get<double>();
        };
        g.model_acc = value(r.at("model_acc"));
        g.real_acc = value(r.at("real_acc"));
        g.gap = value(r.at("gap"));
        g.flag_zero = r.at("flag_zero").get<bool>();
        rows.push_back(g);
      }
      written.push_back(out_dir / "per_class.svg");
      write_svg(written.back(), per_class_chart_svg(rows));
      std::vector<NasPoint> points;
      for (const auto& p : doc.value("nas", nlohmann::json::array())) {
        points.push_back({p.at("fraction").get<double>(),
                          p.at("train_size").get<std::size_t>(),
                          p.at("top1").get<double>(), p.at("topk").get<double>()});
      }
      if (!points.empty()) {
        written.push_back(out_dir / "nas.svg");
        write_svg(written.back(),
                  nas_chart_svg(points, doc.at("baseline").at("top1").get<double>()));
      }
    } else if (doc.contains("rows")) {
      SweepResult sweep;
      sweep.variable = doc.value("variable", "");
      for (const auto& r : doc.at("rows")) {
        SweepRow row;
        row.value = r.at("value").get<double>();
        row.cas_top1 = r.at("cas_top1").get<double>();
        row.cas_topk = r.at("cas_topk").get<double>();
        sweep.rows.push_back(row);
      }
      if (sweep.rows.empty()) throw ConfigError("sweep has no rows");
      written.push_back(out_dir / "sweep.svg");
      write_svg(written.back(), sweep_chart_svg(sweep));
    } else {
      throw ConfigError("no per_class or sweep rows in " + input.string());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed report " + input.string() + ": " + e.what());
  }
  return written;
}

}  // namespace genmetric
