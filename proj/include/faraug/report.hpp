// faraug/report.hpp

// Copyright 2026  The faraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON evaluation reports and the SVG charts (EER per configuration,
// DET curve, grouped scatter).

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include "json.hpp"

#include "faraug/error.hpp"
#include "faraug/scoring.hpp"

namespace faraug {

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["eer"] = r.eer;
  j["min_dcf"] = r.min_dcf;
  j["thresholds"] = {{"eer", r.eer_threshold}, {"min_dcf", r.dcf_threshold}};
  j["p_target"] = r.p_target;
  j["counts"] = {{"target", r.n_target}, {"nontarget", r.n_nontarget}};
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.name = j.value("name", "");
    r.eer = j.at("eer").get<double>();
    r.min_dcf = j.at("min_dcf").get<double>();
    r.eer_threshold = j.at("thresholds").at("eer").get<double>();
    r.dcf_threshold = j.at("thresholds").at("min_dcf").get<double>();
    r.p_target = j.value("p_target", 0.01);
    r.n_target = j.at("counts").at("target").get<std::size_t>();
    r.n_nontarget = j.at("counts").at("nontarget").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedHeader, std::string("bad report JSON: ") + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorCode::kIo,
          "write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kFileNotFound,
          "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void emit_report(const EvalReport& r, const std::filesystem::path& path) {
  write_text_file(path, to_json(r).dump(2) + "\n");
}

inline EvalReport read_report(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorCode::kMalformedHeader,
          "report is not valid JSON: " + path.string());
  return report_from_json(j);
}

// ---------------------------------------------------------------------------
// SVG.  Coordinates are printed with fixed precision so the bytes depend
// only on the data.

namespace svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  return colors[i % 8];
}

struct Plot {
  double width = 480, height = 360;
  double left = 60, right = 20, top = 30, bottom = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  std::ostringstream body;

  double px(double x) const {
    return left + (x - x0) / (x1 - x0) * (width - left - right);
  }
  double py(double y) const {
    return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom);
  }

  void axes(const std::string& title, const std::string& xlabel,
            const std::string& ylabel) {
    body << "<rect x=\"" << num(left) << "\" y=\"" << num(top)
         << "\" width=\"" << num(width - left - right) << "\" height=\""
         << num(height - top - bottom)
         << "\" fill=\"none\" stroke=\"#444\"/>\n";
    body << "<text x=\"" << num(width / 2) << "\" y=\"18\" text-anchor=\"middle\">"
         << escape(title) << "</text>\n";
    body << "<text x=\"" << num(width / 2) << "\" y=\"" << num(height - 10)
         << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    body << "<text x=\"14\" y=\"" << num(height / 2)
         << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
         << num(height / 2) << ")\">" << escape(ylabel) << "</text>\n";
  }

  void tick_x(double x, const std::string& label) {
    body << "<text x=\"" << num(px(x)) << "\" y=\"" << num(height - bottom + 16)
         << "\" text-anchor=\"middle\" font-size=\"10\">" << escape(label)
         << "</text>\n";
  }
  void tick_y(double y, const std::string& label) {
    body << "<text x=\"" << num(left - 4) << "\" y=\"" << num(py(y) + 3)
         << "\" text-anchor=\"end\" font-size=\"10\">" << escape(label)
         << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const char* color, const std::string& cls) {
    body << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
         << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      body << (i ? " " : "") << num(px(pts[i].first)) << ","
           << num(py(pts[i].second));
    body << "\"/>\n";
  }

  void point(double x, double y, const char* color, const std::string& cls) {
    body << "<circle class=\"" << cls << "\" cx=\"" << num(px(x)) << "\" cy=\""
         << num(py(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }

  void legend(std::size_t i, const std::string& label, const char* color) {
    const double y = top + 14 + 14 * static_cast<double>(i);
    body << "<text x=\"" << num(width - right - 6) << "\" y=\"" << num(y)
         << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">"
         << escape(label) << "</text>\n";
  }

  std::string str() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
       << "\" height=\"" << num(height) << "\" font-family=\"sans-serif\">\n"
       << body.str() << "</svg>\n";
    return os.str();
  }
};

}  // namespace svg

/// EER and minDCF of several configurations as two line series, one point
/// per report in the given order.
inline std::string eer_chart_svg(const std::vector<EvalReport>& reports) {
  require(!reports.empty(), ErrorCode::kInvalidArgument, "no reports to plot");
  svg::Plot p;
  p.x0 = -0.5;
  p.x1 = static_cast<double>(reports.size()) - 0.5;
  double ymax = 0.0;
  for (const auto& r : reports) ymax = std::max({ymax, 100.0 * r.eer, r.min_dcf * 100.0});
  p.y1 = ymax > 0.0 ? 1.1 * ymax : 1.0;
  p.axes("EER / minDCF per configuration", "configuration", "EER (%) / minDCF x100");
  std::vector<std::pair<double, double>> eer, dcf;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double x = static_cast<double>(i);
    eer.push_back({x, 100.0 * reports[i].eer});
    dcf.push_back({x, 100.0 * reports[i].min_dcf});
    p.tick_x(x, reports[i].name.empty() ? std::to_string(i) : reports[i].name);
  }
  for (int k = 0; k <= 4; ++k) p.tick_y(p.y1 * k / 4, svg::num(p.y1 * k / 4));
  p.polyline(eer, svg::palette(0), "eer-series");
  p.polyline(dcf, svg::palette(1), "dcf-series");
  for (const auto& [x, y] : eer) p.point(x, y, svg::palette(0), "eer-point");
  for (const auto& [x, y] : dcf) p.point(x, y, svg::palette(1), "dcf-point");
  p.legend(0, "EER (%)", svg::palette(0));
  p.legend(1, "minDCF x100", svg::palette(1));
  return p.str();
}

/// DET curve on normal-deviate axes, probabilities clamped to [1e-4, 0.5].
inline std::string det_curve_svg(const LabeledScores& s,
                                 const std::string& title = "DET curve") {
  const auto pts = operating_points(s.target, s.nontarget);
  const boost::math::normal_distribution<double> nd;
  const double lo = 1e-4, hi = 0.5;
  auto probit = [&](double p) {
    return boost::math::quantile(nd, std::clamp(p, lo, hi));
  };
  svg::Plot p;
  p.x0 = p.y0 = probit(lo);
  p.x1 = p.y1 = probit(hi);
  p.axes(title, "false alarm probability (%)", "miss probability (%)");
  for (double v : {0.01, 0.1, 1.0, 5.0, 20.0, 50.0}) {
    std::ostringstream l;
    l << v;
    p.tick_x(probit(v / 100.0), l.str());
    p.tick_y(probit(v / 100.0), l.str());
  }
  std::vector<std::pair<double, double>> curve;
  for (const auto& op : pts) curve.push_back({probit(op.p_fa), probit(op.p_miss)});
  p.polyline(curve, svg::palette(0), "det-curve");
  const EerResult e = compute_eer(s.target, s.nontarget);
  p.point(probit(e.eer), probit(e.eer), svg::palette(1), "eer-marker");
  return p.str();
}

struct ScatterGroup {
  std::string label;
  std::vector<double> values;
};

/// One column of points per group; y axis in the values' unit.
inline std::string group_scatter_svg(const std::vector<ScatterGroup>& groups,
                                     const std::string& title,
                                     const std::string& ylabel) {
  require(!groups.empty(), ErrorCode::kInvalidArgument, "nothing to plot");
  std::size_t n = 0;
  double ymax = 0.0;
  for (const auto& g : groups) {
    n += g.values.size();
    for (double v : g.values) ymax = std::max(ymax, v);
  }
  require(n > 0, ErrorCode::kInvalidArgument, "nothing to plot");
  svg::Plot p;
  p.x0 = -0.5;
  p.x1 = static_cast<double>(groups.size()) - 0.5;
  p.y1 = ymax > 0.0 ? 1.15 * ymax : 1.0;
  p.axes(title, "group", ylabel);
  for (int k = 0; k <= 4; ++k) p.tick_y(p.y1 * k / 4, svg::num(p.y1 * k / 4));
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    p.tick_x(static_cast<double>(gi), g.label);
    p.body << "<g class=\"series\" data-label=\"" << svg::escape(g.label)
           << "\">\n";
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      // Spread points horizontally inside the group's column.
      const double jitter =
          g.values.size() > 1
              ? -0.25 + 0.5 * static_cast<double>(i) / (g.values.size() - 1)
              : 0.0;
      p.point(static_cast<double>(gi) + jitter, g.values[i], svg::palette(gi),
              "point");
    }
    p.body << "</g>\n";
  }
  return p.str();
}

}  // namespace faraug
