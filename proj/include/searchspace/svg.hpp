// Copyright 2026 The searchspace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "searchspace/util.hpp"

// Static line chart of coverage curves: runs on the x-axis, upper-bound
// accuracy on the y-axis, dashed horizontal lines for single-method upper
// bounds, and a star marker where the uniform curve crosses each of them.
namespace searchspace::svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> values;  // values[i] at k = i+1, in [0,1]
  bool emphasize = false;
};

struct Threshold {
  std::string label;
  std::string color;
  double value = 0.0;               // in [0,1]
  std::optional<int> crossing_k;    // uniform run count where it is reached
};

inline void write_coverage_chart(std::ostream& os, const std::string& title,
                                 const std::vector<Series>& series,
                                 const std::vector<Threshold>& thresholds) {
  constexpr double kWidth = 860, kHeight = 540;
  constexpr double kLeft = 70, kRight = 830, kTop = 60, kBottom = 480;
  int max_k = 1;
  for (const Series& s : series) max_k = std::max(max_k, static_cast<int>(s.values.size()));

  auto x_of = [&](double k) {
    if (max_k == 1) return (kLeft + kRight) / 2;
    return kLeft + (k - 1.0) / (max_k - 1.0) * (kRight - kLeft);
  };
  auto y_of = [&](double acc) { return kBottom - acc * (kBottom - kTop); };
  auto fmt = [](double v) { return util::format_fixed(v, 1); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
     << "\">\n";
  os << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"white\"/>\n";
  os << "  <text x=\"" << fmt((kLeft + kRight) / 2)
     << "\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">" << title << "</text>\n";

  // axes and gridlines
  os << "  <line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom) << "\" x2=\""
     << fmt(kRight) << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";
  os << "  <line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\""
     << fmt(kLeft) << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";
  for (int decile = 0; decile <= 10; ++decile) {
    double acc = decile / 10.0;
    os << "  <line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y_of(acc)) << "\" x2=\""
       << fmt(kRight) << "\" y2=\"" << fmt(y_of(acc))
       << "\" stroke=\"#eeeeee\"/>\n";
    os << "  <text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y_of(acc) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << util::format_fixed(acc * 100.0, 0) << "%</text>\n";
  }
  int tick_step = std::max(1, max_k / 12);
  for (int k = 1; k <= max_k; k += tick_step) {
    os << "  <text x=\"" << fmt(x_of(k)) << "\" y=\"" << fmt(kBottom + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << k
       << "</text>\n";
  }
  os << "  <text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"" << fmt(kBottom + 40)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">runs"
        "</text>\n";

  for (const Threshold& t : thresholds) {
    os << "  <line class=\"threshold\" x1=\"" << fmt(kLeft) << "\" y1=\""
       << fmt(y_of(t.value)) << "\" x2=\"" << fmt(kRight) << "\" y2=\""
       << fmt(y_of(t.value)) << "\" stroke=\"" << t.color
       << "\" stroke-dasharray=\"6,4\" opacity=\"0.6\"/>\n";
    os << "  <text x=\"" << fmt(kRight + 4) << "\" y=\"" << fmt(y_of(t.value) + 4)
       << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" << t.color << "\">"
       << t.label << "</text>\n";
  }

  for (const Series& s : series) {
    os << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
       << (s.emphasize ? 2.5 : 1.5) << "\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (i) os << ' ';
      os << fmt(x_of(static_cast<double>(i + 1))) << ',' << fmt(y_of(s.values[i]));
    }
    os << "\"/>\n";
  }

  // star markers at the crossing points
  for (const Threshold& t : thresholds) {
    if (!t.crossing_k) continue;
    double cx = x_of(static_cast<double>(*t.crossing_k));
    double cy = y_of(t.value);
    os << "  <polygon class=\"threshold-star\" fill=\"" << t.color << "\" points=\"";
    constexpr double kOuter = 8.0, kInner = 3.2;
    for (int vertex = 0; vertex < 10; ++vertex) {
      double angle = -1.5707963 + vertex * 0.62831853;  // -pi/2 + k*pi/5
      double r = (vertex % 2 == 0) ? kOuter : kInner;
      if (vertex) os << ' ';
      os << fmt(cx + r * std::cos(angle)) << ',' << fmt(cy + r * std::sin(angle));
    }
    os << "\"><title>" << t.label << " reached at run " << *t.crossing_k
       << "</title></polygon>\n";
  }

  // legend
  double ly = kTop - 18;
  double lx = kLeft;
  for (const Series& s : series) {
    os << "  <rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly - 9) << "\" width=\"18\" "
          "height=\"4\" fill=\"" << s.color << "\"/>\n";
    os << "  <text x=\"" << fmt(lx + 24) << "\" y=\"" << fmt(ly)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    lx += 24 + 10 * static_cast<double>(s.label.size()) + 24;
  }
  os << "</svg>\n";
}

}  // namespace searchspace::svg
