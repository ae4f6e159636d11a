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

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "searchspace/coverage.hpp"
#include "searchspace/sampling.hpp"
#include "searchspace/solver.hpp"

// CSV/JSON report writers. Accuracies are emitted as percentages with two
// decimals; integer rounding is presentation-only and shown in dedicated
// columns. Every report embeds the config hash on its first line.
namespace searchspace::report {

inline std::string pct(double accuracy) {
  return util::format_fixed(accuracy * 100.0, 2);
}

struct AccuracyRow {
  int k = 0;
  std::string schedule;  // e.g. "(2,2,1)"; empty for base rows
  std::array<std::optional<double>, kMethodCount> per_method;
  std::optional<double> uniform;
};

// Coverage (or verification-section) table: one row per k, columns
// Text/Code/CR/Uniform, plus an average row over the k-schedule rows.
inline void write_accuracy_table_csv(std::ostream& os, const std::string& config_hash,
                                     const std::optional<AccuracyRow>& base_row,
                                     const std::vector<AccuracyRow>& rows,
                                     std::string_view kind) {
  os << "# searchspace " << kind << " table config=" << config_hash << "\n";
  os << "k,schedule,text,code,cr,uniform\n";
  auto write_row = [&os](const std::string& label, const AccuracyRow& row) {
    os << label << ',' << util::csv_field(row.schedule);
    for (Method m : kAllMethods) {
      os << ',';
      const auto& cell = row.per_method[method_index(m)];
      if (cell) os << pct(*cell);
    }
    os << ',';
    if (row.uniform) os << pct(*row.uniform);
    os << '\n';
  };
  if (base_row) write_row("base", *base_row);
  for (const AccuracyRow& row : rows) write_row(std::to_string(row.k), row);

  AccuracyRow average;
  for (Method m : kAllMethods) {
    std::vector<double> column;
    for (const AccuracyRow& row : rows) {
      if (row.per_method[method_index(m)]) column.push_back(*row.per_method[method_index(m)]);
    }
    if (!column.empty()) {
      average.per_method[method_index(m)] = coverage::column_average(column);
    }
  }
  std::vector<double> uniform_column;
  for (const AccuracyRow& row : rows) {
    if (row.uniform) uniform_column.push_back(*row.uniform);
  }
  if (!uniform_column.empty()) {
    average.uniform = coverage::column_average(uniform_column);
  }
  if (!rows.empty()) write_row("average", average);
}

inline void write_venn_json(std::ostream& os, const std::string& config_hash,
                            const coverage::VennPartition& part,
                            const std::map<Method, double>& unexplored,
                            std::size_t problem_count) {
  nlohmann::json j;
  j["config"] = config_hash;
  j["methods"] = {{"A", "text"}, {"B", "code"}, {"C", "cr"}};
  j["regions"] = {
      {"A_only", part.a_only},   {"B_only", part.b_only},   {"C_only", part.c_only},
      {"AB_only", part.ab_only}, {"AC_only", part.ac_only}, {"BC_only", part.bc_only},
      {"ABC", part.abc},
  };
  j["set_sizes"] = {
      {"text", part.set_size(Method::Text)},
      {"code", part.set_size(Method::Code)},
      {"cr", part.set_size(Method::CR)},
  };
  j["union"] = part.union_size;
  j["problems"] = problem_count;
  nlohmann::json frac;
  for (const auto& [m, f] : unexplored) frac[std::string(method_name(m))] = f;
  j["unexplored_fraction"] = frac;
  os << j.dump(2) << "\n";
}

inline void write_domain_means_csv(
    std::ostream& os, const std::string& config_hash,
    const std::map<std::string, std::array<double, kMethodCount>>& means) {
  os << "# searchspace per-domain mean accuracy config=" << config_hash << "\n";
  os << "domain,text,code,cr\n";
  for (const auto& [domain, row] : means) {
    os << util::csv_field(domain);
    for (Method m : kAllMethods) os << ',' << pct(row[method_index(m)]);
    os << '\n';
  }
}

struct ReductionRow {
  Method method;
  double upper_bound = 0.0;  // the method's own n-run upper bound
  int single_method_runs = 0;
  std::optional<int> uniform_runs;
};

inline void write_reductions_csv(std::ostream& os, const std::string& config_hash,
                                 const std::vector<ReductionRow>& rows) {
  os << "# searchspace runs-to-threshold reductions config=" << config_hash << "\n";
  os << "method,upper_bound,single_method_runs,uniform_runs,reduction_percent,"
        "reduction_rounded\n";
  std::vector<double> reductions;
  for (const ReductionRow& row : rows) {
    os << method_name(row.method) << ',' << pct(row.upper_bound) << ','
       << row.single_method_runs << ',';
    if (row.uniform_runs) os << *row.uniform_runs;
    os << ',';
    // reduction is defined only when uniform was at least as fast
    if (row.uniform_runs && *row.uniform_runs <= row.single_method_runs &&
        *row.uniform_runs >= 1) {
      double r = coverage::reduction_percent(row.single_method_runs, *row.uniform_runs);
      reductions.push_back(r);
      os << util::format_fixed(r, 2) << ',' << util::format_fixed(r, 0);
    } else {
      os << ',';
    }
    os << '\n';
  }
  if (!reductions.empty()) {
    double mean = coverage::column_average(reductions);
    os << "mean,,,," << util::format_fixed(mean, 2) << ',' << util::format_fixed(mean, 0)
       << '\n';
  }
}

inline void write_cost_csv(std::ostream& os, const std::string& config_hash,
                           const solver::CostLedger& ledger, Method baseline) {
  os << "# searchspace token-cost ledger config=" << config_hash << "\n";
  os << "method,runs,prompt_tokens,completion_tokens,tokens_per_run,ratio_vs_"
     << method_name(baseline) << "\n";
  for (Method m : kAllMethods) {
    const auto& t = ledger.totals(m);
    os << method_name(m) << ',' << t.run_count << ',' << t.prompt_tokens << ','
       << t.completion_tokens << ',';
    if (t.run_count > 0) {
      os << util::format_fixed(
          static_cast<double>(t.total_tokens()) / static_cast<double>(t.run_count), 1);
    }
    os << ',';
    if (t.run_count > 0 && ledger.totals(baseline).run_count > 0) {
      os << util::format_fixed(solver::cost_ratio(ledger, m, baseline), 2);
    }
    os << '\n';
  }
}

}  // namespace searchspace::report
