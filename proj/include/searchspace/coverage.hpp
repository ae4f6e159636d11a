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
#include <set>
#include <string>
#include <vector>

#include "searchspace/sampling.hpp"
#include "searchspace/solve_matrix.hpp"

// Search-space metrics: upper-bound accuracy (pass@selection), incremental
// coverage curves, runs-to-threshold reductions, Venn partitions, per-domain
// means, and table averages.
namespace searchspace::coverage {

using sampling::Selection;

// Upper-bound accuracy of a selection: the fraction of problems with at
// least one correct run among their selected runs. This is the ceiling any
// verifier could reach on that selection.
inline double upper_bound_accuracy(const std::vector<Selection>& selections,
                                   const SolveMatrix& matrix) {
  if (selections.empty()) {
    throw ValidationError("upper_bound_accuracy: empty problem set");
  }
  std::size_t covered = 0;
  for (const Selection& sel : selections) {
    for (const sampling::RunRef& ref : sel.runs) {
      if (matrix.correct(sel.problem_id, ref.method, ref.sample_index)) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(selections.size());
}

// Upper-bound accuracy as a function of the number of runs consumed in a
// fixed per-problem ordering. Nondecreasing by construction.
struct CoverageCurve {
  std::vector<double> values;  // values[i] = accuracy using the first i+1 runs
  std::string provenance;      // e.g. "text/generation-order", "uniform"

  double at(int k) const {
    if (k < 1 || static_cast<std::size_t>(k) > values.size()) {
      throw ValidationError("coverage curve has no point k=" + std::to_string(k));
    }
    return values[static_cast<std::size_t>(k - 1)];
  }
  int max_k() const { return static_cast<int>(values.size()); }
};

inline CoverageCurve coverage_curve(const std::vector<Selection>& orderings,
                                    const SolveMatrix& matrix,
                                    std::string provenance = {}) {
  if (orderings.empty()) throw ValidationError("coverage_curve: empty problem set");
  std::size_t length = orderings.front().runs.size();
  for (const Selection& sel : orderings) {
    if (sel.runs.size() != length) {
      throw ValidationError("coverage_curve: ragged orderings (problem " +
                            sel.problem_id + ")");
    }
  }
  CoverageCurve curve;
  curve.provenance = std::move(provenance);
  std::vector<char> covered(orderings.size(), 0);
  std::size_t covered_count = 0;
  for (std::size_t k = 0; k < length; ++k) {
    for (std::size_t p = 0; p < orderings.size(); ++p) {
      if (covered[p]) continue;
      const sampling::RunRef& ref = orderings[p].runs[k];
      if (matrix.correct(orderings[p].problem_id, ref.method, ref.sample_index)) {
        covered[p] = 1;
        ++covered_count;
      }
    }
    curve.values.push_back(static_cast<double>(covered_count) /
                           static_cast<double>(orderings.size()));
  }
  return curve;
}

// Smallest k with acc[k] >= target; nullopt when the curve never gets there.
inline std::optional<int> runs_to_reach(const CoverageCurve& curve, double target) {
  if (target < 0.0 || target > 1.0) {
    throw ValidationError("runs_to_reach: target outside [0,1]");
  }
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (curve.values[i] >= target) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

// 100 * (baseline_k - achieved_k) / baseline_k, in percent.
inline double reduction_percent(int baseline_k, int achieved_k) {
  if (baseline_k == 0) throw ValidationError("reduction_percent: zero baseline");
  if (achieved_k < 1 || baseline_k < achieved_k) {
    throw ValidationError("reduction_percent: requires baseline_k >= achieved_k >= 1");
  }
  return 100.0 * static_cast<double>(baseline_k - achieved_k) /
         static_cast<double>(baseline_k);
}

// The seven disjoint regions of the three per-method solved sets, in enum
// order: A = Text, B = Code, C = CR.
struct VennPartition {
  std::size_t a_only = 0, b_only = 0, c_only = 0;
  std::size_t ab_only = 0, ac_only = 0, bc_only = 0;
  std::size_t abc = 0;
  std::size_t union_size = 0;

  std::size_t region_sum() const {
    return a_only + b_only + c_only + ab_only + ac_only + bc_only + abc;
  }
  std::size_t set_size(Method m) const {
    switch (m) {
      case Method::Text: return a_only + ab_only + ac_only + abc;
      case Method::Code: return b_only + ab_only + bc_only + abc;
      case Method::CR: return c_only + ac_only + bc_only + abc;
    }
    return 0;
  }
};

inline VennPartition venn_partition(const SolveMatrix& matrix) {
  if (matrix.methods_present().size() != kMethodCount) {
    throw ValidationError("venn_partition: matrix must cover all three methods");
  }
  const auto& a = matrix.solved_set(Method::Text);
  const auto& b = matrix.solved_set(Method::Code);
  const auto& c = matrix.solved_set(Method::CR);
  std::set<std::string> all;
  all.insert(a.begin(), a.end());
  all.insert(b.begin(), b.end());
  all.insert(c.begin(), c.end());
  VennPartition part;
  part.union_size = all.size();
  for (const std::string& id : all) {
    bool in_a = a.count(id) > 0, in_b = b.count(id) > 0, in_c = c.count(id) > 0;
    if (in_a && in_b && in_c) ++part.abc;
    else if (in_a && in_b) ++part.ab_only;
    else if (in_a && in_c) ++part.ac_only;
    else if (in_b && in_c) ++part.bc_only;
    else if (in_a) ++part.a_only;
    else if (in_b) ++part.b_only;
    else ++part.c_only;
  }
  return part;
}

// |union of the other two sets minus the focal set| / |union of all three|:
// the share of the joint search space the focal method never reaches.
inline double unexplored_fraction(const SolveMatrix& matrix, Method focal) {
  if (matrix.methods_present().size() != kMethodCount) {
    throw ValidationError("unexplored_fraction: matrix must cover all three methods");
  }
  std::set<std::string> others, all;
  for (Method m : kAllMethods) {
    const auto& solved = matrix.solved_set(m);
    all.insert(solved.begin(), solved.end());
    if (m != focal) others.insert(solved.begin(), solved.end());
  }
  if (all.empty()) throw ValidationError("unexplored_fraction: empty search space");
  const auto& focal_set = matrix.solved_set(focal);
  std::size_t missed = 0;
  for (const std::string& id : others) {
    if (!focal_set.count(id)) ++missed;
  }
  return static_cast<double>(missed) / static_cast<double>(all.size());
}

inline double column_average(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("column_average: empty column");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// Mean per-run correctness for each (domain, method), over all runs of the
// domain's problems. Domains without any runs are excluded with a warning.
inline std::map<std::string, std::array<double, kMethodCount>> per_domain_means(
    const SolveMatrix& matrix, const std::vector<Problem>& problems,
    std::vector<std::string>* warnings = nullptr) {
  std::map<std::string, std::string> domain_of;
  std::set<std::string> domains;
  for (const Problem& p : problems) {
    domain_of[p.id] = p.domain;
    domains.insert(p.domain);
  }
  std::map<std::string, std::array<long long, kMethodCount>> correct, total;
  for (const std::string& id : matrix.problem_ids()) {
    auto it = domain_of.find(id);
    if (it == domain_of.end()) continue;
    for (Method m : kAllMethods) {
      int n = matrix.run_count(id, m);
      for (int i = 0; i < n; ++i) {
        total[it->second][method_index(m)]++;
        if (matrix.correct(id, m, i)) correct[it->second][method_index(m)]++;
      }
    }
  }
  std::map<std::string, std::array<double, kMethodCount>> means;
  for (const std::string& domain : domains) {
    auto tot_it = total.find(domain);
    long long any = 0;
    if (tot_it != total.end()) {
      for (long long t : tot_it->second) any += t;
    }
    if (any == 0) {
      if (warnings) {
        warnings->push_back("per_domain_means: domain '" + domain +
                            "' has no runs; excluded");
      }
      continue;
    }
    std::array<double, kMethodCount> row{};
    for (Method m : kAllMethods) {
      long long t = tot_it->second[method_index(m)];
      long long c = correct.count(domain) ? correct[domain][method_index(m)] : 0;
      row[method_index(m)] = t == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(t);
    }
    means[domain] = row;
  }
  return means;
}

}  // namespace searchspace::coverage
