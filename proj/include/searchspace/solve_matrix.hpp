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

#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "searchspace/types.hpp"

namespace searchspace {

using GoldMap = std::map<std::string, std::string>;
using EquivFn = std::function<bool(const std::string&, const std::string&)>;

// Boolean correctness table problems x (method, sample index), plus the
// derived per-method solved-problem sets (A, B, C in enum order). Immutable
// after construction; matrix entries are judged once and replayed by every
// downstream experiment so voting and re-ranking never re-grade.
class SolveMatrix {
 public:
  // Correctness of one run. Throws if the entry does not exist.
  bool correct(const std::string& problem_id, Method m, int sample_index) const {
    auto it = entries_.find(problem_id);
    if (it == entries_.end()) {
      throw RuntimeError("no matrix entries for problem " + problem_id);
    }
    const auto& per_method = it->second[method_index(m)];
    if (sample_index < 0 || static_cast<std::size_t>(sample_index) >= per_method.size()) {
      throw RuntimeError("no matrix entry (" + problem_id + ", " +
                         std::string(method_name(m)) + ", " +
                         std::to_string(sample_index) + ")");
    }
    return per_method[static_cast<std::size_t>(sample_index)] != 0;
  }

  int run_count(const std::string& problem_id, Method m) const {
    auto it = entries_.find(problem_id);
    if (it == entries_.end()) return 0;
    return static_cast<int>(it->second[method_index(m)].size());
  }

  // Problems solved by `m` (some run of `m` is correct): the sets A/B/C.
  const std::set<std::string>& solved_set(Method m) const {
    return solved_[method_index(m)];
  }

  const std::set<Method>& methods_present() const { return methods_present_; }

  std::vector<std::string> problem_ids() const {
    std::vector<std::string> ids;
    ids.reserve(entries_.size());
    for (const auto& [id, _] : entries_) ids.push_back(id);
    return ids;  // std::map keeps them sorted
  }

  std::size_t problem_count() const { return entries_.size(); }

  friend SolveMatrix build_solve_matrix(const RunPool&, const GoldMap&, const EquivFn&);

  void write_csv(std::ostream& os) const {
    os << "problem_id,method,sample_index,correct\n";
    for (const auto& [id, per_method] : entries_) {
      for (Method m : kAllMethods) {
        const auto& bits = per_method[method_index(m)];
        for (std::size_t i = 0; i < bits.size(); ++i) {
          os << util::csv_field(id) << ',' << method_name(m) << ',' << i << ','
             << (bits[i] ? 1 : 0) << '\n';
        }
      }
    }
  }

 private:
  // per problem, per method: correctness by sample index
  std::map<std::string, std::array<std::vector<unsigned char>, kMethodCount>> entries_;
  std::array<std::set<std::string>, kMethodCount> solved_;
  std::set<Method> methods_present_;
};

// Judges every run in the pool against the gold answers. A run with no
// extracted answer is incorrect, not excluded. A missing gold answer is a
// hard error naming the problem.
inline SolveMatrix build_solve_matrix(const RunPool& pool, const GoldMap& gold,
                                      const EquivFn& equiv) {
  SolveMatrix matrix;
  for (const Run& run : pool.runs) {
    auto gold_it = gold.find(run.problem_id);
    if (gold_it == gold.end()) {
      throw ValidationError("no gold answer for problem " + run.problem_id);
    }
    bool correct = run.extracted_answer.has_value() &&
                   equiv(*run.extracted_answer, gold_it->second);
    auto& per_method = matrix.entries_[run.problem_id][method_index(run.method)];
    if (per_method.size() <= static_cast<std::size_t>(run.sample_index)) {
      per_method.resize(static_cast<std::size_t>(run.sample_index) + 1, 0);
    }
    per_method[static_cast<std::size_t>(run.sample_index)] = correct ? 1 : 0;
    matrix.methods_present_.insert(run.method);
    if (correct) matrix.solved_[method_index(run.method)].insert(run.problem_id);
  }
  return matrix;
}

}  // namespace searchspace
