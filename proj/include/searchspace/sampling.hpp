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

#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "searchspace/types.hpp"

// Uniform (round-robin) and single-method run selection over a frozen pool.
namespace searchspace::sampling {

// Per-method sample counts for a total budget, ordered by base performance.
// Any two counts differ by at most one; the surplus goes to the first
// methods in order.
struct ScheduleEntry {
  Method method;
  int count = 0;
};

struct Schedule {
  std::vector<ScheduleEntry> entries;  // in selection order
  int total_k = 0;

  int count_for(Method m) const {
    for (const ScheduleEntry& e : entries)
      if (e.method == m) return e.count;
    return 0;
  }

  // "(2,2,1)" in the fixed {Text, Code, CR} print order, as the tables do.
  std::string display() const {
    std::string out = "(";
    for (std::size_t i = 0; i < kAllMethods.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(count_for(kAllMethods[i]));
    }
    return out + ")";
  }
};

// Methods sorted by base (k=1) score, descending; ties fall back to the
// fixed enum order {Text, Code, CR}.
inline std::vector<Method> method_order(const std::map<Method, double>& base_scores) {
  std::vector<Method> order;
  for (Method m : kAllMethods) {
    if (!base_scores.count(m)) {
      throw ValidationError(std::string("method_order: missing base score for ") +
                            std::string(method_name(m)));
    }
    order.push_back(m);
  }
  std::stable_sort(order.begin(), order.end(), [&](Method a, Method b) {
    return base_scores.at(a) > base_scores.at(b);
  });
  return order;
}

inline Schedule uniform_schedule(int total_k, const std::vector<Method>& order) {
  if (total_k < 0) throw ValidationError("uniform_schedule: negative budget");
  if (order.size() != kMethodCount) {
    throw ValidationError("uniform_schedule: order must list all three methods");
  }
  Schedule schedule;
  schedule.total_k = total_k;
  int base = total_k / static_cast<int>(kMethodCount);
  int surplus = total_k % static_cast<int>(kMethodCount);
  for (std::size_t i = 0; i < order.size(); ++i) {
    schedule.entries.push_back(
        {order[i], base + (static_cast<int>(i) < surplus ? 1 : 0)});
  }
  return schedule;
}

// Reference to one run inside a pool.
struct RunRef {
  Method method;
  int sample_index = 0;
  friend bool operator==(const RunRef&, const RunRef&) = default;
};

// Ordered run selection for one problem.
struct Selection {
  std::string problem_id;
  std::vector<RunRef> runs;
  std::string source;   // schedule or single-method description
  std::string pool_id;  // config hash of the source pool, when known
};

// Read-only index of a frozen pool: per (problem, method), runs sorted by
// sample index.
class PoolIndex {
 public:
  static PoolIndex build(const RunPool& pool) {
    PoolIndex index;
    for (std::size_t i = 0; i < pool.runs.size(); ++i) {
      const Run& run = pool.runs[i];
      auto& slot = index.by_problem_[run.problem_id][method_index(run.method)];
      if (slot.size() <= static_cast<std::size_t>(run.sample_index)) {
        slot.resize(static_cast<std::size_t>(run.sample_index) + 1,
                    std::numeric_limits<std::size_t>::max());
      }
      slot[static_cast<std::size_t>(run.sample_index)] = i;
    }
    index.pool_ = &pool;
    return index;
  }

  std::vector<std::string> problem_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : by_problem_) ids.push_back(id);
    return ids;
  }

  int run_count(const std::string& problem_id, Method m) const {
    auto it = by_problem_.find(problem_id);
    if (it == by_problem_.end()) return 0;
    return static_cast<int>(it->second[method_index(m)].size());
  }

  const Run& run(const std::string& problem_id, Method m, int sample_index) const {
    auto it = by_problem_.find(problem_id);
    if (it != by_problem_.end()) {
      const auto& slot = it->second[method_index(m)];
      if (sample_index >= 0 && static_cast<std::size_t>(sample_index) < slot.size() &&
          slot[static_cast<std::size_t>(sample_index)] !=
              std::numeric_limits<std::size_t>::max()) {
        return pool_->runs[slot[static_cast<std::size_t>(sample_index)]];
      }
    }
    throw RuntimeError("pool has no run (" + problem_id + ", " +
                       std::string(method_name(m)) + ", " +
                       std::to_string(sample_index) + ")");
  }

  const RunPool& pool() const { return *pool_; }

 private:
  const RunPool* pool_ = nullptr;
  std::map<std::string, std::array<std::vector<std::size_t>, kMethodCount>> by_problem_;
};

struct SelectOptions {
  // When true, each (problem, method) run list is permuted by a seeded
  // shuffle before prefixes are taken, for Monte-Carlo curve averaging.
  // Default is generation order, which replays table-style experiments
  // exactly.
  bool shuffled = false;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<int> sample_order(const PoolIndex& index,
                                     const std::string& problem_id, Method m,
                                     const SelectOptions& options) {
  std::vector<int> order(static_cast<std::size_t>(index.run_count(problem_id, m)));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  if (options.shuffled) {
    auto rng = util::seeded_rng(util::derive_seed(
        options.seed, {"select", problem_id, method_name(m)}));
    util::fisher_yates(order, rng);
  }
  return order;
}

}  // namespace detail

// Round-robin interleaving per problem: one run from each scheduled method
// in schedule order, repeating until every count is exhausted (methods whose
// count is spent are skipped). Deterministic; errors if the pool lacks the
// scheduled runs.
inline std::vector<Selection> select_runs(const PoolIndex& index,
                                          const Schedule& schedule,
                                          const SelectOptions& options = {}) {
  std::vector<Selection> selections;
  for (const std::string& problem_id : index.problem_ids()) {
    Selection sel;
    sel.problem_id = problem_id;
    sel.source = "uniform" + schedule.display() +
                 (options.shuffled ? "/shuffled" : "/generation-order");
    sel.pool_id = index.pool().config_hash;
    std::map<Method, std::vector<int>> orders;
    for (const ScheduleEntry& entry : schedule.entries) {
      int available = index.run_count(problem_id, entry.method);
      if (available < entry.count) {
        throw ValidationError(
            "insufficient runs for (" + problem_id + ", " +
            std::string(method_name(entry.method)) + "): have " +
            std::to_string(available) + ", scheduled " + std::to_string(entry.count));
      }
      orders[entry.method] = detail::sample_order(index, problem_id, entry.method, options);
    }
    for (int round = 0;; ++round) {
      bool any = false;
      for (const ScheduleEntry& entry : schedule.entries) {
        if (round < entry.count) {
          sel.runs.push_back({entry.method, orders[entry.method][round]});
          any = true;
        }
      }
      if (!any) break;
    }
    selections.push_back(std::move(sel));
  }
  return selections;
}

// First k runs of one method per problem (generation order, or the seeded
// permutation prefix in shuffle mode).
inline std::vector<Selection> single_method_selection(const PoolIndex& index,
                                                      Method m, int k,
                                                      const SelectOptions& options = {}) {
  if (k < 0) throw ValidationError("single_method_selection: negative k");
  std::vector<Selection> selections;
  for (const std::string& problem_id : index.problem_ids()) {
    int available = index.run_count(problem_id, m);
    if (available < k) {
      throw ValidationError("insufficient runs for (" + problem_id + ", " +
                            std::string(method_name(m)) + "): have " +
                            std::to_string(available) + ", requested " +
                            std::to_string(k));
    }
    std::vector<int> order = detail::sample_order(index, problem_id, m, options);
    Selection sel;
    sel.problem_id = problem_id;
    sel.source = std::string(method_name(m)) + ":" + std::to_string(k) +
                 (options.shuffled ? "/shuffled" : "/generation-order");
    sel.pool_id = index.pool().config_hash;
    for (int i = 0; i < k; ++i) sel.runs.push_back({m, order[static_cast<std::size_t>(i)]});
    selections.push_back(std::move(sel));
  }
  return selections;
}

inline void write_selection_csv(std::ostream& os,
                                const std::vector<Selection>& selections) {
  os << "problem_id,position,method,sample_index\n";
  for (const Selection& sel : selections) {
    for (std::size_t i = 0; i < sel.runs.size(); ++i) {
      os << util::csv_field(sel.problem_id) << ',' << i << ','
         << method_name(sel.runs[i].method) << ',' << sel.runs[i].sample_index << '\n';
    }
  }
}

}  // namespace searchspace::sampling
