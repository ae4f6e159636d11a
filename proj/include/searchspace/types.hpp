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

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "searchspace/util.hpp"

namespace searchspace {

// The three solving methods. The enum order {Text, Code, CR} is also the
// documented tie-break order wherever methods are ranked by score.
enum class Method : int { Text = 0, Code = 1, CR = 2 };

inline constexpr std::size_t kMethodCount = 3;
inline constexpr std::array<Method, kMethodCount> kAllMethods{
    Method::Text, Method::Code, Method::CR};

constexpr std::size_t method_index(Method m) {
  return static_cast<std::size_t>(m);
}

constexpr std::string_view method_name(Method m) {
  switch (m) {
    case Method::Text: return "text";
    case Method::Code: return "code";
    case Method::CR: return "cr";
  }
  return "?";
}

inline Method method_from_name(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  throw ValidationError("unknown method name: " + std::string(name));
}

struct GenerationParams {
  std::string model_name = "gpt-4o";
  double temperature = 0.7;
  int samples_per_method = 21;
};

struct Problem {
  std::string id;         // unique within a dataset, e.g. "algebra/1024"
  std::string domain;     // one of the seven canonical domains
  int level = 0;          // 1..5
  std::string statement;
  std::string gold_answer;  // final-answer form, as boxed in the solution
};

// One sampled end-to-end solution attempt by one method on one problem.
struct Run {
  std::string problem_id;
  Method method = Method::Text;
  int sample_index = 0;  // generation order within (problem, method)
  std::string solution_text;
  std::optional<std::string> extracted_answer;  // present iff extraction worked
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  double wall_time = 0.0;  // seconds of client time; 0 for simulated runs
  std::optional<std::string> error;
};

struct RunPool {
  std::vector<Run> runs;
  GenerationParams params;
  // Metadata carried alongside the runs so analyses can refuse to mix pools
  // generated under different prompt templates or configs.
  std::map<std::string, std::string> template_versions;
  std::string config_hash;
};

// Canonical on-disk and in-memory order: problem id, then method, then
// sample index.
inline bool run_before(const Run& a, const Run& b) {
  if (a.problem_id != b.problem_id) return a.problem_id < b.problem_id;
  if (a.method != b.method) return method_index(a.method) < method_index(b.method);
  return a.sample_index < b.sample_index;
}

inline void sort_pool(RunPool& pool) {
  std::sort(pool.runs.begin(), pool.runs.end(), run_before);
}

// Checks the pool invariants: unique (problem, method, sample_index) keys and
// sample indices contiguous from 0 within each (problem, method).
inline void validate_pool(const RunPool& pool) {
  std::map<std::pair<std::string, Method>, std::set<int>> seen;
  for (const Run& run : pool.runs) {
    if (run.sample_index < 0) {
      throw ValidationError("negative sample_index in pool for problem " +
                            run.problem_id);
    }
    auto& indices = seen[{run.problem_id, run.method}];
    if (!indices.insert(run.sample_index).second) {
      throw ValidationError(
          "duplicate run (" + run.problem_id + ", " +
          std::string(method_name(run.method)) + ", " +
          std::to_string(run.sample_index) + ")");
    }
  }
  for (const auto& [key, indices] : seen) {
    int expect = 0;
    for (int idx : indices) {
      if (idx != expect++) {
        throw ValidationError("non-contiguous sample indices for (" +
                              key.first + ", " +
                              std::string(method_name(key.second)) + ")");
      }
    }
  }
}

}  // namespace searchspace
