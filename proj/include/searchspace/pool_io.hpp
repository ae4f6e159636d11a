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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "searchspace/types.hpp"

// Run-pool persistence.
//
// A pool is a JSONL file: one Run object per line, keys sorted, lines in
// canonical (problem_id, method, sample_index) order. Schema per line:
//   completion_tokens : integer
//   error             : string or null
//   extracted_answer  : string or null
//   method            : "text" | "code" | "cr"
//   problem_id        : string
//   prompt_tokens     : integer
//   sample_index      : integer
//   solution_text     : string
//   wall_time         : seconds (0 for simulated runs)
// Pool metadata (generation params, template versions, config hash) lives in
// a sidecar file: <pool>.meta.json.
namespace searchspace::pool_io {

inline nlohmann::json run_to_json(const Run& run) {
  nlohmann::json j;
  j["problem_id"] = run.problem_id;
  j["method"] = std::string(method_name(run.method));
  j["sample_index"] = run.sample_index;
  j["solution_text"] = run.solution_text;
  j["extracted_answer"] =
      run.extracted_answer ? nlohmann::json(*run.extracted_answer) : nlohmann::json();
  j["prompt_tokens"] = run.prompt_tokens;
  j["completion_tokens"] = run.completion_tokens;
  j["wall_time"] = run.wall_time;
  j["error"] = run.error ? nlohmann::json(*run.error) : nlohmann::json();
  return j;
}

inline Run run_from_json(const nlohmann::json& j) {
  Run run;
  run.problem_id = j.at("problem_id").get<std::string>();
  run.method = method_from_name(j.at("method").get<std::string>());
  run.sample_index = j.at("sample_index").get<int>();
  run.solution_text = j.at("solution_text").get<std::string>();
  if (!j.at("extracted_answer").is_null()) {
    run.extracted_answer = j.at("extracted_answer").get<std::string>();
  }
  run.prompt_tokens = j.at("prompt_tokens").get<long long>();
  run.completion_tokens = j.at("completion_tokens").get<long long>();
  run.wall_time = j.at("wall_time").get<double>();
  if (!j.at("error").is_null()) run.error = j.at("error").get<std::string>();
  return run;
}

inline std::filesystem::path meta_path(const std::filesystem::path& pool_path) {
  std::filesystem::path p = pool_path;
  p += ".meta.json";
  return p;
}

inline void write_pool(const std::filesystem::path& path, const RunPool& pool) {
  RunPool sorted = pool;
  sort_pool(sorted);
  validate_pool(sorted);
  std::string lines;
  for (const Run& run : sorted.runs) {
    lines += run_to_json(run).dump();
    lines += '\n';
  }
  util::write_text_file(path, lines);

  nlohmann::json meta;
  meta["config_hash"] = pool.config_hash;
  meta["generation_params"] = {
      {"model_name", pool.params.model_name},
      {"temperature", pool.params.temperature},
      {"samples_per_method", pool.params.samples_per_method},
  };
  meta["template_versions"] = pool.template_versions;
  util::write_text_file(meta_path(path), meta.dump(2) + "\n");
}

inline RunPool read_pool(const std::filesystem::path& path) {
  RunPool pool;
  std::string content = util::read_text_file(path);
  int lineno = 0;
  for (const std::string& line : util::split(content, '\n')) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    try {
      pool.runs.push_back(run_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ValidationError("bad run record at " + path.string() + ":" +
                            std::to_string(lineno) + ": " + e.what());
    }
  }
  std::filesystem::path meta_file = meta_path(path);
  if (std::filesystem::exists(meta_file)) {
    nlohmann::json meta = nlohmann::json::parse(util::read_text_file(meta_file));
    pool.config_hash = meta.value("config_hash", std::string{});
    if (meta.contains("generation_params")) {
      const auto& gp = meta["generation_params"];
      pool.params.model_name = gp.value("model_name", pool.params.model_name);
      pool.params.temperature = gp.value("temperature", pool.params.temperature);
      pool.params.samples_per_method =
          gp.value("samples_per_method", pool.params.samples_per_method);
    }
    if (meta.contains("template_versions")) {
      for (const auto& [name, version] : meta["template_versions"].items()) {
        pool.template_versions[name] = version.get<std::string>();
      }
    }
  }
  validate_pool(pool);
  return pool;
}

}  // namespace searchspace::pool_io
