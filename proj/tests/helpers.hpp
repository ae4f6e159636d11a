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

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "searchspace/client.hpp"
#include "searchspace/solve_matrix.hpp"
#include "searchspace/types.hpp"

namespace testutil {

namespace fs = std::filesystem;
using namespace searchspace;

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "searchspace-test") {
    std::string templ = (fs::temp_directory_path() / (tag + "-XXXXXX")).string();
    std::vector<char> buf(templ.begin(), templ.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = fs::path(buf.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Writes one MATH-format problem file under root/<domain>/<name>.json.
inline void write_math_problem(const fs::path& root, const std::string& domain,
                               const std::string& name, int level,
                               const std::string& statement,
                               const std::string& solution) {
  nlohmann::json j = {
      {"problem", statement},
      {"level", "Level " + std::to_string(level)},
      {"type", domain},
      {"solution", solution},
  };
  fs::create_directories(root / domain);
  util::write_text_file(root / domain / (name + ".json"), j.dump(2));
}

// Synthetic corpus: `per_bucket` problems for each (domain, level) pair.
// Problem <domain>/p<level>_<i> has gold answer "level*100 + i".
inline void make_corpus(const fs::path& root, const std::vector<std::string>& domains,
                        const std::vector<int>& levels, int per_bucket) {
  for (const std::string& domain : domains) {
    for (int level : levels) {
      for (int i = 0; i < per_bucket; ++i) {
        int answer = level * 100 + i;
        char name[32];
        std::snprintf(name, sizeof name, "p%d_%02d", level, i);
        write_math_problem(root, domain, name, level,
                           "What is " + std::to_string(answer - 1) + " + 1?",
                           "Adding one gives $\\boxed{" + std::to_string(answer) +
                               "}$.");
      }
    }
  }
}

// Completion client driven by a lambda; counts calls.
class LambdaClient : public client::CompletionClient {
 public:
  using Fn = std::function<std::string(const client::CompletionRequest&)>;
  explicit LambdaClient(Fn fn) : fn_(std::move(fn)) {}

  client::CompletionResult complete(const client::CompletionRequest& request) override {
    ++calls_;
    client::CompletionResult result;
    result.text = fn_(request);
    result.prompt_tokens = static_cast<long long>(request.prompt.size() / 4 + 1);
    result.completion_tokens = static_cast<long long>(result.text.size() / 4 + 1);
    return result;
  }

  int calls() const { return calls_; }

 private:
  Fn fn_;
  int calls_ = 0;
};

// Client that always fails, for the error paths.
class FailingClient : public client::CompletionClient {
 public:
  client::CompletionResult complete(const client::CompletionRequest&) override {
    throw RuntimeError("simulated timeout");
  }
};

inline Run make_run(const std::string& problem_id, Method method, int sample_index,
                    std::optional<std::string> answer,
                    long long prompt_tokens = 10, long long completion_tokens = 20) {
  Run run;
  run.problem_id = problem_id;
  run.method = method;
  run.sample_index = sample_index;
  run.solution_text = answer ? ("solution ending in \\boxed{" + *answer + "}")
                             : "no answer could be extracted";
  run.extracted_answer = std::move(answer);
  run.prompt_tokens = prompt_tokens;
  run.completion_tokens = completion_tokens;
  return run;
}

// Pool builder: per problem, per method, the list of extracted answers
// (nullopt = extraction failure). Sample indices follow list order.
using AnswerScript = std::map<std::string, std::map<Method, std::vector<std::optional<std::string>>>>;

inline RunPool make_pool(const AnswerScript& script) {
  RunPool pool;
  for (const auto& [problem_id, methods] : script) {
    for (const auto& [method, answers] : methods) {
      for (std::size_t i = 0; i < answers.size(); ++i) {
        pool.runs.push_back(make_run(problem_id, method, static_cast<int>(i), answers[i]));
      }
    }
  }
  sort_pool(pool);
  return pool;
}

inline EquivFn exact_equiv() {
  return [](const std::string& a, const std::string& b) { return a == b; };
}

// Runs the CLI binary; returns exit code and captured stdout+stderr.
struct CliResult {
  int exit_code = -1;
  std::string output;
};

inline CliResult run_cli(const std::string& args) {
#ifndef SEARCHSPACE_CLI_PATH
#error "SEARCHSPACE_CLI_PATH must be defined by the build"
#endif
  std::string command = std::string(SEARCHSPACE_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed");
  CliResult result;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
    result.output.append(buf, n);
  }
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace testutil
