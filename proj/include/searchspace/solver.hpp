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

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "searchspace/answer.hpp"
#include "searchspace/client.hpp"
#include "searchspace/exec.hpp"
#include "searchspace/pool_io.hpp"
#include "searchspace/prompts.hpp"
#include "searchspace/types.hpp"

// Drivers for the three solving methods, the token-cost ledger, and pool
// generation (resumable, cached, optionally parallel).
namespace searchspace::solver {

struct SolverOptions {
  double code_timeout_seconds = 10.0;
  int repair_rounds = 1;      // extra completion after a failed execution
  int max_cr_iterations = 4;  // propose/verify cycles before giving up
};

// Everything a method driver needs. The client and executor must be safe to
// share across worker threads.
struct MethodRunner {
  client::CompletionClient& client;
  const prompts::PromptLibrary& prompts;
  exec::CodeExecutor* executor = nullptr;
  SolverOptions options{};
};

namespace detail {

// Last complete ``` fenced block, with an optional language tag line.
inline std::optional<std::string> extract_fenced_code(std::string_view text) {
  std::optional<std::string> result;
  std::size_t from = 0;
  while (true) {
    std::size_t open = text.find("```", from);
    if (open == std::string_view::npos) break;
    std::size_t body = open + 3;
    std::size_t nl = text.find('\n', body);
    if (nl == std::string_view::npos) break;
    // skip the language tag if the fence line carries one
    std::string_view tag = util::trim(text.substr(body, nl - body));
    std::size_t content_start = tag.empty() ? body : nl + 1;
    if (!tag.empty()) content_start = nl + 1;
    std::size_t close = text.find("```", content_start);
    if (close == std::string_view::npos) break;
    result = std::string(util::trim(text.substr(content_start, close - content_start)));
    from = close + 3;
  }
  return result;
}

inline std::string last_nonempty_line(std::string_view text) {
  std::string out;
  for (const std::string& line : util::split(std::string(text), '\n')) {
    std::string_view t = util::trim(line);
    if (!t.empty()) out = std::string(t);
  }
  return out;
}

inline std::string truncate_for_log(std::string s, std::size_t limit = 2000) {
  if (s.size() > limit) {
    s.resize(limit);
    s += "...";
  }
  return s;
}

}  // namespace detail

// Chain-of-thought prompting: one completion, final answer taken from the
// boxed expression (or the trailing "answer is" form).
inline Run run_text_method(const MethodRunner& runner, const Problem& problem,
                           const GenerationParams& params, std::uint64_t nonce) {
  Run run;
  run.problem_id = problem.id;
  run.method = Method::Text;
  run.sample_index = static_cast<int>(nonce);
  const prompts::PromptTemplate& tmpl = runner.prompts.get("text");
  client::CompletionRequest request;
  request.prompt = tmpl.render({{"statement", problem.statement}});
  request.params = params;
  request.nonce = nonce;
  request.purpose = client::Purpose::SolveText;
  request.method = Method::Text;
  request.problem_id = problem.id;
  request.template_version = tmpl.version;
  try {
    client::CompletionResult result = runner.client.complete(request);
    run.solution_text = result.text;
    run.prompt_tokens = result.prompt_tokens;
    run.completion_tokens = result.completion_tokens;
    run.wall_time = result.duration;
    run.extracted_answer = answer::extract_final_answer(result.text);
  } catch (const std::exception& e) {
    run.error = std::string("client failure: ") + e.what();
  }
  return run;
}

// Program-synthesis prompting: the completion must contain a fenced program,
// which is executed in the sandbox; the printed result is the candidate
// answer. One repair round resends the error text before giving up.
inline Run run_code_method(const MethodRunner& runner, const Problem& problem,
                           const GenerationParams& params, std::uint64_t nonce) {
  if (runner.executor == nullptr) {
    throw ValidationError("run_code_method: no code executor configured");
  }
  Run run;
  run.problem_id = problem.id;
  run.method = Method::Code;
  run.sample_index = static_cast<int>(nonce);

  const prompts::PromptTemplate& tmpl = runner.prompts.get("code");
  client::CompletionRequest request;
  request.prompt = tmpl.render({{"statement", problem.statement}});
  request.params = params;
  request.nonce = nonce;
  request.purpose = client::Purpose::SolveCode;
  request.method = Method::Code;
  request.problem_id = problem.id;
  request.template_version = tmpl.version;

  std::string transcript;
  std::string completion;
  try {
    client::CompletionResult result = runner.client.complete(request);
    completion = result.text;
    transcript = result.text;
    run.prompt_tokens += result.prompt_tokens;
    run.completion_tokens += result.completion_tokens;
    run.wall_time += result.duration;
  } catch (const std::exception& e) {
    run.error = std::string("client failure: ") + e.what();
    return run;
  }

  std::string failure;
  std::string program;
  for (int round = 0; round <= runner.options.repair_rounds; ++round) {
    auto fenced = detail::extract_fenced_code(completion);
    if (!fenced) {
      failure = "no fenced code block in completion";
    } else {
      program = *fenced;
      exec::ExecResult exec_result =
          runner.executor->run(program, runner.options.code_timeout_seconds);
      if (exec_result.timed_out) {
        failure = "execution timed out after " +
                  util::format_fixed(runner.options.code_timeout_seconds, 1) + "s";
      } else if (exec_result.exit_code != 0) {
        failure = "execution failed (exit " + std::to_string(exec_result.exit_code) +
                  "): " + detail::truncate_for_log(exec_result.err);
      } else {
        std::string printed = detail::last_nonempty_line(exec_result.out);
        if (printed.empty()) {
          failure = "program printed nothing";
        } else {
          transcript += "\n[execution output]\n" + exec_result.out;
          run.solution_text = transcript;
          run.extracted_answer = printed;
          return run;
        }
      }
    }
    if (round == runner.options.repair_rounds) break;
    const prompts::PromptTemplate& repair = runner.prompts.get("code_repair");
    client::CompletionRequest repair_request = request;
    repair_request.prompt = repair.render({{"statement", problem.statement},
                                           {"program", program},
                                           {"error", failure}});
    repair_request.turn = round + 1;
    repair_request.purpose = client::Purpose::CodeRepair;
    repair_request.template_version = repair.version;
    try {
      client::CompletionResult result = runner.client.complete(repair_request);
      completion = result.text;
      transcript += "\n[repair round " + std::to_string(round + 1) + "]\n" + result.text;
      run.prompt_tokens += result.prompt_tokens;
      run.completion_tokens += result.completion_tokens;
      run.wall_time += result.duration;
    } catch (const std::exception& e) {
      failure = std::string("client failure during repair: ") + e.what();
      break;
    }
  }
  run.solution_text = transcript;
  run.error = failure;
  return run;
}

// Cumulative reasoning: a propose-verify-accumulate loop. Each iteration
// proposes one claim (or a final answer); a second prompt verifies the
// claim, and accepted claims join the context. Proposals may carry a fenced
// code block whose printed output is appended to the claim ("CR with code").
inline Run run_cr_method(const MethodRunner& runner, const Problem& problem,
                         const GenerationParams& params, std::uint64_t nonce) {
  Run run;
  run.problem_id = problem.id;
  run.method = Method::CR;
  run.sample_index = static_cast<int>(nonce);

  const prompts::PromptTemplate& propose_tmpl = runner.prompts.get("cr_propose");
  const prompts::PromptTemplate& verify_tmpl = runner.prompts.get("cr_verify");

  std::vector<std::string> accepted;
  std::string transcript;
  int turn = 0;
  auto steps_text = [&]() {
    if (accepted.empty()) return std::string("(none yet)");
    std::string out;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      out += std::to_string(i + 1) + ". " + accepted[i] + "\n";
    }
    return out;
  };

  for (int iteration = 0; iteration < runner.options.max_cr_iterations; ++iteration) {
    client::CompletionRequest request;
    request.prompt = propose_tmpl.render(
        {{"statement", problem.statement}, {"steps", steps_text()}});
    request.params = params;
    request.nonce = nonce;
    request.turn = turn++;
    request.purpose = client::Purpose::CrPropose;
    request.method = Method::CR;
    request.problem_id = problem.id;
    request.template_version = propose_tmpl.version;

    std::string proposal;
    try {
      client::CompletionResult result = runner.client.complete(request);
      proposal = result.text;
      run.prompt_tokens += result.prompt_tokens;
      run.completion_tokens += result.completion_tokens;
      run.wall_time += result.duration;
    } catch (const std::exception& e) {
      run.error = std::string("client failure: ") + e.what();
      run.solution_text = transcript;
      return run;
    }

    if (proposal.find("FINAL ANSWER") != std::string::npos) {
      transcript += proposal + "\n";
      run.solution_text = transcript;
      run.extracted_answer = answer::extract_final_answer(proposal);
      return run;
    }

    // CR with code: route embedded computations through the executor.
    if (runner.executor != nullptr) {
      if (auto fenced = detail::extract_fenced_code(proposal)) {
        exec::ExecResult exec_result =
            runner.executor->run(*fenced, runner.options.code_timeout_seconds);
        if (!exec_result.timed_out && exec_result.exit_code == 0) {
          proposal += "\n[computed output] " + detail::last_nonempty_line(exec_result.out);
        } else {
          proposal += "\n[computation failed]";
        }
      }
    }

    client::CompletionRequest verify_request;
    verify_request.prompt = verify_tmpl.render({{"statement", problem.statement},
                                                {"steps", steps_text()},
                                                {"proposal", proposal}});
    verify_request.params = params;
    verify_request.nonce = nonce;
    verify_request.turn = turn++;
    verify_request.purpose = client::Purpose::CrVerify;
    verify_request.method = Method::CR;
    verify_request.problem_id = problem.id;
    verify_request.template_version = verify_tmpl.version;

    std::string verdict;
    try {
      client::CompletionResult result = runner.client.complete(verify_request);
      verdict = result.text;
      run.prompt_tokens += result.prompt_tokens;
      run.completion_tokens += result.completion_tokens;
      run.wall_time += result.duration;
    } catch (const std::exception& e) {
      run.error = std::string("client failure: ") + e.what();
      run.solution_text = transcript;
      return run;
    }

    std::string upper = verdict;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    bool valid = upper.find("INVALID") == std::string::npos &&
                 upper.find("VALID") != std::string::npos;
    if (valid) {
      accepted.push_back(proposal);
      transcript += "Claim " + std::to_string(accepted.size()) + ": " + proposal + "\n";
    }
  }
  run.solution_text = transcript;
  run.error = "iteration cap (" + std::to_string(runner.options.max_cr_iterations) +
              ") reached without a final answer";
  return run;
}

inline Run run_method(const MethodRunner& runner, Method m, const Problem& problem,
                      const GenerationParams& params, std::uint64_t nonce) {
  switch (m) {
    case Method::Text: return run_text_method(runner, problem, params, nonce);
    case Method::Code: return run_code_method(runner, problem, params, nonce);
    case Method::CR: return run_cr_method(runner, problem, params, nonce);
  }
  throw ValidationError("unknown method");
}

// ---------------------------------------------------------------------------
// Cost ledger

struct CostLedger {
  struct Totals {
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    long long run_count = 0;
    long long total_tokens() const { return prompt_tokens + completion_tokens; }
  };

  std::array<Totals, kMethodCount> per_method{};

  void add(const Run& run) {
    Totals& t = per_method[method_index(run.method)];
    t.prompt_tokens += run.prompt_tokens;
    t.completion_tokens += run.completion_tokens;
    t.run_count += 1;
  }

  const Totals& totals(Method m) const { return per_method[method_index(m)]; }

  static CostLedger from_pool(const RunPool& pool) {
    CostLedger ledger;
    for (const Run& run : pool.runs) ledger.add(run);
    return ledger;
  }
};

// Average tokens per run of `method`, relative to `baseline`.
inline double cost_ratio(const CostLedger& ledger, Method method, Method baseline) {
  const auto& m = ledger.totals(method);
  const auto& b = ledger.totals(baseline);
  if (m.run_count == 0 || b.run_count == 0) {
    throw ValidationError("cost_ratio: both methods need at least one run");
  }
  double method_avg = static_cast<double>(m.total_tokens()) / static_cast<double>(m.run_count);
  double base_avg = static_cast<double>(b.total_tokens()) / static_cast<double>(b.run_count);
  if (base_avg == 0.0) throw ValidationError("cost_ratio: baseline has zero tokens");
  return method_avg / base_avg;
}

// ---------------------------------------------------------------------------
// Pool generation

struct GenerateOptions {
  std::vector<Method> methods{Method::Text, Method::Code, Method::CR};
  int workers = 1;
  std::filesystem::path pool_path;  // empty: in-memory only
  std::string config_hash;
};

struct GenerateReport {
  RunPool pool;
  CostLedger ledger;
  long long generated = 0;  // driven this invocation
  long long resumed = 0;    // already present in the pool file
  long long failed = 0;     // runs carrying an error, across the whole pool
};

// Generates n runs per (problem, method). Resumable: runs already persisted
// are not regenerated, and response-level caching (when the client is a
// CachingClient) makes even interrupted runs replay without client calls.
// Per-run failures are recorded on the run, never aborting the batch.
inline GenerateReport generate_pool(const std::vector<Problem>& problems,
                                    const MethodRunner& runner,
                                    const GenerationParams& params,
                                    const GenerateOptions& options) {
  if (params.samples_per_method < 1) {
    throw ValidationError("generate_pool: samples_per_method must be >= 1");
  }
  if (options.methods.empty()) {
    throw ValidationError("generate_pool: no methods requested");
  }
  GenerateReport report;
  report.pool.params = params;
  report.pool.template_versions = runner.prompts.versions();
  report.pool.config_hash = options.config_hash;

  std::set<std::tuple<std::string, Method, int>> existing;
  if (!options.pool_path.empty() && std::filesystem::exists(options.pool_path)) {
    RunPool previous = pool_io::read_pool(options.pool_path);
    if (!previous.template_versions.empty() &&
        previous.template_versions != report.pool.template_versions) {
      throw ValidationError(
          "pool " + options.pool_path.string() +
          " was generated under different prompt template versions; refusing to mix");
    }
    if (previous.params.model_name != params.model_name ||
        previous.params.temperature != params.temperature) {
      throw ValidationError("pool " + options.pool_path.string() +
                            " was generated under different model/temperature settings");
    }
    for (Run& run : previous.runs) {
      existing.insert({run.problem_id, run.method, run.sample_index});
      report.pool.runs.push_back(std::move(run));
    }
    report.resumed = static_cast<long long>(report.pool.runs.size());
  }

  struct Task {
    const Problem* problem;
    Method method;
    int nonce;
  };
  std::vector<Task> tasks;
  for (const Problem& problem : problems) {
    for (Method m : options.methods) {
      for (int nonce = 0; nonce < params.samples_per_method; ++nonce) {
        if (existing.count({problem.id, m, nonce})) continue;
        tasks.push_back({&problem, m, nonce});
      }
    }
  }

  std::vector<Run> fresh(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      try {
        fresh[i] = run_method(runner, task.method, *task.problem, params,
                              static_cast<std::uint64_t>(task.nonce));
      } catch (const std::exception& e) {
        Run run;
        run.problem_id = task.problem->id;
        run.method = task.method;
        run.sample_index = task.nonce;
        run.error = std::string("driver failure: ") + e.what();
        fresh[i] = std::move(run);
      }
    }
  };
  int worker_count = std::max(1, std::min<int>(options.workers,
                                               static_cast<int>(tasks.size())));
  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(worker_count));
    for (int i = 0; i < worker_count; ++i) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  report.generated = static_cast<long long>(fresh.size());
  for (Run& run : fresh) report.pool.runs.push_back(std::move(run));
  sort_pool(report.pool);
  validate_pool(report.pool);
  for (const Run& run : report.pool.runs) {
    if (run.error) ++report.failed;
  }
  report.ledger = CostLedger::from_pool(report.pool);
  if (!options.pool_path.empty()) {
    pool_io::write_pool(options.pool_path, report.pool);
  }
  return report;
}

}  // namespace searchspace::solver
