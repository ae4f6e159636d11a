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
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "searchspace/types.hpp"

// The completion-client abstraction behind all three solving methods, with
// three implementations: a deterministic simulator for desk-scale
// experiments, a content-addressed response cache wrapper, and a live HTTP
// chat-completion client.
namespace searchspace::client {

// What a completion is for; the simulator keys its scripted behavior on this.
enum class Purpose { SolveText, SolveCode, CodeRepair, CrPropose, CrVerify, Rank };

inline std::string_view purpose_name(Purpose p) {
  switch (p) {
    case Purpose::SolveText: return "solve_text";
    case Purpose::SolveCode: return "solve_code";
    case Purpose::CodeRepair: return "code_repair";
    case Purpose::CrPropose: return "cr_propose";
    case Purpose::CrVerify: return "cr_verify";
    case Purpose::Rank: return "rank";
  }
  return "?";
}

struct CompletionRequest {
  std::string prompt;
  GenerationParams params;
  std::uint64_t nonce = 0;  // reproduces temperature-sampled diversity
  int turn = 0;             // call ordinal within one run (multi-turn methods)
  Purpose purpose = Purpose::SolveText;
  // Routing metadata: which run this call belongs to. Live clients ignore
  // these; the simulator and the cache key off them.
  Method method = Method::Text;
  std::string problem_id;
  std::string template_version;
  int rank_count = 0;  // number of candidates, for Rank requests
};

struct CompletionResult {
  std::string text;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  double duration = 0.0;  // seconds; zero for simulated and cached responses
  std::string raw;        // raw provider payload when live
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  // Throws RuntimeError on failure. Must be safe to call concurrently.
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Simulator

// Per (method, problem) behavior: either a success probability plus the
// answer to emit, or an explicit scripted response list indexed by nonce
// (each entry is the per-turn response sequence for one run).
struct SimEntry {
  std::optional<double> p;
  std::string answer;
  std::vector<std::vector<std::string>> scripts;
};

struct SimulatedSolverConfig {
  std::uint64_t seed = 42;
  double default_p = 0.0;
  std::string default_answer = "0";
  std::map<Method, double> token_multiplier;
  std::map<std::pair<std::string, Method>, SimEntry> entries;

  static SimulatedSolverConfig from_json(const nlohmann::json& j) {
    SimulatedSolverConfig config;
    config.seed = j.value("seed", std::uint64_t{42});
    config.default_p = j.value("default_p", 0.0);
    config.default_answer = j.value("default_answer", std::string("0"));
    if (j.contains("token_multiplier")) {
      for (const auto& [name, mult] : j.at("token_multiplier").items()) {
        config.token_multiplier[method_from_name(name)] = mult.get<double>();
      }
    }
    for (const auto& e : j.value("entries", nlohmann::json::array())) {
      SimEntry entry;
      std::string problem_id = e.at("problem_id").get<std::string>();
      Method method = method_from_name(e.at("method").get<std::string>());
      if (e.contains("p")) {
        entry.p = e.at("p").get<double>();
        if (*entry.p < 0.0 || *entry.p > 1.0) {
          throw ValidationError("simulator: probability outside [0,1] for " + problem_id);
        }
        entry.answer = e.value("answer", config.default_answer);
      }
      if (e.contains("script")) {
        for (const auto& run_script : e.at("script")) {
          if (run_script.is_string()) {
            entry.scripts.push_back({run_script.get<std::string>()});
          } else {
            std::vector<std::string> turns;
            for (const auto& turn : run_script) turns.push_back(turn.get<std::string>());
            if (turns.empty()) {
              throw ValidationError("simulator: empty turn script for " + problem_id);
            }
            entry.scripts.push_back(std::move(turns));
          }
        }
      }
      if (!entry.p && entry.scripts.empty()) {
        throw ValidationError("simulator: entry needs 'p' or 'script' for " + problem_id);
      }
      config.entries[{problem_id, method}] = std::move(entry);
    }
    return config;
  }

  static SimulatedSolverConfig load(const std::filesystem::path& path) {
    return from_json(nlohmann::json::parse(util::read_text_file(path)));
  }
};

// Deterministic stand-in for a live model: identical (prompt, params, nonce)
// requests always produce identical responses. Success draws depend only on
// (seed, problem, method, nonce).
class SimulatedClient : public CompletionClient {
 public:
  explicit SimulatedClient(SimulatedSolverConfig config) : config_(std::move(config)) {}

  CompletionResult complete(const CompletionRequest& request) override {
    std::string text = respond(request);
    CompletionResult result;
    result.prompt_tokens = static_cast<long long>(request.prompt.size() / 4 + 1);
    double mult = 1.0;
    auto mit = config_.token_multiplier.find(request.method);
    if (mit != config_.token_multiplier.end()) mult = mit->second;
    result.completion_tokens =
        static_cast<long long>(static_cast<double>(text.size() / 4 + 1) * mult);
    result.text = std::move(text);
    return result;
  }

 private:
  std::string respond(const CompletionRequest& request) const {
    const SimEntry* entry = nullptr;
    auto it = config_.entries.find({request.problem_id, request.method});
    if (it != config_.entries.end()) entry = &it->second;

    if (entry && !entry->scripts.empty()) {
      if (request.nonce >= entry->scripts.size()) {
        throw RuntimeError("simulator: scripted list for (" + request.problem_id +
                           ", " + std::string(method_name(request.method)) +
                           ") is shorter than nonce " + std::to_string(request.nonce));
      }
      const auto& turns = entry->scripts[request.nonce];
      std::size_t turn = std::min<std::size_t>(static_cast<std::size_t>(request.turn),
                                               turns.size() - 1);
      return turns[turn];
    }

    double p = entry ? *entry->p : config_.default_p;
    const std::string& answer = entry ? entry->answer : config_.default_answer;
    auto rng = util::seeded_rng(util::derive_seed(
        config_.seed, {request.problem_id, method_name(request.method),
                       std::to_string(request.nonce)}));
    bool success = draw_uniform(rng) < p;
    std::string wrong = wrong_answer(answer, rng() % 3);

    switch (request.purpose) {
      case Purpose::SolveText:
        return "Working through the problem step by step, the value follows "
               "from simplifying the given expression.\nThe final answer is \\boxed{" +
               (success ? answer : wrong) + "}.";
      case Purpose::SolveCode:
      case Purpose::CodeRepair:
        return "Here is a program that computes the result.\n```python\nprint(\"" +
               (success ? answer : wrong) + "\")\n```";
      case Purpose::CrPropose:
        if (success) {
          return "FINAL ANSWER: \\boxed{" + answer + "}";
        }
        if (request.turn < 2) {
          return "Claim: rewriting the expression exposes a common factor.";
        }
        return "FINAL ANSWER: \\boxed{" + wrong + "}";
      case Purpose::CrVerify:
        return "VALID";
      case Purpose::Rank: {
        std::string out;
        for (int i = 1; i <= std::max(request.rank_count, 1); ++i) {
          if (i > 1) out += " > ";
          out += "[" + std::to_string(i) + "]";
        }
        return out;
      }
    }
    throw RuntimeError("simulator: unhandled purpose");
  }

  static double draw_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) / 9007199254740992.0;  // 53-bit mantissa
  }

  static std::string wrong_answer(const std::string& answer, std::uint64_t j) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(answer.c_str(), &end, 10);
    if (errno == 0 && end != answer.c_str() && *end == '\0') {
      return std::to_string(v + 1 + static_cast<long long>(j));
    }
    return "wrong_" + std::to_string(j);
  }

  SimulatedSolverConfig config_;
};

// ---------------------------------------------------------------------------
// Response cache

// Content-addressed directory of raw responses. The key covers everything a
// response depends on: model, method, problem, prompt template version,
// temperature, nonce, and the call ordinal within the run.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  static std::string key(const CompletionRequest& request) {
    char temp[32];
    std::snprintf(temp, sizeof temp, "%.6g", request.params.temperature);
    std::string key = "model=" + request.params.model_name;
    key += "|method=" + std::string(method_name(request.method));
    key += "|problem=" + request.problem_id;
    key += "|template=" + request.template_version;
    key += "|temp=" + std::string(temp);
    key += "|nonce=" + std::to_string(request.nonce);
    key += "|turn=" + std::to_string(request.turn);
    return key;
  }

  std::optional<CompletionResult> lookup(const CompletionRequest& request) const {
    std::filesystem::path path = entry_path(key(request));
    if (!std::filesystem::exists(path)) return std::nullopt;
    nlohmann::json j = nlohmann::json::parse(util::read_text_file(path), nullptr, false);
    if (j.is_discarded()) return std::nullopt;  // corrupt entry: treat as a miss
    if (j.value("key", std::string{}) != key(request)) return std::nullopt;  // collision
    const auto& r = j.at("response");
    CompletionResult result;
    result.text = r.at("text").get<std::string>();
    result.prompt_tokens = r.at("prompt_tokens").get<long long>();
    result.completion_tokens = r.at("completion_tokens").get<long long>();
    result.duration = r.value("duration", 0.0);
    result.raw = r.value("raw", std::string{});
    return result;
  }

  void store(const CompletionRequest& request, const CompletionResult& result) const {
    nlohmann::json j;
    j["key"] = key(request);
    j["response"] = {
        {"text", result.text},
        {"prompt_tokens", result.prompt_tokens},
        {"completion_tokens", result.completion_tokens},
        {"duration", result.duration},
        {"raw", result.raw},
    };
    util::write_text_file_atomic(entry_path(key(request)), j.dump(2) + "\n");
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path entry_path(const std::string& key) const {
    std::uint64_t h1 = util::fnv1a64(key);
    std::uint64_t h2 = util::fnv1a64(key, util::fnv1a64("pepper"));
    return dir_ / (util::to_hex(h1) + util::to_hex(h2) + ".json");
  }

  std::filesystem::path dir_;
};

// Serves cached responses and stores fresh ones before returning them, so a
// rerun with identical inputs makes zero calls to the wrapped client.
class CachingClient : public CompletionClient {
 public:
  CachingClient(CompletionClient& inner, ResponseCache cache)
      : inner_(inner), cache_(std::move(cache)) {}

  CompletionResult complete(const CompletionRequest& request) override {
    if (auto cached = cache_.lookup(request)) return *cached;
    CompletionResult result = inner_.complete(request);
    cache_.store(request, result);
    inner_calls_.fetch_add(1, std::memory_order_relaxed);
    return result;
  }

  long long inner_calls() const { return inner_calls_.load(std::memory_order_relaxed); }

 private:
  CompletionClient& inner_;
  ResponseCache cache_;
  std::atomic<long long> inner_calls_{0};
};

// ---------------------------------------------------------------------------
// Live client

struct LiveClientConfig {
  std::string base_url;                               // e.g. "https://api.openai.com"
  std::string endpoint_path = "/v1/chat/completions"; // OpenAI-style chat endpoint
  std::string api_key_env = "SEARCHSPACE_API_KEY";
  int max_retries = 3;
  double timeout_seconds = 120.0;
  double backoff_seconds = 0.5;
};

// Plain HTTP chat-completion client. The API key comes from the environment
// only; a missing key is a startup error, not a per-request one.
class LiveClient : public CompletionClient {
 public:
  explicit LiveClient(LiveClientConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
      throw ValidationError("live client: base_url is required");
    }
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ValidationError("live client: environment variable " +
                            config_.api_key_env + " is not set");
    }
    api_key_ = key;
  }

  CompletionResult complete(const CompletionRequest& request) override {
    nlohmann::json body = {
        {"model", request.params.model_name},
        {"temperature", request.params.temperature},
        {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
    };
    std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) {
        auto backoff = std::chrono::duration<double>(
            config_.backoff_seconds * static_cast<double>(1 << (attempt - 1)));
        std::this_thread::sleep_for(
            std::chrono::duration_cast<std::chrono::milliseconds>(backoff));
      }
      httplib::Client http(config_.base_url);
      http.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::duration<double>(config_.timeout_seconds)));
      http.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::duration<double>(config_.timeout_seconds)));
      httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
      auto t0 = std::chrono::steady_clock::now();
      httplib::Result res =
          http.Post(config_.endpoint_path, headers, payload, "application/json");
      double elapsed = std::chrono::duration<double>(
          std::chrono::steady_clock::now() - t0).count();
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw RuntimeError("live client: HTTP " + std::to_string(res->status) + ": " +
                           res->body);
      }
      return parse_response(res->body, elapsed);
    }
    throw RuntimeError("live client: retries exhausted (" + last_error + ")");
  }

 private:
  static CompletionResult parse_response(const std::string& body, double elapsed) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
      throw RuntimeError("live client: malformed completion payload");
    }
    CompletionResult result;
    result.text = j["choices"][0].at("message").at("content").get<std::string>();
    if (j.contains("usage")) {
      result.prompt_tokens = j["usage"].value("prompt_tokens", 0LL);
      result.completion_tokens = j["usage"].value("completion_tokens", 0LL);
    }
    result.duration = elapsed;
    result.raw = body;
    return result;
  }

  LiveClientConfig config_;
  std::string api_key_;
};

}  // namespace searchspace::client
