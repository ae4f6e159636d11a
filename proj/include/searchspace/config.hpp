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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "searchspace/client.hpp"
#include "searchspace/dataset.hpp"
#include "searchspace/solver.hpp"
#include "searchspace/verification.hpp"

// Declarative experiment configuration: one JSON file drives every CLI verb.
// Defaults reproduce the reference settings (t=0.7, n=21, w=4, s=2, seed=42).
// Relative paths are resolved against the config file's directory. All
// randomness flows from the named seeds here; there is no ambient RNG.
namespace searchspace::config {

struct ClientConfig {
  std::string kind = "simulated";  // "simulated" | "live"
  std::filesystem::path simulator_config;
  client::LiveClientConfig live;
};

struct SamplingConfig {
  bool shuffled = false;
  std::uint64_t shuffle_seed = 42;
  std::vector<int> k_schedule{3, 6, 9, 12, 15, 18, 21};
};

struct VerifierConfig {
  verification::RerankParams rerank{};          // w=4, s=2, excerpt cap 1200
  std::string ranker = "identity";              // "identity" | "oracle" | "llm"
  bool reverse_candidates = false;              // candidate presentation order
};

struct ExperimentConfig {
  std::filesystem::path corpus;
  std::filesystem::path output_dir = "out";
  std::filesystem::path templates_dir = "templates";
  std::filesystem::path rewrites;  // empty: builtin rewrite table

  dataset::SubsetSpec subset;
  std::vector<Method> methods{Method::Text, Method::Code, Method::CR};
  GenerationParams generation;
  solver::SolverOptions solver;
  int workers = 1;
  ClientConfig client;
  SamplingConfig sampling;
  VerifierConfig verifier;

  std::filesystem::path manifest_path() const { return output_dir / "subset.manifest"; }
  std::filesystem::path pool_path() const { return output_dir / "pool.jsonl"; }
  std::filesystem::path cache_dir() const { return output_dir / "cache"; }

  // Canonical JSON of every effective setting; its hash is embedded in all
  // emitted reports.
  nlohmann::json canonical() const {
    nlohmann::json j;
    j["corpus"] = corpus.string();
    j["output_dir"] = output_dir.string();
    j["templates_dir"] = templates_dir.string();
    j["rewrites"] = rewrites.string();
    j["subset"] = {
        {"levels", subset.levels},
        {"domains", subset.domains},
        {"seed", subset.seed},
    };
    if (subset.per_domain_per_level) {
      j["subset"]["per_domain_per_level"] = *subset.per_domain_per_level;
    }
    if (subset.per_domain_total) {
      j["subset"]["per_domain_total"] = *subset.per_domain_total;
    }
    std::vector<std::string> method_names;
    for (Method m : methods) method_names.emplace_back(method_name(m));
    j["methods"] = method_names;
    j["generation"] = {
        {"model_name", generation.model_name},
        {"temperature", generation.temperature},
        {"samples_per_method", generation.samples_per_method},
    };
    j["solver"] = {
        {"code_timeout_seconds", solver.code_timeout_seconds},
        {"repair_rounds", solver.repair_rounds},
        {"max_cr_iterations", solver.max_cr_iterations},
    };
    j["workers"] = workers;
    j["client"] = {
        {"kind", client.kind},
        {"simulator_config", client.simulator_config.string()},
        {"base_url", client.live.base_url},
        {"endpoint_path", client.live.endpoint_path},
        {"api_key_env", client.live.api_key_env},
    };
    j["sampling"] = {
        {"shuffled", sampling.shuffled},
        {"shuffle_seed", sampling.shuffle_seed},
        {"k_schedule", sampling.k_schedule},
    };
    j["verifier"] = {
        {"window", verifier.rerank.window},
        {"step", verifier.rerank.step},
        {"excerpt_limit", verifier.rerank.excerpt_limit},
        {"ranker", verifier.ranker},
        {"reverse_candidates", verifier.reverse_candidates},
    };
    return j;
  }

  std::string hash() const { return util::to_hex(util::fnv1a64(canonical().dump())); }
};

inline std::filesystem::path resolve(const std::filesystem::path& base,
                                     const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

inline ExperimentConfig parse_config(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  config.corpus = resolve(base_dir, j.value("corpus", std::string{}));
  config.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
  config.templates_dir =
      resolve(base_dir, j.value("templates_dir", std::string("templates")));
  config.rewrites = resolve(base_dir, j.value("rewrites", std::string{}));

  if (j.contains("subset")) {
    const auto& s = j.at("subset");
    for (int level : s.value("levels", std::vector<int>{})) config.subset.levels.insert(level);
    for (const auto& d : s.value("domains", std::vector<std::string>{})) {
      if (d == "all") {
        for (std::string_view known : dataset::kDomains)
          config.subset.domains.emplace(known);
      } else {
        config.subset.domains.insert(d);
      }
    }
    if (s.contains("per_domain_per_level")) {
      config.subset.per_domain_per_level = s.at("per_domain_per_level").get<int>();
    }
    if (s.contains("per_domain_total")) {
      config.subset.per_domain_total = s.at("per_domain_total").get<int>();
    }
    config.subset.seed = s.value("seed", std::uint64_t{42});
  }

  if (j.contains("methods")) {
    config.methods.clear();
    for (const auto& name : j.at("methods")) {
      config.methods.push_back(method_from_name(name.get<std::string>()));
    }
  }

  if (j.contains("generation")) {
    const auto& g = j.at("generation");
    config.generation.model_name = g.value("model_name", config.generation.model_name);
    config.generation.temperature = g.value("temperature", config.generation.temperature);
    config.generation.samples_per_method =
        g.value("samples_per_method", config.generation.samples_per_method);
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    config.solver.code_timeout_seconds =
        s.value("code_timeout_seconds", config.solver.code_timeout_seconds);
    config.solver.repair_rounds = s.value("repair_rounds", config.solver.repair_rounds);
    config.solver.max_cr_iterations =
        s.value("max_cr_iterations", config.solver.max_cr_iterations);
  }
  config.workers = j.value("workers", 1);

  if (j.contains("client")) {
    const auto& c = j.at("client");
    config.client.kind = c.value("kind", std::string("simulated"));
    config.client.simulator_config =
        resolve(base_dir, c.value("simulator_config", std::string{}));
    config.client.live.base_url = c.value("base_url", std::string{});
    config.client.live.endpoint_path =
        c.value("endpoint_path", config.client.live.endpoint_path);
    config.client.live.api_key_env =
        c.value("api_key_env", config.client.live.api_key_env);
    config.client.live.max_retries = c.value("max_retries", 3);
    config.client.live.timeout_seconds = c.value("timeout_seconds", 120.0);
  }

  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    config.sampling.shuffled = s.value("shuffled", false);
    config.sampling.shuffle_seed = s.value("shuffle_seed", std::uint64_t{42});
    if (s.contains("k_schedule")) {
      config.sampling.k_schedule = s.at("k_schedule").get<std::vector<int>>();
    }
  }

  if (j.contains("verifier")) {
    const auto& v = j.at("verifier");
    config.verifier.rerank.window = v.value("window", 4);
    config.verifier.rerank.step = v.value("step", 2);
    config.verifier.rerank.excerpt_limit = v.value("excerpt_limit", 1200);
    config.verifier.ranker = v.value("ranker", std::string("identity"));
    config.verifier.reverse_candidates = v.value("reverse_candidates", false);
  }

  if (config.client.kind != "simulated" && config.client.kind != "live") {
    throw ValidationError("config: client.kind must be 'simulated' or 'live'");
  }
  if (config.verifier.ranker != "identity" && config.verifier.ranker != "oracle" &&
      config.verifier.ranker != "llm") {
    throw ValidationError("config: verifier.ranker must be identity, oracle, or llm");
  }
  if (config.workers < 1) throw ValidationError("config: workers must be >= 1");
  for (int k : config.sampling.k_schedule) {
    if (k < 1) throw ValidationError("config: k_schedule entries must be >= 1");
  }
  config.verifier.rerank.validate();
  return config;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(util::read_text_file(path));
  } catch (const RuntimeError&) {
    throw ValidationError("config file not found: " + path.string());
  } catch (const std::exception& e) {
    throw ValidationError("config file " + path.string() + " is not valid JSON: " +
                          e.what());
  }
  return parse_config(j, std::filesystem::absolute(path).parent_path());
}

}  // namespace searchspace::config
