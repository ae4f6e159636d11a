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

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "searchspace/config.hpp"
#include "searchspace/coverage.hpp"
#include "searchspace/llm_ranker.hpp"
#include "searchspace/report.hpp"
#include "searchspace/svg.hpp"
#include "searchspace/verification.hpp"

// The five pipeline commands behind the CLI verbs. Each is idempotent given
// identical config and inputs: reruns produce byte-identical outputs when
// the client is simulated.
namespace searchspace::commands {

namespace detail {

inline answer::Normalizer make_normalizer(const config::ExperimentConfig& cfg) {
  if (cfg.rewrites.empty()) return answer::Normalizer();
  return answer::Normalizer(answer::RewriteTable::load(cfg.rewrites));
}

inline EquivFn make_equiv(const answer::Normalizer& normalizer) {
  return [&normalizer](const std::string& a, const std::string& b) {
    return normalizer.equivalent(a, b);
  };
}

// Subset problems in manifest order, resolved against the corpus.
inline std::vector<Problem> load_subset(const config::ExperimentConfig& cfg,
                                        std::ostream& log) {
  dataset::LoadReport corpus = dataset::load_corpus(cfg.corpus);
  for (const std::string& w : corpus.warnings) log << "warning: " << w << "\n";
  if (!std::filesystem::exists(cfg.manifest_path())) {
    throw ValidationError("subset manifest not found: " + cfg.manifest_path().string() +
                          " (run `subset` first)");
  }
  dataset::Manifest manifest = dataset::read_manifest(cfg.manifest_path());
  std::map<std::string, const Problem*> by_id;
  for (const Problem& p : corpus.problems) by_id[p.id] = &p;
  std::vector<Problem> subset;
  for (const std::string& id : manifest.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw ValidationError("manifest id not present in corpus: " + id);
    }
    subset.push_back(*it->second);
  }
  if (subset.empty()) throw ValidationError("manifest lists no problems");
  return subset;
}

inline GoldMap gold_map(const std::vector<Problem>& problems) {
  GoldMap gold;
  for (const Problem& p : problems) gold[p.id] = p.gold_answer;
  return gold;
}

struct ClientStack {
  std::unique_ptr<client::CompletionClient> base;
  std::unique_ptr<client::CachingClient> caching;
  client::CompletionClient& top() { return *caching; }
};

inline ClientStack make_client(const config::ExperimentConfig& cfg) {
  ClientStack stack;
  if (cfg.client.kind == "simulated") {
    if (cfg.client.simulator_config.empty() ||
        !std::filesystem::exists(cfg.client.simulator_config)) {
      throw ValidationError("simulated client requires an existing simulator_config");
    }
    stack.base = std::make_unique<client::SimulatedClient>(
        client::SimulatedSolverConfig::load(cfg.client.simulator_config));
  } else {
    stack.base = std::make_unique<client::LiveClient>(cfg.client.live);
  }
  stack.caching = std::make_unique<client::CachingClient>(
      *stack.base, client::ResponseCache(cfg.cache_dir()));
  return stack;
}

struct Analysis {
  std::vector<Problem> subset;
  RunPool pool;
  SolveMatrix matrix;
  sampling::PoolIndex index;
  std::vector<Method> order;        // base-performance order (3-method pools)
  bool has_all_methods = false;
  std::map<Method, double> base_scores;
};

inline Analysis analyze_pool(const config::ExperimentConfig& cfg,
                             const answer::Normalizer& normalizer, std::ostream& log) {
  Analysis analysis;
  analysis.subset = load_subset(cfg, log);
  if (!std::filesystem::exists(cfg.pool_path())) {
    throw ValidationError("run pool not found: " + cfg.pool_path().string() +
                          " (run `generate` first)");
  }
  analysis.pool = pool_io::read_pool(cfg.pool_path());
  if (analysis.pool.runs.empty()) throw ValidationError("run pool is empty");
  // refuse to analyze a pool against templates it was not generated with
  if (!analysis.pool.template_versions.empty() &&
      std::filesystem::is_directory(cfg.templates_dir)) {
    auto current = prompts::PromptLibrary::load(cfg.templates_dir).versions();
    for (const auto& [name, version] : analysis.pool.template_versions) {
      auto it = current.find(name);
      if (it != current.end() && it->second != version) {
        throw ValidationError("pool was generated with template '" + name + "' " +
                              version + " but the configured templates carry " +
                              it->second + "; refusing to mix");
      }
    }
  }
  analysis.matrix =
      build_solve_matrix(analysis.pool, gold_map(analysis.subset), make_equiv(normalizer));
  analysis.index = sampling::PoolIndex::build(analysis.pool);
  analysis.has_all_methods =
      analysis.matrix.methods_present().size() == kMethodCount;
  if (analysis.has_all_methods) {
    // base (k=1) score: accuracy of each method's first run
    std::vector<std::string> ids = analysis.matrix.problem_ids();
    for (Method m : kAllMethods) {
      std::size_t hits = 0;
      for (const std::string& id : ids) {
        if (analysis.matrix.run_count(id, m) > 0 && analysis.matrix.correct(id, m, 0)) {
          ++hits;
        }
      }
      analysis.base_scores[m] =
          static_cast<double>(hits) / static_cast<double>(ids.size());
    }
    analysis.order = sampling::method_order(analysis.base_scores);
  }
  return analysis;
}

inline void write_report_file(const std::filesystem::path& path,
                              const std::string& content, std::ostream& log) {
  util::write_text_file(path, content);
  log << "wrote " << path.string() << "\n";
}

}  // namespace detail

// subset: draw the seeded subset and write its manifest.
inline int cmd_subset(const config::ExperimentConfig& cfg, std::ostream& out) {
  dataset::validate_spec(cfg.subset);
  dataset::LoadReport corpus = dataset::load_corpus(cfg.corpus);
  for (const std::string& w : corpus.warnings) out << "warning: " << w << "\n";
  std::vector<Problem> subset = dataset::sample_subset(corpus.problems, cfg.subset);
  dataset::write_manifest(cfg.manifest_path(), cfg.subset, subset);
  std::map<std::string, std::map<int, int>> split;
  for (const Problem& p : subset) split[p.domain][p.level]++;
  for (const auto& [domain, levels] : split) {
    int total = 0;
    out << "bucket " << domain << ":";
    for (const auto& [level, n] : levels) {
      out << " level" << level << "=" << n;
      total += n;
    }
    out << " total=" << total << "\n";
  }
  out << "subset: " << subset.size() << " problems -> "
      << cfg.manifest_path().string() << "\n";
  return 0;
}

// generate: drive every (problem, method, nonce) through the client stack,
// resumably, and persist the pool.
inline int cmd_generate(const config::ExperimentConfig& cfg, std::ostream& out) {
  std::vector<Problem> subset = detail::load_subset(cfg, out);
  prompts::PromptLibrary library = prompts::PromptLibrary::load(cfg.templates_dir);
  detail::ClientStack stack = detail::make_client(cfg);
  exec::PythonSubprocessExecutor executor;
  solver::MethodRunner runner{stack.top(), library, &executor, cfg.solver};

  solver::GenerateOptions options;
  options.methods = cfg.methods;
  options.workers = cfg.workers;
  options.pool_path = cfg.pool_path();
  options.config_hash = cfg.hash();
  solver::GenerateReport report =
      solver::generate_pool(subset, runner, cfg.generation, options);

  for (Method m : cfg.methods) {
    const auto& t = report.ledger.totals(m);
    out << method_name(m) << ": runs=" << t.run_count
        << " prompt_tokens=" << t.prompt_tokens
        << " completion_tokens=" << t.completion_tokens << "\n";
  }
  out << "generated=" << report.generated << " resumed=" << report.resumed
      << " failed=" << report.failed << " client_calls=" << stack.caching->inner_calls()
      << "\n";
  out << "pool: " << report.pool.runs.size() << " runs -> " << cfg.pool_path().string()
      << "\n";
  return 0;
}

// analyze: coverage tables, Venn regions, per-domain means, reductions, and
// the coverage chart.
inline int cmd_analyze(const config::ExperimentConfig& cfg, std::ostream& out) {
  answer::Normalizer normalizer = detail::make_normalizer(cfg);
  detail::Analysis analysis = detail::analyze_pool(cfg, normalizer, out);
  const std::string config_hash = cfg.hash();
  const int n = cfg.generation.samples_per_method;
  sampling::SelectOptions select_options{cfg.sampling.shuffled, cfg.sampling.shuffle_seed};

  // per-method coverage curves over k = 1..n
  std::map<Method, coverage::CoverageCurve> method_curves;
  for (Method m : analysis.matrix.methods_present()) {
    auto ordering = sampling::single_method_selection(analysis.index, m, n, select_options);
    method_curves[m] = coverage::coverage_curve(
        ordering, analysis.matrix,
        std::string(method_name(m)) + (cfg.sampling.shuffled ? "/shuffled" : "/generation-order"));
  }

  std::optional<coverage::CoverageCurve> uniform_curve;
  if (analysis.has_all_methods) {
    sampling::Schedule full = sampling::uniform_schedule(3 * n, analysis.order);
    auto ordering = sampling::select_runs(analysis.index, full, select_options);
    uniform_curve = coverage::coverage_curve(ordering, analysis.matrix, "uniform");
    std::ostringstream csv;
    sampling::write_selection_csv(csv, ordering);
    detail::write_report_file(cfg.output_dir / "selection_uniform.csv", csv.str(), out);
  } else {
    out << "warning: pool lacks some methods; uniform, venn, and reduction "
           "outputs are skipped\n";
  }

  // Table-1-style CSV over the configured k schedule
  report::AccuracyRow base_row;
  base_row.schedule = "";
  for (Method m : analysis.matrix.methods_present()) {
    base_row.per_method[method_index(m)] = method_curves[m].at(1);
  }
  if (uniform_curve) base_row.uniform = uniform_curve->at(1);

  std::vector<report::AccuracyRow> rows;
  for (int k : cfg.sampling.k_schedule) {
    report::AccuracyRow row;
    row.k = k;
    if (analysis.has_all_methods) {
      row.schedule = sampling::uniform_schedule(k, analysis.order).display();
    }
    for (Method m : analysis.matrix.methods_present()) {
      if (k <= method_curves[m].max_k()) {
        row.per_method[method_index(m)] = method_curves[m].at(k);
      }
    }
    if (uniform_curve && k <= uniform_curve->max_k()) {
      row.uniform = uniform_curve->at(k);
    }
    rows.push_back(std::move(row));
  }
  {
    std::ostringstream csv;
    report::write_accuracy_table_csv(csv, config_hash, base_row, rows, "coverage");
    detail::write_report_file(cfg.output_dir / "table1.csv", csv.str(), out);
  }
  {
    std::ostringstream csv;
    analysis.matrix.write_csv(csv);
    detail::write_report_file(cfg.output_dir / "solve_matrix.csv", csv.str(), out);
  }

  // Venn regions + unexplored fractions
  if (analysis.has_all_methods) {
    coverage::VennPartition part = coverage::venn_partition(analysis.matrix);
    std::map<Method, double> unexplored;
    if (part.union_size > 0) {
      for (Method m : kAllMethods) {
        unexplored[m] = coverage::unexplored_fraction(analysis.matrix, m);
      }
    }
    std::ostringstream json;
    report::write_venn_json(json, config_hash, part, unexplored,
                            analysis.matrix.problem_count());
    detail::write_report_file(cfg.output_dir / "venn.json", json.str(), out);
  }

  // per-domain means (radar-chart data)
  {
    std::vector<std::string> warnings;
    auto means = coverage::per_domain_means(analysis.matrix, analysis.subset, &warnings);
    for (const std::string& w : warnings) out << "warning: " << w << "\n";
    std::ostringstream csv;
    report::write_domain_means_csv(csv, config_hash, means);
    detail::write_report_file(cfg.output_dir / "domain_means.csv", csv.str(), out);
  }

  // runs-to-threshold reductions and the chart
  if (analysis.has_all_methods && uniform_curve) {
    static const std::map<Method, std::string> kColors = {
        {Method::Text, "#777777"}, {Method::Code, "#2b6cb0"}, {Method::CR, "#9b2c2c"}};
    std::vector<report::ReductionRow> reductions;
    std::vector<svg::Series> series;
    std::vector<svg::Threshold> thresholds;
    for (Method m : kAllMethods) {
      const coverage::CoverageCurve& curve = method_curves[m];
      double ub = curve.at(n);
      auto single = coverage::runs_to_reach(curve, ub);
      auto via_uniform = coverage::runs_to_reach(*uniform_curve, ub);
      reductions.push_back({m, ub, single.value_or(n), via_uniform});
      series.push_back({std::string(method_name(m)), kColors.at(m), curve.values, false});
      thresholds.push_back({std::string(method_name(m)) + " upper bound",
                            kColors.at(m), ub, via_uniform});
    }
    series.push_back({"uniform", "#2f855a", uniform_curve->values, true});
    {
      std::ostringstream csv;
      report::write_reductions_csv(csv, config_hash, reductions);
      detail::write_report_file(cfg.output_dir / "reductions.csv", csv.str(), out);
    }
    {
      std::ostringstream chart;
      svg::write_coverage_chart(chart, "Upper-bound accuracy vs runs consumed", series,
                                thresholds);
      detail::write_report_file(cfg.output_dir / "coverage.svg", chart.str(), out);
    }
  }
  return 0;
}

// verify: SC voting and sliding-window re-ranking across the k schedule.
inline int cmd_verify(const config::ExperimentConfig& cfg, std::ostream& out) {
  answer::Normalizer normalizer = detail::make_normalizer(cfg);
  detail::Analysis analysis = detail::analyze_pool(cfg, normalizer, out);
  const std::string config_hash = cfg.hash();
  EquivFn equiv = detail::make_equiv(normalizer);
  GoldMap gold = detail::gold_map(analysis.subset);
  sampling::SelectOptions select_options{cfg.sampling.shuffled, cfg.sampling.shuffle_seed};

  std::map<std::string, const Problem*> problem_by_id;
  for (const Problem& p : analysis.subset) problem_by_id[p.id] = &p;

  // ranker selection
  std::unique_ptr<verification::Ranker> ranker;
  std::optional<detail::ClientStack> stack;
  std::unique_ptr<prompts::PromptLibrary> library;
  if (cfg.verifier.ranker == "identity") {
    ranker = std::make_unique<verification::IdentityRanker>();
  } else if (cfg.verifier.ranker == "oracle") {
    ranker = std::make_unique<verification::OracleRanker>(gold, equiv);
  } else {
    stack.emplace(detail::make_client(cfg));
    library = std::make_unique<prompts::PromptLibrary>(
        prompts::PromptLibrary::load(cfg.templates_dir));
    ranker = std::make_unique<verification::LlmRanker>(stack->top(), *library,
                                                       cfg.generation);
  }

  auto candidates_for = [&](const sampling::Selection& sel) {
    std::vector<verification::RankCandidate> candidates;
    for (std::size_t i = 0; i < sel.runs.size(); ++i) {
      const Run& run =
          analysis.index.run(sel.problem_id, sel.runs[i].method, sel.runs[i].sample_index);
      verification::RankCandidate c;
      c.answer = run.extracted_answer.value_or("");
      c.excerpt = run.solution_text.substr(
          0, static_cast<std::size_t>(cfg.verifier.rerank.excerpt_limit));
      c.original_position = static_cast<int>(i);
      candidates.push_back(std::move(c));
    }
    if (cfg.verifier.reverse_candidates) {
      std::reverse(candidates.begin(), candidates.end());
    }
    return candidates;
  };

  auto score_selections = [&](const std::vector<sampling::Selection>& selections,
                              double* sc_out, double* rerank_out) {
    std::vector<std::vector<std::optional<std::string>>> per_problem_answers;
    std::vector<std::string> golds;
    double recall_sum = 0.0;
    for (const sampling::Selection& sel : selections) {
      std::vector<std::optional<std::string>> answers;
      for (const sampling::RunRef& ref : sel.runs) {
        answers.push_back(
            analysis.index.run(sel.problem_id, ref.method, ref.sample_index)
                .extracted_answer);
      }
      per_problem_answers.push_back(std::move(answers));
      golds.push_back(gold.at(sel.problem_id));

      auto candidates = candidates_for(sel);
      std::vector<std::string> warnings;
      auto ranked = verification::rerank(*problem_by_id.at(sel.problem_id), candidates,
                                         cfg.verifier.rerank, *ranker, &warnings);
      for (const std::string& w : warnings) out << "warning: " << w << "\n";
      recall_sum += verification::recall_at_1(ranked, gold.at(sel.problem_id), equiv);
    }
    *sc_out = verification::sc_accuracy(per_problem_answers, golds, equiv);
    *rerank_out = recall_sum / static_cast<double>(selections.size());
  };

  std::vector<report::AccuracyRow> sc_rows, rerank_rows;
  for (int k : cfg.sampling.k_schedule) {
    report::AccuracyRow sc_row, rr_row;
    sc_row.k = rr_row.k = k;
    if (analysis.has_all_methods) {
      sc_row.schedule = rr_row.schedule =
          sampling::uniform_schedule(k, analysis.order).display();
    }
    for (Method m : analysis.matrix.methods_present()) {
      auto selections = sampling::single_method_selection(analysis.index, m, k, select_options);
      double sc = 0, rr = 0;
      score_selections(selections, &sc, &rr);
      sc_row.per_method[method_index(m)] = sc;
      rr_row.per_method[method_index(m)] = rr;
    }
    if (analysis.has_all_methods) {
      auto selections = sampling::select_runs(
          analysis.index, sampling::uniform_schedule(k, analysis.order), select_options);
      double sc = 0, rr = 0;
      score_selections(selections, &sc, &rr);
      sc_row.uniform = sc;
      rr_row.uniform = rr;
    }
    sc_rows.push_back(std::move(sc_row));
    rerank_rows.push_back(std::move(rr_row));
  }

  // per-problem verification report at the largest budget
  if (!cfg.sampling.k_schedule.empty()) {
    int k_max = *std::max_element(cfg.sampling.k_schedule.begin(),
                                  cfg.sampling.k_schedule.end());
    std::ostringstream details;
    details << "# searchspace per-problem verification at k=" << k_max
            << " config=" << config_hash << "\n";
    details << "column,problem_id,voted_answer,voted_count,answered,rerank_top,"
               "recall_at_1\n";
    auto emit_details = [&](const std::string& column,
                            const std::vector<sampling::Selection>& selections) {
      for (const sampling::Selection& sel : selections) {
        std::vector<std::optional<std::string>> answers;
        for (const sampling::RunRef& ref : sel.runs) {
          answers.push_back(
              analysis.index.run(sel.problem_id, ref.method, ref.sample_index)
                  .extracted_answer);
        }
        verification::VoteTally tally = verification::tally_votes(answers, equiv);
        auto voted = verification::majority_vote(answers, equiv);
        int voted_count = 0;
        for (const auto& cls : tally.classes) {
          if (voted && equiv(cls.representative, *voted)) voted_count = cls.count;
        }
        auto ranked = verification::rerank(*problem_by_id.at(sel.problem_id),
                                           candidates_for(sel), cfg.verifier.rerank,
                                           *ranker);
        details << column << ',' << util::csv_field(sel.problem_id) << ','
                << util::csv_field(voted.value_or("")) << ',' << voted_count << ','
                << tally.answered << ',' << util::csv_field(ranked.front().answer)
                << ','
                << verification::recall_at_1(ranked, gold.at(sel.problem_id), equiv)
                << '\n';
      }
    };
    for (Method m : analysis.matrix.methods_present()) {
      emit_details(std::string(method_name(m)),
                   sampling::single_method_selection(analysis.index, m, k_max,
                                                     select_options));
    }
    if (analysis.has_all_methods) {
      emit_details("uniform",
                   sampling::select_runs(
                       analysis.index,
                       sampling::uniform_schedule(k_max, analysis.order),
                       select_options));
    }
    detail::write_report_file(cfg.output_dir / "verify_details.csv", details.str(), out);
  }

  std::ostringstream csv;
  csv << "# searchspace verification table config=" << config_hash << "\n";
  csv << "section=sc\n";
  {
    std::ostringstream section;
    report::write_accuracy_table_csv(section, config_hash, std::nullopt, sc_rows, "sc");
    // drop the per-section comment line; the file has one header already
    std::string text = section.str();
    csv << text.substr(text.find('\n') + 1);
  }
  csv << "section=rerank\n";
  {
    std::ostringstream section;
    report::write_accuracy_table_csv(section, config_hash, std::nullopt, rerank_rows,
                                     "rerank");
    std::string text = section.str();
    csv << text.substr(text.find('\n') + 1);
  }
  detail::write_report_file(cfg.output_dir / "table2.csv", csv.str(), out);
  return 0;
}

// report: analyze + verify + the token-cost ledger + a markdown summary.
inline int cmd_report(const config::ExperimentConfig& cfg, std::ostream& out) {
  cmd_analyze(cfg, out);
  cmd_verify(cfg, out);
  RunPool pool = pool_io::read_pool(cfg.pool_path());
  solver::CostLedger ledger = solver::CostLedger::from_pool(pool);
  {
    std::ostringstream csv;
    report::write_cost_csv(csv, cfg.hash(), ledger, Method::Text);
    detail::write_report_file(cfg.output_dir / "costs.csv", csv.str(), out);
  }
  std::ostringstream md;
  md << "# searchspace experiment report\n\n";
  md << "- config hash: `" << cfg.hash() << "`\n";
  md << "- pool: `" << cfg.pool_path().string() << "` (" << pool.runs.size()
     << " runs, model " << pool.params.model_name << ", t="
     << util::format_fixed(pool.params.temperature, 2) << ")\n";
  md << "- outputs: `table1.csv`, `table2.csv`, `venn.json`, `domain_means.csv`, "
        "`reductions.csv`, `coverage.svg`, `costs.csv`\n";
  detail::write_report_file(cfg.output_dir / "summary.md", md.str(), out);
  return 0;
}

}  // namespace searchspace::commands
