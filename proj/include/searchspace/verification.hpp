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
#include <string>
#include <vector>

#include "searchspace/solve_matrix.hpp"
#include "searchspace/types.hpp"

// Choosing a final answer from a selection: self-consistency majority voting
// and listwise sliding-window re-ranking, scored by Recall@1.
namespace searchspace::verification {

// ---------------------------------------------------------------------------
// Majority voting

// Equivalence classes of extracted answers with counts and the earliest
// selection position per class.
struct VoteClass {
  std::string representative;  // answer text of the earliest member
  int count = 0;
  int first_position = 0;
};

struct VoteTally {
  std::vector<VoteClass> classes;
  int answered = 0;  // number of candidates that had an answer
};

inline VoteTally tally_votes(const std::vector<std::optional<std::string>>& answers,
                             const EquivFn& equiv) {
  VoteTally tally;
  for (std::size_t pos = 0; pos < answers.size(); ++pos) {
    if (!answers[pos]) continue;
    ++tally.answered;
    bool merged = false;
    for (VoteClass& cls : tally.classes) {
      if (equiv(cls.representative, *answers[pos])) {
        ++cls.count;
        merged = true;
        break;
      }
    }
    if (!merged) {
      tally.classes.push_back({*answers[pos], 1, static_cast<int>(pos)});
    }
  }
  return tally;
}

// Answer of the largest equivalence class; ties break toward the class with
// the earliest selection position. Abstains (nullopt) when no candidate
// produced an answer.
inline std::optional<std::string> majority_vote(
    const std::vector<std::optional<std::string>>& answers, const EquivFn& equiv) {
  VoteTally tally = tally_votes(answers, equiv);
  const VoteClass* best = nullptr;
  for (const VoteClass& cls : tally.classes) {
    if (!best || cls.count > best->count ||
        (cls.count == best->count && cls.first_position < best->first_position)) {
      best = &cls;
    }
  }
  if (!best) return std::nullopt;
  return best->representative;
}

// Fraction of problems whose voted answer is equivalent to gold; an abstain
// counts as incorrect.
inline double sc_accuracy(const std::vector<std::vector<std::optional<std::string>>>& per_problem_answers,
                          const std::vector<std::string>& golds, const EquivFn& equiv) {
  if (per_problem_answers.size() != golds.size() || golds.empty()) {
    throw ValidationError("sc_accuracy: answer lists and golds must align and be nonempty");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    auto voted = majority_vote(per_problem_answers[i], equiv);
    if (voted && equiv(*voted, golds[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(golds.size());
}

// ---------------------------------------------------------------------------
// Sliding-window re-ranking

struct RerankParams {
  int window = 4;         // w
  int step = 2;           // s, s <= w
  int excerpt_limit = 1200;  // characters of solution text shown per candidate

  void validate() const {
    if (window < 2) throw ValidationError("rerank: window must be >= 2");
    if (step < 1) throw ValidationError("rerank: step must be >= 1");
    if (step > window) throw ValidationError("rerank: step must be <= window");
  }
};

// Back-to-front sliding windows over n candidates: the last w candidates
// first, sliding toward the front by s, with the final window clamped to
// start 0. For n <= w a single window covers everything.
inline std::vector<std::pair<int, int>> window_plan(int n, const RerankParams& params) {
  params.validate();
  if (n < 1) throw ValidationError("window_plan: need at least one candidate");
  std::vector<std::pair<int, int>> plan;
  if (n <= params.window) {
    plan.emplace_back(0, n);
    return plan;
  }
  int start = n - params.window;
  while (true) {
    plan.emplace_back(start, start + params.window);
    if (start == 0) break;
    start = std::max(0, start - params.step);
  }
  return plan;
}

// What a ranker sees for one candidate.
struct RankCandidate {
  std::string answer;   // extracted answer; empty when extraction failed
  std::string excerpt;  // capped slice of the solution text
  int original_position = 0;
};

// Orders one window of candidates, best first. Returns a permutation of
// 0..window_size-1 (indices into the window it was given).
class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual std::vector<int> rank_window(const Problem& problem,
                                       const std::vector<RankCandidate>& window) = 0;
};

class IdentityRanker : public Ranker {
 public:
  std::vector<int> rank_window(const Problem&,
                               const std::vector<RankCandidate>& window) override {
    std::vector<int> perm(window.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    return perm;
  }
};

class ReversingRanker : public Ranker {
 public:
  std::vector<int> rank_window(const Problem&,
                               const std::vector<RankCandidate>& window) override {
    std::vector<int> perm(window.size());
    for (std::size_t i = 0; i < perm.size(); ++i)
      perm[i] = static_cast<int>(window.size() - 1 - i);
    return perm;
  }
};

// Puts any gold-equivalent candidate first in its window (stable otherwise).
// Used to measure the ceiling the re-ranking machinery can reach.
class OracleRanker : public Ranker {
 public:
  OracleRanker(GoldMap gold, EquivFn equiv)
      : gold_(std::move(gold)), equiv_(std::move(equiv)) {}

  std::vector<int> rank_window(const Problem& problem,
                               const std::vector<RankCandidate>& window) override {
    std::vector<int> perm;
    std::vector<int> rest;
    auto gold_it = gold_.find(problem.id);
    for (std::size_t i = 0; i < window.size(); ++i) {
      bool good = gold_it != gold_.end() && !window[i].answer.empty() &&
                  equiv_(window[i].answer, gold_it->second);
      (good ? perm : rest).push_back(static_cast<int>(i));
    }
    perm.insert(perm.end(), rest.begin(), rest.end());
    return perm;
  }

 private:
  GoldMap gold_;
  EquivFn equiv_;
};

// Applies the ranker within each window of the plan, propagating promoted
// candidates frontward. A ranker failure (exception or a non-permutation)
// leaves that window unpermuted and records a warning. The output is always
// a permutation of the input.
inline std::vector<RankCandidate> rerank(const Problem& problem,
                                         std::vector<RankCandidate> candidates,
                                         const RerankParams& params, Ranker& ranker,
                                         std::vector<std::string>* warnings = nullptr) {
  if (candidates.empty()) return candidates;
  auto warn = [&](const std::string& message) {
    if (warnings) warnings->push_back(message);
  };
  for (auto [start, end] : window_plan(static_cast<int>(candidates.size()), params)) {
    std::vector<RankCandidate> window(candidates.begin() + start,
                                      candidates.begin() + end);
    std::vector<int> perm;
    try {
      perm = ranker.rank_window(problem, window);
    } catch (const std::exception& e) {
      warn("ranker failed on window [" + std::to_string(start) + "," +
           std::to_string(end) + ") of problem " + problem.id + ": " + e.what());
      continue;
    }
    std::vector<char> seen(window.size(), 0);
    bool valid = perm.size() == window.size();
    for (int idx : perm) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= window.size() || seen[idx]) {
        valid = false;
        break;
      }
      seen[static_cast<std::size_t>(idx)] = 1;
    }
    if (!valid) {
      warn("ranker returned a non-permutation for window [" + std::to_string(start) +
           "," + std::to_string(end) + ") of problem " + problem.id);
      continue;
    }
    for (std::size_t i = 0; i < window.size(); ++i) {
      candidates[static_cast<std::size_t>(start) + i] =
          window[static_cast<std::size_t>(perm[i])];
    }
  }
  return candidates;
}

// 1 iff the top candidate's answer is equivalent to gold.
inline int recall_at_1(const std::vector<RankCandidate>& ranked, const std::string& gold,
                       const EquivFn& equiv) {
  if (ranked.empty()) throw ValidationError("recall_at_1: empty candidate list");
  const RankCandidate& top = ranked.front();
  return (!top.answer.empty() && equiv(top.answer, gold)) ? 1 : 0;
}

}  // namespace searchspace::verification
