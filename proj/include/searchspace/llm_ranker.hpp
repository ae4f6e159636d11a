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

#include <string>
#include <vector>

#include "searchspace/client.hpp"
#include "searchspace/prompts.hpp"
#include "searchspace/verification.hpp"

namespace searchspace::verification {

// Listwise window ranker backed by a completion client. Candidates are
// presented as "[i] answer: ... / excerpt", and the model answers with a
// ranking like "[2] > [1] > [3]". A malformed ranking throws, which leaves
// the window unpermuted upstream.
class LlmRanker : public Ranker {
 public:
  LlmRanker(client::CompletionClient& client, const prompts::PromptLibrary& library,
            GenerationParams params)
      : client_(client), template_(library.get("rerank")), params_(std::move(params)) {}

  std::vector<int> rank_window(const Problem& problem,
                               const std::vector<RankCandidate>& window) override {
    std::string block;
    for (std::size_t i = 0; i < window.size(); ++i) {
      block += "[" + std::to_string(i + 1) + "] answer: ";
      block += window[i].answer.empty() ? "(none)" : window[i].answer;
      block += "\n";
      block += window[i].excerpt;
      block += "\n\n";
    }
    client::CompletionRequest request;
    request.prompt = template_.render({{"statement", problem.statement},
                                       {"candidates", block},
                                       {"count", std::to_string(window.size())}});
    request.params = params_;
    request.purpose = client::Purpose::Rank;
    request.problem_id = problem.id;
    request.template_version = template_.version;
    request.rank_count = static_cast<int>(window.size());
    // Rank calls have no sample nonce of their own; key the cache on the
    // window content instead.
    request.nonce = util::fnv1a64(request.prompt);

    client::CompletionResult result = client_.complete(request);
    return parse_ranking(result.text, window.size());
  }

  // "[2] > [1] > [3]" -> {1, 0, 2}. Throws on anything but a permutation.
  static std::vector<int> parse_ranking(const std::string& text, std::size_t count) {
    std::vector<int> perm;
    std::vector<char> seen(count, 0);
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] != '[') continue;
      std::size_t close = text.find(']', i);
      if (close == std::string::npos) break;
      std::string digits = text.substr(i + 1, close - i - 1);
      i = close;
      if (digits.empty() ||
          digits.find_first_not_of("0123456789") != std::string::npos) {
        continue;
      }
      int idx = std::stoi(digits) - 1;
      if (idx < 0 || static_cast<std::size_t>(idx) >= count || seen[idx]) {
        throw RuntimeError("ranker returned an invalid ordering: " + text);
      }
      seen[static_cast<std::size_t>(idx)] = 1;
      perm.push_back(idx);
    }
    if (perm.size() != count) {
      throw RuntimeError("ranker returned an incomplete ordering: " + text);
    }
    return perm;
  }

 private:
  client::CompletionClient& client_;
  prompts::PromptTemplate template_;
  GenerationParams params_;
};

}  // namespace searchspace::verification
