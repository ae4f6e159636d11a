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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "searchspace/answer.hpp"
#include "searchspace/types.hpp"

// Loading a MATH-format corpus and drawing seeded problem subsets.
//
// Corpus layout: a directory tree of JSON files, one problem per file, with
// fields "problem", "level" ("Level 4" or an integer), "type" (domain), and
// "solution" containing a boxed final answer. The problem id is the file
// path relative to the corpus root without the .json extension.
namespace searchspace::dataset {

inline constexpr std::array<std::string_view, 7> kDomains = {
    "algebra",
    "counting_and_probability",
    "geometry",
    "intermediate_algebra",
    "number_theory",
    "prealgebra",
    "precalculus",
};

inline bool is_known_domain(std::string_view d) {
  for (std::string_view k : kDomains)
    if (k == d) return true;
  return false;
}

// Maps "Counting & Probability" / "counting_and_probability" style names to
// the canonical snake_case form. Returns nullopt for unknown domains.
inline std::optional<std::string> canonical_domain(std::string_view raw) {
  std::string s = util::lowercase(util::trim(raw));
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '&') {
      out += "and";
    } else if (c == ' ' || c == '-') {
      if (!out.empty() && out.back() != '_') out += '_';
    } else {
      out += c;
    }
  }
  if (is_known_domain(out)) return out;
  return std::nullopt;
}

struct LoadReport {
  std::vector<Problem> problems;  // sorted by id
  int skipped = 0;
  std::vector<std::string> warnings;
};

inline std::optional<int> parse_level(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<int>();
  if (!j.is_string()) return std::nullopt;
  std::string s(util::trim(j.get<std::string>()));
  std::size_t pos = s.find_last_of(' ');
  std::string digits = pos == std::string::npos ? s : s.substr(pos + 1);
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    return std::nullopt;
  return std::stoi(digits);
}

// Reads every *.json under `root`. Malformed files are skipped with a
// warning; an unreadable root is a hard error. Gold answers come from the
// boxed expression in the solution text.
inline LoadReport load_corpus(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw ValidationError("corpus root is not a readable directory: " + root.string());
  }
  LoadReport report;
  auto skip = [&](const std::filesystem::path& p, const std::string& why) {
    ++report.skipped;
    report.warnings.push_back("skipping " + p.string() + ": " + why);
  };
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    const std::filesystem::path& path = entry.path();
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(util::read_text_file(path));
    } catch (const std::exception& e) {
      skip(path, std::string("unparseable JSON (") + e.what() + ")");
      continue;
    }
    if (!j.is_object() || !j.contains("problem") || !j.contains("solution")) {
      skip(path, "missing problem/solution fields");
      continue;
    }
    Problem p;
    p.statement = j["problem"].get<std::string>();
    auto level = j.contains("level") ? parse_level(j["level"]) : std::nullopt;
    if (!level || *level < 1 || *level > 5) {
      skip(path, "missing or out-of-range level");
      continue;
    }
    p.level = *level;
    // Prefer the parent directory name (the MATH layout); fall back to the
    // "type" field.
    std::optional<std::string> domain =
        canonical_domain(path.parent_path().filename().string());
    if (!domain && j.contains("type") && j["type"].is_string()) {
      domain = canonical_domain(j["type"].get<std::string>());
    }
    if (!domain) {
      skip(path, "unknown domain");
      continue;
    }
    p.domain = *domain;
    auto boxed = answer::extract_boxed(j["solution"].get<std::string>());
    if (!boxed) {
      skip(path, "no boxed final answer in solution");
      continue;
    }
    p.gold_answer = *boxed;
    std::string rel = std::filesystem::relative(path, root).generic_string();
    p.id = rel.substr(0, rel.size() - std::string_view(".json").size());
    report.problems.push_back(std::move(p));
  }
  std::sort(report.problems.begin(), report.problems.end(),
            [](const Problem& a, const Problem& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < report.problems.size(); ++i) {
    if (report.problems[i].id == report.problems[i - 1].id) {
      throw ValidationError("duplicate problem id: " + report.problems[i].id);
    }
  }
  return report;
}

// Seeded subset request. Exactly one of the two count fields is set.
// per_domain_per_level=c draws c * |levels| problems from each domain's
// pooled bucket of the selected levels; per_domain_total=c draws exactly c.
struct SubsetSpec {
  std::set<int> levels;
  std::set<std::string> domains;
  std::optional<int> per_domain_per_level;
  std::optional<int> per_domain_total;
  std::uint64_t seed = 42;

  int per_domain_count() const {
    return per_domain_total ? *per_domain_total
                            : *per_domain_per_level * static_cast<int>(levels.size());
  }
};

inline void validate_spec(const SubsetSpec& spec) {
  if (spec.levels.empty()) throw ValidationError("subset spec: empty level set");
  for (int level : spec.levels) {
    if (level < 1 || level > 5)
      throw ValidationError("subset spec: level out of range: " + std::to_string(level));
  }
  if (spec.domains.empty()) throw ValidationError("subset spec: empty domain set");
  for (const std::string& d : spec.domains) {
    if (!is_known_domain(d)) throw ValidationError("subset spec: unknown domain: " + d);
  }
  if (spec.per_domain_per_level.has_value() == spec.per_domain_total.has_value()) {
    throw ValidationError(
        "subset spec: exactly one of per_domain_per_level / per_domain_total must be set");
  }
  if (spec.per_domain_count() <= 0) {
    throw ValidationError("subset spec: nonpositive sample count");
  }
}

inline std::vector<std::string> level_names(const SubsetSpec& spec) {
  std::vector<std::string> out;
  for (int level : spec.levels) out.push_back(std::to_string(level));
  return out;
}

// Deterministic subset draw: within each domain bucket (problems of the
// selected levels), problems are sorted by id, shuffled by a seeded
// Fisher-Yates whose stream depends only on (seed, domain), and the first
// k are taken. Returned problems are ordered by (domain, id).
inline std::vector<Problem> sample_subset(const std::vector<Problem>& dataset,
                                          const SubsetSpec& spec) {
  validate_spec(spec);
  std::vector<Problem> subset;
  for (const std::string& domain : spec.domains) {  // std::set: sorted
    std::vector<const Problem*> bucket;
    for (const Problem& p : dataset) {
      if (p.domain == domain && spec.levels.count(p.level)) bucket.push_back(&p);
    }
    std::sort(bucket.begin(), bucket.end(),
              [](const Problem* a, const Problem* b) { return a->id < b->id; });
    int need = spec.per_domain_count();
    if (static_cast<int>(bucket.size()) < need) {
      throw ValidationError("subset bucket underflow for domain '" + domain +
                            "' (levels " + util::join(level_names(spec), ",") +
                            "): have " + std::to_string(bucket.size()) +
                            ", need " + std::to_string(need));
    }
    auto rng = util::seeded_rng(util::derive_seed(spec.seed, {"subset", domain}));
    util::fisher_yates(bucket, rng);
    std::vector<const Problem*> picked(bucket.begin(), bucket.begin() + need);
    std::sort(picked.begin(), picked.end(),
              [](const Problem* a, const Problem* b) { return a->id < b->id; });
    for (const Problem* p : picked) subset.push_back(*p);
  }
  return subset;
}

// ---------------------------------------------------------------------------
// Subset manifest: self-describing and replayable. Key=value header lines
// carry the SubsetSpec; '#' lines record the realized per-level split; the
// ids follow an "ids:" line.

struct Manifest {
  SubsetSpec spec;
  std::vector<std::string> ids;
};

inline std::string render_manifest(const SubsetSpec& spec,
                                   const std::vector<Problem>& subset) {
  std::string out = "# searchspace subset manifest v1\n";
  out += "seed=" + std::to_string(spec.seed) + "\n";
  out += "levels=" + util::join(level_names(spec), ",") + "\n";
  out += "domains=" + util::join(spec.domains, ",") + "\n";
  if (spec.per_domain_per_level) {
    out += "per_domain_per_level=" + std::to_string(*spec.per_domain_per_level) + "\n";
  } else {
    out += "per_domain_total=" + std::to_string(*spec.per_domain_total) + "\n";
  }
  // realized per-(domain, level) split, for the record
  std::map<std::string, std::map<int, int>> split;
  for (const Problem& p : subset) split[p.domain][p.level]++;
  for (const auto& [domain, levels] : split) {
    std::string line = "# bucket " + domain + ":";
    int total = 0;
    for (const auto& [level, n] : levels) {
      line += " level" + std::to_string(level) + "=" + std::to_string(n);
      total += n;
    }
    line += " total=" + std::to_string(total);
    out += line + "\n";
  }
  out += "ids:\n";
  for (const Problem& p : subset) out += p.id + "\n";
  return out;
}

inline Manifest parse_manifest(const std::string& content) {
  Manifest m;
  bool in_ids = false;
  for (const std::string& raw : util::split(content, '\n')) {
    std::string_view line = util::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line == "ids:") {
      in_ids = true;
      continue;
    }
    if (in_ids) {
      m.ids.emplace_back(line);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("bad manifest line: " + std::string(line));
    }
    std::string key(line.substr(0, eq));
    std::string value(line.substr(eq + 1));
    if (key == "seed") {
      m.spec.seed = std::stoull(value);
    } else if (key == "levels") {
      for (const std::string& level : util::split(value, ','))
        m.spec.levels.insert(std::stoi(level));
    } else if (key == "domains") {
      for (const std::string& d : util::split(value, ','))
        m.spec.domains.insert(d);
    } else if (key == "per_domain_per_level") {
      m.spec.per_domain_per_level = std::stoi(value);
    } else if (key == "per_domain_total") {
      m.spec.per_domain_total = std::stoi(value);
    } else {
      throw ValidationError("unknown manifest key: " + key);
    }
  }
  return m;
}

inline void write_manifest(const std::filesystem::path& path, const SubsetSpec& spec,
                           const std::vector<Problem>& subset) {
  util::write_text_file(path, render_manifest(spec, subset));
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(util::read_text_file(path));
}

}  // namespace searchspace::dataset
