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

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "searchspace/util.hpp"

// Final-answer extraction and mathematical answer equivalence.
//
// Equivalence is decided on canonical forms: integers, fractions (plain and
// \frac{a}{b}), and terminating decimals become exact rationals; everything
// else becomes a normalized symbolic string. Rationals compare exactly, with
// no floating tolerance; symbolic strings compare byte-equal. The checker is
// sound but incomplete: unreduced radicals and other algebraically equal
// symbolic forms may compare unequal, which can understate but never
// overstate accuracy.
namespace searchspace::answer {

// ---------------------------------------------------------------------------
// Extraction

// Content of the last balanced \boxed{...} (or \fbox{...}) in `text`.
inline std::optional<std::string> extract_boxed(std::string_view text) {
  static constexpr std::string_view kMarkers[] = {"\\boxed", "\\fbox"};
  std::optional<std::string> result;
  std::size_t best_pos = 0;
  for (std::string_view marker : kMarkers) {
    std::size_t from = 0;
    while (true) {
      std::size_t pos = text.find(marker, from);
      if (pos == std::string_view::npos) break;
      from = pos + marker.size();
      std::size_t i = pos + marker.size();
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      if (i >= text.size() || text[i] != '{') continue;
      int depth = 0;
      std::size_t start = i + 1;
      std::size_t j = i;
      for (; j < text.size(); ++j) {
        if (text[j] == '{') ++depth;
        else if (text[j] == '}' && --depth == 0) break;
      }
      if (j >= text.size()) continue;  // unbalanced; ignore this occurrence
      if (!result || pos >= best_pos) {
        best_pos = pos;
        result = std::string(text.substr(start, j - start));
      }
    }
  }
  return result;
}

// Final answer from a model completion: the last boxed expression, else the
// trailing expression after the last "answer is" marker, else absent.
inline std::optional<std::string> extract_final_answer(std::string_view solution) {
  if (auto boxed = extract_boxed(solution)) return boxed;
  std::string lower = util::lowercase(solution);
  std::size_t pos = lower.rfind("answer is");
  if (pos == std::string::npos) return std::nullopt;
  std::size_t start = pos + std::string_view("answer is").size();
  std::size_t end = solution.find('\n', start);
  if (end == std::string_view::npos) end = solution.size();
  std::string_view tail = util::trim(solution.substr(start, end - start));
  while (!tail.empty() && (tail.front() == ':' || tail.front() == '='))
    tail = util::trim(tail.substr(1));
  while (!tail.empty() && (tail.back() == '.' || tail.back() == '!'))
    tail = util::trim(tail.substr(0, tail.size() - 1));
  if (tail.empty()) return std::nullopt;
  return std::string(tail);
}

// ---------------------------------------------------------------------------
// Canonical values

// Exact rational in lowest terms with positive denominator.
struct Rational {
  long long num = 0;
  long long den = 1;
  friend bool operator==(const Rational&, const Rational&) = default;
};

inline Rational reduce(long long num, long long den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
  return Rational{num, den};
}

enum class AnswerKind { Rational, DecimalRational, Symbolic };

struct CanonicalAnswer {
  AnswerKind kind = AnswerKind::Symbolic;
  Rational value{};
  std::string text;

  bool is_numeric() const { return kind != AnswerKind::Symbolic; }

  std::string render() const {
    if (!is_numeric()) return text;
    if (value.den == 1) return std::to_string(value.num);
    return std::to_string(value.num) + "/" + std::to_string(value.den);
  }
};

// Numeric kinds compare by exact rational value; symbolic compares byte-equal.
// A numeric value never equals a symbolic one.
inline bool canonical_equal(const CanonicalAnswer& a, const CanonicalAnswer& b) {
  if (a.is_numeric() != b.is_numeric()) return false;
  if (a.is_numeric()) return a.value == b.value;
  return a.text == b.text;
}

// ---------------------------------------------------------------------------
// Rewrite table

// One textual rewrite, applied to fixpoint. The shipped data file
// (data/rewrites.tsv) holds the same rules so graders can be audited and
// extended without code changes.
struct RewriteRule {
  bool is_regex = false;
  std::string pattern;
  std::string replacement;
};

class RewriteTable {
 public:
  RewriteTable() = default;
  explicit RewriteTable(std::vector<RewriteRule> rules) : rules_(std::move(rules)) {
    compile();
  }

  // The default rule set: LaTeX spacing and sizing commands, \frac aliases,
  // degree and percent marks, currency signs, unit annotations, and
  // thousands separators.
  static RewriteTable builtin() {
    std::vector<RewriteRule> rules = {
        {false, "\\!", ""},
        {false, "\\,", ""},
        {false, "\\;", ""},
        {true, "\\\\[ ]", ""},
        {false, "\\left", ""},
        {false, "\\right", ""},
        {false, "\\dfrac", "\\frac"},
        {false, "\\tfrac", "\\frac"},
        {false, "\\cfrac", "\\frac"},
        {false, "^{\\circ}", ""},
        {false, "^\\circ", ""},
        {false, "\\degree", ""},
        {false, "\\%", ""},
        {false, "%", ""},
        {false, "\\$", ""},
        {false, "$", ""},
        {true, "\\\\text\\{[^{}]*\\}", ""},
        {true, "\\\\mbox\\{[^{}]*\\}", ""},
        {true, "(\\d),(\\d{3})(?!\\d)", "$1$2"},
    };
    return RewriteTable(std::move(rules));
  }

  // Loads a table from a tab-separated file: each line `lit\tPAT\tREPL` or
  // `re\tPAT\tREPL`. The replacement column may be omitted for deletion
  // rules, so no line needs trailing whitespace. Blank lines and lines
  // starting with '#' are skipped.
  static RewriteTable load(const std::filesystem::path& path) {
    std::vector<RewriteRule> rules;
    std::string content = util::read_text_file(path);
    int lineno = 0;
    for (const std::string& line : util::split(content, '\n')) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cols = util::split(line, '\t');
      if ((cols.size() != 2 && cols.size() != 3) ||
          (cols[0] != "lit" && cols[0] != "re") || cols[1].empty()) {
        throw ValidationError("bad rewrite rule at " + path.string() + ":" +
                              std::to_string(lineno));
      }
      rules.push_back({cols[0] == "re", cols[1], cols.size() == 3 ? cols[2] : ""});
    }
    return RewriteTable(std::move(rules));
  }

  const std::vector<RewriteRule>& rules() const { return rules_; }

  std::string apply(std::string s) const {
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      const RewriteRule& rule = rules_[r];
      if (!rule.is_regex) {
        std::size_t pos = 0;
        while ((pos = s.find(rule.pattern, pos)) != std::string::npos) {
          s.replace(pos, rule.pattern.size(), rule.replacement);
          pos += rule.replacement.size();
        }
      } else {
        // Regex rules run to fixpoint (bounded) so overlapping matches such
        // as repeated thousands groups all collapse.
        for (int pass = 0; pass < 16; ++pass) {
          std::string next = std::regex_replace(s, compiled_[r], rule.replacement);
          if (next == s) break;
          s = std::move(next);
        }
      }
    }
    return s;
  }

 private:
  void compile() {
    compiled_.resize(rules_.size());
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      if (rules_[i].is_regex) compiled_[i] = std::regex(rules_[i].pattern);
    }
  }

  std::vector<RewriteRule> rules_;
  std::vector<std::regex> compiled_;
};

// ---------------------------------------------------------------------------
// Normalizer

class Normalizer {
 public:
  explicit Normalizer(RewriteTable table = RewriteTable::builtin())
      : table_(std::move(table)) {}

  const RewriteTable& table() const { return table_; }

  // Canonical form of an answer string. Throws ValidationError on empty
  // input (after trimming).
  CanonicalAnswer normalize(std::string_view raw) const {
    std::string s(util::trim(raw));
    if (s.empty()) throw ValidationError("cannot normalize an empty answer");
    s = unwrap(std::move(s));
    s = table_.apply(std::move(s));
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c); }),
            s.end());
    s = normalize_braces(std::move(s));
    if (auto numeric = parse_numeric(s)) return *numeric;
    return CanonicalAnswer{AnswerKind::Symbolic, {}, std::move(s)};
  }

  // True iff both answers normalize to the same canonical value. Never
  // throws: empty or unparseable inputs fall through to symbolic comparison.
  bool equivalent(std::string_view a, std::string_view b) const {
    return canonical_equal(normalize_lenient(a), normalize_lenient(b));
  }

 private:
  CanonicalAnswer normalize_lenient(std::string_view raw) const {
    if (util::trim(raw).empty()) return CanonicalAnswer{AnswerKind::Symbolic, {}, ""};
    return normalize(raw);
  }

  // Strips enclosing wrappers ($..$, \(..\), \[..\], \boxed{..}, \text{..},
  // \mbox{..}, and whole-string braces) until a fixpoint.
  static std::string unwrap(std::string s) {
    while (true) {
      std::string_view v = util::trim(s);
      std::string next;
      if (v.size() >= 2 && v.front() == '$' && v.back() == '$') {
        next = std::string(v.substr(1, v.size() - 2));
      } else if (v.size() >= 4 && v.substr(0, 2) == "\\(" && v.substr(v.size() - 2) == "\\)") {
        next = std::string(v.substr(2, v.size() - 4));
      } else if (v.size() >= 4 && v.substr(0, 2) == "\\[" && v.substr(v.size() - 2) == "\\]") {
        next = std::string(v.substr(2, v.size() - 4));
      } else if (auto inner = unwrap_command(v, "\\boxed{")) {
        next = *inner;
      } else if (auto inner = unwrap_command(v, "\\fbox{")) {
        next = *inner;
      } else if (auto inner = unwrap_command(v, "\\text{")) {
        next = *inner;
      } else if (auto inner = unwrap_command(v, "\\mbox{")) {
        next = *inner;
      } else if (auto inner = unwrap_command(v, "\\mathrm{")) {
        next = *inner;
      } else if (v.size() >= 2 && v.front() == '{' && v.back() == '}' &&
                 brace_matches_end(v)) {
        next = std::string(v.substr(1, v.size() - 2));
      } else {
        return std::string(v);
      }
      if (next == s) return next;
      s = std::move(next);
    }
  }

  // If `v` is exactly `prefix ... }` with the opening brace matching the
  // final character, returns the inner content.
  static std::optional<std::string> unwrap_command(std::string_view v,
                                                   std::string_view prefix) {
    if (v.size() <= prefix.size() || v.substr(0, prefix.size()) != prefix ||
        v.back() != '}') {
      return std::nullopt;
    }
    int depth = 1;
    for (std::size_t i = prefix.size(); i < v.size(); ++i) {
      if (v[i] == '{') ++depth;
      else if (v[i] == '}' && --depth == 0) {
        if (i != v.size() - 1) return std::nullopt;
        return std::string(v.substr(prefix.size(), i - prefix.size()));
      }
    }
    return std::nullopt;
  }

  static bool brace_matches_end(std::string_view v) {
    int depth = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == '{') ++depth;
      else if (v[i] == '}' && --depth == 0) return i == v.size() - 1;
    }
    return false;
  }

  // Canonical braces: single-character arguments of \frac, \sqrt, ^ and _
  // are wrapped, so `\frac12`, `\sqrt2` and `x^2` match their braced forms.
  static std::string normalize_braces(std::string s) {
    std::string out;
    out.reserve(s.size() + 8);
    std::size_t i = 0;
    auto emit_arg = [&](std::size_t& pos) {
      if (pos >= s.size()) return;
      if (s[pos] == '{') {
        int depth = 0;
        std::size_t j = pos;
        for (; j < s.size(); ++j) {
          if (s[j] == '{') ++depth;
          else if (s[j] == '}' && --depth == 0) break;
        }
        if (j < s.size()) {
          out.append(s, pos, j - pos + 1);
          pos = j + 1;
          return;
        }
      }
      out += '{';
      out += s[pos];
      out += '}';
      ++pos;
    };
    while (i < s.size()) {
      if (s.compare(i, 5, "\\frac") == 0) {
        out += "\\frac";
        i += 5;
        emit_arg(i);
        emit_arg(i);
      } else if (s.compare(i, 5, "\\sqrt") == 0) {
        out += "\\sqrt";
        i += 5;
        if (i < s.size() && s[i] == '[') {  // optional root index
          std::size_t close = s.find(']', i);
          if (close != std::string::npos) {
            out.append(s, i, close - i + 1);
            i = close + 1;
          }
        }
        emit_arg(i);
      } else if ((s[i] == '^' || s[i] == '_') && i + 1 < s.size() && s[i + 1] != '{') {
        out += s[i];
        ++i;
        emit_arg(i);
      } else {
        out += s[i++];
      }
    }
    return out;
  }

  // Integer, fraction (a/b and \frac{a}{b}), or terminating decimal, as an
  // exact rational. Anything else (including overflow) yields nullopt.
  static std::optional<CanonicalAnswer> parse_numeric(const std::string& s) {
    static const std::regex kInt(R"(^[+-]?\d+$)");
    static const std::regex kFrac(R"(^([+-]?\d+)/([+-]?\d+)$)");
    static const std::regex kLatexFrac(R"(^([+-]?)\\frac\{([+-]?\d+)\}\{([+-]?\d+)\}$)");
    static const std::regex kDecimal(R"(^([+-]?)(\d*)\.(\d*)$)");
    std::smatch m;
    if (std::regex_match(s, m, kInt)) {
      auto v = parse_ll(s);
      if (!v) return std::nullopt;
      return CanonicalAnswer{AnswerKind::Rational, reduce(*v, 1), ""};
    }
    if (std::regex_match(s, m, kFrac)) {
      auto num = parse_ll(m[1].str());
      auto den = parse_ll(m[2].str());
      if (!num || !den || *den == 0) return std::nullopt;
      return CanonicalAnswer{AnswerKind::Rational, reduce(*num, *den), ""};
    }
    if (std::regex_match(s, m, kLatexFrac)) {
      auto num = parse_ll(m[2].str());
      auto den = parse_ll(m[3].str());
      if (!num || !den || *den == 0) return std::nullopt;
      Rational r = reduce(*num, *den);
      if (m[1].str() == "-") r.num = -r.num;
      return CanonicalAnswer{AnswerKind::Rational, r, ""};
    }
    if (std::regex_match(s, m, kDecimal)) {
      std::string int_part = m[2].str();
      std::string frac_part = m[3].str();
      if (int_part.empty() && frac_part.empty()) return std::nullopt;
      if (int_part.size() + frac_part.size() > 18) return std::nullopt;
      std::string digits = int_part + frac_part;
      auto v = parse_ll(digits.empty() ? "0" : digits);
      if (!v) return std::nullopt;
      long long den = 1;
      for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
      long long num = (m[1].str() == "-") ? -*v : *v;
      return CanonicalAnswer{AnswerKind::DecimalRational, reduce(num, den), ""};
    }
    return std::nullopt;
  }

  static std::optional<long long> parse_ll(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno == ERANGE || end == s.c_str() || *end != '\0') return std::nullopt;
    return v;
  }

  RewriteTable table_;
};

}  // namespace searchspace::answer
