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
#include <string>

#include "searchspace/util.hpp"

// Versioned prompt templates, shipped as text files. A template file starts
// with '#' header lines ("# template: NAME", "# version: vN", free-form
// notes); the body follows and may reference {{placeholders}}.
namespace searchspace::prompts {

struct PromptTemplate {
  std::string name;
  std::string version;
  std::string body;

  std::string render(const std::map<std::string, std::string>& vars) const {
    std::string out = body;
    for (const auto& [key, value] : vars) {
      std::string needle = "{{" + key + "}}";
      std::size_t pos = 0;
      while ((pos = out.find(needle, pos)) != std::string::npos) {
        out.replace(pos, needle.size(), value);
        pos += value.size();
      }
    }
    if (out.find("{{") != std::string::npos) {
      throw ValidationError("template '" + name + "' has unresolved placeholders");
    }
    return out;
  }
};

class PromptLibrary {
 public:
  static PromptLibrary load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
      throw ValidationError("template directory not found: " + dir.string());
    }
    PromptLibrary lib;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".prompt") continue;
      PromptTemplate t = parse(util::read_text_file(entry.path()), entry.path().string());
      lib.templates_[t.name] = std::move(t);
    }
    if (lib.templates_.empty()) {
      throw ValidationError("no .prompt files in " + dir.string());
    }
    return lib;
  }

  static PromptTemplate parse(const std::string& content, const std::string& origin) {
    PromptTemplate t;
    std::vector<std::string> lines = util::split(content, '\n');
    std::size_t body_start = 0;
    for (; body_start < lines.size(); ++body_start) {
      std::string_view line = util::trim(lines[body_start]);
      if (line.empty() && body_start > 0) continue;
      if (line.rfind("#", 0) != 0) break;
      auto take = [&](std::string_view key) -> std::optional<std::string> {
        std::string prefix = "# " + std::string(key) + ":";
        if (line.rfind(prefix, 0) == 0) {
          return std::string(util::trim(line.substr(prefix.size())));
        }
        return std::nullopt;
      };
      if (auto name = take("template")) t.name = *name;
      if (auto version = take("version")) t.version = *version;
    }
    if (t.name.empty() || t.version.empty()) {
      throw ValidationError("template missing '# template:'/'# version:' headers: " + origin);
    }
    // skip blank separator lines between header and body
    while (body_start < lines.size() && util::trim(lines[body_start]).empty()) ++body_start;
    t.body = util::join(
        std::vector<std::string>(lines.begin() + static_cast<std::ptrdiff_t>(body_start),
                                 lines.end()),
        "\n");
    while (!t.body.empty() && t.body.back() == '\n') t.body.pop_back();
    return t;
  }

  const PromptTemplate& get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) {
      throw ValidationError("missing prompt template: " + name);
    }
    return it->second;
  }

  bool has(const std::string& name) const { return templates_.count(name) > 0; }

  std::map<std::string, std::string> versions() const {
    std::map<std::string, std::string> out;
    for (const auto& [name, t] : templates_) out[name] = t.version;
    return out;
  }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

}  // namespace searchspace::prompts
