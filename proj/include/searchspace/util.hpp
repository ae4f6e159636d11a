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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace searchspace {

// Bad configuration, bad inputs, or a violated precondition. The CLI maps
// this to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure while executing an otherwise valid request (I/O, subprocess,
// remote endpoint). The CLI maps this to exit code 2.
struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace util {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t state = kFnvOffset) {
  for (unsigned char c : data) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

// Stable seed derivation for named RNG streams. Every piece of randomness in
// the project flows through this so that runs are replayable from the config
// seeds alone.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::string_view> parts) {
  std::uint64_t state = kFnvOffset;
  for (int i = 0; i < 8; ++i) {
    state ^= (seed >> (8 * i)) & 0xff;
    state *= kFnvPrime;
  }
  for (std::string_view part : parts) {
    state = fnv1a64(part, state);
    state = fnv1a64("\x1f", state);  // separator so {"ab","c"} != {"a","bc"}
  }
  return state;
}

inline std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

// Normative shuffle for the project: index j is drawn as rng() % (i + 1).
// std::shuffle is implementation-defined, so it is not used anywhere.
template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

template <typename Range>
std::string join(const Range& parts, std::string_view sep) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += sep;
    out += p;
    first = false;
  }
  return out;
}

// Fixed-point formatting used by every report writer; keeps emitted files
// byte-stable. Negative zero is normalized to plain zero.
inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out(buf);
  if (out.find_first_not_of("-0.") == std::string::npos &&
      !out.empty() && out[0] == '-') {
    out.erase(out.begin());
  }
  return out;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot write file: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw RuntimeError("short write: " + path.string());
}

// Write-then-rename so concurrent cache writers never expose partial files.
inline void write_text_file_atomic(const std::filesystem::path& path,
                                   std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  write_text_file(tmp, content);
  std::filesystem::rename(tmp, path);
}

}  // namespace util
}  // namespace searchspace
