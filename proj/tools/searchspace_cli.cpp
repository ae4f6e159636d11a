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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "searchspace/commands.hpp"

// CLI surface: subset | generate | analyze | verify | report, each driven by
// one JSON config file. Exit codes: 0 ok, 1 validation error, 2 runtime
// error.
int main(int argc, char** argv) {
  CLI::App app{"searchspace: multi-method sampling and search-space analysis"};
  app.require_subcommand(1);

  std::string config_path;
  using Command = int (*)(const searchspace::config::ExperimentConfig&, std::ostream&);
  struct Verb {
    const char* name;
    const char* help;
    Command run;
  };
  const Verb verbs[] = {
      {"subset", "draw a seeded problem subset and write its manifest",
       &searchspace::commands::cmd_subset},
      {"generate", "generate (or resume) the run pool for the subset",
       &searchspace::commands::cmd_generate},
      {"analyze", "emit coverage tables, venn regions, reductions, and the chart",
       &searchspace::commands::cmd_analyze},
      {"verify", "emit voting and re-ranking accuracy tables",
       &searchspace::commands::cmd_verify},
      {"report", "run analyze + verify and write the cost ledger and summary",
       &searchspace::commands::cmd_report},
  };

  Command selected = nullptr;
  for (const Verb& verb : verbs) {
    CLI::App* sub = app.add_subcommand(verb.name, verb.help);
    sub->add_option("-c,--config", config_path, "experiment config (JSON)")
        ->required();
    sub->callback([&selected, &verb]() { selected = verb.run; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    searchspace::config::ExperimentConfig cfg =
        searchspace::config::load_config(config_path);
    return selected(cfg, std::cout);
  } catch (const searchspace::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
