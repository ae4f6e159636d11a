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

#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include "searchspace/client.hpp"
#include "helpers.hpp"

using namespace searchspace;
using namespace searchspace::client;
using testutil::TempDir;

namespace {

CompletionRequest basic_request(const std::string& problem_id = "p0",
                                std::uint64_t nonce = 0, int turn = 0) {
  CompletionRequest request;
  request.prompt = "solve it";
  request.params.model_name = "test-model";
  request.params.temperature = 0.7;
  request.nonce = nonce;
  request.turn = turn;
  request.method = Method::Text;
  request.purpose = Purpose::SolveText;
  request.problem_id = problem_id;
  request.template_version = "v1";
  return request;
}

}  // namespace

TEST_CASE("simulator is deterministic given (prompt, params, nonce)") {
  SimulatedSolverConfig config;
  config.seed = 9;
  config.default_p = 0.5;
  SimulatedClient client(config);
  for (std::uint64_t nonce = 0; nonce < 10; ++nonce) {
    auto a = client.complete(basic_request("p0", nonce));
    auto b = client.complete(basic_request("p0", nonce));
    CHECK(a.text == b.text);
    CHECK(a.completion_tokens == b.completion_tokens);
  }
  // different nonces eventually differ
  std::set<std::string> texts;
  for (std::uint64_t nonce = 0; nonce < 10; ++nonce) {
    texts.insert(client.complete(basic_request("p0", nonce)).text);
  }
  CHECK(texts.size() > 1);
}

TEST_CASE("scripted entries replay by nonce and turn") {
  nlohmann::json j = {
      {"seed", 1},
      {"entries",
       {{{"problem_id", "p0"},
         {"method", "text"},
         {"script",
          {"single turn run 0",
           nlohmann::json::array({"turn zero", "turn one"})}}}}},
  };
  SimulatedClient client(SimulatedSolverConfig::from_json(j));
  CHECK(client.complete(basic_request("p0", 0, 0)).text == "single turn run 0");
  CHECK(client.complete(basic_request("p0", 0, 5)).text == "single turn run 0");
  CHECK(client.complete(basic_request("p0", 1, 0)).text == "turn zero");
  CHECK(client.complete(basic_request("p0", 1, 1)).text == "turn one");
  CHECK(client.complete(basic_request("p0", 1, 9)).text == "turn one");
  // nonce beyond the scripted list is a hard error
  CHECK_THROWS_AS(client.complete(basic_request("p0", 2, 0)), RuntimeError);
}

TEST_CASE("simulator config validation") {
  nlohmann::json bad_p = {
      {"entries", {{{"problem_id", "p"}, {"method", "text"}, {"p", 1.5}}}}};
  CHECK_THROWS_AS(SimulatedSolverConfig::from_json(bad_p), ValidationError);
  nlohmann::json no_behavior = {
      {"entries", {{{"problem_id", "p"}, {"method", "text"}}}}};
  CHECK_THROWS_AS(SimulatedSolverConfig::from_json(no_behavior), ValidationError);
}

TEST_CASE("token multiplier scales completion tokens") {
  SimulatedSolverConfig config;
  config.default_p = 1.0;
  config.token_multiplier[Method::Code] = 3.0;
  SimulatedClient client(config);
  auto text_request = basic_request();
  auto code_request = basic_request();
  code_request.method = Method::Code;
  code_request.purpose = Purpose::SolveCode;
  auto t = client.complete(text_request);
  auto c = client.complete(code_request);
  CHECK(c.completion_tokens > t.completion_tokens);
}

TEST_CASE("response cache stores and replays by key") {
  TempDir dir;
  ResponseCache cache(dir / "cache");
  auto request = basic_request();
  CHECK_FALSE(cache.lookup(request).has_value());
  CompletionResult result;
  result.text = "cached text";
  result.prompt_tokens = 3;
  result.completion_tokens = 9;
  result.duration = 0.25;
  result.raw = "{\"raw\":true}";
  cache.store(request, result);
  auto loaded = cache.lookup(request);
  REQUIRE(loaded.has_value());
  CHECK(loaded->text == "cached text");
  CHECK(loaded->prompt_tokens == 3);
  CHECK(loaded->completion_tokens == 9);
  CHECK(loaded->duration == 0.25);
  CHECK(loaded->raw == "{\"raw\":true}");

  // every key ingredient separates entries
  for (CompletionRequest other :
       {basic_request("p1"), basic_request("p0", 1), basic_request("p0", 0, 1)}) {
    CHECK_FALSE(cache.lookup(other).has_value());
  }
  auto other_model = basic_request();
  other_model.params.model_name = "another";
  CHECK_FALSE(cache.lookup(other_model).has_value());
  auto other_temp = basic_request();
  other_temp.params.temperature = 0.2;
  CHECK_FALSE(cache.lookup(other_temp).has_value());
  auto other_template = basic_request();
  other_template.template_version = "v2";
  CHECK_FALSE(cache.lookup(other_template).has_value());
}

TEST_CASE("caching client performs zero inner calls on replay") {
  TempDir dir;
  testutil::LambdaClient inner(
      [](const CompletionRequest& request) { return "reply " + request.problem_id; });
  CachingClient caching(inner, ResponseCache(dir / "cache"));
  for (int round = 0; round < 3; ++round) {
    CHECK(caching.complete(basic_request("p0")).text == "reply p0");
    CHECK(caching.complete(basic_request("p1")).text == "reply p1");
  }
  CHECK(inner.calls() == 2);
  CHECK(caching.inner_calls() == 2);
}

TEST_CASE("live client requires its API key environment variable") {
  unsetenv("SEARCHSPACE_TEST_KEY");
  LiveClientConfig config;
  config.base_url = "http://127.0.0.1:1";
  config.api_key_env = "SEARCHSPACE_TEST_KEY";
  CHECK_THROWS_AS(LiveClient(config), ValidationError);
}

TEST_CASE("live client speaks the chat-completion protocol") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& request, httplib::Response& response) {
                ++hits;
                nlohmann::json body = nlohmann::json::parse(request.body);
                CHECK(request.get_header_value("Authorization") == "Bearer sk-test");
                CHECK(body.at("model") == "test-model");
                CHECK(body.at("temperature") == Catch::Approx(0.7));
                CHECK(body.at("messages")[0].at("content") == "solve it");
                if (hits == 1) {  // first attempt fails, the retry succeeds
                  response.status = 503;
                  response.set_content("overloaded", "text/plain");
                  return;
                }
                nlohmann::json reply = {
                    {"choices",
                     {{{"message", {{"role", "assistant"}, {"content", "\\boxed{7}"}}}}}},
                    {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 34}}},
                };
                response.set_content(reply.dump(), "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&server]() { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("SEARCHSPACE_TEST_KEY", "sk-test", 1);
  LiveClientConfig config;
  config.base_url = "http://127.0.0.1:" + std::to_string(port);
  config.api_key_env = "SEARCHSPACE_TEST_KEY";
  config.max_retries = 2;
  config.backoff_seconds = 0.01;
  LiveClient client(config);
  auto result = client.complete(basic_request());
  CHECK(result.text == "\\boxed{7}");
  CHECK(result.prompt_tokens == 12);
  CHECK(result.completion_tokens == 34);
  CHECK(result.duration > 0.0);
  CHECK(result.raw.find("choices") != std::string::npos);
  CHECK(hits == 2);

  server.stop();
  server_thread.join();
  unsetenv("SEARCHSPACE_TEST_KEY");
}

TEST_CASE("live client surfaces hard HTTP errors without retry loops") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions",
              [&](const httplib::Request&, httplib::Response& response) {
                ++hits;
                response.status = 401;
                response.set_content("bad key", "text/plain");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&server]() { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("SEARCHSPACE_TEST_KEY", "sk-test", 1);
  LiveClientConfig config;
  config.base_url = "http://127.0.0.1:" + std::to_string(port);
  config.api_key_env = "SEARCHSPACE_TEST_KEY";
  config.backoff_seconds = 0.01;
  LiveClient client(config);
  CHECK_THROWS_AS(client.complete(basic_request()), RuntimeError);
  CHECK(hits == 1);

  server.stop();
  server_thread.join();
  unsetenv("SEARCHSPACE_TEST_KEY");
}
