// Copyright 2026 The qcascade Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcascade/corrector.h"

#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "qcascade/errors.h"
#include "test_util.h"

namespace qcascade {
namespace {

using nlohmann::json;

json Golden() {
  std::ifstream in(std::filesystem::path(QCASCADE_FIXTURE_DIR) / "protocol" / "golden.json");
  return json::parse(in);
}

// Serves the golden cases: each request body is matched against the
// recorded request and answered with the recorded response.
class StubServer {
 public:
  explicit StubServer(json cases, std::string mount = "/correct")
      : cases_(std::move(cases)) {
    server_.Post(mount, [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      content_type_ = req.get_header_value("Content-Type");
      const json body = json::parse(req.body, nullptr, false);
      for (const json& c : cases_) {
        if (c["request"] == body) {
          res.status = c["response"]["status"].get<int>();
          res.set_content(c["response"]["body"].get<std::string>(), "application/json");
          return;
        }
      }
      res.status = 400;
      res.set_content(R"({"error": "unknown request"})", "application/json");
    });
    server_.Post("/slow/correct", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      res.set_content(R"({"corrected": "late", "confidence": 0.5})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(std::string_view path = "") const {
    return "http://127.0.0.1:" + std::to_string(port_) + std::string(path);
  }
  int requests() const { return requests_; }
  std::string content_type() const { return content_type_; }

 private:
  json cases_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> requests_{0};
  std::string content_type_;
};

std::optional<std::string_view> HintOf(const json& request) {
  if (request["hint"].is_null()) return std::nullopt;
  return request["hint"].get_ref<const std::string&>();
}

TEST(ProtocolTest, RequestEncodingMatchesGolden) {
  const json golden = Golden();
  for (const json& c : golden["cases"]) {
    const json& req = c["request"];
    const std::string encoded =
        EncodeCorrectRequest(req["query"].get<std::string>(), HintOf(req));
    EXPECT_EQ(json::parse(encoded), req) << c["name"];
  }
}

TEST(ProtocolTest, ResponseDecodingMatchesGolden) {
  const json golden = Golden();
  for (const json& c : golden["cases"]) {
    if (c["response"]["status"] != 200) continue;
    const std::string body = c["response"]["body"];
    if (c["expect"] == "failure") {
      EXPECT_THROW(DecodeCorrectResponse(body), CorrectorError) << c["name"];
    } else {
      const Correction got = DecodeCorrectResponse(body);
      EXPECT_EQ(got.corrected, c["expect"]["corrected"]) << c["name"];
      EXPECT_DOUBLE_EQ(got.confidence, c["expect"]["confidence"].get<double>());
    }
  }
}

TEST(RemoteCorrectorTest, GoldenCasesOverHttp) {
  const json cases = Golden()["cases"];
  StubServer stub(cases);
  RemoteCorrector remote("remote", CostClass::kLlm, stub.url(),
                         std::chrono::milliseconds(2000));
  for (const json& c : cases) {
    const json& req = c["request"];
    const std::string query = req["query"];
    if (c["expect"] == "failure") {
      EXPECT_THROW(remote.Correct(query, HintOf(req)), CorrectorError) << c["name"];
    } else {
      const Correction got = remote.Correct(query, HintOf(req));
      EXPECT_EQ(got.corrected, c["expect"]["corrected"]) << c["name"];
      EXPECT_DOUBLE_EQ(got.confidence, c["expect"]["confidence"].get<double>());
    }
  }
  EXPECT_EQ(stub.requests(), static_cast<int>(cases.size()));
  EXPECT_EQ(stub.content_type(), "application/json");
}

TEST(RemoteCorrectorTest, BasePathIsPrefixed) {
  const json cases = Golden()["cases"];
  StubServer stub(cases, "/v1/correct");
  RemoteCorrector remote("remote", CostClass::kLlm, stub.url("/v1/"));
  EXPECT_EQ(remote.Correct("cheap flights", std::nullopt).corrected, "cheap flights");
}

TEST(RemoteCorrectorTest, TimeoutIsAFailure) {
  StubServer stub(json::array());
  RemoteCorrector remote("remote", CostClass::kLlm, stub.url("/slow"),
                         std::chrono::milliseconds(150));
  EXPECT_THROW(remote.Correct("q", std::nullopt), CorrectorError);
}

TEST(RemoteCorrectorTest, UnreachableHostIsAFailure) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  RemoteCorrector remote("remote", CostClass::kLlm,
                         "http://127.0.0.1:" + std::to_string(port),
                         std::chrono::milliseconds(500));
  EXPECT_THROW(remote.Correct("q", std::nullopt), CorrectorError);
}

TEST(RemoteCorrectorTest, RejectsNonHttpUrl) {
  EXPECT_THROW(RemoteCorrector("r", CostClass::kLlm, "https://example.com"), ConfigError);
  EXPECT_THROW(RemoteCorrector("r", CostClass::kLlm, "localhost:8080"), ConfigError);
}

TEST(IdentityCorrectorTest, EchoesQuery) {
  IdentityCorrector c("id", CostClass::kSmall, 0.7);
  const Correction out = c.Correct("abc", "hint");
  EXPECT_EQ(out.corrected, "abc");
  EXPECT_DOUBLE_EQ(out.confidence, 0.7);
}

TEST(RuleCorrectorTest, LookupAndDefault) {
  testing::TempDir dir;
  testing::WriteFile(dir.path() / "rules.jsonl",
                     "{\"from\": \"recieve\", \"to\": \"receive\"}\n");
  RuleCorrector c("rules", CostClass::kSmall,
                  RuleCorrector::LoadRules(dir.path() / "rules.jsonl"));
  EXPECT_EQ(c.Correct("recieve", std::nullopt).corrected, "receive");
  EXPECT_DOUBLE_EQ(c.Correct("recieve", std::nullopt).confidence, 0.9);
  EXPECT_EQ(c.Correct("other", std::nullopt).corrected, "other");
  EXPECT_DOUBLE_EQ(c.Correct("other", std::nullopt).confidence, 0.5);
}

class ScriptedOracleTest : public ::testing::Test {
 protected:
  std::vector<ParallelPair> corpus_{{"a", "abx", "abc"}, {"b", "dex", "def"},
                                    {"c", "ghx", "ghi"}, {"d", "fine", "fine"}};
};

TEST_F(ScriptedOracleTest, Behaviors) {
  std::map<std::string, ScriptEntry> script{
      {"a", {ScriptedBehavior::kPerfect, {}}},
      {"b", {ScriptedBehavior::kNoop, {}}},
      {"c", {ScriptedBehavior::kCorrupt, {}}},
      {"d", {ScriptedBehavior::kCorrupt, "fyne"}}};
  ScriptedOracleCorrector c("oracle", CostClass::kLlm, corpus_, script);
  EXPECT_EQ(c.Correct("abx", std::nullopt).corrected, "abc");
  EXPECT_DOUBLE_EQ(c.Correct("abx", std::nullopt).confidence, 0.9);
  EXPECT_EQ(c.Correct("dex", std::nullopt).corrected, "dex");
  EXPECT_DOUBLE_EQ(c.Correct("dex", std::nullopt).confidence, 0.4);
  EXPECT_EQ(c.Correct("ghx", std::nullopt).corrected, "ghx#");
  EXPECT_EQ(c.Correct("fine", "hint").corrected, "fyne");
  EXPECT_THROW(c.Correct("unknown", std::nullopt), CorrectorError);
}

TEST_F(ScriptedOracleTest, ScriptValidation) {
  std::map<std::string, ScriptEntry> script{{"a", {ScriptedBehavior::kPerfect, {}}}};
  EXPECT_THROW(ScriptedOracleCorrector("o", CostClass::kLlm, corpus_, script), DataError);

  script = {{"a", {ScriptedBehavior::kCorrupt, "abc"}},
            {"b", {ScriptedBehavior::kNoop, {}}},
            {"c", {ScriptedBehavior::kNoop, {}}},
            {"d", {ScriptedBehavior::kNoop, {}}}};
  EXPECT_THROW(ScriptedOracleCorrector("o", CostClass::kLlm, corpus_, script), DataError);

  std::vector<ParallelPair> dup{{"x", "same", "sane"}, {"y", "same", "sane"}};
  std::map<std::string, ScriptEntry> conflict{{"x", {ScriptedBehavior::kPerfect, {}}},
                                              {"y", {ScriptedBehavior::kNoop, {}}}};
  EXPECT_THROW(ScriptedOracleCorrector("o", CostClass::kLlm, dup, conflict), DataError);
}

TEST_F(ScriptedOracleTest, LoadScript) {
  testing::TempDir dir;
  testing::WriteFile(dir.path() / "s.jsonl",
                     "{\"id\": \"a\", \"behavior\": \"perfect\"}\n"
                     "{\"id\": \"c\", \"behavior\": \"corrupt\", \"output\": \"zzz\"}\n");
  const auto script = ScriptedOracleCorrector::LoadScript(dir.path() / "s.jsonl");
  ASSERT_EQ(script.size(), 2u);
  EXPECT_EQ(script.at("c").output, std::optional<std::string>("zzz"));
  testing::WriteFile(dir.path() / "bad.jsonl", "{\"id\": \"a\", \"behavior\": \"magic\"}\n");
  EXPECT_THROW(ScriptedOracleCorrector::LoadScript(dir.path() / "bad.jsonl"), DataError);
}

}  // namespace
}  // namespace qcascade
