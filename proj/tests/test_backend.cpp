#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "gatebench/backend.hpp"
#include "gatebench/errors.hpp"
#include "gatebench/mock_server.hpp"
#include "gatebench/prompt.hpp"

using namespace gatebench;

namespace {

ProbeInfo atom_probe(const std::string& atom, int index, const std::string& gold = "1876") {
  ProbeInfo p;
  p.case_id = "c1";
  p.kind = ProbeKind::atom_probe;
  p.atom_id = atom;
  p.probe_index = index;
  p.gold = gold;
  return p;
}

std::string answer_of(const BackendResponse& r) {
  const auto v = PromptVariant::make(PromptVariantId::v1_xml_reasoning);
  return extract_answer(r.raw_text, v).extracted_answer.value_or("");
}

QuerySpec spec_for(const PromptVariant& v, const std::string& prompt) {
  QuerySpec s;
  s.model_id = "m";
  s.prompt = prompt;
  s.max_tokens = v.max_output_tokens;
  s.stop = v.stop_string;
  return s;
}

HttpBackendConfig config_for(const MockChatServer& server) {
  HttpBackendConfig c;
  c.endpoint = server.base_url();
  c.model_id = "mock-model";
  c.api_key = "k-test";
  c.timeout = std::chrono::milliseconds(5000);
  c.retry.initial_backoff = std::chrono::milliseconds(1);
  c.retry.max_retries = 3;
  return c;
}

}  // namespace

TEST_CASE("scripted backend is a pure function of params and probe") {
  ScriptedModelParams p;
  p.atom_correct_prob = 0.6;
  p.paraphrase_flip_prob = 0.2;
  p.seed = 11;
  ScriptedBackend a(p), b(p);
  for (int i = 0; i < 50; ++i) {
    const auto probe = atom_probe("atom" + std::to_string(i), i % 4);
    CHECK(a.query({}, probe).raw_text == b.query({}, probe).raw_text);
  }
  // call order does not matter
  const auto first = a.query({}, atom_probe("x", 2)).raw_text;
  for (int i = 0; i < 10; ++i) a.query({}, atom_probe("y", i % 4));
  CHECK(a.query({}, atom_probe("x", 2)).raw_text == first);
}

TEST_CASE("scripted extremes") {
  ScriptedModelParams p;
  SUBCASE("perfect model") {
    for (int i = 0; i < 20; ++i) CHECK(answer_of(query_scripted(p, atom_probe("a" + std::to_string(i), i % 4))) == "1876");
  }
  SUBCASE("every paraphrase flips") {
    p.paraphrase_flip_prob = 1.0;
    for (int i = 0; i < 20; ++i) {
      const auto ans = answer_of(query_scripted(p, atom_probe("a" + std::to_string(i), i % 4)));
      CHECK(ans != "1876");
      CHECK_FALSE(match(ans, "1876", MatchContext{}).consistency);
    }
    CHECK(scripted_atom_unstable(p, "a0"));
  }
  SUBCASE("unknown atoms fail their sub-question") {
    p.atom_correct_prob = 0.0;
    auto probe = atom_probe("z", 0);
    probe.kind = ProbeKind::sub_question;
    CHECK(answer_of(query_scripted(p, probe)) != "1876");
    CHECK_FALSE(scripted_atom_unstable(p, "z"));
  }
  SUBCASE("wrong answers come from the supplied list") {
    p.atom_correct_prob = 0.0;
    auto probe = atom_probe("z", 1, "A");
    probe.wrong_answers = {"B", "C"};
    const auto ans = answer_of(query_scripted(p, probe));
    CHECK((ans == "B" || ans == "C"));
  }
  SUBCASE("abstention and format violations") {
    p.abstain_prob = 1.0;
    CHECK(answer_of(query_scripted(p, atom_probe("a", 0))) == "INSUFFICIENT_EVIDENCE");
    p.abstain_prob = 0.0;
    p.format_violation_prob = 1.0;
    CHECK(query_scripted(p, atom_probe("a", 0)).raw_text.find("<answer>") == std::string::npos);
  }
}

TEST_CASE("scripted main probes follow the per-bin success rate") {
  ScriptedModelParams p;
  p.comp_success_prob = {{4, 0.3}};
  int ok = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    ProbeInfo probe;
    probe.case_id = "case" + std::to_string(i);
    probe.kind = ProbeKind::main;
    probe.depth_bin = 4;
    probe.gold = "1903";
    if (answer_of(query_scripted(p, probe)) == "1903") ++ok;
  }
  CHECK(static_cast<double>(ok) / n == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("scripted parameter validation") {
  ScriptedModelParams p;
  p.atom_correct_prob = 1.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p.atom_correct_prob = 1.0;
  p.comp_success_prob[6] = -0.1;
  CHECK_THROWS_AS(p.validate(), ValidationError);

  ScriptedModelParams q;
  q.atom_correct_overrides["a1"] = 0.0;
  q.comp_success_prob = {{2, 0.9}, {8, 0.2}};
  q.unstable_comp_success_prob = 0.0;
  q.seed = 5;
  json j = q;
  const auto back = j.get<ScriptedModelParams>();
  CHECK(json(back) == j);
  CHECK(back.atom_prob("a1") == 0.0);
  CHECK(back.atom_prob("other") == 1.0);
}

TEST_CASE("chat completion request body") {
  const auto v1 = PromptVariant::make(PromptVariantId::v1_xml_reasoning);
  const auto body = chat_completion_body(spec_for(v1, "hello"));
  CHECK(body.at("model") == "m");
  CHECK(body.at("temperature") == 0.0);
  CHECK(body.at("max_tokens") == 512);
  CHECK(body.at("stop") == json::array({"</answer>"}));
  CHECK(body.at("messages") == json::array({{{"role", "user"}, {"content", "hello"}}}));

  const auto cot = PromptVariant::make(PromptVariantId::cot_xml);
  CHECK(chat_completion_body(spec_for(cot, "x")).at("max_tokens") == 1024);
  const auto v3 = PromptVariant::make(PromptVariantId::v3_plain);
  CHECK_FALSE(chat_completion_body(spec_for(v3, "x")).contains("stop"));
}

TEST_CASE("http backend against the mock server") {
  const auto v1 = PromptVariant::make(PromptVariantId::v1_xml_reasoning);
  MockChatServer server(table_responder({{"When was the telephone patented?", "1876"}}));
  server.start();
  const auto config = config_for(server);
  const auto prompt = build_prompt("When was the telephone patented?", v1);

  SUBCASE("answer round trip") {
    const auto r = query_http(config, spec_for(v1, prompt));
    REQUIRE(r.status == TransportStatus::ok);
    CHECK(answer_of(r) == "1876");
    CHECK(r.transport_meta.at("finish_reason") == "stop");
    REQUIRE(server.request_count() == 1);
    const auto req = server.requests().front();
    CHECK(req.at("temperature") == 0.0);
    CHECK(req.at("model") == "m");
  }
  SUBCASE("unknown questions abstain") {
    const auto r = query_http(config, spec_for(v1, build_prompt("Who?", v1)));
    CHECK(answer_of(r) == "INSUFFICIENT_EVIDENCE");
  }
  SUBCASE("429 and 5xx are retried") {
    server.script_failures({429, 503});
    const auto r = query_http(config, spec_for(v1, prompt));
    CHECK(r.status == TransportStatus::ok);
    CHECK(r.transport_meta.at("retries") == 2);
    CHECK(server.request_count() == 3);
  }
  SUBCASE("retries are bounded") {
    server.script_failures({500, 500, 500, 500, 500});
    const auto r = query_http(config, spec_for(v1, prompt));
    CHECK(r.status == TransportStatus::transport_failure);
    CHECK(server.request_count() == 4);
  }
  SUBCASE("other 4xx are fatal") {
    server.script_failures({400});
    const auto r = query_http(config, spec_for(v1, prompt));
    CHECK(r.status == TransportStatus::http_error);
    CHECK(server.request_count() == 1);
  }
  SUBCASE("nonzero temperature is refused") {
    auto s = spec_for(v1, prompt);
    s.temperature = 0.7;
    CHECK_THROWS_AS(query_http(config, s), ValidationError);
    CHECK(server.request_count() == 0);
  }
  server.stop();
}

TEST_CASE("bearer token and unreachable endpoints") {
  httplib::Server raw;
  std::string auth;
  raw.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"content":"<answer>1</answer>"},"finish_reason":"stop"}]})",
                    "application/json");
  });
  const int port = raw.bind_to_any_port("127.0.0.1");
  std::thread t([&] { raw.listen_after_bind(); });
  raw.wait_until_ready();

  HttpBackendConfig c;
  c.endpoint = "http://127.0.0.1:" + std::to_string(port);
  c.model_id = "m";
  c.api_key = "secret";
  QuerySpec s;
  s.model_id = "m";
  s.prompt = "p";
  CHECK(query_http(c, s).status == TransportStatus::ok);
  CHECK(auth == "Bearer secret");
  raw.stop();
  t.join();

  c.endpoint = "http://127.0.0.1:1";
  c.retry.max_retries = 1;
  c.retry.initial_backoff = std::chrono::milliseconds(1);
  c.timeout = std::chrono::milliseconds(500);
  CHECK(query_http(c, s).status == TransportStatus::transport_failure);

  HttpBackend missing_model(HttpBackendConfig{});
  CHECK_THROWS_AS(missing_model.validate(), ConfigError);
}

TEST_CASE("question_from_prompt") {
  const auto v1 = PromptVariant::make(PromptVariantId::v1_xml_reasoning);
  const auto v3 = PromptVariant::make(PromptVariantId::v3_plain);
  CHECK(question_from_prompt(build_prompt("Which first?", v1)) == "Which first?");
  CHECK(question_from_prompt(build_prompt("Which first?", v3)) == "Which first?");
  CHECK(question_from_prompt("nothing here").empty());
}
