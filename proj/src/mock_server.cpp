#include "gatebench/mock_server.hpp"

#include <httplib.h>

#include "gatebench/errors.hpp"
#include "gatebench/matcher.hpp"

namespace gatebench {

std::string question_from_prompt(std::string_view prompt) {
  constexpr std::string_view open = "<question>", close = "</question>";
  if (auto a = prompt.find(open); a != std::string_view::npos) {
    a += open.size();
    if (auto b = prompt.find(close, a); b != std::string_view::npos) return std::string(prompt.substr(a, b - a));
  }
  constexpr std::string_view plain = "Question: ";
  if (auto a = prompt.find(plain); a != std::string_view::npos) {
    a += plain.size();
    return std::string(prompt.substr(a, prompt.find('\n', a) - a));
  }
  return {};
}

MockChatServer::MockChatServer(Responder responder)
    : responder_(std::move(responder)), server_(std::make_unique<httplib::Server>()) {}

MockChatServer::~MockChatServer() { stop(); }

void MockChatServer::start(int port) {
  server_->Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":{"message":"malformed JSON"}})", "application/json");
      return;
    }
    int failure = 0;
    {
      std::lock_guard lock(mu_);
      requests_.push_back(body);
      if (!failures_.empty()) {
        failure = failures_.front();
        failures_.pop_front();
      }
    }
    if (failure) {
      res.status = failure;
      res.set_content(R"({"error":{"message":"scripted failure"}})", "application/json");
      return;
    }
    auto reply = responder_(body);
    if (reply.status != 200) {
      res.status = reply.status;
      res.set_content(json{{"error", {{"message", reply.content}}}}.dump(), "application/json");
      return;
    }
    std::string content = reply.content;
    if (body.contains("stop") && body["stop"].is_array()) {
      for (const auto& s : body["stop"]) {
        const auto cut = content.find(s.get<std::string>());
        if (cut != std::string::npos) content.resize(cut);
      }
    }
    const json out{{"id", "mock-" + std::to_string(request_count())},
                   {"object", "chat.completion"},
                   {"model", body.value("model", std::string())},
                   {"choices", json::array({json{{"index", 0},
                                                 {"message", {{"role", "assistant"}, {"content", content}}},
                                                 {"finish_reason", "stop"}}})}};
    res.set_content(out.dump(), "application/json");
  });
  port_ = port == 0 ? server_->bind_to_any_port("127.0.0.1") : (server_->bind_to_port("127.0.0.1", port) ? port : -1);
  if (port_ <= 0) throw ConfigError("mock server could not bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void MockChatServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockChatServer::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

void MockChatServer::script_failures(std::vector<int> statuses) {
  std::lock_guard lock(mu_);
  failures_.insert(failures_.end(), statuses.begin(), statuses.end());
}

std::vector<json> MockChatServer::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t MockChatServer::request_count() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

MockChatServer::Responder table_responder(std::map<std::string, std::string> answers) {
  return [answers = std::move(answers)](const json& req) {
    std::string prompt;
    try {
      prompt = req.at("messages").at(0).at("content").get<std::string>();
    } catch (const json::exception&) {
      return MockReply{400, "request has no user message"};
    }
    const auto q = question_from_prompt(prompt);
    auto it = answers.find(q);
    const std::string answer = it == answers.end() ? std::string(kAbstentionToken) : it->second;
    const bool plain = !req.contains("stop");
    if (plain) return MockReply{200, "Answer:\n" + answer};
    return MockReply{200, "<reasoning>Looked it up.</reasoning>\n<answer>" + answer + "</answer>"};
  };
}

}  // namespace gatebench
