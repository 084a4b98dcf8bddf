#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gatebench/types.hpp"

namespace httplib {
class Server;
}

namespace gatebench {

struct MockReply {
  int status = 200;
  std::string content;
};

/// Question text inside a rendered prompt: the <question> element, or the
/// "Question: " line of the plain variant. Empty when neither is present.
std::string question_from_prompt(std::string_view prompt);

/// Local OpenAI-compatible chat server for tests and offline runs. Serves
/// POST /v1/chat/completions on 127.0.0.1. Like real servers, it cuts the
/// reply at the first requested stop string and reports finish_reason
/// "stop".
class MockChatServer {
 public:
  using Responder = std::function<MockReply(const json& request)>;

  explicit MockChatServer(Responder responder);
  ~MockChatServer();
  MockChatServer(const MockChatServer&) = delete;
  MockChatServer& operator=(const MockChatServer&) = delete;

  /// Binds to `port` (0 picks a free one) and serves on a background thread.
  void start(int port = 0);
  void stop();
  int port() const noexcept { return port_; }
  std::string base_url() const;

  /// The next requests get these statuses (with an error body) before the
  /// responder is consulted again, e.g. {429, 500}.
  void script_failures(std::vector<int> statuses);

  std::vector<json> requests() const;
  std::size_t request_count() const;

 private:
  Responder responder_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::deque<int> failures_;
  std::vector<json> requests_;
};

/// Answers from a question → answer table; unknown questions get an
/// abstention.
MockChatServer::Responder table_responder(std::map<std::string, std::string> answers);

}  // namespace gatebench
