// Local OpenAI-compatible chat server answering from a question table.
//
//   gatebench-mock-server --answers answers.json --port 8080 --fail 429,500

#include <csignal>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "gatebench/io.hpp"
#include "gatebench/mock_server.hpp"

namespace {
volatile std::sig_atomic_t g_stop = 0;
}

int main(int argc, char** argv) {
  CLI::App app{"Mock chat-completions server"};
  std::string answers_path;
  int port = 0;
  std::vector<int> failures;
  app.add_option("--answers", answers_path, "JSON object mapping question text to answer")->check(CLI::ExistingFile);
  app.add_option("--port", port, "Port to bind on 127.0.0.1 (0 picks one)");
  app.add_option("--fail", failures, "HTTP statuses returned to the first requests")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  std::map<std::string, std::string> answers;
  try {
    if (!answers_path.empty()) answers = gatebench::read_json_file(answers_path).get<std::map<std::string, std::string>>();
    gatebench::MockChatServer server(gatebench::table_responder(std::move(answers)));
    server.script_failures(failures);
    server.start(port);
    std::cout << server.base_url() << std::endl;
    std::signal(SIGINT, [](int) { g_stop = 1; });
    std::signal(SIGTERM, [](int) { g_stop = 1; });
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    std::cerr << "served " << server.request_count() << " requests\n";
  } catch (const std::exception& e) {
    std::cerr << "gatebench-mock-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
