#include "gatebench/http.hpp"

#include <httplib.h>

#include <thread>

#include "gatebench/errors.hpp"

namespace gatebench::http {

Url parse_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw ConfigError("not a URL: '" + std::string(url) + "'");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw ConfigError("unsupported URL scheme '" + std::string(scheme) + "'");
  const auto rest = url.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  if (rest.empty() || slash == 0) throw ConfigError("URL has no host: '" + std::string(url) + "'");
  Url out;
  out.scheme_host_port = std::string(url.substr(0, scheme_end + 3 + std::min(slash, rest.size())));
  out.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  return out;
}

std::string join_path(std::string_view base, std::string_view suffix) {
  std::string out(base);
  while (!out.empty() && out.back() == '/') out.pop_back();
  if (suffix.empty() || suffix.front() != '/') out.push_back('/');
  out.append(suffix);
  return out;
}

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

PostResult post_json(const Url& url, const std::string& body, const std::map<std::string, std::string>& headers,
                     std::chrono::milliseconds timeout, const RetryPolicy& policy) {
  const auto started = std::chrono::steady_clock::now();
  httplib::Client client(url.scheme_host_port);
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);

  PostResult result;
  auto backoff = policy.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(url.path, hdrs, body, "application/json");
    if (res) {
      result.status = res->status;
      result.body = res->body;
      if (res->status >= 200 && res->status < 300) {
        result.outcome = Outcome::ok;
        break;
      }
      result.error = "HTTP " + std::to_string(res->status);
      if (!retryable(res->status)) {
        result.outcome = Outcome::fatal_http;
        break;
      }
    } else {
      result.status = 0;
      result.body.clear();
      result.error = "transport: " + httplib::to_string(res.error());
    }
    if (attempt >= policy.max_retries) {
      result.outcome = Outcome::exhausted;
      break;
    }
    ++result.retries;
    if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(backoff.count()) * policy.multiplier));
  }
  result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  return result;
}

}  // namespace gatebench::http
