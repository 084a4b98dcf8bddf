#pragma once

#include <chrono>
#include <map>
#include <string>
#include <string_view>

#include "gatebench/matcher.hpp"

namespace gatebench::http {

struct Url {
  std::string scheme_host_port;  // "http://127.0.0.1:8080"
  std::string path;              // "/v1/chat/completions", never empty
};

/// Splits "http://host:port/base/path" into origin and path. Throws
/// ConfigError for anything that is not http or https.
Url parse_url(std::string_view url);

/// Joins a base path and a suffix without doubling slashes.
std::string join_path(std::string_view base, std::string_view suffix);

enum class Outcome { ok, fatal_http, exhausted };

struct PostResult {
  Outcome outcome = Outcome::exhausted;
  int status = 0;  // last HTTP status; 0 when the transport failed
  std::string body;
  int retries = 0;
  std::string error;
  std::chrono::milliseconds elapsed{0};
};

/// POSTs a JSON body, retrying timeouts, connection failures, 429 and 5xx
/// with exponential backoff. Other 4xx statuses are returned immediately as
/// fatal.
PostResult post_json(const Url& url, const std::string& body, const std::map<std::string, std::string>& headers,
                     std::chrono::milliseconds timeout, const RetryPolicy& policy);

}  // namespace gatebench::http
