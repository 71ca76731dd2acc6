#include "smtt/http_mutator.hpp"

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "smtt/expr.hpp"

namespace smtt {
namespace {

// Splits scheme://host[:port]/path into (scheme_host, path).
struct SplitUrl {
  std::string scheme_host;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw std::invalid_argument("http mutator: url must start with http:// or https://");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string first_parseable_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    std::string candidate = line.substr(b, e - b + 1);
    try {
      PriorityExpr::parse(candidate);
      return candidate;
    } catch (const ExprParseError&) {
    }
  }
  return {};
}

}  // namespace

std::optional<std::string> extract_expression(const std::string& reply_text) {
  std::string payload = reply_text;
  // Unwrap one JSON envelope if the body is a JSON object or string.
  const auto json = nlohmann::json::parse(reply_text, nullptr, false);
  if (!json.is_discarded()) {
    if (json.is_string()) {
      payload = json.get<std::string>();
    } else if (json.is_object()) {
      for (const char* key : {"expression", "text", "completion", "content"}) {
        if (json.contains(key) && json[key].is_string()) {
          payload = json[key].get<std::string>();
          break;
        }
      }
    }
  }
  std::string expr = first_parseable_line(payload);
  if (expr.empty()) return std::nullopt;
  return expr;
}

HttpMutator::HttpMutator(HttpMutatorConfig cfg, std::ostream* log)
    : cfg_(std::move(cfg)), log_(log) {
  split_url(cfg_.url);  // validate eagerly
  if (cfg_.timeout_seconds <= 0 || cfg_.retries < 0)
    throw std::invalid_argument("http mutator: bad timeout or retry count");
}

std::optional<std::string> HttpMutator::propose(const std::string& prompt) {
  const SplitUrl target = split_url(cfg_.url);
  httplib::Client client(target.scheme_host);
  const auto timeout =
      std::chrono::milliseconds(static_cast<long long>(cfg_.timeout_seconds * 1000));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  bool has_token = false;
  if (const char* token = std::getenv(cfg_.token_env.c_str());
      token != nullptr && *token != '\0') {
    client.set_default_headers(
        {{"Authorization", std::string("Bearer ") + token}});
    has_token = true;
  }

  nlohmann::json body;
  body["prompt"] = prompt;
  const std::string body_str = body.dump();

  // Full request/response bodies go to the log; the bearer token never does.
  if (log_)
    *log_ << "http mutator: POST " << cfg_.url << ", auth "
          << (has_token ? "bearer" : "none") << ", prompt " << prompt.size()
          << " bytes\n"
          << prompt << "\n--- end request ---\n";

  for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
    auto res = client.Post(target.path, body_str, "application/json");
    if (!res) {
      if (log_)
        *log_ << "http mutator: request error (" << httplib::to_string(res.error())
              << "), attempt " << (attempt + 1) << "/" << (cfg_.retries + 1)
              << "\n";
      continue;
    }
    if (log_)
      *log_ << "http mutator: reply status " << res->status << ", "
            << res->body.size() << " bytes\n"
            << res->body << "\n--- end reply ---\n";
    if (res->status < 200 || res->status >= 300) {
      if (log_)
        *log_ << "http mutator: status " << res->status << ", attempt "
              << (attempt + 1) << "/" << (cfg_.retries + 1) << "\n";
      continue;
    }
    auto expr = extract_expression(res->body);
    if (log_) {
      if (expr)
        *log_ << "http mutator: accepted reply (" << expr->size() << " chars)\n";
      else
        *log_ << "http mutator: reply contained no parseable expression\n";
    }
    return expr;
  }
  if (log_) *log_ << "http mutator: giving up after " << (cfg_.retries + 1) << " attempts\n";
  return std::nullopt;
}

}  // namespace smtt
