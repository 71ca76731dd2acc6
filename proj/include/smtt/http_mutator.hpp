#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "smtt/discovery.hpp"

namespace smtt {

// Mutator that asks a remote text-generation service for the next candidate
// expression.  The request is a JSON POST {"prompt": "..."} and the reply is
// expected to contain the generated text either as a plain body or inside a
// JSON object (fields tried in order: "expression", "text", "completion",
// "content").  The first line of the reply that parses as a priority
// expression is returned; anything else yields nullopt so the caller can
// simply skip the iteration.
struct HttpMutatorConfig {
  std::string url;                                // e.g. http://host:8080/mutate
  std::string token_env = "SMTT_MUTATOR_TOKEN";   // env var holding the bearer token
  double timeout_seconds = 30.0;
  int retries = 2;  // additional attempts after a failed request
};

class HttpMutator : public Mutator {
 public:
  // log, when non-null, receives one line per request outcome.  The token
  // value is never written to it.
  explicit HttpMutator(HttpMutatorConfig cfg, std::ostream* log = nullptr);

  std::optional<std::string> propose(const std::string& prompt) override;

  const HttpMutatorConfig& config() const { return cfg_; }

 private:
  HttpMutatorConfig cfg_;
  std::ostream* log_;
};

// Extracts the first line of `reply_text` that parses as a priority
// expression, unwrapping a JSON envelope first if one is present.  Exposed
// separately so reply handling can be tested without a live server.
std::optional<std::string> extract_expression(const std::string& reply_text);

}  // namespace smtt
