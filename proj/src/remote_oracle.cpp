// RemoteOracle lives in its own translation unit to keep the httplib include
// out of the rest of the build.
#include <httplib.h>

#include <json.hpp>

#include "taskscope/errors.hpp"
#include "taskscope/log.hpp"
#include "taskscope/oracle.hpp"

namespace taskscope {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path_prefix;
};

Endpoint split_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw OracleTransportError("oracle endpoint must include a scheme: " + endpoint);
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, path_start), prefix};
}

}  // namespace

RemoteOracle::RemoteOracle(OracleConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty())
    throw OracleTransportError("remote oracle requires an endpoint (TASKSCOPE_LLM_ENDPOINT)");
}

std::string RemoteOracle::complete(const std::string& prompt) const {
  Endpoint ep = split_endpoint(config_.endpoint);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);

  json body{{"model", config_.model},
            {"temperature", config_.temperature},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto res = client.Post(ep.path_prefix + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) throw OracleTransportError("oracle request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw OracleTransportError("oracle returned HTTP " + std::to_string(res->status) + ": " + res->body);

  json doc;
  try {
    doc = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw OracleTransportError(std::string("oracle response is not JSON: ") + e.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty())
    throw OracleTransportError("oracle response has no choices");
  const json& first = doc["choices"][0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string())
    throw OracleTransportError("oracle response has no message content");
  return first["message"]["content"].get<std::string>();
}

TaxonomyReply RemoteOracle::query_taxonomy(const TaxonomyQuery& query) {
  const std::string prompt = render_taxonomy_prompt(query);
  TaxonomyReply reply;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    reply.raw = complete(prompt);
    SelectionResponse parsed = parse_selection(reply.raw, ParseMode::names);
    if (parsed.parse_ok) {
      reply.selected = std::move(parsed.names);
      reply.retries = attempt;
      return reply;
    }
    log_debug("remote oracle: malformed taxonomy reply, attempt " + std::to_string(attempt + 1));
  }
  throw OracleFormatError("remote oracle: reply stayed malformed after " +
                          std::to_string(config_.max_retries) + " retries");
}

RelationalReply RemoteOracle::query_relational(const RelationalQuery& query) {
  const std::string prompt = render_relational_prompt(query);
  RelationalReply reply;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    reply.raw = complete(prompt);
    SelectionResponse parsed = parse_selection(reply.raw, ParseMode::ids);
    if (parsed.parse_ok) {
      reply.selected = std::move(parsed.ids);
      reply.retries = attempt;
      return reply;
    }
    log_debug("remote oracle: malformed relational reply, attempt " + std::to_string(attempt + 1));
  }
  throw OracleFormatError("remote oracle: reply stayed malformed after " +
                          std::to_string(config_.max_retries) + " retries");
}

std::string RemoteOracle::query_action(const PolicyQuery& query) {
  return complete(render_policy_prompt(query));
}

}  // namespace taskscope
