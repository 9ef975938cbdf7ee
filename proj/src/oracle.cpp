#include "taskscope/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include <json.hpp>

#include "taskscope/errors.hpp"
#include "taskscope/log.hpp"
#include "taskscope/rng.hpp"

namespace taskscope {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

std::string trim_copy(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strip a fenced code block (``` or ```json) if the whole reply is one.
std::string strip_fence(const std::string& raw) {
  std::string s = trim_copy(raw);
  if (s.size() < 6 || s.compare(0, 3, "```") != 0 || s.compare(s.size() - 3, 3, "```") != 0) return s;
  std::size_t start = s.find('\n');
  if (start == std::string::npos) return s;
  return trim_copy(s.substr(start + 1, s.size() - 3 - (start + 1)));
}

}  // namespace

std::string render_taxonomy_prompt(const TaxonomyQuery& query) {
  std::string out;
  out += "Select the entries that are relevant for achieving the goal in a household environment.\n";
  out += "Goal: " + query.goal_text + "\n";
  out += (query.level >= query.max_level ? "Objects: " : "Categories: ") + join(query.candidates, ", ") + "\n";
  out += "Reply with a JSON array of names, no prose.";
  return out;
}

std::string render_relational_prompt(const RelationalQuery& query) {
  std::string out;
  out += "Select the objects whose relationships make them necessary for achieving the goal.\n";
  out += "Goal: " + query.goal_text + "\n";
  out += "Selected objects: " + join(query.selected_summary, ", ") + "\n";
  out += "Relationships between objects:\n";
  for (const std::string& line : query.frontier_lines) out += line + "\n";
  out += "Reply with a JSON array of object ids, no prose.";
  return out;
}

std::string render_policy_prompt(const PolicyQuery& query) {
  std::string out;
  out += "You control a household robot. Pick the action that moves the world toward the goal.\n";
  out += "Goal: " + query.goal_text + "\n";
  out += "State:\n";
  for (const std::string& line : query.state_lines) out += line + "\n";
  out += "Applicable actions:\n";
  for (std::size_t i = 0; i < query.action_lines.size(); ++i)
    out += std::to_string(i) + ": " + query.action_lines[i] + "\n";
  out += "Reply with the index of the chosen action as a bare integer, no prose.";
  return out;
}

SelectionResponse parse_selection(const std::string& raw, ParseMode mode) {
  SelectionResponse resp;
  resp.raw = raw;
  json doc;
  try {
    doc = json::parse(strip_fence(raw));
  } catch (const json::parse_error&) {
    return resp;
  }
  if (!doc.is_array()) return resp;
  if (mode == ParseMode::names) {
    for (const json& item : doc) {
      if (!item.is_string()) return resp;
      std::string name = trim_copy(item.get<std::string>());
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (std::find(resp.names.begin(), resp.names.end(), name) == resp.names.end())
        resp.names.push_back(std::move(name));
    }
  } else {
    for (const json& item : doc) {
      if (!item.is_number_integer() && !item.is_number_unsigned()) return resp;
      long long v = item.get<long long>();
      if (v <= 0) return resp;
      ObjectId id = static_cast<ObjectId>(v);
      if (std::find(resp.ids.begin(), resp.ids.end(), id) == resp.ids.end()) resp.ids.push_back(id);
    }
  }
  resp.parse_ok = true;
  return resp;
}

std::optional<int> parse_action_index(const std::string& raw, std::size_t action_count) {
  std::string s = strip_fence(raw);
  json doc;
  try {
    doc = json::parse(s);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
  long long v;
  if (doc.is_number_integer() || doc.is_number_unsigned())
    v = doc.get<long long>();
  else if (doc.is_array() && doc.size() == 1 && (doc[0].is_number_integer() || doc[0].is_number_unsigned()))
    v = doc[0].get<long long>();
  else
    return std::nullopt;
  if (v < 0 || v >= static_cast<long long>(action_count)) return std::nullopt;
  return static_cast<int>(v);
}

std::string render_name_selection(const std::vector<std::string>& names) {
  return json(names).dump();
}

std::string render_id_selection(const std::vector<ObjectId>& ids) { return json(ids).dump(); }

OracleConfig OracleConfig::from_env() {
  OracleConfig cfg;
  if (const char* v = std::getenv("TASKSCOPE_LLM_ENDPOINT")) cfg.endpoint = v;
  if (const char* v = std::getenv("TASKSCOPE_LLM_MODEL")) cfg.model = v;
  if (const char* v = std::getenv("TASKSCOPE_LLM_API_KEY")) cfg.api_key = v;
  return cfg;
}

GroundTruthOracle::GroundTruthOracle(const StateGraph& world, const TaxonomyGraph& taxonomy,
                                     std::set<ObjectId> necessary)
    : necessary_(std::move(necessary)) {
  for (ObjectId id : necessary_) {
    const ObjectNode* o = world.find(id);
    if (!o) throw UnknownIdError("ground truth references unknown object " + std::to_string(id));
    if (o->is_room() || o->is_agent()) continue;
    relevant_names_.insert(o->cls);
    for (const std::string& a : taxonomy.ancestors_of_class(o->cls)) relevant_names_.insert(a);
  }
}

TaxonomyReply GroundTruthOracle::query_taxonomy(const TaxonomyQuery& query) {
  TaxonomyReply reply;
  for (const std::string& c : query.candidates) {
    if (relevant_names_.count(c)) reply.selected.push_back(c);
  }
  reply.raw = render_name_selection(reply.selected);
  return reply;
}

RelationalReply GroundTruthOracle::query_relational(const RelationalQuery& query) {
  RelationalReply reply;
  for (ObjectId id : query.frontier_ids) {
    if (necessary_.count(id)) reply.selected.push_back(id);
  }
  reply.raw = render_id_selection(reply.selected);
  return reply;
}

NoisyOracle::NoisyOracle(RelevanceOracle& inner, std::uint64_t seed, double p_drop, double p_add)
    : inner_(inner), seed_(seed), p_drop_(p_drop), p_add_(p_add) {}

TaxonomyReply NoisyOracle::query_taxonomy(const TaxonomyQuery& query) {
  TaxonomyReply reply = inner_.query_taxonomy(query);
  Rng rng = Rng::stream(seed_, fnv1a64(render_taxonomy_prompt(query)));
  std::vector<std::string> out;
  for (const std::string& name : query.candidates) {
    bool selected = std::find(reply.selected.begin(), reply.selected.end(), name) != reply.selected.end();
    if (selected ? !rng.chance(p_drop_) : rng.chance(p_add_)) out.push_back(name);
  }
  reply.selected = std::move(out);
  reply.raw = render_name_selection(reply.selected);
  return reply;
}

RelationalReply NoisyOracle::query_relational(const RelationalQuery& query) {
  RelationalReply reply = inner_.query_relational(query);
  Rng rng = Rng::stream(seed_, fnv1a64(render_relational_prompt(query)));
  std::vector<ObjectId> out;
  for (ObjectId id : query.frontier_ids) {
    bool selected = std::find(reply.selected.begin(), reply.selected.end(), id) != reply.selected.end();
    if (selected ? !rng.chance(p_drop_) : rng.chance(p_add_)) out.push_back(id);
  }
  reply.selected = std::move(out);
  reply.raw = render_id_selection(reply.selected);
  return reply;
}

ScriptedOracle::ScriptedOracle(std::vector<std::string> responses, int max_retries)
    : responses_(std::move(responses)), max_retries_(max_retries) {}

std::string ScriptedOracle::next_response() {
  if (next_ >= responses_.size()) throw Error("scripted oracle: script exhausted");
  return responses_[next_++];
}

TaxonomyReply ScriptedOracle::query_taxonomy(const TaxonomyQuery&) {
  TaxonomyReply reply;
  for (int attempt = 0; attempt <= max_retries_; ++attempt) {
    reply.raw = next_response();
    SelectionResponse parsed = parse_selection(reply.raw, ParseMode::names);
    if (parsed.parse_ok) {
      reply.selected = std::move(parsed.names);
      reply.retries = attempt;
      return reply;
    }
  }
  throw OracleFormatError("scripted oracle: unparseable reply after " + std::to_string(max_retries_) +
                          " retries");
}

RelationalReply ScriptedOracle::query_relational(const RelationalQuery&) {
  RelationalReply reply;
  for (int attempt = 0; attempt <= max_retries_; ++attempt) {
    reply.raw = next_response();
    SelectionResponse parsed = parse_selection(reply.raw, ParseMode::ids);
    if (parsed.parse_ok) {
      reply.selected = std::move(parsed.ids);
      reply.retries = attempt;
      return reply;
    }
  }
  throw OracleFormatError("scripted oracle: unparseable reply after " + std::to_string(max_retries_) +
                          " retries");
}

std::string ScriptedOracle::query_action(const PolicyQuery&) { return next_response(); }

TaxonomyReply MalformedOracle::query_taxonomy(const TaxonomyQuery&) {
  throw OracleFormatError("oracle reply stayed malformed after " + std::to_string(max_retries_) + " retries");
}

RelationalReply MalformedOracle::query_relational(const RelationalQuery&) {
  throw OracleFormatError("oracle reply stayed malformed after " + std::to_string(max_retries_) + " retries");
}

}  // namespace taskscope
