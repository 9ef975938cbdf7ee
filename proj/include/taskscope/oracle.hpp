#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taskscope/goal.hpp"
#include "taskscope/taxonomy.hpp"
#include "taskscope/world.hpp"

namespace taskscope {

struct TaxonomyQuery {
  int level = 1;
  int max_level = 2;                    // L; at this level candidates are object classes
  std::vector<std::string> candidates;  // deduplicated, lexicographic
  std::string goal_text;
};

struct RelationalQuery {
  std::vector<std::string> selected_summary;  // "class (id)", ascending id
  std::vector<std::string> frontier_lines;    // rendered relation sentences
  std::string goal_text;
  std::vector<ObjectId> frontier_ids;  // candidate ids, ascending
};

// State summary + goal + enumerated applicable actions; the oracle answers
// with the index of the chosen action.
struct PolicyQuery {
  std::vector<std::string> state_lines;
  std::string goal_text;
  std::vector<std::string> action_lines;
};

struct SelectionResponse {
  std::string raw;
  std::vector<std::string> names;
  std::vector<ObjectId> ids;
  bool parse_ok = false;
};

enum class ParseMode { names, ids };

// Pure functions: identical query -> identical bytes.
std::string render_taxonomy_prompt(const TaxonomyQuery& query);
std::string render_relational_prompt(const RelationalQuery& query);
std::string render_policy_prompt(const PolicyQuery& query);

// Accepts a JSON array, optionally inside a fenced code block. Names are
// lowercased and trimmed, ids must be integers; anything else fails parsing
// (failure is encoded in parse_ok, never thrown).
SelectionResponse parse_selection(const std::string& raw, ParseMode mode);

// Action-index reply for the per-step policy; nullopt when unparseable or out
// of [0, action_count).
std::optional<int> parse_action_index(const std::string& raw, std::size_t action_count);

struct TaxonomyReply {
  std::vector<std::string> selected;
  std::string raw;
  int retries = 0;
};

struct RelationalReply {
  std::vector<ObjectId> selected;
  std::string raw;
  int retries = 0;
};

// Answers "which of these candidates matter for this goal". Implementations
// must be safe for concurrent use; retry state is per call.
class RelevanceOracle {
 public:
  virtual ~RelevanceOracle() = default;
  virtual TaxonomyReply query_taxonomy(const TaxonomyQuery& query) = 0;
  virtual RelationalReply query_relational(const RelationalQuery& query) = 0;
};

// Per-step action chooser for the policy planner. Returns the raw reply;
// parsing and the retry budget live in the planner loop.
class ActionOracle {
 public:
  virtual ~ActionOracle() = default;
  virtual std::string query_action(const PolicyQuery& query) = 0;
};

struct OracleConfig {
  std::string endpoint;  // e.g. http://localhost:8000/v1
  std::string model;
  std::string api_key;
  double temperature = 0.0;
  int max_retries = 3;
  int timeout_seconds = 60;

  // TASKSCOPE_LLM_ENDPOINT / TASKSCOPE_LLM_MODEL / TASKSCOPE_LLM_API_KEY
  static OracleConfig from_env();
};

// POSTs to an OpenAI-compatible {endpoint}/chat/completions. A reply that
// fails the wire grammar is re-queried with the identical prompt up to
// max_retries times, then OracleFormatError is raised. Network/HTTP problems
// raise OracleTransportError.
class RemoteOracle : public RelevanceOracle, public ActionOracle {
 public:
  explicit RemoteOracle(OracleConfig config);

  TaxonomyReply query_taxonomy(const TaxonomyQuery& query) override;
  RelationalReply query_relational(const RelationalQuery& query) override;
  std::string query_action(const PolicyQuery& query) override;

  // One round trip: send prompt, return the first choice's message content.
  std::string complete(const std::string& prompt) const;

 private:
  OracleConfig config_;
};

// Test oracle enabling offline verification: selects exactly the taxonomy
// ancestors of the necessary objects' classes, and frontier ids that are
// necessary.
class GroundTruthOracle : public RelevanceOracle {
 public:
  GroundTruthOracle(const StateGraph& world, const TaxonomyGraph& taxonomy, std::set<ObjectId> necessary);

  TaxonomyReply query_taxonomy(const TaxonomyQuery& query) override;
  RelationalReply query_relational(const RelationalQuery& query) override;

 private:
  std::set<ObjectId> necessary_;
  std::set<std::string> relevant_names_;  // classes of necessary objects + their ancestors
};

// Wraps another oracle: drops each selected item with p_drop and adds each
// unselected candidate with p_add. The RNG stream is keyed by (seed, prompt
// bytes hash), so results do not depend on call order.
class NoisyOracle : public RelevanceOracle {
 public:
  NoisyOracle(RelevanceOracle& inner, std::uint64_t seed, double p_drop, double p_add);

  TaxonomyReply query_taxonomy(const TaxonomyQuery& query) override;
  RelationalReply query_relational(const RelationalQuery& query) override;

 private:
  RelevanceOracle& inner_;
  std::uint64_t seed_;
  double p_drop_;
  double p_add_;
};

// Plays back a fixed sequence of raw responses; each query consumes entries
// until one parses, within the retry budget. Also serves policy queries.
class ScriptedOracle : public RelevanceOracle, public ActionOracle {
 public:
  explicit ScriptedOracle(std::vector<std::string> responses, int max_retries = 3);

  TaxonomyReply query_taxonomy(const TaxonomyQuery& query) override;
  RelationalReply query_relational(const RelationalQuery& query) override;
  std::string query_action(const PolicyQuery& query) override;

  std::size_t consumed() const { return next_; }

 private:
  std::string next_response();

  std::vector<std::string> responses_;
  std::size_t next_ = 0;
  int max_retries_;
};

// Always replies with prose that fails the wire grammar; reductions driven by
// it end in the format-error failure category.
class MalformedOracle : public RelevanceOracle {
 public:
  explicit MalformedOracle(int max_retries = 3) : max_retries_(max_retries) {}
  TaxonomyReply query_taxonomy(const TaxonomyQuery& query) override;
  RelationalReply query_relational(const RelationalQuery& query) override;

 private:
  int max_retries_;
};

// JSON-array rendering of a selection, used for offline oracle raw traces.
std::string render_name_selection(const std::vector<std::string>& names);
std::string render_id_selection(const std::vector<ObjectId>& ids);

}  // namespace taskscope
