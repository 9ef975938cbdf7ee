#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "taskscope/goal.hpp"
#include "taskscope/oracle.hpp"
#include "taskscope/taxonomy.hpp"
#include "taskscope/world.hpp"

namespace taskscope {

// Objects outside the current selection that share a non-IN_ROOM edge with
// it, plus exactly those crossing edges. Room membership is connectivity, not
// interaction, so IN_ROOM edges never generate frontier.
struct FrontierGraph {
  std::vector<ObjectId> objects;     // ascending
  std::vector<RelationEdge> edges;   // each has exactly one endpoint selected
};

FrontierGraph phi(const StateGraph& world, const std::set<ObjectId>& selected);

struct LevelSelectionRecord {
  int level = 0;
  std::vector<std::string> candidates;
  std::vector<std::string> selected;
  std::vector<std::string> dropped;  // out-of-candidate names from the oracle
  std::string raw;
  int retries = 0;
  std::uint64_t prompt_hash = 0;
};

struct RelationalIterationRecord {
  int iteration = 0;
  std::size_t frontier_size = 0;
  std::vector<ObjectId> selected;
  std::vector<ObjectId> dropped;
  std::string raw;
  int retries = 0;
  std::uint64_t prompt_hash = 0;
};

enum class ReductionOutcome { success, objects_missing, format_error };
const char* reduction_outcome_name(ReductionOutcome outcome);

struct ReductionTrace {
  std::vector<LevelSelectionRecord> levels;
  std::vector<RelationalIterationRecord> iterations;
  ReductionOutcome outcome = ReductionOutcome::success;
  bool taxonomy_early_stop = false;
  std::string error;

  nlohmann::json to_json() const;
};

struct ReducedState {
  std::vector<ObjectId> kept;  // selection plus agent and rooms of kept objects, ascending
  StateGraph graph;            // induced subgraph of the input world
};

struct ReduceConfig {
  int max_relational_iters = 3;
  // Bench mode: when present, the trace outcome compares kept against it.
  std::optional<std::set<ObjectId>> ground_truth;
};

// Step 1: taxonomy descent. Iterates levels 1..L, querying the oracle with
// psi() of the previous selection; out-of-candidate names are dropped and
// logged. Returns all instances of the level-L class selection. An empty
// selection at any level stops early and returns the empty set.
std::pair<std::set<ObjectId>, std::vector<LevelSelectionRecord>> select_taxonomy(
    const TaxonomyGraph& taxonomy, const StateGraph& world, const GoalSpec& goal, RelevanceOracle& oracle);

// Step 2: relationship-frontier expansion from a nonempty seed, at most
// max_iters oracle rounds; stops when the frontier or the pick is empty.
// Returns only the newly selected objects (accumulated minus seed).
std::pair<std::set<ObjectId>, std::vector<RelationalIterationRecord>> select_relational(
    const StateGraph& world, const std::set<ObjectId>& seed, const GoalSpec& goal, RelevanceOracle& oracle,
    int max_iters);

struct ReductionResult {
  ReducedState state;
  ReductionTrace trace;
};

// Full pipeline: kept = step1 union step2 union {agent} union {rooms of kept
// objects}. A persistent oracle format failure is folded into the trace as
// outcome format_error (with whatever was accumulated); transport errors
// propagate. Throws EmptySelectionError when both steps select nothing.
ReductionResult reduce(const StateGraph& world, const TaxonomyGraph& taxonomy, const GoalSpec& goal,
                       RelevanceOracle& oracle, const ReduceConfig& config = {});

}  // namespace taskscope
