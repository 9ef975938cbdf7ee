#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "taskscope/domain.hpp"
#include "taskscope/goal.hpp"
#include "taskscope/oracle.hpp"
#include "taskscope/world.hpp"

namespace taskscope {

struct MctsConfig {
  int iterations = 20000;      // search budget
  int rollout_depth = 60;      // random steps per simulation from the expanded node
  double exploration_c = 1.41; // UCT exploration constant
  double discount = 1.0;
  std::uint64_t seed = 0;
};

struct PolicyConfig {
  int max_length = 100;  // maximum plan length before giving up
  int retries = 3;       // per-step retry budget for unusable oracle picks
};

enum class PlanStatus { success, budget_exhausted, length_exceeded, format_error };
const char* plan_status_name(PlanStatus status);

// A successful plan replays precondition-valid from its initial state and ends
// in a goal state. MCTS plans are trimmed of no-op cycles; raw_steps keeps the
// pre-trim simulation length for comparability.
struct Plan {
  std::vector<GroundAction> actions;
  int raw_steps = 0;
  int iterations_used = 0;
};

// Failure is a value, not an exception.
struct PlanResult {
  PlanStatus status = PlanStatus::budget_exhausted;
  Plan plan;
  std::int64_t wall_ms = 0;

  bool success() const { return status == PlanStatus::success; }
  // {"success","steps","raw_steps","plan","iterations_used"[,"wall_ms"]};
  // wall time is optional so callers can emit byte-stable artifacts.
  nlohmann::json to_json(bool include_wall = true) const;
};

std::vector<GroundAction> plan_actions_from_json(const nlohmann::json& doc);

// UCT search over afforded actions: one expansion per iteration, uniform
// random rollouts, reward = fraction of satisfied goal conditions at rollout
// end. The first simulation that reaches a goal state yields the plan
// (selection path + rollout suffix), replay-verified and trimmed.
// Deterministic for a fixed seed; iteration-indexed RNG streams make success
// monotone in the budget.
PlanResult mcts_plan(const StateGraph& s0, const GoalSpec& goal, const MctsConfig& config = {});

// Per-step oracle policy: render state + goal + enumerated afforded actions,
// apply the picked index, stop on goal or max length. Picks outside the menu
// are retried up to config.retries, then the result is a format_error.
PlanResult policy_plan(const StateGraph& s0, const GoalSpec& goal, ActionOracle& oracle,
                       const PolicyConfig& config = {});

// True iff every action is afforded in sequence and the final state satisfies
// the goal.
bool replay(const StateGraph& s0, const std::vector<GroundAction>& actions, const GoalSpec& goal);

// Natural-language state summary used in policy prompts (attribute lines
// followed by relation sentences).
std::vector<std::string> render_state_lines(const StateGraph& state);

}  // namespace taskscope
