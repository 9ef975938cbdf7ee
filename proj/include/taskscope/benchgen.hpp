#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "taskscope/goal.hpp"
#include "taskscope/taxonomy.hpp"
#include "taskscope/world.hpp"

namespace taskscope {

// Synthetic household world generator. Small worlds (<= kBlockerWorldSize
// objects) use blockered placement: movable objects sit either top-level or
// behind closed openable containers, which keeps shortest plans
// argument-unique for the exhaustive search oracle.
struct WorldSpec {
  std::uint64_t seed = 1;
  int n_rooms = 6;
  int n_objects = 280;   // total object count target (rooms and agent included)
  int max_depth = 3;     // max ON/INSIDE ancestors of any object
};

inline constexpr int kBlockerWorldSize = 12;

StateGraph generate_world(const WorldSpec& spec);

struct Subtask {
  enum class Kind { put_on, put_inside, open, close, switch_on, switch_off };
  Kind kind;
  ObjectId obj = kNoObject;
  ObjectId dst = kNoObject;  // put templates only
};

struct TaskSpec {
  std::uint64_t seed = 0;
  int n = 1;
  std::vector<Subtask> subtasks;
};

// N primitive subgoals sampled without reuse of referenced objects; each
// subgoal is unsatisfied in the initial state and the conjunction is
// satisfiable by construction. Throws InfeasibleError when the world cannot
// host N disjoint subgoals.
std::pair<TaskSpec, GoalSpec> compose_task(const StateGraph& world, std::uint64_t seed, int n);

struct GroundTruth {
  std::set<ObjectId> necessary;  // O_g: excludes the agent and rooms
};

// Goal-referenced objects plus the transitive ON/INSIDE ancestor chain of
// each (containers blocking access); destination objects are referenced and
// included. The agent and rooms are retained by rule and counted separately.
GroundTruth ground_truth_necessary(const StateGraph& world, const GoalSpec& goal);

// Breadth-first search over the full state space; returns the ids appearing
// as arguments of a shortest plan (agent and rooms excluded). Verification
// oracle for ground_truth_necessary on small worlds. Throws UnsolvableError
// when the reachable state space is exhausted without a goal state.
std::set<ObjectId> brute_force_necessary(const StateGraph& world, const GoalSpec& goal,
                                         std::size_t state_cap = 2000000);

// Shortest plan found by the same search; empty when the goal already holds.
std::vector<GroundAction> brute_force_plan(const StateGraph& world, const GoalSpec& goal,
                                           std::size_t state_cap = 2000000);

// Shipped taxonomy covering the generator's class registry (the registry is
// its leaf set).
nlohmann::json default_taxonomy_spec();
const TaxonomyGraph& default_taxonomy();
const std::vector<std::string>& benchmark_class_registry();

CapabilitySet benchmark_class_caps(const std::string& cls);
const std::vector<std::string>& benchmark_room_classes();

}  // namespace taskscope
