#pragma once

#include <string>
#include <vector>

#include "taskscope/world.hpp"

namespace taskscope {

// Effect/precondition operands: the agent or one of the schema's parameters.
enum class Operand : std::uint8_t { agent, p0, p1 };

struct Precondition {
  enum class Kind : std::uint8_t {
    attr_is,            // attribute of `a` equals `expected` (absent counts as false)
    edge_exists,        // edge a -kind-> b present == expected
    same_room_as_agent, // `a` has an IN_ROOM edge to the agent's room
    different_room,     // `a` is a room other than the agent's current one
    agent_hand_empty,   // agent holds nothing
    accessible,         // every openable strict INSIDE-ancestor of `a` is open
    open_if_openable,   // `a` open when it is openable; vacuous otherwise
    closed_if_openable, // `a` closed when it is openable; vacuous otherwise
  };

  Kind kind;
  Operand a = Operand::p0;
  Operand b = Operand::agent;
  Attr attr = Attr::open;
  RelationKind rel = RelationKind::NEAR;
  bool expected = true;
};

struct Effect {
  enum class Kind : std::uint8_t {
    set_attr,           // set attribute of `a`
    add_edge,           // add a -kind-> b
    del_edge,           // delete a -kind-> b
    clear_agent_near,   // delete all agent NEAR edges
    detach,             // delete `a`'s ON or INSIDE edge
    set_room,           // re-point `a`'s IN_ROOM edge to `b`
    sync_room_to_agent, // re-point `a`'s IN_ROOM edge to the agent's room
    near_with_parent,   // add agent NEAR `a` and NEAR `a`'s placement parent
  };

  Kind kind;
  Operand a = Operand::p0;
  Operand b = Operand::agent;
  Attr attr = Attr::open;
  RelationKind rel = RelationKind::NEAR;
  bool value = true;
};

struct ParamSpec {
  std::string name;
  CapabilitySet requires_caps;  // all must be present
  CapabilitySet excludes_caps;  // none may be present
};

struct ActionSchema {
  std::string name;
  std::vector<ParamSpec> params;
  std::vector<Precondition> preconditions;
  std::vector<Effect> effects;  // applied in order
};

// The nine household operators: walk_to, go_near, open, close, switch_on,
// switch_off, grab, put_on, put_inside (sorted by name).
const std::vector<ActionSchema>& household_domain();
const ActionSchema* find_schema(const std::string& name);
int schema_index(const std::string& name);  // -1 if unknown

struct GroundAction {
  std::string name;
  std::vector<ObjectId> args;

  bool operator==(const GroundAction&) const = default;
  bool operator<(const GroundAction& o) const {
    if (name != o.name) return name < o.name;
    return args < o.args;
  }
};

// Allocation-free action used inside search loops.
struct CompactAction {
  std::uint8_t schema = 0;  // index into household_domain()
  std::uint8_t arity = 0;
  ObjectId a = kNoObject;
  ObjectId b = kNoObject;

  bool operator==(const CompactAction&) const = default;
};

GroundAction to_ground(const CompactAction& action);
CompactAction to_compact(const GroundAction& action);  // throws ParseError on unknown schema

std::string action_text(const GroundAction& action);                      // "put_on(34, 3)"
std::string action_text(const GroundAction& action, const StateGraph&);  // "put_on(banana (34), table (3))"

// Exactly the ground actions whose capability constraints and preconditions
// hold; ordered by (schema name, args).
std::vector<CompactAction> affordance_compact(const StateGraph& state);
std::vector<GroundAction> affordance(const StateGraph& state);

bool applicable(const StateGraph& state, const CompactAction& action);
bool applicable(const StateGraph& state, const GroundAction& action);

// New graph with the action's effects applied in order; the input state is
// unchanged. Throws NotApplicableError when preconditions fail.
StateGraph apply(const StateGraph& state, const CompactAction& action);
StateGraph apply(const StateGraph& state, const GroundAction& action);

}  // namespace taskscope
