#pragma once

#include <string>
#include <vector>

#include "taskscope/world.hpp"

namespace taskscope {

// Either a class name (existential: any instance may satisfy the test) or a
// specific object id.
struct ObjectRef {
  std::string cls;
  ObjectId id = kNoObject;

  bool is_id() const { return id != kNoObject; }
  static ObjectRef by_id(ObjectId id) { return ObjectRef{"", id}; }
  static ObjectRef by_class(std::string cls) { return ObjectRef{std::move(cls), kNoObject}; }
  bool operator==(const ObjectRef&) const = default;
};

struct GoalCondition {
  enum class Test { attribute, relation };

  Test test = Test::attribute;
  ObjectRef a;
  ObjectRef b;          // relation tests only
  Attr attr = Attr::open;
  RelationKind rel = RelationKind::ON;
  bool expected = true;

  bool operator==(const GoalCondition&) const = default;

  static GoalCondition attr_is(ObjectRef ref, Attr attr, bool expected) {
    GoalCondition c;
    c.test = Test::attribute;
    c.a = std::move(ref);
    c.attr = attr;
    c.expected = expected;
    return c;
  }
  static GoalCondition relation(ObjectRef src, ObjectRef dst, RelationKind rel, bool expected) {
    GoalCondition c;
    c.test = Test::relation;
    c.a = std::move(src);
    c.b = std::move(dst);
    c.rel = rel;
    c.expected = expected;
    return c;
  }
};

// Conjunction of conditions; every goal state satisfies all of them.
struct GoalSpec {
  std::vector<GoalCondition> conditions;
  bool operator==(const GoalSpec&) const = default;
};

// Text DSL: comma-separated `pred(arg[,arg])=true|false` with
// pred in {on, inside, open, closed, switched_on, held, clean}; args are
// class names or `#<id>`. `closed` normalizes to the open bit negated.
// Throws ParseError on malformed input or syntactically contradictory pairs.
GoalSpec parse_goal(const std::string& text);

// Deterministic text form, used in prompts and reports. When a world is given,
// id references render as "class (id)"; otherwise as "#id".
std::string render_goal_text(const GoalSpec& goal, const StateGraph* world = nullptr);
std::string render_condition_text(const GoalCondition& cond, const StateGraph* world = nullptr);

// True iff every condition holds. Class references are existential. Throws
// UnknownClassError when a condition references a class outside the world's
// class registry.
bool satisfies(const StateGraph& graph, const GoalSpec& goal);
bool condition_holds(const StateGraph& graph, const GoalCondition& cond);

// Fraction of conditions that hold, in [0, 1]; the planner's shaped reward.
double satisfied_fraction(const StateGraph& graph, const GoalSpec& goal);

// All object ids the goal references directly (id refs) or via class
// (every instance), ascending.
std::vector<ObjectId> referenced_objects(const StateGraph& graph, const GoalSpec& goal);

}  // namespace taskscope
