#include "taskscope/goal.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "taskscope/errors.hpp"

namespace taskscope {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Split on commas outside parentheses.
std::vector<std::string> split_terms(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

ObjectRef parse_ref(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) throw ParseError("goal: empty argument");
  if (s[0] == '#') {
    const std::string digits = s.substr(1);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError("goal: bad id reference '" + s + "'");
    unsigned long v = std::stoul(digits);
    if (v == 0) throw ParseError("goal: object ids are positive, got '" + s + "'");
    return ObjectRef::by_id(static_cast<ObjectId>(v));
  }
  for (char c : s) {
    if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      throw ParseError("goal: bad class token '" + s + "'");
  }
  return ObjectRef::by_class(s);
}

std::string ref_key(const ObjectRef& r) { return r.is_id() ? "#" + std::to_string(r.id) : r.cls; }

// Normalized identity of a condition minus its expected value, for the
// contradiction check.
std::string condition_key(const GoalCondition& c) {
  if (c.test == GoalCondition::Test::attribute)
    return std::string("a:") + attr_name(c.attr) + ":" + ref_key(c.a);
  return std::string("r:") + relation_name(c.rel) + ":" + ref_key(c.a) + ":" + ref_key(c.b);
}

}  // namespace

GoalSpec parse_goal(const std::string& text) {
  GoalSpec goal;
  if (trim(text).empty()) throw ParseError("goal: at least one condition is required");
  for (const std::string& raw_term : split_terms(text)) {
    std::string term = trim(raw_term);
    if (term.empty()) throw ParseError("goal: empty term");

    auto eq = term.rfind('=');
    if (eq == std::string::npos) throw ParseError("goal: missing '=true|false' in '" + term + "'");
    std::string value_text = trim(term.substr(eq + 1));
    bool expected;
    if (value_text == "true")
      expected = true;
    else if (value_text == "false")
      expected = false;
    else
      throw ParseError("goal: expected true or false, got '" + value_text + "'");

    std::string call = trim(term.substr(0, eq));
    auto open_paren = call.find('(');
    if (open_paren == std::string::npos || call.back() != ')')
      throw ParseError("goal: expected pred(args) in '" + term + "'");
    std::string pred = trim(call.substr(0, open_paren));
    std::string args_text = call.substr(open_paren + 1, call.size() - open_paren - 2);
    std::vector<std::string> args;
    for (const std::string& a : split_terms(args_text)) args.push_back(trim(a));

    auto want_arity = [&](std::size_t n) {
      if (args.size() != n)
        throw ParseError("goal: '" + pred + "' takes " + std::to_string(n) + " argument(s)");
    };

    if (pred == "on") {
      want_arity(2);
      goal.conditions.push_back(
          GoalCondition::relation(parse_ref(args[0]), parse_ref(args[1]), RelationKind::ON, expected));
    } else if (pred == "inside") {
      want_arity(2);
      goal.conditions.push_back(
          GoalCondition::relation(parse_ref(args[0]), parse_ref(args[1]), RelationKind::INSIDE, expected));
    } else if (pred == "open") {
      want_arity(1);
      goal.conditions.push_back(GoalCondition::attr_is(parse_ref(args[0]), Attr::open, expected));
    } else if (pred == "closed") {
      want_arity(1);
      goal.conditions.push_back(GoalCondition::attr_is(parse_ref(args[0]), Attr::open, !expected));
    } else if (pred == "switched_on") {
      want_arity(1);
      goal.conditions.push_back(GoalCondition::attr_is(parse_ref(args[0]), Attr::on, expected));
    } else if (pred == "held") {
      want_arity(1);
      goal.conditions.push_back(GoalCondition::attr_is(parse_ref(args[0]), Attr::held, expected));
    } else if (pred == "clean") {
      want_arity(1);
      goal.conditions.push_back(GoalCondition::attr_is(parse_ref(args[0]), Attr::clean, expected));
    } else {
      throw ParseError("goal: unknown predicate '" + pred + "'");
    }
  }

  std::set<std::string> seen_true, seen_false;
  for (const GoalCondition& c : goal.conditions) {
    const std::string key = condition_key(c);
    auto& same = c.expected ? seen_true : seen_false;
    auto& opposite = c.expected ? seen_false : seen_true;
    if (opposite.count(key))
      throw ParseError("goal: contradictory conditions on " + render_condition_text(c));
    same.insert(key);
  }
  return goal;
}

namespace {

std::string ref_text(const ObjectRef& r, const StateGraph* world) {
  if (!r.is_id()) return r.cls;
  if (world != nullptr) {
    if (const ObjectNode* o = world->find(r.id)) return o->cls + " (" + std::to_string(r.id) + ")";
  }
  return "#" + std::to_string(r.id);
}

}  // namespace

std::string render_condition_text(const GoalCondition& c, const StateGraph* world) {
  std::string pred;
  std::string args = ref_text(c.a, world);
  bool value = c.expected;
  if (c.test == GoalCondition::Test::attribute) {
    switch (c.attr) {
      case Attr::open:
        pred = "open";
        break;
      case Attr::on:
        pred = "switched_on";
        break;
      case Attr::held:
        pred = "held";
        break;
      case Attr::clean:
        pred = "clean";
        break;
    }
  } else {
    pred = c.rel == RelationKind::ON ? "on" : "inside";
    args += ", " + ref_text(c.b, world);
  }
  return pred + "(" + args + ")=" + (value ? "true" : "false");
}

std::string render_goal_text(const GoalSpec& goal, const StateGraph* world) {
  std::string out;
  for (std::size_t i = 0; i < goal.conditions.size(); ++i) {
    if (i > 0) out += " and ";
    out += render_condition_text(goal.conditions[i], world);
  }
  return out;
}

namespace {

std::vector<ObjectId> resolve_ref(const StateGraph& g, const ObjectRef& r) {
  if (r.is_id()) {
    if (g.contains(r.id)) return {r.id};
    return {};
  }
  if (!g.class_known(r.cls))
    throw UnknownClassError("goal references unknown class '" + r.cls + "'");
  return g.instances_of(r.cls);
}

}  // namespace

bool condition_holds(const StateGraph& g, const GoalCondition& c) {
  const std::vector<ObjectId> as = resolve_ref(g, c.a);
  if (c.test == GoalCondition::Test::attribute) {
    for (ObjectId id : as) {
      const ObjectNode* o = g.find(id);
      if (o && o->attrs.has(c.attr) && o->attrs.get(c.attr) == c.expected) return true;
    }
    return false;
  }
  const std::vector<ObjectId> bs = resolve_ref(g, c.b);
  for (ObjectId s : as) {
    for (ObjectId d : bs) {
      if (g.has_edge(s, d, c.rel) == c.expected) return true;
    }
  }
  return false;
}

bool satisfies(const StateGraph& g, const GoalSpec& goal) {
  for (const GoalCondition& c : goal.conditions) {
    if (!condition_holds(g, c)) return false;
  }
  return true;
}

double satisfied_fraction(const StateGraph& g, const GoalSpec& goal) {
  if (goal.conditions.empty()) return 1.0;
  std::size_t hit = 0;
  for (const GoalCondition& c : goal.conditions) {
    if (condition_holds(g, c)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(goal.conditions.size());
}

std::vector<ObjectId> referenced_objects(const StateGraph& g, const GoalSpec& goal) {
  std::set<ObjectId> out;
  for (const GoalCondition& c : goal.conditions) {
    for (ObjectId id : resolve_ref(g, c.a)) out.insert(id);
    if (c.test == GoalCondition::Test::relation) {
      for (ObjectId id : resolve_ref(g, c.b)) out.insert(id);
    }
  }
  return std::vector<ObjectId>(out.begin(), out.end());
}

}  // namespace taskscope
