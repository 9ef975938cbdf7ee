#include "taskscope/domain.hpp"

#include <algorithm>

#include "taskscope/errors.hpp"

namespace taskscope {

namespace {

using PK = Precondition::Kind;
using EK = Effect::Kind;

Precondition pre_attr(Operand a, Attr attr, bool expected) {
  Precondition p;
  p.kind = PK::attr_is;
  p.a = a;
  p.attr = attr;
  p.expected = expected;
  return p;
}

Precondition pre_edge(Operand a, Operand b, RelationKind rel, bool expected) {
  Precondition p;
  p.kind = PK::edge_exists;
  p.a = a;
  p.b = b;
  p.rel = rel;
  p.expected = expected;
  return p;
}

Precondition pre(PK kind, Operand a) {
  Precondition p;
  p.kind = kind;
  p.a = a;
  return p;
}

Effect eff_attr(Operand a, Attr attr, bool value) {
  Effect e;
  e.kind = EK::set_attr;
  e.a = a;
  e.attr = attr;
  e.value = value;
  return e;
}

Effect eff_edge(EK kind, Operand a, Operand b, RelationKind rel) {
  Effect e;
  e.kind = kind;
  e.a = a;
  e.b = b;
  e.rel = rel;
  return e;
}

Effect eff(EK kind, Operand a = Operand::agent) {
  Effect e;
  e.kind = kind;
  e.a = a;
  return e;
}

ParamSpec param(std::string name, std::initializer_list<Capability> required,
                std::initializer_list<Capability> excluded = {}) {
  return ParamSpec{std::move(name), caps_of(required), caps_of(excluded)};
}

std::vector<ActionSchema> make_household_domain() {
  std::vector<ActionSchema> schemas;

  {
    ActionSchema s;
    s.name = "walk_to";
    s.params = {param("room", {Capability::room})};
    s.preconditions = {pre(PK::different_room, Operand::p0)};
    s.effects = {eff(EK::clear_agent_near), eff_edge(EK::set_room, Operand::agent, Operand::p0, RelationKind::IN_ROOM)};
    schemas.push_back(std::move(s));
  }
  {
    ActionSchema s;
    s.name = "go_near";
    s.params = {param("obj", {}, {Capability::room, Capability::agent})};
    s.preconditions = {pre(PK::same_room_as_agent, Operand::p0)};
    s.effects = {eff(EK::clear_agent_near), eff(EK::near_with_parent, Operand::p0)};
    schemas.push_back(std::move(s));
  }
  {
    ActionSchema s;
    s.name = "open";
    s.params = {param("obj", {Capability::openable})};
    s.preconditions = {pre_edge(Operand::agent, Operand::p0, RelationKind::NEAR, true),
                       pre_attr(Operand::p0, Attr::open, false),
                       pre_attr(Operand::p0, Attr::held, false),
                       pre(PK::accessible, Operand::p0)};
    s.effects = {eff_attr(Operand::p0, Attr::open, true)};
    schemas.push_back(std::move(s));
  }
  {
    ActionSchema s;
    s.name = "close";
    s.params = {param("obj", {Capability::openable})};
    s.preconditions = {pre_edge(Operand::agent, Operand::p0, RelationKind::NEAR, true),
                       pre_attr(Operand::p0, Attr::open, true),
                       pre(PK::accessible, Operand::p0)};
    s.effects = {eff_attr(Operand::p0, Attr::open, false)};
    schemas.push_back(std::move(s));
  }
  {
    ActionSchema s;
    s.name = "switch_on";
    s.params = {param("obj", {Capability::switchable})};
    // openable devices must be shut before powering on
    s.preconditions = {pre_edge(Operand::agent, Operand::p0, RelationKind::NEAR, true),
                       pre_attr(Operand::p0, Attr::on, false),
                       pre(PK::closed_if_openable, Operand::p0),
                       pre(PK::accessible, Operand::p0)};
    s.effects = {eff_attr(Operand::p0, Attr::on, true)};
    schemas.push_back(std::move(s));
  }
  {
    ActionSchema s;
    s.name = "switch_off";
    s.params = {param("obj", {Capability::switchable})};
    s.preconditions = {pre_edge(Operand::agent, Operand::p0, RelationKind::NEAR, true),
                       pre_attr(Operand::p0, Attr::on, true),
                       pre(PK::accessible, Operand::p0)};
    s.effects = {eff_attr(Operand::p0, Attr::on, false)};
    schemas.push_back(std::move(s));
  }
  {
    ActionSchema s;
    s.name = "grab";
    s.params = {param("obj", {Capability::grabbable})};
    s.preconditions = {pre_edge(Operand::agent, Operand::p0, RelationKind::NEAR, true),
                       pre(PK::agent_hand_empty, Operand::agent),
                       pre(PK::accessible, Operand::p0)};
    s.effects = {eff(EK::detach, Operand::p0),
                 eff_edge(EK::add_edge, Operand::p0, Operand::agent, RelationKind::HELD_BY),
                 eff_attr(Operand::p0, Attr::held, true)};
    schemas.push_back(std::move(s));
  }
  {
    ActionSchema s;
    s.name = "put_on";
    s.params = {param("obj", {Capability::grabbable}), param("surface", {Capability::surface})};
    s.preconditions = {pre_edge(Operand::p0, Operand::agent, RelationKind::HELD_BY, true),
                       pre_edge(Operand::agent, Operand::p1, RelationKind::NEAR, true),
                       pre(PK::accessible, Operand::p1)};
    s.effects = {eff_edge(EK::del_edge, Operand::p0, Operand::agent, RelationKind::HELD_BY),
                 eff_attr(Operand::p0, Attr::held, false),
                 eff_edge(EK::add_edge, Operand::p0, Operand::p1, RelationKind::ON),
                 eff(EK::sync_room_to_agent, Operand::p0)};
    schemas.push_back(std::move(s));
  }
  {
    ActionSchema s;
    s.name = "put_inside";
    s.params = {param("obj", {Capability::grabbable}), param("container", {Capability::container})};
    s.preconditions = {pre_edge(Operand::p0, Operand::agent, RelationKind::HELD_BY, true),
                       pre_edge(Operand::agent, Operand::p1, RelationKind::NEAR, true),
                       pre(PK::open_if_openable, Operand::p1),
                       pre(PK::accessible, Operand::p1)};
    s.effects = {eff_edge(EK::del_edge, Operand::p0, Operand::agent, RelationKind::HELD_BY),
                 eff_attr(Operand::p0, Attr::held, false),
                 eff_edge(EK::add_edge, Operand::p0, Operand::p1, RelationKind::INSIDE),
                 eff(EK::sync_room_to_agent, Operand::p0)};
    schemas.push_back(std::move(s));
  }

  std::sort(schemas.begin(), schemas.end(),
            [](const ActionSchema& a, const ActionSchema& b) { return a.name < b.name; });
  return schemas;
}

ObjectId resolve(Operand op, ObjectId agent, const CompactAction& action) {
  switch (op) {
    case Operand::agent:
      return agent;
    case Operand::p0:
      return action.a;
    case Operand::p1:
      return action.b;
  }
  return kNoObject;
}

bool caps_match(const ObjectNode& o, const ParamSpec& spec) {
  if ((o.caps.bits & spec.requires_caps.bits) != spec.requires_caps.bits) return false;
  return (o.caps.bits & spec.excludes_caps.bits) == 0;
}

bool object_accessible(const StateGraph& state, ObjectId id) {
  // walk strict INSIDE-ancestors; openable ones must be open
  int hops = 0;
  std::optional<ObjectId> parent = state.inside_parent(id);
  while (parent && hops < 64) {
    const ObjectNode* p = state.find(*parent);
    if (p && p->caps.has(Capability::openable) && !p->attrs.get(Attr::open)) return false;
    parent = state.inside_parent(*parent);
    ++hops;
  }
  return true;
}

bool precondition_holds(const StateGraph& state, const CompactAction& action, const Precondition& p) {
  const ObjectId agent = state.agent();
  const ObjectId a = resolve(p.a, agent, action);
  switch (p.kind) {
    case PK::attr_is: {
      const ObjectNode* o = state.find(a);
      if (!o) return false;
      return o->attrs.get(p.attr) == p.expected;
    }
    case PK::edge_exists:
      return state.has_edge(a, resolve(p.b, agent, action), p.rel) == p.expected;
    case PK::same_room_as_agent: {
      auto agent_room = state.room_of(agent);
      auto obj_room = state.room_of(a);
      return agent_room && obj_room && *agent_room == *obj_room;
    }
    case PK::different_room: {
      auto agent_room = state.room_of(agent);
      return agent_room && *agent_room != a;
    }
    case PK::agent_hand_empty:
      return state.held_object() == kNoObject;
    case PK::accessible:
      return object_accessible(state, a);
    case PK::open_if_openable: {
      const ObjectNode* o = state.find(a);
      if (!o) return false;
      return !o->caps.has(Capability::openable) || o->attrs.get(Attr::open);
    }
    case PK::closed_if_openable: {
      const ObjectNode* o = state.find(a);
      if (!o) return false;
      return !o->caps.has(Capability::openable) || !o->attrs.get(Attr::open);
    }
  }
  return false;
}

}  // namespace

const std::vector<ActionSchema>& household_domain() {
  static const std::vector<ActionSchema> domain = make_household_domain();
  return domain;
}

const ActionSchema* find_schema(const std::string& name) {
  int idx = schema_index(name);
  return idx < 0 ? nullptr : &household_domain()[idx];
}

int schema_index(const std::string& name) {
  const auto& domain = household_domain();
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

GroundAction to_ground(const CompactAction& action) {
  GroundAction g;
  g.name = household_domain()[action.schema].name;
  g.args.push_back(action.a);
  if (action.arity > 1) g.args.push_back(action.b);
  return g;
}

CompactAction to_compact(const GroundAction& action) {
  int idx = schema_index(action.name);
  if (idx < 0) throw ParseError("unknown action '" + action.name + "'");
  const ActionSchema& schema = household_domain()[idx];
  if (action.args.size() != schema.params.size())
    throw ParseError("action '" + action.name + "' takes " + std::to_string(schema.params.size()) +
                     " argument(s)");
  CompactAction c;
  c.schema = static_cast<std::uint8_t>(idx);
  c.arity = static_cast<std::uint8_t>(action.args.size());
  c.a = action.args.empty() ? kNoObject : action.args[0];
  c.b = action.args.size() > 1 ? action.args[1] : kNoObject;
  return c;
}

std::string action_text(const GroundAction& action) {
  std::string out = action.name + "(";
  for (std::size_t i = 0; i < action.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(action.args[i]);
  }
  return out + ")";
}

std::string action_text(const GroundAction& action, const StateGraph& state) {
  std::string out = action.name + "(";
  for (std::size_t i = 0; i < action.args.size(); ++i) {
    if (i > 0) out += ", ";
    const ObjectNode* o = state.find(action.args[i]);
    out += (o ? o->cls : std::string("unknown")) + " (" + std::to_string(action.args[i]) + ")";
  }
  return out + ")";
}

bool applicable(const StateGraph& state, const CompactAction& action) {
  const auto& domain = household_domain();
  if (action.schema >= domain.size()) return false;
  const ActionSchema& schema = domain[action.schema];
  if (action.arity != schema.params.size()) return false;
  if (action.arity == 2 && action.a == action.b) return false;
  const ObjectId args[2] = {action.a, action.b};
  for (std::size_t i = 0; i < schema.params.size(); ++i) {
    const ObjectNode* o = state.find(args[i]);
    if (!o || !caps_match(*o, schema.params[i])) return false;
  }
  for (const Precondition& p : schema.preconditions) {
    if (!precondition_holds(state, action, p)) return false;
  }
  return true;
}

bool applicable(const StateGraph& state, const GroundAction& action) {
  if (schema_index(action.name) < 0) return false;
  const ActionSchema& schema = *find_schema(action.name);
  if (action.args.size() != schema.params.size()) return false;
  return applicable(state, to_compact(action));
}

std::vector<CompactAction> affordance_compact(const StateGraph& state) {
  std::vector<CompactAction> out;
  const ObjectId agent = state.agent();
  if (agent == kNoObject) return out;
  const auto agent_room = state.room_of(agent);
  const ObjectId held = state.held_object();
  const auto& domain = household_domain();

  auto try_action = [&](std::uint8_t schema, std::uint8_t arity, ObjectId a, ObjectId b = kNoObject) {
    CompactAction act{schema, arity, a, b};
    if (applicable(state, act)) out.push_back(act);
  };

  // Candidate generation is narrowed per schema (near targets, same-room
  // objects, the held object); `applicable` stays the single source of truth.
  for (std::size_t si = 0; si < domain.size(); ++si) {
    const std::uint8_t schema = static_cast<std::uint8_t>(si);
    const std::string& name = domain[si].name;
    if (name == "walk_to") {
      for (const ObjectNode& o : state.objects()) {
        if (o.is_room()) try_action(schema, 1, o.id);
      }
    } else if (name == "go_near") {
      for (const ObjectNode& o : state.objects()) {
        if (o.is_room() || o.is_agent()) continue;
        if (agent_room && state.room_of(o.id) == agent_room) try_action(schema, 1, o.id);
      }
    } else if (name == "put_on" || name == "put_inside") {
      if (held == kNoObject) continue;
      const Capability target_cap = name == "put_on" ? Capability::surface : Capability::container;
      for (ObjectId near_id : state.agent_near()) {
        const ObjectNode* o = state.find(near_id);
        if (o && o->caps.has(target_cap) && near_id != held) try_action(schema, 2, held, near_id);
      }
    } else {
      // open / close / switch_on / switch_off / grab act on near objects
      for (ObjectId near_id : state.agent_near()) try_action(schema, 1, near_id);
    }
  }
  return out;
}

std::vector<GroundAction> affordance(const StateGraph& state) {
  std::vector<GroundAction> out;
  for (const CompactAction& c : affordance_compact(state)) out.push_back(to_ground(c));
  return out;
}

StateGraph apply(const StateGraph& state, const CompactAction& action) {
  if (!applicable(state, action))
    throw NotApplicableError("action not applicable: " + action_text(to_ground(action)));

  std::vector<ObjectNode> objects = state.objects();
  std::vector<RelationEdge> edges = state.edges();
  const ObjectId agent = state.agent();

  auto object_ref = [&](ObjectId id) -> ObjectNode& {
    auto it = std::lower_bound(objects.begin(), objects.end(), id,
                               [](const ObjectNode& o, ObjectId v) { return o.id < v; });
    return *it;  // applicable() guaranteed existence
  };
  auto erase_if = [&](auto pred) { edges.erase(std::remove_if(edges.begin(), edges.end(), pred), edges.end()); };

  const ActionSchema& schema = household_domain()[action.schema];
  for (const Effect& e : schema.effects) {
    const ObjectId a = resolve(e.a, agent, action);
    const ObjectId b = resolve(e.b, agent, action);
    switch (e.kind) {
      case EK::set_attr:
        object_ref(a).attrs.set(e.attr, e.value);
        break;
      case EK::add_edge:
        edges.push_back(RelationEdge{a, b, e.rel});
        break;
      case EK::del_edge:
        erase_if([&](const RelationEdge& x) { return x.src == a && x.dst == b && x.kind == e.rel; });
        break;
      case EK::clear_agent_near:
        erase_if([&](const RelationEdge& x) { return x.kind == RelationKind::NEAR && x.src == agent; });
        break;
      case EK::detach:
        erase_if([&](const RelationEdge& x) {
          return x.src == a && (x.kind == RelationKind::ON || x.kind == RelationKind::INSIDE);
        });
        break;
      case EK::set_room:
        erase_if([&](const RelationEdge& x) { return x.src == a && x.kind == RelationKind::IN_ROOM; });
        edges.push_back(RelationEdge{a, b, RelationKind::IN_ROOM});
        break;
      case EK::sync_room_to_agent: {
        auto room = state.room_of(agent);
        if (room) {
          erase_if([&](const RelationEdge& x) { return x.src == a && x.kind == RelationKind::IN_ROOM; });
          edges.push_back(RelationEdge{a, *room, RelationKind::IN_ROOM});
        }
        break;
      }
      case EK::near_with_parent: {
        edges.push_back(RelationEdge{agent, a, RelationKind::NEAR});
        if (auto parent = state.placement_parent(a)) {
          if (*parent != agent) edges.push_back(RelationEdge{agent, *parent, RelationKind::NEAR});
        }
        break;
      }
    }
  }

  return StateGraph(std::move(objects), std::move(edges), state.class_registry());
}

StateGraph apply(const StateGraph& state, const GroundAction& action) {
  return apply(state, to_compact(action));
}

}  // namespace taskscope
