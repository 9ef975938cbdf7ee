#include "taskscope/world.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "taskscope/errors.hpp"
#include "taskscope/rng.hpp"

namespace taskscope {

namespace {
constexpr const char* kAttrNames[kAttrCount] = {"open", "on", "held", "clean"};
constexpr const char* kCapabilityNames[kCapabilityCount] = {
    "openable", "switchable", "grabbable", "surface", "container", "room", "agent"};
constexpr const char* kRelationNames[kRelationKindCount] = {"INSIDE", "ON", "NEAR", "HELD_BY", "IN_ROOM"};
}  // namespace

const char* attr_name(Attr a) { return kAttrNames[static_cast<int>(a)]; }

std::optional<Attr> attr_from_name(const std::string& name) {
  for (int i = 0; i < kAttrCount; ++i) {
    if (name == kAttrNames[i]) return static_cast<Attr>(i);
  }
  return std::nullopt;
}

const char* capability_name(Capability c) { return kCapabilityNames[static_cast<int>(c)]; }

std::optional<Capability> capability_from_name(const std::string& name) {
  for (int i = 0; i < kCapabilityCount; ++i) {
    if (name == kCapabilityNames[i]) return static_cast<Capability>(i);
  }
  return std::nullopt;
}

CapabilitySet caps_of(std::initializer_list<Capability> caps) {
  CapabilitySet set;
  for (Capability c : caps) set.add(c);
  return set;
}

bool attr_permitted(Attr a, CapabilitySet caps) {
  switch (a) {
    case Attr::open:
      return caps.has(Capability::openable);
    case Attr::on:
      return caps.has(Capability::switchable);
    case Attr::held:
    case Attr::clean:
      return caps.has(Capability::grabbable);
  }
  return false;
}

const char* relation_name(RelationKind k) { return kRelationNames[static_cast<int>(k)]; }

std::optional<RelationKind> relation_from_name(const std::string& name) {
  for (int i = 0; i < kRelationKindCount; ++i) {
    if (name == kRelationNames[i]) return static_cast<RelationKind>(i);
  }
  return std::nullopt;
}

StateGraph::StateGraph(std::vector<ObjectNode> objects, std::vector<RelationEdge> edges,
                       std::vector<std::string> class_registry)
    : objects_(std::move(objects)), edges_(std::move(edges)), registry_(std::move(class_registry)) {
  std::sort(objects_.begin(), objects_.end(),
            [](const ObjectNode& a, const ObjectNode& b) { return a.id < b.id; });
  std::sort(edges_.begin(), edges_.end());
  explicit_registry_ = !registry_.empty();
  if (!explicit_registry_) {
    for (const ObjectNode& o : objects_) registry_.push_back(o.cls);
  }
  std::sort(registry_.begin(), registry_.end());
  registry_.erase(std::unique(registry_.begin(), registry_.end()), registry_.end());
  build_index();
}

int StateGraph::index_of(ObjectId id) const {
  auto it = std::lower_bound(objects_.begin(), objects_.end(), id,
                             [](const ObjectNode& o, ObjectId v) { return o.id < v; });
  if (it == objects_.end() || it->id != id) return -1;
  return static_cast<int>(it - objects_.begin());
}

const ObjectNode* StateGraph::find(ObjectId id) const {
  int idx = index_of(id);
  return idx < 0 ? nullptr : &objects_[idx];
}

bool StateGraph::class_known(const std::string& cls) const {
  return std::binary_search(registry_.begin(), registry_.end(), cls);
}

std::vector<ObjectId> StateGraph::ids() const {
  std::vector<ObjectId> out;
  out.reserve(objects_.size());
  for (const ObjectNode& o : objects_) out.push_back(o.id);
  return out;
}

std::vector<ObjectId> StateGraph::instances_of(const std::string& cls) const {
  std::vector<ObjectId> out;
  for (const ObjectNode& o : objects_) {
    if (o.cls == cls) out.push_back(o.id);
  }
  return out;
}

void StateGraph::build_index() {
  const std::size_t n = objects_.size();
  inside_parent_.assign(n, -1);
  on_parent_.assign(n, -1);
  room_.assign(n, -1);
  agent_near_.clear();
  agent_ = kNoObject;
  held_ = kNoObject;

  for (const ObjectNode& o : objects_) {
    if (o.is_agent() && agent_ == kNoObject) agent_ = o.id;
  }
  for (const RelationEdge& e : edges_) {
    int src = index_of(e.src);
    int dst = index_of(e.dst);
    if (src < 0 || dst < 0) continue;
    switch (e.kind) {
      case RelationKind::INSIDE:
        if (inside_parent_[src] < 0) inside_parent_[src] = dst;
        break;
      case RelationKind::ON:
        if (on_parent_[src] < 0) on_parent_[src] = dst;
        break;
      case RelationKind::IN_ROOM:
        if (room_[src] < 0) room_[src] = dst;
        break;
      case RelationKind::NEAR:
        if (e.src == agent_) agent_near_.push_back(e.dst);
        break;
      case RelationKind::HELD_BY:
        if (e.dst == agent_ && held_ == kNoObject) held_ = e.src;
        break;
    }
  }
  std::sort(agent_near_.begin(), agent_near_.end());
  agent_near_.erase(std::unique(agent_near_.begin(), agent_near_.end()), agent_near_.end());
}

std::optional<ObjectId> StateGraph::inside_parent(ObjectId id) const {
  int idx = index_of(id);
  if (idx < 0 || inside_parent_[idx] < 0) return std::nullopt;
  return objects_[inside_parent_[idx]].id;
}

std::optional<ObjectId> StateGraph::on_parent(ObjectId id) const {
  int idx = index_of(id);
  if (idx < 0 || on_parent_[idx] < 0) return std::nullopt;
  return objects_[on_parent_[idx]].id;
}

std::optional<ObjectId> StateGraph::placement_parent(ObjectId id) const {
  if (auto p = inside_parent(id)) return p;
  return on_parent(id);
}

std::optional<ObjectId> StateGraph::room_of(ObjectId id) const {
  int idx = index_of(id);
  if (idx < 0 || room_[idx] < 0) return std::nullopt;
  return objects_[room_[idx]].id;
}

bool StateGraph::near(ObjectId id) const {
  return std::binary_search(agent_near_.begin(), agent_near_.end(), id);
}

bool StateGraph::has_edge(ObjectId src, ObjectId dst, RelationKind kind) const {
  RelationEdge probe{src, dst, kind};
  return std::binary_search(edges_.begin(), edges_.end(), probe);
}

std::uint64_t StateGraph::structural_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const ObjectNode& o : objects_) {
    h = fnv1a64(&o.id, sizeof(o.id), h);
    h = fnv1a64(o.cls.data(), o.cls.size(), h);
    h = fnv1a64(&o.caps.bits, 1, h);
    h = fnv1a64(&o.attrs.present, 1, h);
    h = fnv1a64(&o.attrs.values, 1, h);
  }
  for (const RelationEdge& e : edges_) {
    std::uint32_t packed[3] = {e.src, e.dst, static_cast<std::uint32_t>(e.kind)};
    h = fnv1a64(packed, sizeof(packed), h);
  }
  return h;
}

std::pair<std::uint64_t, std::uint64_t> StateGraph::structural_hash128() const {
  std::uint64_t a = structural_hash();
  // second stream with a different basis
  std::uint64_t b = 0x84222325cbf29ce4ull;
  for (const ObjectNode& o : objects_) {
    b = fnv1a64(&o.id, sizeof(o.id), b);
    b = fnv1a64(o.cls.data(), o.cls.size(), b);
    b = fnv1a64(&o.caps.bits, 1, b);
    b = fnv1a64(&o.attrs.present, 1, b);
    b = fnv1a64(&o.attrs.values, 1, b);
  }
  for (const RelationEdge& e : edges_) {
    std::uint32_t packed[3] = {e.dst, e.src, static_cast<std::uint32_t>(e.kind)};
    b = fnv1a64(packed, sizeof(packed), b);
  }
  return {a, b};
}

namespace {

constexpr const char* kViolationNames[] = {
    "duplicate_object_id", "invalid_object_id", "empty_class", "unknown_class",
    "attr_not_permitted", "room_has_attributes", "no_agent", "multiple_agents",
    "dangling_edge", "self_loop_edge", "duplicate_edge", "containment_not_forest",
    "multiple_on_parents", "missing_in_room", "multiple_in_room", "in_room_target_not_room",
    "room_has_in_room", "near_src_not_agent", "held_by_dst_not_agent", "held_mismatch"};

void add(std::vector<Violation>& out, ViolationCode code, std::string message,
         std::vector<ObjectId> ids = {}) {
  out.push_back(Violation{code, std::move(message), std::move(ids)});
}

}  // namespace

const char* violation_code_name(ViolationCode code) {
  return kViolationNames[static_cast<int>(code)];
}

std::vector<Violation> validate(const StateGraph& g) {
  std::vector<Violation> out;
  const auto& objects = g.objects();
  const auto& edges = g.edges();

  int agents = 0;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const ObjectNode& o = objects[i];
    if (o.id == kNoObject) add(out, ViolationCode::invalid_object_id, "object id must be positive", {o.id});
    if (i > 0 && objects[i - 1].id == o.id)
      add(out, ViolationCode::duplicate_object_id, "duplicate object id " + std::to_string(o.id), {o.id});
    if (o.cls.empty()) add(out, ViolationCode::empty_class, "object " + std::to_string(o.id) + " has empty class", {o.id});
    if (!o.cls.empty() && !g.class_known(o.cls))
      add(out, ViolationCode::unknown_class,
          "object " + std::to_string(o.id) + " has class '" + o.cls + "' outside the registry", {o.id});
    if (o.is_agent()) ++agents;
    if (o.is_room() && !o.attrs.empty())
      add(out, ViolationCode::room_has_attributes, "room " + std::to_string(o.id) + " carries attributes", {o.id});
    for (int a = 0; a < kAttrCount; ++a) {
      Attr attr = static_cast<Attr>(a);
      if (o.attrs.has(attr) && !attr_permitted(attr, o.caps))
        add(out, ViolationCode::attr_not_permitted,
            "object " + std::to_string(o.id) + " has attribute '" + attr_name(attr) +
                "' not permitted by its capabilities",
            {o.id});
    }
  }
  if (agents == 0) add(out, ViolationCode::no_agent, "world has no agent");
  if (agents > 1) add(out, ViolationCode::multiple_agents, "world has " + std::to_string(agents) + " agents");

  const ObjectId agent = g.agent();
  std::unordered_map<ObjectId, int> inside_parents, on_parents, in_rooms, held_edges;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const RelationEdge& e = edges[i];
    const ObjectNode* src = g.find(e.src);
    const ObjectNode* dst = g.find(e.dst);
    if (!src || !dst) {
      add(out, ViolationCode::dangling_edge,
          "edge " + std::to_string(e.src) + " -" + relation_name(e.kind) + "-> " + std::to_string(e.dst) +
              " references a missing object",
          {src ? e.dst : e.src});
      continue;
    }
    if (e.src == e.dst) add(out, ViolationCode::self_loop_edge, "self edge on " + std::to_string(e.src), {e.src});
    if (i > 0 && edges[i - 1] == e)
      add(out, ViolationCode::duplicate_edge,
          "duplicate edge " + std::to_string(e.src) + " -" + relation_name(e.kind) + "-> " + std::to_string(e.dst),
          {e.src, e.dst});
    switch (e.kind) {
      case RelationKind::INSIDE:
        ++inside_parents[e.src];
        break;
      case RelationKind::ON:
        ++on_parents[e.src];
        break;
      case RelationKind::IN_ROOM:
        ++in_rooms[e.src];
        if (!dst->is_room())
          add(out, ViolationCode::in_room_target_not_room,
              "IN_ROOM edge from " + std::to_string(e.src) + " targets non-room " + std::to_string(e.dst),
              {e.src, e.dst});
        if (src->is_room())
          add(out, ViolationCode::room_has_in_room, "room " + std::to_string(e.src) + " has an IN_ROOM edge", {e.src});
        break;
      case RelationKind::NEAR:
        if (e.src != agent || agent == kNoObject)
          add(out, ViolationCode::near_src_not_agent,
              "NEAR edge from non-agent " + std::to_string(e.src), {e.src});
        break;
      case RelationKind::HELD_BY:
        ++held_edges[e.src];
        if (e.dst != agent || agent == kNoObject)
          add(out, ViolationCode::held_by_dst_not_agent,
              "HELD_BY edge from " + std::to_string(e.src) + " to non-agent " + std::to_string(e.dst),
              {e.src, e.dst});
        break;
    }
  }

  for (const auto& [id, count] : inside_parents) {
    if (count > 1)
      add(out, ViolationCode::containment_not_forest,
          "object " + std::to_string(id) + " has " + std::to_string(count) + " INSIDE parents", {id});
  }
  for (const auto& [id, count] : on_parents) {
    if (count > 1)
      add(out, ViolationCode::multiple_on_parents,
          "object " + std::to_string(id) + " has " + std::to_string(count) + " ON parents", {id});
  }

  // INSIDE cycles (walk the parent map; multi-parent objects already reported)
  {
    std::unordered_map<ObjectId, ObjectId> parent;
    for (const RelationEdge& e : edges) {
      if (e.kind == RelationKind::INSIDE && g.contains(e.src) && g.contains(e.dst)) parent.emplace(e.src, e.dst);
    }
    std::unordered_map<ObjectId, int> color;  // 0 unvisited, 1 in progress, 2 done
    for (const auto& [start, _] : parent) {
      if (color[start] != 0) continue;
      std::vector<ObjectId> path;
      ObjectId cur = start;
      while (true) {
        color[cur] = 1;
        path.push_back(cur);
        auto it = parent.find(cur);
        if (it == parent.end()) break;
        ObjectId next = it->second;
        if (color[next] == 1) {
          add(out, ViolationCode::containment_not_forest,
              "INSIDE containment cycle through " + std::to_string(next), {next});
          break;
        }
        if (color[next] == 2) break;
        cur = next;
      }
      for (ObjectId v : path) color[v] = 2;
    }
  }

  for (const ObjectNode& o : objects) {
    if (o.is_room()) continue;
    int rooms = in_rooms.count(o.id) ? in_rooms[o.id] : 0;
    if (rooms == 0)
      add(out, ViolationCode::missing_in_room, "object " + std::to_string(o.id) + " has no IN_ROOM edge", {o.id});
    if (rooms > 1)
      add(out, ViolationCode::multiple_in_room,
          "object " + std::to_string(o.id) + " has " + std::to_string(rooms) + " IN_ROOM edges", {o.id});
    bool held_attr = o.attrs.get(Attr::held);
    int held_count = held_edges.count(o.id) ? held_edges[o.id] : 0;
    if (held_attr && held_count != 1)
      add(out, ViolationCode::held_mismatch,
          "object " + std::to_string(o.id) + " is marked held but has " + std::to_string(held_count) +
              " HELD_BY edges",
          {o.id});
    if (!held_attr && held_count > 0)
      add(out, ViolationCode::held_mismatch,
          "object " + std::to_string(o.id) + " has a HELD_BY edge but is not marked held", {o.id});
  }

  return out;
}

StateGraph induced_subgraph(const StateGraph& graph, const std::vector<ObjectId>& keep) {
  std::set<ObjectId> kept(keep.begin(), keep.end());
  for (ObjectId id : kept) {
    if (!graph.contains(id))
      throw UnknownIdError("induced_subgraph: unknown object id " + std::to_string(id));
  }
  std::vector<ObjectNode> objects;
  objects.reserve(kept.size());
  for (const ObjectNode& o : graph.objects()) {
    if (kept.count(o.id)) objects.push_back(o);
  }
  std::vector<RelationEdge> edges;
  for (const RelationEdge& e : graph.edges()) {
    if (kept.count(e.src) && kept.count(e.dst)) edges.push_back(e);
  }
  return StateGraph(std::move(objects), std::move(edges), graph.class_registry());
}

}  // namespace taskscope
