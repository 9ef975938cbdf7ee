#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace taskscope {

// Ids are positive, unique within a world, and never reused after removal.
using ObjectId = std::uint32_t;
inline constexpr ObjectId kNoObject = 0;

enum class Attr : std::uint8_t { open = 0, on = 1, held = 2, clean = 3 };
inline constexpr int kAttrCount = 4;

const char* attr_name(Attr a);
std::optional<Attr> attr_from_name(const std::string& name);

// Boolean flags from a fixed schema. `open` encodes the open/closed pair as
// one bit; a flag may be absent, which is distinct from being false.
struct AttributeSet {
  std::uint8_t present = 0;
  std::uint8_t values = 0;

  bool has(Attr a) const { return (present >> static_cast<int>(a)) & 1; }
  bool get(Attr a) const { return has(a) && ((values >> static_cast<int>(a)) & 1); }
  void set(Attr a, bool v) {
    present |= std::uint8_t(1u << static_cast<int>(a));
    if (v)
      values |= std::uint8_t(1u << static_cast<int>(a));
    else
      values &= std::uint8_t(~(1u << static_cast<int>(a)));
  }
  void erase(Attr a) {
    present &= std::uint8_t(~(1u << static_cast<int>(a)));
    values &= std::uint8_t(~(1u << static_cast<int>(a)));
  }
  bool empty() const { return present == 0; }
  bool operator==(const AttributeSet&) const = default;
};

enum class Capability : std::uint8_t {
  openable = 0,
  switchable = 1,
  grabbable = 2,
  surface = 3,
  container = 4,
  room = 5,
  agent = 6,
};
inline constexpr int kCapabilityCount = 7;

const char* capability_name(Capability c);
std::optional<Capability> capability_from_name(const std::string& name);

struct CapabilitySet {
  std::uint8_t bits = 0;

  bool has(Capability c) const { return (bits >> static_cast<int>(c)) & 1; }
  CapabilitySet& add(Capability c) {
    bits |= std::uint8_t(1u << static_cast<int>(c));
    return *this;
  }
  bool empty() const { return bits == 0; }
  bool operator==(const CapabilitySet&) const = default;
};

CapabilitySet caps_of(std::initializer_list<Capability> caps);

// Which attribute flags an object's capabilities permit. `clean` rides on
// grabbable since the fixed capability set has no dedicated cleanable bit.
bool attr_permitted(Attr a, CapabilitySet caps);

struct ObjectNode {
  ObjectId id = kNoObject;
  std::string cls;  // lowercase snake_case class name
  CapabilitySet caps;
  AttributeSet attrs;

  bool is_room() const { return caps.has(Capability::room); }
  bool is_agent() const { return caps.has(Capability::agent); }
  bool operator==(const ObjectNode&) const = default;
};

enum class RelationKind : std::uint8_t {
  INSIDE = 0,
  ON = 1,
  NEAR = 2,
  HELD_BY = 3,
  IN_ROOM = 4,
};
inline constexpr int kRelationKindCount = 5;

const char* relation_name(RelationKind k);
std::optional<RelationKind> relation_from_name(const std::string& name);

struct RelationEdge {
  ObjectId src = kNoObject;
  ObjectId dst = kNoObject;
  RelationKind kind = RelationKind::INSIDE;

  bool operator==(const RelationEdge&) const = default;
  bool operator<(const RelationEdge& o) const {
    if (src != o.src) return src < o.src;
    if (dst != o.dst) return dst < o.dst;
    return kind < o.kind;
  }
};

enum class ViolationCode {
  duplicate_object_id,
  invalid_object_id,
  empty_class,
  unknown_class,
  attr_not_permitted,
  room_has_attributes,
  no_agent,
  multiple_agents,
  dangling_edge,
  self_loop_edge,
  duplicate_edge,
  containment_not_forest,
  multiple_on_parents,
  missing_in_room,
  multiple_in_room,
  in_room_target_not_room,
  room_has_in_room,
  near_src_not_agent,
  held_by_dst_not_agent,
  held_mismatch,
};

const char* violation_code_name(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string message;
  std::vector<ObjectId> ids;
};

// Immutable value type; construction canonicalizes (objects sorted by id,
// edges sorted) and indexes the graph. Arbitrary — including invalid — edge
// sets are representable so that validate() can report what is wrong.
class StateGraph {
 public:
  StateGraph() = default;
  StateGraph(std::vector<ObjectNode> objects, std::vector<RelationEdge> edges,
             std::vector<std::string> class_registry = {});

  const std::vector<ObjectNode>& objects() const { return objects_; }
  const std::vector<RelationEdge>& edges() const { return edges_; }
  // Known classes: the explicit registry if one was supplied, otherwise the
  // classes present in the graph. Always sorted and deduplicated.
  const std::vector<std::string>& class_registry() const { return registry_; }
  bool has_explicit_registry() const { return explicit_registry_; }

  std::size_t size() const { return objects_.size(); }
  const ObjectNode* find(ObjectId id) const;
  bool contains(ObjectId id) const { return find(id) != nullptr; }
  bool class_known(const std::string& cls) const;

  std::vector<ObjectId> ids() const;
  std::vector<ObjectId> instances_of(const std::string& cls) const;  // ascending

  // Index accessors. Meaningful on valid graphs; on invalid ones they see the
  // first matching edge encountered.
  ObjectId agent() const { return agent_; }
  std::optional<ObjectId> inside_parent(ObjectId id) const;
  std::optional<ObjectId> on_parent(ObjectId id) const;
  // The ON or INSIDE parent, whichever the object has (at most one on valid graphs).
  std::optional<ObjectId> placement_parent(ObjectId id) const;
  std::optional<ObjectId> room_of(ObjectId id) const;
  const std::vector<ObjectId>& agent_near() const { return agent_near_; }  // ascending
  bool near(ObjectId id) const;
  ObjectId held_object() const { return held_; }  // object held by the agent, or kNoObject
  bool has_edge(ObjectId src, ObjectId dst, RelationKind kind) const;

  bool operator==(const StateGraph& other) const {
    return objects_ == other.objects_ && edges_ == other.edges_ && registry_ == other.registry_;
  }

  std::uint64_t structural_hash() const;
  std::pair<std::uint64_t, std::uint64_t> structural_hash128() const;

 private:
  int index_of(ObjectId id) const;
  void build_index();

  std::vector<ObjectNode> objects_;
  std::vector<RelationEdge> edges_;
  std::vector<std::string> registry_;
  bool explicit_registry_ = false;

  // derived
  std::vector<std::int32_t> inside_parent_;
  std::vector<std::int32_t> on_parent_;
  std::vector<std::int32_t> room_;
  std::vector<ObjectId> agent_near_;
  ObjectId agent_ = kNoObject;
  ObjectId held_ = kNoObject;
};

// Empty result iff all StateGraph invariants hold; violations are data, not errors.
std::vector<Violation> validate(const StateGraph& graph);

// Exactly the kept objects plus every edge with both endpoints kept. The
// class registry is carried over unchanged. Throws UnknownIdError if `keep`
// names a missing object.
StateGraph induced_subgraph(const StateGraph& graph, const std::vector<ObjectId>& keep);

}  // namespace taskscope
