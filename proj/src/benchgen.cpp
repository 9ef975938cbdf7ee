#include "taskscope/benchgen.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "taskscope/domain.hpp"
#include "taskscope/errors.hpp"
#include "taskscope/rng.hpp"

namespace taskscope {

using nlohmann::json;

namespace {

constexpr const char* kDefaultTaxonomy = R"json({
  "food": {
    "fruits": ["apple", "banana", "orange"],
    "vegetables": ["carrot", "tomato", "potato"],
    "snacks": ["chips", "chocolate", "cereal", "cookie"],
    "drinks": ["beer", "juice", "milk"]
  },
  "kitchenware": {
    "dishes": ["plate", "bowl", "mug", "glass"],
    "cutlery": ["fork", "knife", "spoon"],
    "cookware": ["pan", "pot", "tray"]
  },
  "appliances": {
    "cooling": ["fridge", "freezer"],
    "heating": ["microwave", "oven", "toaster"],
    "washing": ["dishwasher", "washer"]
  },
  "furniture": {
    "tables": ["kitchen_table", "coffee_table", "desk"],
    "seating": ["chair", "sofa"],
    "storage": ["cabinet", "wardrobe", "bookshelf"],
    "beds": ["bed"]
  },
  "electronics": {
    "computing": ["computer", "keyboard", "mouse"],
    "entertainment": ["tv", "console"],
    "communication": ["phone"]
  },
  "lighting": {
    "lamps": ["desk_lamp", "floor_lamp"]
  },
  "textiles": {
    "clothing": ["shirt", "pants", "jacket", "sock"],
    "linens": ["towel", "blanket", "pillow"]
  },
  "household_items": {
    "containers": ["box", "basket", "crate", "jar"],
    "bins": ["trash_bin", "laundry_bin"],
    "decor": ["vase", "candle", "plant"],
    "reading": ["book", "magazine", "newspaper"]
  }
})json";

const std::vector<std::string> kRoomClasses = {"kitchen",  "living_room", "bedroom",
                                               "bathroom", "office",      "hallway"};
constexpr const char* kAgentClass = "robot";

// Class groups (capabilities and generator roles).
const std::vector<std::string> kSurfaceClasses = {"kitchen_table", "coffee_table", "desk",
                                                  "chair",         "sofa",         "bookshelf",
                                                  "bed"};
const std::vector<std::string> kOpenableContainerClasses = {"fridge",     "freezer", "microwave",
                                                            "oven",       "washer",  "dishwasher",
                                                            "cabinet",    "wardrobe"};
const std::vector<std::string> kSmallContainerClasses = {"box", "basket", "crate", "jar"};
const std::vector<std::string> kBinClasses = {"trash_bin", "laundry_bin"};
const std::vector<std::string> kSwitchableOnlyClasses = {"toaster", "computer", "tv",
                                                         "console", "desk_lamp", "floor_lamp"};
const std::vector<std::string> kCleanableClasses = {"plate", "bowl",  "mug",   "glass",  "fork",
                                                    "knife", "spoon", "pan",   "pot",    "tray",
                                                    "shirt", "pants", "jacket", "sock",  "towel",
                                                    "blanket", "pillow"};
// High-multiplicity scale objects; never sampled as task arguments.
const std::vector<std::string> kFillerClasses = {"cookie", "sock",     "book", "magazine",
                                                 "newspaper", "candle", "vase", "plant"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

json default_taxonomy_spec() { return json::parse(kDefaultTaxonomy); }

const std::vector<std::string>& benchmark_class_registry() {
  static const std::vector<std::string> registry = [] {
    TaxonomyGraph t = TaxonomyGraph::build(default_taxonomy_spec(), {});
    return t.class_leaves();
  }();
  return registry;
}

const TaxonomyGraph& default_taxonomy() {
  static const TaxonomyGraph taxonomy =
      TaxonomyGraph::build(default_taxonomy_spec(), benchmark_class_registry());
  return taxonomy;
}

const std::vector<std::string>& benchmark_room_classes() { return kRoomClasses; }

CapabilitySet benchmark_class_caps(const std::string& cls) {
  if (contains(kRoomClasses, cls)) return caps_of({Capability::room});
  if (cls == kAgentClass) return caps_of({Capability::agent});
  if (contains(kSurfaceClasses, cls)) return caps_of({Capability::surface});
  if (contains(kOpenableContainerClasses, cls)) {
    if (cls == "microwave" || cls == "oven" || cls == "washer" || cls == "dishwasher")
      return caps_of({Capability::openable, Capability::container, Capability::switchable});
    return caps_of({Capability::openable, Capability::container});
  }
  if (contains(kSmallContainerClasses, cls)) {
    if (cls == "box" || cls == "jar") return caps_of({Capability::openable, Capability::container});
    return caps_of({Capability::container});
  }
  if (contains(kBinClasses, cls)) return caps_of({Capability::container});
  if (contains(kSwitchableOnlyClasses, cls)) return caps_of({Capability::switchable});
  if (cls == "phone") return caps_of({Capability::grabbable, Capability::switchable});
  // everything else is a movable object
  return caps_of({Capability::grabbable});
}

namespace {

struct WorldBuilder {
  std::vector<ObjectNode> objects;
  std::vector<RelationEdge> edges;
  std::unordered_map<ObjectId, ObjectId> placement;  // child -> parent (ON or INSIDE)
  std::unordered_map<ObjectId, int> depth;           // ancestors count
  std::unordered_map<ObjectId, ObjectId> room_of;
  ObjectId next_id = 1;

  ObjectId add_object(const std::string& cls, CapabilitySet caps, Rng& rng, bool randomize_state) {
    ObjectNode o;
    o.id = next_id++;
    o.cls = cls;
    o.caps = caps;
    if (caps.has(Capability::openable)) o.attrs.set(Attr::open, randomize_state && rng.chance(0.15));
    if (caps.has(Capability::switchable)) o.attrs.set(Attr::on, randomize_state && rng.chance(0.15));
    if (caps.has(Capability::grabbable)) {
      o.attrs.set(Attr::held, false);
      if (contains(kCleanableClasses, cls)) o.attrs.set(Attr::clean, rng.chance(0.5));
    }
    objects.push_back(o);
    return o.id;
  }

  void place_in_room(ObjectId id, ObjectId room) {
    edges.push_back(RelationEdge{id, room, RelationKind::IN_ROOM});
    room_of[id] = room;
  }

  void place_on(ObjectId id, ObjectId surface) {
    edges.push_back(RelationEdge{id, surface, RelationKind::ON});
    placement[id] = surface;
    depth[id] = depth[surface] + 1;
    place_in_room(id, room_of[surface]);
  }

  void place_inside(ObjectId id, ObjectId container) {
    edges.push_back(RelationEdge{id, container, RelationKind::INSIDE});
    placement[id] = container;
    depth[id] = depth[container] + 1;
    place_in_room(id, room_of[container]);
  }
};

StateGraph finish_world(WorldBuilder& b) {
  std::vector<std::string> registry = benchmark_class_registry();
  for (const std::string& r : kRoomClasses) registry.push_back(r);
  registry.push_back(kAgentClass);
  return StateGraph(std::move(b.objects), std::move(b.edges), std::move(registry));
}

StateGraph generate_blockered_world(const WorldSpec& spec) {
  Rng rng = Rng::stream(spec.seed, 0x77);
  WorldBuilder b;

  const int n_rooms = std::min(spec.n_rooms, 2);
  std::vector<ObjectId> rooms;
  for (int i = 0; i < n_rooms; ++i) {
    ObjectId id = b.add_object(kRoomClasses[i % kRoomClasses.size()],
                               caps_of({Capability::room}), rng, false);
    rooms.push_back(id);
  }
  ObjectId agent = b.add_object(kAgentClass, caps_of({Capability::agent}), rng, false);
  b.place_in_room(agent, rng.pick(rooms));

  int budget = std::max(spec.n_objects, n_rooms + 4) - n_rooms - 1;

  // one surface, a closed container stack, a switchable device, then movables
  std::vector<ObjectId> surfaces, containers;
  auto add_top = [&](const std::string& cls) {
    ObjectId id = b.add_object(cls, benchmark_class_caps(cls), rng, false);
    b.place_in_room(id, rng.pick(rooms));
    --budget;
    return id;
  };

  surfaces.push_back(add_top(rng.chance(0.5) ? "kitchen_table" : "desk"));
  const std::vector<std::string> blockers = {"fridge", "cabinet", "box", "microwave"};
  ObjectId outer = add_top(rng.pick(blockers));
  containers.push_back(outer);
  if (budget > 3 && rng.chance(0.35)) {
    // nested closed blocker: box inside the outer container
    ObjectId inner = b.add_object("box", benchmark_class_caps("box"), rng, false);
    b.place_inside(inner, outer);
    containers.push_back(inner);
    --budget;
  }
  if (budget > 3 && rng.chance(0.5)) add_top(rng.pick(kSwitchableOnlyClasses));
  if (budget > 3 && rng.chance(0.4)) {
    // an open, empty openable so close-goals stay available
    ObjectId id = add_top(rng.chance(0.5) ? "wardrobe" : "jar");
    b.objects.back().attrs.set(Attr::open, true);
    (void)id;
  }

  const std::vector<std::string> movables = {"apple",  "banana", "mug",  "plate",
                                             "towel",  "phone",  "beer", "tomato"};
  std::vector<std::string> pool = movables;
  rng.shuffle(pool);
  std::size_t next_movable = 0;
  while (budget > 0) {
    const std::string cls = pool[next_movable++ % pool.size()];
    ObjectId id = b.add_object(cls, benchmark_class_caps(cls), rng, false);
    --budget;
    // behind a closed blocker or loose in a room; never on a surface
    if (rng.chance(0.6)) {
      b.place_inside(id, rng.pick(containers));
    } else {
      b.place_in_room(id, rng.pick(rooms));
    }
  }
  return finish_world(b);
}

StateGraph generate_natural_world(const WorldSpec& spec) {
  Rng rng = Rng::stream(spec.seed, 0x99);
  WorldBuilder b;

  std::vector<ObjectId> rooms;
  for (int i = 0; i < spec.n_rooms; ++i) {
    ObjectId id = b.add_object(kRoomClasses[i % kRoomClasses.size()],
                               caps_of({Capability::room}), rng, false);
    rooms.push_back(id);
  }
  ObjectId agent = b.add_object(kAgentClass, caps_of({Capability::agent}), rng, false);
  b.place_in_room(agent, rng.pick(rooms));

  std::vector<ObjectId> surfaces;
  std::vector<ObjectId> containers;  // anything objects can be stored inside
  std::vector<ObjectId> big_containers;

  auto add_top_level = [&](const std::string& cls, ObjectId room) {
    ObjectId id = b.add_object(cls, benchmark_class_caps(cls), rng, true);
    b.place_in_room(id, room);
    return id;
  };

  // furniture and appliances: one instance mostly, occasionally two
  for (const std::string& cls : kSurfaceClasses) {
    const int count = 1 + (rng.chance(0.35) ? 1 : 0);
    for (int i = 0; i < count; ++i) surfaces.push_back(add_top_level(cls, rng.pick(rooms)));
  }
  for (const std::string& cls : kOpenableContainerClasses) {
    const int count = 1 + (rng.chance(0.2) ? 1 : 0);
    for (int i = 0; i < count; ++i) {
      ObjectId id = add_top_level(cls, rng.pick(rooms));
      containers.push_back(id);
      big_containers.push_back(id);
    }
  }
  for (const std::string& cls : kBinClasses) {
    ObjectId id = add_top_level(cls, rng.pick(rooms));
    containers.push_back(id);
    big_containers.push_back(id);
  }
  for (const std::string& cls : kSwitchableOnlyClasses) {
    const int count = 1 + (rng.chance(0.2) ? 1 : 0);
    for (int i = 0; i < count; ++i) add_top_level(cls, rng.pick(rooms));
  }

  // small containers may sit on surfaces or inside big containers
  for (const std::string& cls : kSmallContainerClasses) {
    const int count = 1 + (rng.chance(0.3) ? 1 : 0);
    for (int i = 0; i < count; ++i) {
      ObjectId id = b.add_object(cls, benchmark_class_caps(cls), rng, true);
      const double roll = rng.uniform();
      if (roll < 0.4 && !surfaces.empty()) {
        b.place_on(id, rng.pick(surfaces));
      } else if (roll < 0.65 && !big_containers.empty()) {
        b.place_inside(id, rng.pick(big_containers));
      } else {
        b.place_in_room(id, rng.pick(rooms));
      }
      if (b.depth[id] < spec.max_depth - 1) containers.push_back(id);
    }
  }

  // movable objects: task-eligible classes at low multiplicity, filler to scale
  std::vector<std::string> eligible;
  for (const std::string& cls : benchmark_class_registry()) {
    if (!benchmark_class_caps(cls).has(Capability::grabbable)) continue;
    if (contains(kFillerClasses, cls)) continue;
    eligible.push_back(cls);
  }

  auto place_movable = [&](const std::string& cls) {
    ObjectId id = b.add_object(cls, benchmark_class_caps(cls), rng, true);
    const double roll = rng.uniform();
    if (roll < 0.55 && !surfaces.empty()) {
      b.place_on(id, rng.pick(surfaces));
    } else if (roll < 0.80 && !containers.empty()) {
      // respect the depth cap when nesting
      for (int attempt = 0; attempt < 8; ++attempt) {
        ObjectId c = rng.pick(containers);
        if (b.depth[c] < spec.max_depth) {
          b.place_inside(id, c);
          return;
        }
      }
      b.place_in_room(id, rng.pick(rooms));
    } else {
      b.place_in_room(id, rng.pick(rooms));
    }
  };

  for (const std::string& cls : eligible) {
    const int count = 1 + (rng.chance(0.25) ? 1 : 0);
    for (int i = 0; i < count; ++i) place_movable(cls);
  }
  while (static_cast<int>(b.objects.size()) < spec.n_objects) place_movable(rng.pick(kFillerClasses));

  return finish_world(b);
}

}  // namespace

StateGraph generate_world(const WorldSpec& spec) {
  if (spec.n_objects <= kBlockerWorldSize) return generate_blockered_world(spec);
  return generate_natural_world(spec);
}

namespace {

std::vector<ObjectId> instances_with_cap(const StateGraph& world, Capability cap) {
  std::vector<ObjectId> out;
  for (const ObjectNode& o : world.objects()) {
    if (o.caps.has(cap) && !o.is_room() && !o.is_agent()) out.push_back(o.id);
  }
  return out;
}

}  // namespace

std::pair<TaskSpec, GoalSpec> compose_task(const StateGraph& world, std::uint64_t seed, int n) {
  if (n < 1 || n > 5) throw InfeasibleError("compose_task: n must be in 1..5");
  Rng rng = Rng::stream(seed, 0x7a51c0);

  std::vector<ObjectId> pickables;
  for (const ObjectNode& o : world.objects()) {
    if (!o.caps.has(Capability::grabbable)) continue;
    if (contains(kFillerClasses, o.cls)) continue;
    pickables.push_back(o.id);
  }
  std::vector<ObjectId> surfaces = instances_with_cap(world, Capability::surface);
  std::vector<ObjectId> containers = instances_with_cap(world, Capability::container);
  std::vector<ObjectId> openables = instances_with_cap(world, Capability::openable);
  std::vector<ObjectId> switchables = instances_with_cap(world, Capability::switchable);

  TaskSpec task;
  task.seed = seed;
  task.n = n;
  GoalSpec goal;
  std::set<ObjectId> used;

  auto unused = [&](ObjectId id) { return used.count(id) == 0; };

  int attempts = 0;
  while (static_cast<int>(task.subtasks.size()) < n) {
    if (++attempts > 1000)
      throw InfeasibleError("compose_task: could not find " + std::to_string(n) + " disjoint subgoals");

    const double roll = rng.uniform();
    Subtask st;
    GoalCondition cond;
    if (roll < 0.35 && !pickables.empty() && !surfaces.empty()) {
      st.kind = Subtask::Kind::put_on;
      st.obj = rng.pick(pickables);
      st.dst = rng.pick(surfaces);
      if (!unused(st.obj) || !unused(st.dst) || st.obj == st.dst) continue;
      cond = GoalCondition::relation(ObjectRef::by_id(st.obj), ObjectRef::by_id(st.dst),
                                     RelationKind::ON, true);
    } else if (roll < 0.60 && !pickables.empty() && !containers.empty()) {
      st.kind = Subtask::Kind::put_inside;
      st.obj = rng.pick(pickables);
      st.dst = rng.pick(containers);
      if (!unused(st.obj) || !unused(st.dst) || st.obj == st.dst) continue;
      cond = GoalCondition::relation(ObjectRef::by_id(st.obj), ObjectRef::by_id(st.dst),
                                     RelationKind::INSIDE, true);
    } else if (roll < 0.70 && !openables.empty()) {
      st.kind = Subtask::Kind::open;
      st.obj = rng.pick(openables);
      if (!unused(st.obj)) continue;
      cond = GoalCondition::attr_is(ObjectRef::by_id(st.obj), Attr::open, true);
    } else if (roll < 0.80 && !openables.empty()) {
      st.kind = Subtask::Kind::close;
      st.obj = rng.pick(openables);
      if (!unused(st.obj)) continue;
      cond = GoalCondition::attr_is(ObjectRef::by_id(st.obj), Attr::open, false);
    } else if (roll < 0.90 && !switchables.empty()) {
      st.kind = Subtask::Kind::switch_on;
      st.obj = rng.pick(switchables);
      if (!unused(st.obj)) continue;
      cond = GoalCondition::attr_is(ObjectRef::by_id(st.obj), Attr::on, true);
    } else if (!switchables.empty()) {
      st.kind = Subtask::Kind::switch_off;
      st.obj = rng.pick(switchables);
      if (!unused(st.obj)) continue;
      cond = GoalCondition::attr_is(ObjectRef::by_id(st.obj), Attr::on, false);
    } else {
      continue;
    }

    // every sampled subgoal must be unsatisfied in the initial state
    if (condition_holds(world, cond)) continue;

    used.insert(st.obj);
    if (st.dst != kNoObject) used.insert(st.dst);
    task.subtasks.push_back(st);
    goal.conditions.push_back(cond);
  }

  return {task, goal};
}

GroundTruth ground_truth_necessary(const StateGraph& world, const GoalSpec& goal) {
  GroundTruth gt;
  auto add_with_ancestors = [&](ObjectId id) {
    ObjectId cur = id;
    int hops = 0;
    while (cur != kNoObject && hops < 64) {
      const ObjectNode* o = world.find(cur);
      if (!o || o->is_room() || o->is_agent()) break;
      gt.necessary.insert(cur);
      auto parent = world.placement_parent(cur);
      cur = parent ? *parent : kNoObject;
      ++hops;
    }
  };
  for (ObjectId id : referenced_objects(world, goal)) add_with_ancestors(id);
  return gt;
}

namespace {

using StateKey = std::pair<std::uint64_t, std::uint64_t>;

struct BfsResult {
  std::vector<CompactAction> plan;
};

BfsResult bfs_shortest_plan(const StateGraph& world, const GoalSpec& goal, std::size_t state_cap) {
  if (satisfies(world, goal)) return {};

  std::map<StateKey, std::pair<StateKey, CompactAction>> parent;
  std::deque<std::pair<StateKey, StateGraph>> frontier;
  const StateKey root = world.structural_hash128();
  parent.emplace(root, std::make_pair(root, CompactAction{}));
  frontier.emplace_back(root, world);

  while (!frontier.empty()) {
    auto [key, state] = std::move(frontier.front());
    frontier.pop_front();
    for (const CompactAction& act : affordance_compact(state)) {
      StateGraph next = apply(state, act);
      const StateKey next_key = next.structural_hash128();
      if (parent.count(next_key)) continue;
      parent.emplace(next_key, std::make_pair(key, act));
      if (satisfies(next, goal)) {
        std::vector<CompactAction> plan;
        StateKey cur = next_key;
        while (cur != root) {
          const auto& [prev, action] = parent.at(cur);
          plan.push_back(action);
          cur = prev;
        }
        std::reverse(plan.begin(), plan.end());
        return {std::move(plan)};
      }
      if (parent.size() > state_cap)
        throw UnsolvableError("brute force search exceeded the state cap");
      frontier.emplace_back(next_key, std::move(next));
    }
  }
  throw UnsolvableError("brute force search exhausted the state space without reaching the goal");
}

}  // namespace

std::vector<GroundAction> brute_force_plan(const StateGraph& world, const GoalSpec& goal,
                                           std::size_t state_cap) {
  std::vector<GroundAction> out;
  for (const CompactAction& a : bfs_shortest_plan(world, goal, state_cap).plan) out.push_back(to_ground(a));
  return out;
}

std::set<ObjectId> brute_force_necessary(const StateGraph& world, const GoalSpec& goal,
                                         std::size_t state_cap) {
  std::set<ObjectId> out;
  for (const CompactAction& a : bfs_shortest_plan(world, goal, state_cap).plan) {
    const GroundAction g = to_ground(a);
    for (ObjectId id : g.args) {
      const ObjectNode* o = world.find(id);
      if (o && !o->is_room() && !o->is_agent()) out.insert(id);
    }
  }
  return out;
}

}  // namespace taskscope
