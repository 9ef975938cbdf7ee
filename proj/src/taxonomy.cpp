#include "taskscope/taxonomy.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "taskscope/errors.hpp"
#include "taskscope/log.hpp"
#include "taskscope/world_io.hpp"

namespace taskscope {

using nlohmann::json;

namespace {

struct Builder {
  std::vector<TaxonomyGraph::Node> nodes;
  std::set<std::string> category_names;
  std::map<std::string, int> class_positions;

  int add_node(std::string name, int level, int parent, bool is_class) {
    TaxonomyGraph::Node n;
    n.name = std::move(name);
    n.level = level;
    n.parent = parent;
    n.is_class = is_class;
    nodes.push_back(std::move(n));
    int idx = static_cast<int>(nodes.size()) - 1;
    if (parent >= 0) nodes[parent].children.push_back(idx);
    return idx;
  }

  void walk(const json& spec, int parent, int level, std::set<std::string>& path) {
    if (!spec.is_object() || spec.empty())
      throw TaxonomyError("taxonomy: category contents must be a non-empty object or class array");
    for (auto it = spec.begin(); it != spec.end(); ++it) {
      const std::string& name = it.key();
      if (name == TaxonomyGraph::kRootName)
        throw TaxonomyError("taxonomy: '" + name + "' is reserved for the synthetic root");
      if (path.count(name))
        throw TaxonomyError("taxonomy: cycle detected, category '" + name + "' nested under itself");
      if (category_names.count(name))
        throw TaxonomyError("taxonomy: duplicate category '" + name + "'");
      category_names.insert(name);
      int idx = add_node(name, level, parent, false);
      const json& body = it.value();
      if (body.is_array()) {
        if (body.empty()) throw TaxonomyError("taxonomy: category '" + name + "' has no classes");
        for (const json& jc : body) {
          if (!jc.is_string()) throw TaxonomyError("taxonomy: class entries must be strings");
          const std::string cls = jc.get<std::string>();
          if (class_positions.count(cls))
            throw TaxonomyError("taxonomy: duplicate class '" + cls + "'");
          if (category_names.count(cls))
            throw TaxonomyError("taxonomy: '" + cls + "' used as both category and class");
          class_positions[cls] = add_node(cls, level + 1, idx, true);
        }
      } else {
        path.insert(name);
        walk(body, idx, level + 1, path);
        path.erase(name);
      }
    }
  }
};

}  // namespace

TaxonomyGraph TaxonomyGraph::build(const json& spec, const std::vector<std::string>& class_registry) {
  Builder b;
  b.add_node(kRootName, 0, -1, false);
  std::set<std::string> path;
  b.walk(spec, 0, 1, path);

  for (const std::string& cls : class_registry) {
    if (!b.class_positions.count(cls))
      throw TaxonomyError("taxonomy: registry class '" + cls + "' is missing from the spec");
  }

  // Pad ragged branches with pass-through categories so every class leaf sits
  // at the same depth.
  int max_depth = 0;
  for (const Node& n : b.nodes) {
    if (n.is_class) max_depth = std::max(max_depth, n.level);
  }
  if (max_depth < 2) throw TaxonomyError("taxonomy: depth must be at least 2 (root -> category -> class)");
  for (std::size_t i = 0; i < b.nodes.size(); ++i) {
    if (!b.nodes[i].is_class || b.nodes[i].level == max_depth) continue;
    int parent = b.nodes[i].parent;
    int level = b.nodes[i].level;
    // splice pass-through categories between parent and the leaf
    while (level < max_depth) {
      std::string pad_name = b.nodes[i].name + "_pad" + std::to_string(level);
      while (b.category_names.count(pad_name) || b.class_positions.count(pad_name)) pad_name += "x";
      b.category_names.insert(pad_name);
      auto& siblings = b.nodes[parent].children;
      siblings.erase(std::remove(siblings.begin(), siblings.end(), static_cast<int>(i)), siblings.end());
      parent = b.add_node(pad_name, level, parent, false);
      ++level;
    }
    b.nodes[i].parent = parent;
    b.nodes[i].level = max_depth;
    b.nodes[parent].children.push_back(static_cast<int>(i));
  }

  TaxonomyGraph t;
  t.nodes_ = std::move(b.nodes);
  t.depth_ = max_depth;
  for (Node& n : t.nodes_) {
    std::sort(n.children.begin(), n.children.end(),
              [&](int a, int c) { return t.nodes_[a].name < t.nodes_[c].name; });
    if (n.is_class) t.leaves_.push_back(n.name);
  }
  std::sort(t.leaves_.begin(), t.leaves_.end());
  return t;
}

int TaxonomyGraph::find(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

bool TaxonomyGraph::has_node(const std::string& name) const { return find(name) >= 0; }

int TaxonomyGraph::level_of(const std::string& name) const {
  int idx = find(name);
  if (idx < 0) throw TaxonomyError("taxonomy: unknown node '" + name + "'");
  return nodes_[idx].level;
}

bool TaxonomyGraph::is_class_leaf(const std::string& name) const {
  int idx = find(name);
  return idx >= 0 && nodes_[idx].is_class;
}

std::vector<std::string> TaxonomyGraph::level_nodes(int level) const {
  std::vector<std::string> out;
  for (const Node& n : nodes_) {
    if (n.level == level) out.push_back(n.name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> TaxonomyGraph::psi(const std::vector<std::string>& selected) const {
  if (selected.empty()) return {};
  int level = -1;
  std::vector<std::string> out;
  for (const std::string& name : selected) {
    int idx = find(name);
    if (idx < 0) throw TaxonomyError("psi: unknown node '" + name + "'");
    const Node& n = nodes_[idx];
    if (level < 0) level = n.level;
    if (n.level != level)
      throw TaxonomyError("psi: selected nodes span levels " + std::to_string(level) + " and " +
                          std::to_string(n.level));
    if (n.level >= depth_) throw TaxonomyError("psi: level overflow, '" + name + "' is already a leaf");
    for (int child : n.children) out.push_back(nodes_[child].name);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> TaxonomyGraph::ancestors_of_class(const std::string& cls) const {
  int idx = find(cls);
  if (idx < 0 || !nodes_[idx].is_class)
    throw TaxonomyError("taxonomy: '" + cls + "' is not a class leaf");
  std::vector<std::string> out;
  for (int p = nodes_[idx].parent; p > 0; p = nodes_[p].parent) out.push_back(nodes_[p].name);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<ObjectId> instances_of_classes(const StateGraph& world, const std::vector<std::string>& classes) {
  std::vector<ObjectId> out;
  for (const std::string& cls : classes) {
    if (!world.class_known(cls)) {
      log_warn("instances_of_classes: class '" + cls + "' is not in the world registry, skipped");
      continue;
    }
    bool skipped_special = false;
    for (ObjectId id : world.instances_of(cls)) {
      const ObjectNode* o = world.find(id);
      if (o->is_room() || o->is_agent()) {
        skipped_special = true;
        continue;
      }
      out.push_back(id);
    }
    if (skipped_special)
      log_warn("instances_of_classes: class '" + cls + "' names rooms or the agent, those are retained by rule");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TaxonomyGraph load_taxonomy(const std::string& bytes, const std::vector<std::string>& class_registry) {
  json spec;
  try {
    spec = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("taxonomy: ") + e.what());
  }
  return TaxonomyGraph::build(spec, class_registry);
}

TaxonomyGraph load_taxonomy_file(const std::string& path, const std::vector<std::string>& class_registry) {
  return load_taxonomy(read_file(path), class_registry);
}

}  // namespace taskscope
