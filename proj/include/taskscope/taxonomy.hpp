#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "taskscope/world.hpp"

namespace taskscope {

// Category hierarchy over object classes. The synthetic root sits at level 0,
// top categories at level 1, and every class leaf at the same depth L >= 2
// (ragged branches are padded with pass-through categories at build time).
class TaxonomyGraph {
 public:
  static constexpr const char* kRootName = "root";

  struct Node {
    std::string name;
    int level = 0;
    int parent = -1;
    std::vector<int> children;  // sorted by child name
    bool is_class = false;
  };

  // `spec` is a nested JSON object: category -> (object of subcategories |
  // array of class names). Every registry class must appear exactly once.
  // Throws TaxonomyError (missing class, duplicate class/category, reuse of a
  // name along its own ancestor path).
  static TaxonomyGraph build(const nlohmann::json& spec, const std::vector<std::string>& class_registry);

  int depth() const { return depth_; }  // L

  bool has_node(const std::string& name) const;
  int level_of(const std::string& name) const;  // throws TaxonomyError on unknown
  bool is_class_leaf(const std::string& name) const;
  const std::vector<std::string>& class_leaves() const { return leaves_; }  // sorted

  // Nodes at a level, lexicographic.
  std::vector<std::string> level_nodes(int level) const;

  // Children (one level down) of the selected nodes, merged and lexicographic.
  // All names must exist and sit at the same level < L; empty input yields
  // empty output. Throws TaxonomyError on unknown names or level overflow.
  std::vector<std::string> psi(const std::vector<std::string>& selected) const;

  // Category names on the path root -> leaf for a class (levels 1..L-1).
  // Throws TaxonomyError if the class is not a leaf.
  std::vector<std::string> ancestors_of_class(const std::string& cls) const;

 private:
  int find(const std::string& name) const;

  std::vector<Node> nodes_;  // nodes_[0] is the root
  std::vector<std::string> leaves_;
  int depth_ = 0;
};

// All objects whose class is in `classes`, ascending. Unknown classes
// contribute nothing (logged); instances with the room or agent capability
// are skipped (rooms and the agent are never taxonomy leaves).
std::vector<ObjectId> instances_of_classes(const StateGraph& world, const std::vector<std::string>& classes);

TaxonomyGraph load_taxonomy(const std::string& bytes, const std::vector<std::string>& class_registry);
TaxonomyGraph load_taxonomy_file(const std::string& path, const std::vector<std::string>& class_registry);

}  // namespace taskscope
