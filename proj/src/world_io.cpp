#include "taskscope/world_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "taskscope/errors.hpp"

namespace taskscope {

using nlohmann::json;

std::string save_world(const StateGraph& graph) {
  json objects = json::array();
  for (const ObjectNode& o : graph.objects()) {
    json attrs = json::object();
    for (int a = 0; a < kAttrCount; ++a) {
      Attr attr = static_cast<Attr>(a);
      if (o.attrs.has(attr)) attrs[attr_name(attr)] = o.attrs.get(attr);
    }
    json caps = json::array();
    for (int c = 0; c < kCapabilityCount; ++c) {
      Capability cap = static_cast<Capability>(c);
      if (o.caps.has(cap)) caps.push_back(capability_name(cap));
    }
    objects.push_back(json{{"attributes", attrs}, {"capabilities", caps}, {"class", o.cls}, {"id", o.id}});
  }
  json edges = json::array();
  for (const RelationEdge& e : graph.edges()) {
    edges.push_back(json{{"dst", e.dst}, {"kind", relation_name(e.kind)}, {"src", e.src}});
  }
  json doc{{"classes", graph.class_registry()}, {"edges", edges}, {"objects", objects}};
  return doc.dump(2) + "\n";
}

StateGraph parse_world(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("world: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("world: top level must be an object");
  if (!doc.contains("objects") || !doc["objects"].is_array())
    throw ParseError("world: missing 'objects' array");
  if (!doc.contains("edges") || !doc["edges"].is_array()) throw ParseError("world: missing 'edges' array");

  std::vector<ObjectNode> objects;
  for (const json& jo : doc["objects"]) {
    if (!jo.is_object()) throw ParseError("world: each object must be a JSON object");
    ObjectNode o;
    if (!jo.contains("id") || !jo["id"].is_number_unsigned() || jo["id"].get<std::uint64_t>() == 0)
      throw ParseError("world: object 'id' must be a positive integer");
    o.id = jo["id"].get<ObjectId>();
    if (!jo.contains("class") || !jo["class"].is_string())
      throw ParseError("world: object " + std::to_string(o.id) + " needs a string 'class'");
    o.cls = jo["class"].get<std::string>();
    if (jo.contains("capabilities")) {
      if (!jo["capabilities"].is_array())
        throw ParseError("world: object " + std::to_string(o.id) + " 'capabilities' must be an array");
      for (const json& jc : jo["capabilities"]) {
        if (!jc.is_string()) throw ParseError("world: capability entries must be strings");
        auto cap = capability_from_name(jc.get<std::string>());
        if (!cap)
          throw ParseError("world: object " + std::to_string(o.id) + " has unknown capability '" +
                           jc.get<std::string>() + "'");
        o.caps.add(*cap);
      }
    }
    if (jo.contains("attributes")) {
      if (!jo["attributes"].is_object())
        throw ParseError("world: object " + std::to_string(o.id) + " 'attributes' must be an object");
      for (auto it = jo["attributes"].begin(); it != jo["attributes"].end(); ++it) {
        auto attr = attr_from_name(it.key());
        if (!attr)
          throw ParseError("world: object " + std::to_string(o.id) + " has unknown attribute '" + it.key() + "'");
        if (!it.value().is_boolean())
          throw ParseError("world: attribute '" + it.key() + "' of object " + std::to_string(o.id) +
                           " must be a boolean");
        o.attrs.set(*attr, it.value().get<bool>());
      }
    }
    objects.push_back(std::move(o));
  }

  std::vector<RelationEdge> edges;
  for (const json& je : doc["edges"]) {
    if (!je.is_object()) throw ParseError("world: each edge must be a JSON object");
    RelationEdge e;
    if (!je.contains("src") || !je["src"].is_number_unsigned())
      throw ParseError("world: edge 'src' must be a positive integer");
    if (!je.contains("dst") || !je["dst"].is_number_unsigned())
      throw ParseError("world: edge 'dst' must be a positive integer");
    e.src = je["src"].get<ObjectId>();
    e.dst = je["dst"].get<ObjectId>();
    if (!je.contains("kind") || !je["kind"].is_string()) throw ParseError("world: edge 'kind' must be a string");
    auto kind = relation_from_name(je["kind"].get<std::string>());
    if (!kind) throw ParseError("world: unknown edge kind '" + je["kind"].get<std::string>() + "'");
    e.kind = *kind;
    edges.push_back(e);
  }

  std::vector<std::string> registry;
  if (doc.contains("classes")) {
    if (!doc["classes"].is_array()) throw ParseError("world: 'classes' must be an array");
    for (const json& jc : doc["classes"]) {
      if (!jc.is_string()) throw ParseError("world: 'classes' entries must be strings");
      registry.push_back(jc.get<std::string>());
    }
  }

  return StateGraph(std::move(objects), std::move(edges), std::move(registry));
}

StateGraph load_world(const std::string& bytes) {
  StateGraph g = parse_world(bytes);
  std::vector<Violation> violations = validate(g);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "world failed validation with " << violations.size() << " violation(s):";
    for (const Violation& v : violations) msg << "\n  [" << violation_code_name(v.code) << "] " << v.message;
    throw ValidationError(msg.str());
  }
  return g;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << contents;
  if (!out) throw Error("write failed: " + path);
}

StateGraph load_world_file(const std::string& path) { return load_world(read_file(path)); }

void save_world_file(const StateGraph& graph, const std::string& path) {
  write_file(path, save_world(graph));
}

}  // namespace taskscope
