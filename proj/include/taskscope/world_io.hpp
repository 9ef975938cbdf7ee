#pragma once

#include <string>

#include "taskscope/world.hpp"

namespace taskscope {

// World JSON:
//   {"objects":[{"id":int,"class":str,"capabilities":[str],"attributes":{str:bool}}],
//    "edges":[{"src":int,"dst":int,"kind":str}],
//    "classes":[str]}            // optional explicit class registry
// Serialization is canonical: fixed key order, objects by id, edges sorted,
// so identical graphs produce identical bytes.
std::string save_world(const StateGraph& graph);

// Parses and validates. Throws ParseError on malformed JSON/fields and
// ValidationError (listing violations) when the graph breaks invariants.
StateGraph load_world(const std::string& bytes);

// Parse without the validation gate; used by tooling that wants to inspect
// broken worlds.
StateGraph parse_world(const std::string& bytes);

StateGraph load_world_file(const std::string& path);
void save_world_file(const StateGraph& graph, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace taskscope
