#include "taskscope/reduction.hpp"

#include <algorithm>

#include "taskscope/errors.hpp"
#include "taskscope/log.hpp"
#include "taskscope/rng.hpp"

namespace taskscope {

using nlohmann::json;

FrontierGraph phi(const StateGraph& world, const std::set<ObjectId>& selected) {
  FrontierGraph out;
  std::set<ObjectId> frontier;
  for (const RelationEdge& e : world.edges()) {
    if (e.kind == RelationKind::IN_ROOM) continue;
    const bool src_in = selected.count(e.src) > 0;
    const bool dst_in = selected.count(e.dst) > 0;
    if (src_in == dst_in) continue;
    frontier.insert(src_in ? e.dst : e.src);
    out.edges.push_back(e);
  }
  out.objects.assign(frontier.begin(), frontier.end());
  return out;
}

std::pair<std::set<ObjectId>, std::vector<LevelSelectionRecord>> select_taxonomy(
    const TaxonomyGraph& taxonomy, const StateGraph& world, const GoalSpec& goal, RelevanceOracle& oracle) {
  std::vector<LevelSelectionRecord> records;
  const std::string goal_text = render_goal_text(goal, &world);

  std::vector<std::string> selected{TaxonomyGraph::kRootName};
  for (int level = 1; level <= taxonomy.depth(); ++level) {
    TaxonomyQuery query;
    query.level = level;
    query.max_level = taxonomy.depth();
    query.candidates = taxonomy.psi(selected);
    query.goal_text = goal_text;
    if (query.candidates.empty()) break;

    TaxonomyReply reply = oracle.query_taxonomy(query);

    LevelSelectionRecord rec;
    rec.level = level;
    rec.candidates = query.candidates;
    rec.raw = reply.raw;
    rec.retries = reply.retries;
    rec.prompt_hash = fnv1a64(render_taxonomy_prompt(query));
    for (const std::string& name : reply.selected) {
      if (std::binary_search(query.candidates.begin(), query.candidates.end(), name))
        rec.selected.push_back(name);
      else
        rec.dropped.push_back(name);
    }
    std::sort(rec.selected.begin(), rec.selected.end());
    for (const std::string& name : rec.dropped)
      log_info("select_taxonomy: dropped out-of-candidate name '" + name + "' at level " +
               std::to_string(level));
    records.push_back(rec);
    selected = rec.selected;
    if (selected.empty()) return {{}, std::move(records)};
  }

  std::vector<ObjectId> ids = instances_of_classes(world, selected);
  return {std::set<ObjectId>(ids.begin(), ids.end()), std::move(records)};
}

namespace {

std::string object_label(const StateGraph& world, ObjectId id) {
  const ObjectNode* o = world.find(id);
  return (o ? o->cls : std::string("unknown")) + " (" + std::to_string(id) + ")";
}

const char* relation_phrase(RelationKind kind) {
  switch (kind) {
    case RelationKind::INSIDE:
      return "inside";
    case RelationKind::ON:
      return "on";
    case RelationKind::NEAR:
      return "near";
    case RelationKind::HELD_BY:
      return "held by";
    case RelationKind::IN_ROOM:
      return "in";
  }
  return "related to";
}

std::string relation_sentence(const StateGraph& world, const RelationEdge& e) {
  return object_label(world, e.src) + " is " + relation_phrase(e.kind) + " the " +
         object_label(world, e.dst);
}

}  // namespace

std::pair<std::set<ObjectId>, std::vector<RelationalIterationRecord>> select_relational(
    const StateGraph& world, const std::set<ObjectId>& seed, const GoalSpec& goal, RelevanceOracle& oracle,
    int max_iters) {
  if (seed.empty()) throw Error("select_relational: seed must be nonempty");
  std::vector<RelationalIterationRecord> records;
  const std::string goal_text = render_goal_text(goal, &world);

  std::set<ObjectId> accumulated = seed;
  for (int iteration = 0; iteration < max_iters; ++iteration) {
    FrontierGraph frontier = phi(world, accumulated);
    if (frontier.objects.empty()) break;

    RelationalQuery query;
    query.goal_text = goal_text;
    for (ObjectId id : accumulated) query.selected_summary.push_back(object_label(world, id));
    query.frontier_ids = frontier.objects;
    // one sentence per crossing edge, ordered by (frontier object, kind, peer)
    std::vector<RelationEdge> ordered = frontier.edges;
    std::sort(ordered.begin(), ordered.end(), [&](const RelationEdge& a, const RelationEdge& b) {
      ObjectId fa = accumulated.count(a.src) ? a.dst : a.src;
      ObjectId fb = accumulated.count(b.src) ? b.dst : b.src;
      if (fa != fb) return fa < fb;
      if (a.kind != b.kind) return a.kind < b.kind;
      return a < b;
    });
    for (const RelationEdge& e : ordered) query.frontier_lines.push_back(relation_sentence(world, e));

    RelationalReply reply = oracle.query_relational(query);

    RelationalIterationRecord rec;
    rec.iteration = iteration;
    rec.frontier_size = frontier.objects.size();
    rec.raw = reply.raw;
    rec.retries = reply.retries;
    rec.prompt_hash = fnv1a64(render_relational_prompt(query));
    for (ObjectId id : reply.selected) {
      if (std::binary_search(frontier.objects.begin(), frontier.objects.end(), id))
        rec.selected.push_back(id);
      else
        rec.dropped.push_back(id);
    }
    std::sort(rec.selected.begin(), rec.selected.end());
    for (ObjectId id : rec.dropped)
      log_info("select_relational: dropped out-of-frontier id " + std::to_string(id) + " at iteration " +
               std::to_string(iteration));
    records.push_back(rec);
    if (rec.selected.empty()) break;
    accumulated.insert(rec.selected.begin(), rec.selected.end());
  }

  std::set<ObjectId> added;
  for (ObjectId id : accumulated) {
    if (!seed.count(id)) added.insert(id);
  }
  return {std::move(added), std::move(records)};
}

const char* reduction_outcome_name(ReductionOutcome outcome) {
  switch (outcome) {
    case ReductionOutcome::success:
      return "success";
    case ReductionOutcome::objects_missing:
      return "objects_missing";
    case ReductionOutcome::format_error:
      return "format_error";
  }
  return "unknown";
}

json ReductionTrace::to_json() const {
  json levels_json = json::array();
  for (const LevelSelectionRecord& r : levels) {
    levels_json.push_back(json{{"level", r.level},
                               {"candidates", r.candidates},
                               {"selected", r.selected},
                               {"dropped", r.dropped},
                               {"raw", r.raw},
                               {"retries", r.retries},
                               {"prompt_hash", r.prompt_hash}});
  }
  json iters_json = json::array();
  for (const RelationalIterationRecord& r : iterations) {
    iters_json.push_back(json{{"iteration", r.iteration},
                              {"frontier_size", r.frontier_size},
                              {"selected", r.selected},
                              {"dropped", r.dropped},
                              {"raw", r.raw},
                              {"retries", r.retries},
                              {"prompt_hash", r.prompt_hash}});
  }
  return json{{"levels", levels_json},
              {"iterations", iters_json},
              {"outcome", reduction_outcome_name(outcome)},
              {"taxonomy_early_stop", taxonomy_early_stop},
              {"error", error}};
}

ReductionResult reduce(const StateGraph& world, const TaxonomyGraph& taxonomy, const GoalSpec& goal,
                       RelevanceOracle& oracle, const ReduceConfig& config) {
  ReductionResult result;
  ReductionTrace& trace = result.trace;

  std::set<ObjectId> selection;
  bool format_error = false;
  try {
    auto [seed, level_records] = select_taxonomy(taxonomy, world, goal, oracle);
    trace.levels = std::move(level_records);
    trace.taxonomy_early_stop =
        !trace.levels.empty() && trace.levels.back().selected.empty();
    selection = seed;
    if (!seed.empty()) {
      auto [added, iter_records] =
          select_relational(world, seed, goal, oracle, config.max_relational_iters);
      trace.iterations = std::move(iter_records);
      selection.insert(added.begin(), added.end());
    }
  } catch (const OracleFormatError& e) {
    format_error = true;
    trace.error = e.what();
  }

  if (format_error) {
    trace.outcome = ReductionOutcome::format_error;
  } else if (selection.empty()) {
    throw EmptySelectionError("reduction selected no objects beyond the mandatory retentions");
  } else if (config.ground_truth) {
    trace.outcome = std::includes(selection.begin(), selection.end(), config.ground_truth->begin(),
                                  config.ground_truth->end())
                        ? ReductionOutcome::success
                        : ReductionOutcome::objects_missing;
  } else {
    trace.outcome = ReductionOutcome::success;
  }

  // Mandatory retentions: the agent, and the room of every kept object.
  // Retained by rule, not oracle-selected; navigation preconditions need them.
  std::set<ObjectId> kept = selection;
  if (world.agent() != kNoObject) kept.insert(world.agent());
  std::set<ObjectId> rooms;
  for (ObjectId id : kept) {
    if (auto room = world.room_of(id)) rooms.insert(*room);
  }
  kept.insert(rooms.begin(), rooms.end());

  result.state.kept.assign(kept.begin(), kept.end());
  result.state.graph = induced_subgraph(world, result.state.kept);
  return result;
}

}  // namespace taskscope
