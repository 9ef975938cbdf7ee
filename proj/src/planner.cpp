#include "taskscope/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <unordered_map>

#include "taskscope/errors.hpp"
#include "taskscope/rng.hpp"

namespace taskscope {

using nlohmann::json;

const char* plan_status_name(PlanStatus status) {
  switch (status) {
    case PlanStatus::success:
      return "success";
    case PlanStatus::budget_exhausted:
      return "budget_exhausted";
    case PlanStatus::length_exceeded:
      return "length_exceeded";
    case PlanStatus::format_error:
      return "format_error";
  }
  return "unknown";
}

json PlanResult::to_json(bool include_wall) const {
  json actions = json::array();
  for (const GroundAction& a : plan.actions) actions.push_back(json{{"action", a.name}, {"args", a.args}});
  json out{{"success", success()},
           {"status", plan_status_name(status)},
           {"steps", plan.actions.size()},
           {"raw_steps", plan.raw_steps},
           {"plan", actions},
           {"iterations_used", plan.iterations_used}};
  if (include_wall) out["wall_ms"] = wall_ms;
  return out;
}

std::vector<GroundAction> plan_actions_from_json(const json& doc) {
  const json* arr = nullptr;
  if (doc.is_array())
    arr = &doc;
  else if (doc.is_object() && doc.contains("plan") && doc["plan"].is_array())
    arr = &doc["plan"];
  else
    throw ParseError("plan: expected an array of actions or an object with a 'plan' array");
  std::vector<GroundAction> out;
  for (const json& ja : *arr) {
    if (!ja.is_object() || !ja.contains("action") || !ja["action"].is_string() || !ja.contains("args") ||
        !ja["args"].is_array())
      throw ParseError("plan: each entry needs {\"action\": str, \"args\": [ids]}");
    GroundAction a;
    a.name = ja["action"].get<std::string>();
    for (const json& arg : ja["args"]) {
      if (!arg.is_number_unsigned()) throw ParseError("plan: action args must be positive integers");
      a.args.push_back(arg.get<ObjectId>());
    }
    out.push_back(std::move(a));
  }
  return out;
}

bool replay(const StateGraph& s0, const std::vector<GroundAction>& actions, const GoalSpec& goal) {
  StateGraph state = s0;
  for (const GroundAction& a : actions) {
    if (!applicable(state, a)) return false;
    state = apply(state, a);
  }
  return satisfies(state, goal);
}

namespace {

bool replay_compact(const StateGraph& s0, const std::vector<CompactAction>& actions, const GoalSpec& goal) {
  StateGraph state = s0;
  for (const CompactAction& a : actions) {
    if (!applicable(state, a)) return false;
    state = apply(state, a);
  }
  return satisfies(state, goal);
}

// Cut revisited-state cycles, then greedily drop single actions while the
// plan still replays to the goal. The fixpoint has no removable action left.
std::vector<CompactAction> trim_plan(const StateGraph& s0, std::vector<CompactAction> actions,
                                     const GoalSpec& goal) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> seen;
    StateGraph state = s0;
    seen.emplace(state.structural_hash128(), 0);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      state = apply(state, actions[i]);
      auto key = state.structural_hash128();
      auto it = seen.find(key);
      if (it != seen.end()) {
        actions.erase(actions.begin() + static_cast<std::ptrdiff_t>(it->second),
                      actions.begin() + static_cast<std::ptrdiff_t>(i + 1));
        changed = true;
        break;
      }
      seen.emplace(key, i + 1);
    }
  }

  changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      std::vector<CompactAction> candidate = actions;
      candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(i));
      if (replay_compact(s0, candidate, goal)) {
        actions = std::move(candidate);
        changed = true;
        break;
      }
    }
  }
  return actions;
}

struct Node {
  std::int32_t parent = -1;
  CompactAction incoming;
  std::vector<CompactAction> actions;   // afforded here, deterministic order
  std::vector<std::int32_t> child_of;   // parallel to actions, -1 = unexpanded
  std::int32_t expanded = 0;
  std::int32_t visits = 0;
  double value_sum = 0.0;
};

}  // namespace

PlanResult mcts_plan(const StateGraph& s0, const GoalSpec& goal, const MctsConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](PlanResult result) {
    result.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return result;
  };

  PlanResult result;
  if (satisfies(s0, goal)) {
    result.status = PlanStatus::success;
    return finish(result);
  }

  std::vector<Node> nodes;
  nodes.reserve(1024);
  {
    Node root;
    root.actions = affordance_compact(s0);
    root.child_of.assign(root.actions.size(), -1);
    nodes.push_back(std::move(root));
  }

  auto make_plan = [&](std::vector<CompactAction> path, int raw_steps, int iterations_used) {
    Plan plan;
    plan.raw_steps = raw_steps;
    plan.iterations_used = iterations_used;
    std::vector<CompactAction> trimmed = trim_plan(s0, std::move(path), goal);
    for (const CompactAction& a : trimmed) plan.actions.push_back(to_ground(a));
    PlanResult r;
    r.status = PlanStatus::success;
    r.plan = std::move(plan);
    return r;
  };

  for (int iteration = 0; iteration < config.iterations; ++iteration) {
    Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(iteration));
    std::vector<CompactAction> path;
    StateGraph state = s0;
    std::int32_t node_id = 0;

    // selection: descend while fully expanded
    while (true) {
      Node& node = nodes[node_id];
      if (node.actions.empty() || node.expanded < static_cast<std::int32_t>(node.actions.size())) break;
      const double log_visits = std::log(static_cast<double>(std::max(node.visits, 1)));
      double best = -1.0;
      std::int32_t best_child = -1;
      for (std::size_t i = 0; i < node.actions.size(); ++i) {
        const Node& child = nodes[node.child_of[i]];
        const double mean = child.visits > 0 ? child.value_sum / child.visits : 0.0;
        const double uct =
            mean + config.exploration_c * std::sqrt(log_visits / std::max(child.visits, 1));
        if (uct > best) {
          best = uct;
          best_child = node.child_of[i];
        }
      }
      state = apply(state, nodes[best_child].incoming);
      path.push_back(nodes[best_child].incoming);
      node_id = best_child;
      if (satisfies(state, goal))
        return finish(make_plan(std::move(path), static_cast<int>(path.size()), iteration + 1));
    }

    // expansion: one untried action, chosen from this iteration's stream
    if (!nodes[node_id].actions.empty() &&
        nodes[node_id].expanded < static_cast<std::int32_t>(nodes[node_id].actions.size())) {
      std::vector<std::size_t> untried;
      for (std::size_t i = 0; i < nodes[node_id].actions.size(); ++i) {
        if (nodes[node_id].child_of[i] < 0) untried.push_back(i);
      }
      const std::size_t pick = untried[rng.index(untried.size())];
      const CompactAction act = nodes[node_id].actions[pick];

      Node child;
      child.parent = node_id;
      child.incoming = act;
      const std::int32_t child_id = static_cast<std::int32_t>(nodes.size());
      nodes[node_id].child_of[pick] = child_id;
      nodes[node_id].expanded += 1;
      nodes.push_back(std::move(child));

      state = apply(state, act);
      path.push_back(act);
      node_id = child_id;
      if (satisfies(state, goal))
        return finish(make_plan(std::move(path), static_cast<int>(path.size()), iteration + 1));
      Node& fresh = nodes[node_id];
      fresh.actions = affordance_compact(state);
      fresh.child_of.assign(fresh.actions.size(), -1);
    }

    // rollout: uniform random afforded actions to the depth limit
    const std::size_t tree_path_len = path.size();
    for (int depth = 0; depth < config.rollout_depth; ++depth) {
      std::vector<CompactAction> afforded =
          depth == 0 ? nodes[node_id].actions : affordance_compact(state);
      if (afforded.empty()) break;
      const CompactAction act = afforded[rng.index(afforded.size())];
      state = apply(state, act);
      path.push_back(act);
      if (satisfies(state, goal))
        return finish(make_plan(std::move(path), static_cast<int>(path.size()), iteration + 1));
    }

    // backpropagate the shaped reward along the tree path
    double reward = satisfied_fraction(state, goal);
    reward *= std::pow(config.discount, static_cast<double>(path.size() - tree_path_len));
    for (std::int32_t n = node_id; n >= 0; n = nodes[n].parent) {
      nodes[n].visits += 1;
      nodes[n].value_sum += reward;
      reward *= config.discount;
    }
  }

  result.status = PlanStatus::budget_exhausted;
  result.plan.iterations_used = config.iterations;
  return finish(result);
}

std::vector<std::string> render_state_lines(const StateGraph& state) {
  std::vector<std::string> lines;
  auto label = [&](ObjectId id) {
    const ObjectNode* o = state.find(id);
    return (o ? o->cls : std::string("unknown")) + " (" + std::to_string(id) + ")";
  };
  for (const ObjectNode& o : state.objects()) {
    if (o.attrs.empty()) continue;
    std::string attrs;
    auto append = [&](const std::string& word) {
      if (!attrs.empty()) attrs += ", ";
      attrs += word;
    };
    if (o.attrs.has(Attr::open)) append(o.attrs.get(Attr::open) ? "open" : "closed");
    if (o.attrs.has(Attr::on)) append(o.attrs.get(Attr::on) ? "switched on" : "switched off");
    if (o.attrs.has(Attr::held) && o.attrs.get(Attr::held)) append("held");
    if (o.attrs.has(Attr::clean)) append(o.attrs.get(Attr::clean) ? "clean" : "dirty");
    if (!attrs.empty()) lines.push_back(label(o.id) + ": " + attrs);
  }
  for (const RelationEdge& e : state.edges()) {
    const char* phrase = nullptr;
    switch (e.kind) {
      case RelationKind::INSIDE:
        phrase = "is inside the";
        break;
      case RelationKind::ON:
        phrase = "is on the";
        break;
      case RelationKind::NEAR:
        phrase = "is near the";
        break;
      case RelationKind::HELD_BY:
        phrase = "is held by the";
        break;
      case RelationKind::IN_ROOM:
        phrase = "is in the";
        break;
    }
    lines.push_back(label(e.src) + " " + phrase + " " + label(e.dst));
  }
  return lines;
}

PlanResult policy_plan(const StateGraph& s0, const GoalSpec& goal, ActionOracle& oracle,
                       const PolicyConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](PlanResult result) {
    result.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return result;
  };

  PlanResult result;
  const std::string goal_text = render_goal_text(goal, &s0);
  StateGraph state = s0;
  int queries = 0;

  if (satisfies(state, goal)) {
    result.status = PlanStatus::success;
    return finish(result);
  }

  for (int step = 0; step < config.max_length; ++step) {
    std::vector<GroundAction> afforded = affordance(state);
    if (afforded.empty()) {
      result.status = PlanStatus::length_exceeded;
      result.plan.iterations_used = queries;
      return finish(result);
    }
    PolicyQuery query;
    query.goal_text = goal_text;
    query.state_lines = render_state_lines(state);
    for (const GroundAction& a : afforded) query.action_lines.push_back(action_text(a, state));

    // the action is only ever chosen from the afforded menu
    std::optional<int> pick;
    for (int attempt = 0; attempt <= config.retries && !pick; ++attempt) {
      std::string raw = oracle.query_action(query);
      ++queries;
      pick = parse_action_index(raw, afforded.size());
    }
    if (!pick) {
      result.status = PlanStatus::format_error;
      result.plan.iterations_used = queries;
      return finish(result);
    }

    state = apply(state, afforded[static_cast<std::size_t>(*pick)]);
    result.plan.actions.push_back(afforded[static_cast<std::size_t>(*pick)]);
    if (satisfies(state, goal)) {
      result.status = PlanStatus::success;
      result.plan.raw_steps = static_cast<int>(result.plan.actions.size());
      result.plan.iterations_used = queries;
      return finish(result);
    }
  }

  result.status = PlanStatus::length_exceeded;
  result.plan.raw_steps = static_cast<int>(result.plan.actions.size());
  result.plan.iterations_used = queries;
  return finish(result);
}

}  // namespace taskscope
