#include "taskscope/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "taskscope/errors.hpp"
#include "taskscope/log.hpp"
#include "taskscope/rng.hpp"

namespace taskscope {

using nlohmann::json;

namespace {

BenchOracleKind oracle_kind_from_name(const std::string& name) {
  if (name == "ground-truth" || name == "ground_truth") return BenchOracleKind::ground_truth;
  if (name == "noisy") return BenchOracleKind::noisy;
  if (name == "remote") return BenchOracleKind::remote;
  throw ParseError("bench matrix: unknown oracle kind '" + name + "'");
}

const char* oracle_kind_name(BenchOracleKind kind) {
  switch (kind) {
    case BenchOracleKind::ground_truth:
      return "ground-truth";
    case BenchOracleKind::noisy:
      return "noisy";
    case BenchOracleKind::remote:
      return "remote";
  }
  return "unknown";
}

}  // namespace

BenchMatrix BenchMatrix::from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("bench matrix: top level must be an object");
  BenchMatrix m;
  try {
    if (doc.contains("world_seeds")) m.world_seeds = doc["world_seeds"].get<std::vector<std::uint64_t>>();
    if (doc.contains("n_values")) m.n_values = doc["n_values"].get<std::vector<int>>();
    if (doc.contains("tasks_per_n")) m.tasks_per_n = doc["tasks_per_n"].get<int>();
    if (doc.contains("world")) {
      const json& w = doc["world"];
      if (w.contains("n_rooms")) m.world.n_rooms = w["n_rooms"].get<int>();
      if (w.contains("n_objects")) m.world.n_objects = w["n_objects"].get<int>();
      if (w.contains("max_depth")) m.world.max_depth = w["max_depth"].get<int>();
    }
    if (doc.contains("oracle")) m.oracle = oracle_kind_from_name(doc["oracle"].get<std::string>());
    if (doc.contains("p_drop")) m.p_drop = doc["p_drop"].get<double>();
    if (doc.contains("p_add")) m.p_add = doc["p_add"].get<double>();
    if (doc.contains("oracle_seed")) m.oracle_seed = doc["oracle_seed"].get<std::uint64_t>();
    if (doc.contains("format_error_rate")) m.format_error_rate = doc["format_error_rate"].get<double>();
    if (doc.contains("format_seed")) m.format_seed = doc["format_seed"].get<std::uint64_t>();
    if (doc.contains("max_relational_iters"))
      m.max_relational_iters = doc["max_relational_iters"].get<int>();
    if (doc.contains("run_mcts")) m.run_mcts = doc["run_mcts"].get<bool>();
    if (doc.contains("mcts")) {
      const json& c = doc["mcts"];
      if (c.contains("iterations")) m.mcts.iterations = c["iterations"].get<int>();
      if (c.contains("rollout_depth")) m.mcts.rollout_depth = c["rollout_depth"].get<int>();
      if (c.contains("exploration_c")) m.mcts.exploration_c = c["exploration_c"].get<double>();
      if (c.contains("discount")) m.mcts.discount = c["discount"].get<double>();
      if (c.contains("seed")) m.mcts.seed = c["seed"].get<std::uint64_t>();
    }
    if (doc.contains("jobs")) m.jobs = doc["jobs"].get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bench matrix: ") + e.what());
  }
  if (m.world_seeds.empty() || m.n_values.empty() || m.tasks_per_n < 1)
    throw ParseError("bench matrix: needs world_seeds, n_values and tasks_per_n >= 1");
  for (int n : m.n_values) {
    if (n < 1 || n > 5) throw ParseError("bench matrix: n_values must lie in 1..5");
  }
  if (m.p_drop < 0 || m.p_drop > 1 || m.p_add < 0 || m.p_add > 1 ||
      m.format_error_rate < 0 || m.format_error_rate > 1)
    throw ParseError("bench matrix: probabilities must lie in [0, 1]");
  if (m.jobs < 1) throw ParseError("bench matrix: jobs must be >= 1");
  return m;
}

json BenchMatrix::to_json() const {
  return json{{"world_seeds", world_seeds},
              {"n_values", n_values},
              {"tasks_per_n", tasks_per_n},
              {"world", json{{"n_rooms", world.n_rooms},
                             {"n_objects", world.n_objects},
                             {"max_depth", world.max_depth}}},
              {"oracle", oracle_kind_name(oracle)},
              {"p_drop", p_drop},
              {"p_add", p_add},
              {"oracle_seed", oracle_seed},
              {"format_error_rate", format_error_rate},
              {"format_seed", format_seed},
              {"max_relational_iters", max_relational_iters},
              {"run_mcts", run_mcts},
              {"mcts", json{{"iterations", mcts.iterations},
                            {"rollout_depth", mcts.rollout_depth},
                            {"exploration_c", mcts.exploration_c},
                            {"discount", mcts.discount},
                            {"seed", mcts.seed}}},
              {"jobs", jobs}};
}

json BenchRow::to_json() const {
  return json{{"world_seed", world_seed},
              {"n", n},
              {"task_index", task_index},
              {"task_seed", task_seed},
              {"objects_total", objects_total},
              {"necessary", necessary},
              {"selected", selected},
              {"kept_total", kept_total},
              {"outcome", reduction_outcome_name(outcome)},
              {"planner_ran", planner_ran},
              {"planner_success", planner_success},
              {"steps", steps},
              {"raw_steps", raw_steps},
              {"iterations_used", iterations_used},
              {"plan_wall_ms", plan_wall_ms}};
}

namespace {

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  double var = 0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0.0;
  return s;
}

json stats_json(const Stats& s) {
  return json{{"mean", s.mean}, {"std", s.stddev}, {"count", s.count}};
}

json aggregate_rows(const std::vector<const BenchRow*>& rows) {
  int success = 0, missing = 0, format = 0;
  std::vector<double> o, og, obar, steps, raw_steps;
  int planner_ran = 0, planner_success = 0;
  for (const BenchRow* r : rows) {
    switch (r->outcome) {
      case ReductionOutcome::success:
        ++success;
        break;
      case ReductionOutcome::objects_missing:
        ++missing;
        break;
      case ReductionOutcome::format_error:
        ++format;
        break;
    }
    o.push_back(r->objects_total);
    og.push_back(r->necessary);
    if (r->outcome == ReductionOutcome::success) obar.push_back(r->selected);
    if (r->planner_ran) ++planner_ran;
    if (r->planner_success) {
      ++planner_success;
      steps.push_back(r->steps);
      raw_steps.push_back(r->raw_steps);
    }
  }
  const double total = static_cast<double>(rows.size());
  json out{{"tasks", rows.size()},
           {"reduction", json{{"success", success},
                              {"objects_missing", missing},
                              {"format_error", format},
                              {"success_rate", total > 0 ? success / total : 0.0},
                              {"objects_missing_rate", total > 0 ? missing / total : 0.0},
                              {"format_error_rate", total > 0 ? format / total : 0.0}}},
           {"objects_total", stats_json(stats_of(o))},
           {"necessary", stats_json(stats_of(og))},
           {"selected", stats_json(stats_of(obar))}};
  if (planner_ran > 0) {
    out["planner"] = json{
        {"ran", planner_ran},
        {"success", planner_success},
        // success over tasks whose reduction succeeded (planning-only view)
        {"success_rate", planner_ran > 0 ? static_cast<double>(planner_success) / planner_ran : 0.0},
        // success over all tasks (overall view: reduction failures count)
        {"overall_success_rate", total > 0 ? planner_success / total : 0.0},
        {"steps", stats_json(stats_of(steps))},
        {"raw_steps", stats_json(stats_of(raw_steps))}};
  }
  return out;
}

}  // namespace

json BenchReport::aggregate() const {
  std::map<int, std::vector<const BenchRow*>> by_n;
  std::vector<const BenchRow*> all;
  for (const BenchRow& r : rows) {
    by_n[r.n].push_back(&r);
    all.push_back(&r);
  }
  json per_n = json::array();
  for (const auto& [n, group] : by_n) {
    json entry = aggregate_rows(group);
    entry["n"] = n;
    per_n.push_back(entry);
  }
  return json{{"per_n", per_n}, {"pooled", aggregate_rows(all)}};
}

std::string BenchReport::to_jsonl() const {
  std::string out;
  for (const BenchRow& r : rows) out += r.to_json().dump() + "\n";
  return out;
}

std::string BenchReport::table_text() const {
  const json agg = aggregate();
  std::ostringstream os;
  os << std::fixed;
  os << std::setw(2) << "N" << std::setw(10) << "|O|" << std::setw(8) << "std" << std::setw(10)
     << "|O_g|" << std::setw(8) << "std" << std::setw(10) << "|O-bar|" << std::setw(8) << "std"
     << std::setw(9) << "succ" << std::setw(9) << "miss" << std::setw(9) << "fmt";
  bool any_planner = false;
  for (const json& entry : agg["per_n"]) {
    if (entry.contains("planner")) any_planner = true;
  }
  if (any_planner) os << std::setw(11) << "mcts succ" << std::setw(9) << "steps";
  os << "\n";
  for (const json& entry : agg["per_n"]) {
    os << std::setw(2) << entry["n"].get<int>() << std::setprecision(2) << std::setw(10)
       << entry["objects_total"]["mean"].get<double>() << std::setw(8)
       << entry["objects_total"]["std"].get<double>() << std::setw(10)
       << entry["necessary"]["mean"].get<double>() << std::setw(8)
       << entry["necessary"]["std"].get<double>() << std::setw(10)
       << entry["selected"]["mean"].get<double>() << std::setw(8)
       << entry["selected"]["std"].get<double>() << std::setprecision(3) << std::setw(9)
       << entry["reduction"]["success_rate"].get<double>() << std::setw(9)
       << entry["reduction"]["objects_missing_rate"].get<double>() << std::setw(9)
       << entry["reduction"]["format_error_rate"].get<double>();
    if (entry.contains("planner")) {
      os << std::setw(11) << entry["planner"]["success_rate"].get<double>() << std::setprecision(1)
         << std::setw(9) << entry["planner"]["steps"]["mean"].get<double>();
    } else if (any_planner) {
      os << std::setw(11) << "-" << std::setw(9) << "-";
    }
    os << "\n";
  }
  return os.str();
}

namespace {

struct BenchCell {
  std::uint64_t world_seed;
  int n;
  int task_index;
};

int count_interactable(const StateGraph& world) {
  int count = 0;
  for (const ObjectNode& o : world.objects()) {
    if (!o.is_room() && !o.is_agent()) ++count;
  }
  return count;
}

BenchRow run_cell(const BenchMatrix& matrix, const StateGraph& world, const BenchCell& cell) {
  BenchRow row;
  row.world_seed = cell.world_seed;
  row.n = cell.n;
  row.task_index = cell.task_index;
  row.task_seed = fnv1a64(&cell, sizeof(cell), 0x5eedull);
  row.objects_total = count_interactable(world);

  auto [task, goal] = compose_task(world, row.task_seed, cell.n);
  (void)task;
  const GroundTruth gt = ground_truth_necessary(world, goal);
  row.necessary = static_cast<int>(gt.necessary.size());

  GroundTruthOracle gt_oracle(world, default_taxonomy(), gt.necessary);
  NoisyOracle noisy_oracle(gt_oracle, matrix.oracle_seed, matrix.p_drop, matrix.p_add);
  MalformedOracle malformed_oracle;

  RelevanceOracle* oracle = &gt_oracle;
  std::unique_ptr<RemoteOracle> remote;
  if (matrix.oracle == BenchOracleKind::noisy) oracle = &noisy_oracle;
  if (matrix.oracle == BenchOracleKind::remote) {
    remote = std::make_unique<RemoteOracle>(OracleConfig::from_env());
    oracle = remote.get();
  }
  if (matrix.format_error_rate > 0.0) {
    Rng format_rng = Rng::stream(matrix.format_seed, row.task_seed);
    if (format_rng.chance(matrix.format_error_rate)) oracle = &malformed_oracle;
  }

  ReduceConfig cfg;
  cfg.max_relational_iters = matrix.max_relational_iters;
  cfg.ground_truth = gt.necessary;

  ReductionResult reduction;
  bool have_reduction = false;
  try {
    reduction = reduce(world, default_taxonomy(), goal, *oracle, cfg);
    have_reduction = true;
    row.outcome = reduction.trace.outcome;
  } catch (const EmptySelectionError&) {
    row.outcome = ReductionOutcome::objects_missing;
  }

  if (have_reduction) {
    row.kept_total = static_cast<int>(reduction.state.kept.size());
    row.selected = count_interactable(reduction.state.graph);
  }

  // the paper's accounting: a failed reduction fails the planner automatically
  if (matrix.run_mcts && have_reduction && row.outcome == ReductionOutcome::success) {
    row.planner_ran = true;
    MctsConfig mcts_cfg = matrix.mcts;
    mcts_cfg.seed = Rng::stream(matrix.mcts.seed, row.task_seed).next();
    PlanResult plan = mcts_plan(reduction.state.graph, goal, mcts_cfg);
    row.planner_success = plan.success();
    row.steps = static_cast<int>(plan.plan.actions.size());
    row.raw_steps = plan.plan.raw_steps;
    row.iterations_used = plan.plan.iterations_used;
    row.plan_wall_ms = plan.wall_ms;
  }
  return row;
}

}  // namespace

BenchReport run_bench(const BenchMatrix& matrix) {
  // worlds are immutable and shared across cells
  std::map<std::uint64_t, StateGraph> worlds;
  for (std::uint64_t seed : matrix.world_seeds) {
    WorldSpec spec = matrix.world;
    spec.seed = seed;
    worlds.emplace(seed, generate_world(spec));
  }

  std::vector<BenchCell> cells;
  for (std::uint64_t seed : matrix.world_seeds) {
    for (int n : matrix.n_values) {
      for (int t = 0; t < matrix.tasks_per_n; ++t) cells.push_back(BenchCell{seed, n, t});
    }
  }

  BenchReport report;
  report.rows.resize(cells.size());
  std::atomic<std::size_t> next{0};
  const int jobs = std::max(1, matrix.jobs);

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const BenchCell& cell = cells[i];
      try {
        report.rows[i] = run_cell(matrix, worlds.at(cell.world_seed), cell);
      } catch (const std::exception& e) {
        // per-task errors are recorded as failures, never abort the matrix
        log_warn("bench cell (world " + std::to_string(cell.world_seed) + ", n " +
                 std::to_string(cell.n) + ", task " + std::to_string(cell.task_index) +
                 ") failed: " + e.what());
        BenchRow& row = report.rows[i];
        row.world_seed = cell.world_seed;
        row.n = cell.n;
        row.task_index = cell.task_index;
        row.outcome = ReductionOutcome::objects_missing;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return report;
}

}  // namespace taskscope
