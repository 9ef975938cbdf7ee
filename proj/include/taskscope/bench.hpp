#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "taskscope/benchgen.hpp"
#include "taskscope/oracle.hpp"
#include "taskscope/planner.hpp"
#include "taskscope/reduction.hpp"

namespace taskscope {

enum class BenchOracleKind { ground_truth, noisy, remote };

// Experiment matrix: worlds x N x tasks_per_n cells, reduced with the
// configured oracle and optionally planned with MCTS on the reduced graph.
// format_error_rate injects persistently-malformed oracle replies for that
// share of tasks (seeded per task), exercising the format-error failure
// channel.
struct BenchMatrix {
  std::vector<std::uint64_t> world_seeds = {1, 2, 3, 4, 5, 6};
  std::vector<int> n_values = {1, 2, 3, 4, 5};
  int tasks_per_n = 30;
  WorldSpec world;

  BenchOracleKind oracle = BenchOracleKind::ground_truth;
  double p_drop = 0.0;
  double p_add = 0.0;
  std::uint64_t oracle_seed = 0;
  double format_error_rate = 0.0;
  std::uint64_t format_seed = 0;
  int max_relational_iters = 3;

  bool run_mcts = false;
  MctsConfig mcts;

  int jobs = 1;

  static BenchMatrix from_json(const nlohmann::json& doc);  // throws ParseError
  nlohmann::json to_json() const;
};

struct BenchRow {
  std::uint64_t world_seed = 0;
  int n = 1;
  int task_index = 0;
  std::uint64_t task_seed = 0;
  int objects_total = 0;   // |O|: objects excluding rooms and the agent
  int necessary = 0;       // |O_g|
  int selected = 0;        // |O-bar|: kept excluding rooms and the agent
  int kept_total = 0;      // kept including mandatory retentions
  ReductionOutcome outcome = ReductionOutcome::success;
  bool planner_ran = false;
  bool planner_success = false;
  int steps = 0;
  int raw_steps = 0;
  int iterations_used = 0;
  std::int64_t plan_wall_ms = 0;

  nlohmann::json to_json() const;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // ordered by (world_seed, n, task_index)

  nlohmann::json aggregate() const;
  std::string table_text() const;
  std::string to_jsonl() const;
};

// Runs every cell; per-task errors become failure rows, never abort the
// matrix. Cells run on `jobs` workers; row order is independent of scheduling.
BenchReport run_bench(const BenchMatrix& matrix);

}  // namespace taskscope
