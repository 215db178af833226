// Multi-start experiment harness: runs every algorithm once at every seeded
// start point, collects per-run accounting rows, and renders/aggregates the
// results as CSV.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "trigger_descent/framework.hpp"
#include "trigger_descent/problems.hpp"

namespace trigger_descent {

enum class Algorithm { Novel, GdArmijo, GdWolfe };

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);
std::vector<Algorithm> all_algorithms();

// How start points are drawn for an experiment.
enum class StartKind {
  Standard,           // the problem's standard start, every trial
  FiellerUniform,     // scalar start uniform in [0,1]
  WedderburnUniform,  // coords 0 and 10 pinned to 0, rest uniform in [-1,1]
};

std::vector<Vector> generate_starts(StartKind kind, const Problem& problem,
                                    int trials, std::uint64_t seed);

struct ResultRow {
  std::string problem;
  Algorithm algorithm = Algorithm::Novel;
  int trial = 0;
  RunStatus status = RunStatus::Failed;
  long long objective_evals = 0;
  long long gradient_evals = 0;
  long long inner_oracle_evals = 0;
  long long total_evals = 0;  // objective_evals + gradient_evals
  double wall_time_s = 0.0;
  double terminal_grad_norm = 0.0;
  Vector terminal_point;      // kept in memory, not a CSV column
  std::string category = "n/a";
};

struct ExperimentSpec {
  std::vector<Problem> problems;
  std::vector<Algorithm> algorithms = all_algorithms();
  StartKind start_kind = StartKind::Standard;
  int trials = 1;
  std::uint64_t seed = 1;
  double eps = 1e-5;
  long long max_outer = 20000;
  // When set, 1-D terminal points are categorized against these intervals.
  bool categorize = false;
  std::pair<double, double> minimizer_interval{4.9, 5.0};
  std::pair<double, double> maximizer_interval{-0.21, -0.2};

  void validate() const;  // throws std::invalid_argument
};

struct ExperimentResult {
  std::vector<ResultRow> rows;   // sorted by (problem, algorithm, trial)
  std::uint64_t starts_hash = 0;  // FNV-1a over the raw bytes of all starts
};

// Positive when ours used fewer evaluations; the 1 guards zero-count runs.
double relative_change(long long e_ours, long long e_other);

std::string categorize_terminal(const Vector& terminal, RunStatus status,
                                std::pair<double, double> min_interval,
                                std::pair<double, double> max_interval);

// Runs |problems| x |algorithms| x trials; every algorithm sees the identical
// start list. Individual run failures become rows with status Failed.
// Honors TRIGGER_DESCENT_THREADS (unset or 1 => sequential).
ExperimentResult run_experiment(const ExperimentSpec& spec);

RunResult run_algorithm(Algorithm a, const Problem& problem,
                        const Vector& start, double eps, long long max_outer);

inline constexpr const char* kCsvHeader =
    "problem,algorithm,trial,status,objective_evals,gradient_evals,"
    "inner_oracle_evals,total_evals,wall_time_s,terminal_grad_norm,category";

void write_csv(const ExperimentResult& result, std::ostream& out);
void write_csv_file(const ExperimentResult& result, const std::string& path);

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Aggregates a result CSV into `section,problem,algorithm,metric,value`
// rows: per-algorithm eval/time quartiles, per-problem relative changes
// versus the novel method, and terminal-category counts.
std::string summarize(std::istream& csv_in);
std::string summarize_file(const std::string& path);

}  // namespace trigger_descent
