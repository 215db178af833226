#include "trigger_descent/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "trigger_descent/baselines.hpp"
#include "trigger_descent/lipschitz_step.hpp"
#include "trigger_descent/rng.hpp"
#include "trigger_descent/util.hpp"

namespace trigger_descent {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Novel:
      return "novel";
    case Algorithm::GdArmijo:
      return "gd_armijo";
    case Algorithm::GdWolfe:
      return "gd_wolfe";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  if (name == "novel") return Algorithm::Novel;
  if (name == "gd_armijo") return Algorithm::GdArmijo;
  if (name == "gd_wolfe") return Algorithm::GdWolfe;
  return std::nullopt;
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::Novel, Algorithm::GdArmijo, Algorithm::GdWolfe};
}

std::vector<Vector> generate_starts(StartKind kind, const Problem& problem,
                                    int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::vector<Vector> starts;
  starts.reserve(trials);
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    switch (kind) {
      case StartKind::Standard:
        starts.push_back(problem.standard_start);
        break;
      case StartKind::FiellerUniform:
        starts.push_back({rng.uniform(0.0, 1.0)});
        break;
      case StartKind::WedderburnUniform: {
        Vector x(problem.dimension);
        for (int i = 0; i < problem.dimension; ++i) {
          if (i == 0 || i == 10)
            x[i] = 0.0;  // pinned; no RNG draw consumed
          else
            x[i] = rng.uniform(-1.0, 1.0);
        }
        starts.push_back(std::move(x));
        break;
      }
    }
  }
  return starts;
}

double relative_change(long long e_ours, long long e_other) {
  const long long denom = std::max({e_ours, e_other, 1LL});
  return static_cast<double>(e_other - e_ours) / static_cast<double>(denom);
}

std::string categorize_terminal(const Vector& terminal, RunStatus status,
                                std::pair<double, double> min_interval,
                                std::pair<double, double> max_interval) {
  if (is_successful(status) && terminal.size() == 1) {
    const double t = terminal[0];
    if (t >= min_interval.first && t <= min_interval.second)
      return "minimizer";
    if (t >= max_interval.first && t <= max_interval.second)
      return "maximizer";
  }
  return "neither";
}

void ExperimentSpec::validate() const {
  if (problems.empty()) throw std::invalid_argument("no problems selected");
  if (algorithms.empty())
    throw std::invalid_argument("no algorithms selected");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (max_outer < 0) throw std::invalid_argument("max_outer must be >= 0");
}

RunResult run_algorithm(Algorithm a, const Problem& problem,
                        const Vector& start, double eps,
                        long long max_outer) {
  switch (a) {
    case Algorithm::Novel:
      return solve_novel(problem, start, eps, max_outer);
    case Algorithm::GdArmijo:
      return gd_armijo(problem, start, LineSearchConfig{}, eps, max_outer);
    case Algorithm::GdWolfe:
      return gd_wolfe(problem, start, LineSearchConfig{}, eps, max_outer);
  }
  throw std::invalid_argument("unknown algorithm");
}

namespace {

int thread_budget() {
  const char* env = std::getenv("TRIGGER_DESCENT_THREADS");
  if (!env || !*env) return 1;
  const int n = std::atoi(env);
  return n > 1 ? n : 1;
}

struct Task {
  std::size_t problem;
  std::size_t algorithm;
  int trial;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;

  std::vector<std::vector<Vector>> starts;
  starts.reserve(spec.problems.size());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& p : spec.problems) {
    starts.push_back(generate_starts(spec.start_kind, p, spec.trials,
                                     spec.seed));
    for (const auto& s : starts.back())
      hash = fnv1a(s.data(), s.size() * sizeof(double), hash);
  }
  result.starts_hash = hash;

  std::vector<Task> tasks;
  tasks.reserve(spec.problems.size() * spec.algorithms.size() * spec.trials);
  for (std::size_t p = 0; p < spec.problems.size(); ++p)
    for (std::size_t a = 0; a < spec.algorithms.size(); ++a)
      for (int t = 0; t < spec.trials; ++t) tasks.push_back({p, a, t});

  result.rows.resize(tasks.size());
  const auto run_task = [&](std::size_t i) {
    const Task& task = tasks[i];
    const Problem& problem = spec.problems[task.problem];
    const Algorithm algo = spec.algorithms[task.algorithm];
    const RunResult r = run_algorithm(algo, problem,
                                      starts[task.problem][task.trial],
                                      spec.eps, spec.max_outer);
    ResultRow& row = result.rows[i];
    row.problem = problem.name;
    row.algorithm = algo;
    row.trial = task.trial;
    row.status = r.status;
    row.objective_evals = r.counters.objective_evals;
    row.gradient_evals = r.counters.gradient_evals;
    row.inner_oracle_evals = r.counters.inner_oracle_evals;
    row.total_evals = r.counters.objective_evals + r.counters.gradient_evals;
    row.wall_time_s = r.wall_time_s;
    row.terminal_grad_norm = r.terminal_grad_norm;
    row.terminal_point = r.terminal_point;
    row.category = spec.categorize
                       ? categorize_terminal(r.terminal_point, r.status,
                                             spec.minimizer_interval,
                                             spec.maximizer_interval)
                       : "n/a";
  };

  const int threads =
      std::min<int>(thread_budget(), static_cast<int>(tasks.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size();
             i = next.fetch_add(1))
          run_task(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::sort(result.rows.begin(), result.rows.end(),
            [](const ResultRow& a, const ResultRow& b) {
              if (a.problem != b.problem) return a.problem < b.problem;
              const std::string an = algorithm_name(a.algorithm);
              const std::string bn = algorithm_name(b.algorithm);
              if (an != bn) return an < bn;
              return a.trial < b.trial;
            });
  return result;
}

void write_csv(const ExperimentResult& result, std::ostream& out) {
  out << "# starts_hash=" << to_hex(result.starts_hash) << '\n';
  out << kCsvHeader << '\n';
  for (const auto& r : result.rows) {
    out << r.problem << ',' << algorithm_name(r.algorithm) << ',' << r.trial
        << ',' << to_string(r.status) << ',' << r.objective_evals << ','
        << r.gradient_evals << ',' << r.inner_oracle_evals << ','
        << r.total_evals << ',' << format_fixed(r.wall_time_s, 6) << ','
        << format_double(r.terminal_grad_norm) << ',' << r.category << '\n';
  }
}

void write_csv_file(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(result, out);
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

namespace {

struct ParsedRow {
  std::string problem;
  std::string algorithm;
  int trial = 0;
  std::string status;
  long long objective_evals = 0;
  long long gradient_evals = 0;
  long long total_evals = 0;
  double wall_time_s = 0.0;
  std::string category;
  bool successful = false;
};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Tukey-style hinges via the exclusive halves.
std::pair<double, double> quartiles_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 1) return {v[0], v[0]};
  const std::vector<double> lower(v.begin(), v.begin() + n / 2);
  const std::vector<double> upper(v.begin() + (n + 1) / 2, v.end());
  return {median_of(lower), median_of(upper)};
}

void emit(std::ostream& out, const std::string& section,
          const std::string& problem, const std::string& algorithm,
          const std::string& metric, double value) {
  out << section << ',' << problem << ',' << algorithm << ',' << metric << ','
      << format_double(value) << '\n';
}

}  // namespace

std::string summarize(std::istream& csv_in) {
  std::string line;
  std::string header;
  int line_no = 0;
  while (std::getline(csv_in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header = line;
    break;
  }
  if (header != kCsvHeader) {
    const auto want = split_line(kCsvHeader);
    const auto got = split_line(header);
    std::string diag = "result CSV header mismatch;";
    for (std::size_t i = 0; i < std::max(want.size(), got.size()); ++i) {
      const std::string w = i < want.size() ? want[i] : "<missing>";
      const std::string g = i < got.size() ? got[i] : "<missing>";
      if (w != g)
        diag += " column " + std::to_string(i + 1) + ": expected '" + w +
                "', got '" + g + "';";
    }
    throw SchemaError(diag);
  }

  std::vector<ParsedRow> rows;
  while (std::getline(csv_in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_line(line);
    if (cells.size() != 11)
      throw SchemaError("line " + std::to_string(line_no) + ": expected 11 "
                        "columns, got " + std::to_string(cells.size()));
    ParsedRow r;
    try {
      r.problem = cells[0];
      r.algorithm = cells[1];
      r.trial = std::stoi(cells[2]);
      r.status = cells[3];
      r.objective_evals = std::stoll(cells[4]);
      r.gradient_evals = std::stoll(cells[5]);
      r.total_evals = std::stoll(cells[7]);
      r.wall_time_s = std::stod(cells[8]);
      r.category = cells[10];
    } catch (const std::exception& e) {
      throw SchemaError("line " + std::to_string(line_no) +
                        ": malformed cell (" + e.what() + ")");
    }
    r.successful =
        r.status == "ConvergedGradient" || r.status == "StationaryExact";
    rows.push_back(std::move(r));
  }

  std::ostringstream out;
  out << "section,problem,algorithm,metric,value\n";

  // Per (problem, algorithm): quartiles of evaluation counts, median time.
  std::map<std::pair<std::string, std::string>, std::vector<const ParsedRow*>>
      groups;
  for (const auto& r : rows) groups[{r.problem, r.algorithm}].push_back(&r);
  for (const auto& [key, group] : groups) {
    std::vector<double> obj, grad, total, wall;
    for (const ParsedRow* r : group) {
      obj.push_back(static_cast<double>(r->objective_evals));
      grad.push_back(static_cast<double>(r->gradient_evals));
      total.push_back(static_cast<double>(r->total_evals));
      wall.push_back(r->wall_time_s);
    }
    const auto [q1o, q3o] = quartiles_of(obj);
    const auto [q1t, q3t] = quartiles_of(total);
    emit(out, "algo_stats", key.first, key.second, "trials",
         static_cast<double>(group.size()));
    emit(out, "algo_stats", key.first, key.second, "median_objective_evals",
         median_of(obj));
    emit(out, "algo_stats", key.first, key.second, "q1_objective_evals", q1o);
    emit(out, "algo_stats", key.first, key.second, "q3_objective_evals", q3o);
    emit(out, "algo_stats", key.first, key.second, "median_gradient_evals",
         median_of(grad));
    emit(out, "algo_stats", key.first, key.second, "median_total_evals",
         median_of(total));
    emit(out, "algo_stats", key.first, key.second, "q1_total_evals", q1t);
    emit(out, "algo_stats", key.first, key.second, "q3_total_evals", q3t);
    emit(out, "algo_stats", key.first, key.second, "median_wall_time_s",
         median_of(wall));
  }

  // Per problem: relative change of evals vs the novel method, medians over
  // the trials where every algorithm in the file succeeded.
  std::map<std::string, std::map<int, std::map<std::string,
                                               const ParsedRow*>>>
      by_problem;
  for (const auto& r : rows) by_problem[r.problem][r.trial][r.algorithm] = &r;
  for (const auto& [problem, trials] : by_problem) {
    std::map<std::string, std::vector<double>> rel_obj, rel_grad, rel_total;
    for (const auto& [trial, algos] : trials) {
      (void)trial;
      const auto novel_it = algos.find("novel");
      if (novel_it == algos.end()) continue;
      bool all_ok = true;
      for (const auto& [name, r] : algos) {
        (void)name;
        all_ok = all_ok && r->successful;
      }
      if (!all_ok) continue;
      for (const auto& [name, r] : algos) {
        if (name == "novel") continue;
        rel_obj[name].push_back(relative_change(
            novel_it->second->objective_evals, r->objective_evals));
        rel_grad[name].push_back(relative_change(
            novel_it->second->gradient_evals, r->gradient_evals));
        rel_total[name].push_back(
            relative_change(novel_it->second->total_evals, r->total_evals));
      }
    }
    for (const auto& [name, values] : rel_total) {
      emit(out, "relative_change", problem, name, "qualifying_trials",
           static_cast<double>(values.size()));
      emit(out, "relative_change", problem, name,
           "median_relative_change_objective_evals",
           median_of(rel_obj.at(name)));
      emit(out, "relative_change", problem, name,
           "median_relative_change_gradient_evals",
           median_of(rel_grad.at(name)));
      emit(out, "relative_change", problem, name,
           "median_relative_change_total_evals", median_of(values));
    }
  }

  // Terminal categorization counts (only when any row was categorized).
  std::map<std::pair<std::string, std::string>, std::map<std::string, int>>
      cats;
  bool any_category = false;
  for (const auto& r : rows) {
    if (r.category == "n/a") continue;
    any_category = true;
    ++cats[{r.problem, r.algorithm}][r.category];
  }
  if (any_category) {
    for (const auto& [key, counts] : cats) {
      for (const std::string metric : {"minimizer", "maximizer", "neither"}) {
        const auto it = counts.find(metric);
        emit(out, "categories", key.first, key.second, metric,
             it == counts.end() ? 0.0 : static_cast<double>(it->second));
      }
    }
  }
  return out.str();
}

std::string summarize_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return summarize(in);
}

}  // namespace trigger_descent
