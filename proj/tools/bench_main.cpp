// bench: experiment harness for the trigger-event descent library.
//
// Subcommands:
//   suite      run every builtin analytic problem with every algorithm
//   gee        multi-start experiment on a GEE problem (wedderburn|fieller)
//   check      finite-difference audit of a problem's analytic gradient
//   trace      export one run's outer-iteration records as JSON lines
//   summarize  aggregate a result CSV into quartile/relative-change tables
//
// Exit codes: 0 success, 1 I/O or schema failure, 2 invalid invocation.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "trigger_descent/baselines.hpp"
#include "trigger_descent/bench.hpp"
#include "trigger_descent/lipschitz_step.hpp"
#include "trigger_descent/problems.hpp"
#include "trigger_descent/trace.hpp"
#include "trigger_descent/util.hpp"

namespace td = trigger_descent;

namespace {

td::Problem resolve_problem(const std::string& name,
                            const std::string& data_path) {
  if (name == "fieller") {
    auto data = std::make_shared<td::GeeDataset>(
        data_path.empty() ? td::simulate_fieller_data(td::kDefaultFiellerSeed)
                          : td::load_gee_csv(data_path));
    if (data->kind != td::GeeDataset::Kind::Fieller)
      throw std::invalid_argument(data_path +
                                  " does not hold Fieller pair data");
    return td::make_fieller_problem(std::move(data));
  }
  if (name == "wedderburn") {
    auto data = std::make_shared<td::GeeDataset>(
        data_path.empty()
            ? td::simulate_wedderburn_data(td::kDefaultWedderburnSeed)
            : td::load_gee_csv(data_path));
    if (data->kind != td::GeeDataset::Kind::Wedderburn)
      throw std::invalid_argument(data_path +
                                  " does not hold leaf-blotch rows");
    return td::make_wedderburn_problem(std::move(data));
  }
  for (auto& p : td::builtin_suite())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown problem '" + name + "'");
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!std::cout.good()) throw std::runtime_error("write to stdout failed");
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << text;
  if (!out.good()) throw std::runtime_error("write failed for " + out_path);
}

void emit_experiment(const td::ExperimentResult& result,
                     const std::string& out_path) {
  if (out_path.empty()) {
    td::write_csv(result, std::cout);
    if (!std::cout.good()) throw std::runtime_error("write to stdout failed");
  } else {
    td::write_csv_file(result, out_path);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trigger-event descent benchmark harness"};
  app.require_subcommand(1);

  // suite
  auto* suite = app.add_subcommand(
      "suite", "run all builtin problems with all algorithms");
  double suite_eps = 1e-5;
  long long suite_max_outer = 20000;
  std::string suite_out;
  suite->add_option("--eps", suite_eps, "gradient tolerance");
  suite->add_option("--max-outer", suite_max_outer, "outer iteration cap");
  suite->add_option("--out", suite_out, "output CSV path (default stdout)");

  // gee
  auto* gee = app.add_subcommand("gee", "multi-start GEE experiment");
  std::string gee_problem;
  int gee_trials = 100;
  std::uint64_t gee_seed = 1;
  std::string gee_data;
  double gee_eps = 1e-5;
  long long gee_max_outer = 1000;
  std::string gee_out;
  gee->add_option("--problem", gee_problem, "wedderburn or fieller")
      ->required()
      ->check(CLI::IsMember({"wedderburn", "fieller"}));
  gee->add_option("--trials", gee_trials, "number of start points")
      ->check(CLI::PositiveNumber);
  gee->add_option("--seed", gee_seed, "start-point generator seed");
  gee->add_option("--data", gee_data,
                  "dataset CSV (default: builtin synthetic dataset)");
  gee->add_option("--eps", gee_eps, "gradient tolerance");
  gee->add_option("--max-outer", gee_max_outer, "outer iteration cap");
  gee->add_option("--out", gee_out, "output CSV path (default stdout)");

  // check
  auto* check = app.add_subcommand(
      "check", "finite-difference audit of an analytic gradient");
  std::string check_problem;
  std::uint64_t check_seed = 1;
  int check_points = 20;
  double check_tol = 0.0;  // 0 = automatic per problem kind
  std::string check_data;
  check->add_option("--problem", check_problem, "problem name")->required();
  check->add_option("--seed", check_seed, "sample-point seed");
  check->add_option("--points", check_points, "number of audit points")
      ->check(CLI::PositiveNumber);
  check->add_option("--tol", check_tol,
                    "relative-error bound (default 1e-5, GEE 1e-4)");
  check->add_option("--data", check_data, "dataset CSV for GEE problems");

  // trace
  auto* trace = app.add_subcommand(
      "trace", "export one run's outer records as JSON lines");
  std::string trace_problem, trace_algo = "novel", trace_out, trace_data;
  double trace_eps = 1e-5;
  long long trace_max_outer = 20000;
  trace->add_option("--problem", trace_problem, "problem name")->required();
  trace->add_option("--algo", trace_algo, "novel, gd_armijo, or gd_wolfe")
      ->check(CLI::IsMember({"novel", "gd_armijo", "gd_wolfe"}));
  trace->add_option("--eps", trace_eps, "gradient tolerance");
  trace->add_option("--max-outer", trace_max_outer, "outer iteration cap");
  trace->add_option("--data", trace_data, "dataset CSV for GEE problems");
  trace->add_option("--out", trace_out, "output JSONL path (default stdout)");

  // summarize
  auto* summ = app.add_subcommand(
      "summarize", "aggregate a result CSV into summary tables");
  std::string summ_in, summ_out;
  summ->add_option("--in", summ_in, "result CSV produced by suite/gee")
      ->required();
  summ->add_option("--out", summ_out, "summary CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*suite) {
      td::ExperimentSpec spec;
      spec.problems = td::builtin_suite();
      spec.start_kind = td::StartKind::Standard;
      spec.trials = 1;
      spec.eps = suite_eps;
      spec.max_outer = suite_max_outer;
      emit_experiment(td::run_experiment(spec), suite_out);
    } else if (*gee) {
      td::ExperimentSpec spec;
      spec.problems = {resolve_problem(gee_problem, gee_data)};
      spec.start_kind = gee_problem == "fieller"
                            ? td::StartKind::FiellerUniform
                            : td::StartKind::WedderburnUniform;
      spec.trials = gee_trials;
      spec.seed = gee_seed;
      spec.eps = gee_eps;
      spec.max_outer = gee_max_outer;
      spec.categorize = gee_problem == "fieller";
      emit_experiment(td::run_experiment(spec), gee_out);
    } else if (*check) {
      const td::Problem problem = resolve_problem(check_problem, check_data);
      const bool is_gee =
          check_problem == "fieller" || check_problem == "wedderburn";
      const double tol = check_tol > 0.0 ? check_tol
                                         : (is_gee ? 1e-4 : 1e-5);
      const td::FdAudit audit =
          td::fd_audit(problem, check_points, check_seed);
      std::printf("problem=%s points=%d max_rel_err=%.3e tol=%.3e %s\n",
                  problem.name.c_str(), check_points, audit.max_rel_err, tol,
                  audit.pass(tol) ? "PASS" : "FAIL");
      if (!audit.pass(tol)) return 1;
    } else if (*trace) {
      const td::Problem problem = resolve_problem(trace_problem, trace_data);
      const auto algo = td::algorithm_from_name(trace_algo);
      if (!algo) throw std::invalid_argument("unknown algorithm");
      const td::RunResult r = td::run_algorithm(
          *algo, problem, problem.standard_start, trace_eps, trace_max_outer);
      std::ostringstream body;
      td::write_trace_jsonl(r.trace, body);
      write_text(body.str(), trace_out);
      std::fprintf(stderr,
                   "status=%s outers=%lld objective_evals=%lld "
                   "gradient_evals=%lld terminal_grad_norm=%s\n",
                   td::to_string(r.status), r.outer_iterations,
                   r.counters.objective_evals, r.counters.gradient_evals,
                   td::format_double(r.terminal_grad_norm).c_str());
    } else if (*summ) {
      write_text(td::summarize_file(summ_in), summ_out);
    }
  } catch (const td::ParseError& e) {
    std::fprintf(stderr, "error: line %d: %s\n", e.line(), e.what());
    return 1;
  } catch (const td::SchemaError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
