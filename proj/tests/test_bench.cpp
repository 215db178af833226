#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "test_support.hpp"
#include "trigger_descent/bench.hpp"

using namespace trigger_descent;

namespace {

std::vector<Problem> pick(std::initializer_list<const char*> names) {
  std::vector<Problem> out;
  for (const auto& p : builtin_suite()) {
    for (const char* n : names) {
      if (p.name == n) out.push_back(p);
    }
  }
  return out;
}

// Splits summarize() output into lines for content checks.
std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("algorithm names round trip") {
  for (Algorithm a : all_algorithms()) {
    auto back = algorithm_from_name(algorithm_name(a));
    REQUIRE(back.has_value());
    CHECK_EQ(*back, a);
  }
  CHECK_EQ(algorithm_name(Algorithm::Novel), "novel");
  CHECK_EQ(algorithm_name(Algorithm::GdArmijo), "gd_armijo");
  CHECK_EQ(algorithm_name(Algorithm::GdWolfe), "gd_wolfe");
  CHECK_FALSE(algorithm_from_name("nosuch").has_value());
}

TEST_CASE("relative_change compares evaluation budgets symmetrically") {
  CHECK_EQ(relative_change(100, 100), 0.0);
  CHECK_EQ(relative_change(50, 100), 0.5);
  CHECK_EQ(relative_change(100, 50), -0.5);
  CHECK_EQ(relative_change(0, 0), 0.0);  // guarded by the max(...,1) floor
  for (long long ours : {1LL, 7LL, 500LL}) {
    for (long long other : {1LL, 19LL, 12000LL}) {
      double rc = relative_change(ours, other);
      CHECK(rc >= -1.0);
      CHECK(rc <= 1.0);
    }
  }
}

TEST_CASE("categorize_terminal applies intervals inclusively to successes") {
  const std::pair<double, double> lo{4.9, 5.0}, hi{-0.21, -0.2};
  auto cat = [&](double x, RunStatus s) {
    return categorize_terminal({x}, s, lo, hi);
  };
  CHECK_EQ(cat(4.95, RunStatus::ConvergedGradient), "minimizer");
  CHECK_EQ(cat(4.9, RunStatus::ConvergedGradient), "minimizer");
  CHECK_EQ(cat(5.0, RunStatus::StationaryExact), "minimizer");
  CHECK_EQ(cat(-0.205, RunStatus::ConvergedGradient), "maximizer");
  CHECK_EQ(cat(-0.21, RunStatus::ConvergedGradient), "maximizer");
  CHECK_EQ(cat(3.0, RunStatus::ConvergedGradient), "neither");
  CHECK_EQ(cat(4.95, RunStatus::MaxOuterIterations), "neither");
  CHECK_EQ(cat(4.95, RunStatus::Failed), "neither");
  // Multi-dimensional terminals are never categorized.
  CHECK_EQ(categorize_terminal({4.95, 0.0}, RunStatus::ConvergedGradient, lo, hi),
           "neither");
}

TEST_CASE("generate_starts draws deterministic seeded start points") {
  GeeDataset fdata = simulate_fieller_data(kDefaultFiellerSeed);
  Problem fieller = make_fieller_problem(
      std::make_shared<const GeeDataset>(std::move(fdata)));
  GeeDataset wdata = simulate_wedderburn_data(kDefaultWedderburnSeed);
  Problem wedderburn = make_wedderburn_problem(
      std::make_shared<const GeeDataset>(std::move(wdata)));

  SUBCASE("standard kind repeats the standard start") {
    auto starts = generate_starts(StartKind::Standard, fieller, 3, 1);
    REQUIRE_EQ(starts.size(), 3);
    for (const auto& s : starts) CHECK_EQ(s, fieller.standard_start);
  }
  SUBCASE("fieller starts are scalars in the unit interval") {
    auto starts = generate_starts(StartKind::FiellerUniform, fieller, 100, 1);
    REQUIRE_EQ(starts.size(), 100);
    for (const auto& s : starts) {
      REQUIRE_EQ(s.size(), 1);
      CHECK(s[0] >= 0.0);
      CHECK(s[0] <= 1.0);
    }
    auto again = generate_starts(StartKind::FiellerUniform, fieller, 100, 1);
    CHECK(starts == again);
    auto other = generate_starts(StartKind::FiellerUniform, fieller, 100, 2);
    CHECK(starts != other);
  }
  SUBCASE("wedderburn starts pin the two reference coordinates") {
    auto starts =
        generate_starts(StartKind::WedderburnUniform, wedderburn, 50, 1);
    REQUIRE_EQ(starts.size(), 50);
    for (const auto& s : starts) {
      REQUIRE_EQ(s.size(), static_cast<std::size_t>(kWedderburnDim));
      CHECK_EQ(s[0], 0.0);
      CHECK_EQ(s[10], 0.0);
      for (int i = 0; i < kWedderburnDim; ++i) {
        CHECK(s[i] >= -1.0);
        CHECK(s[i] <= 1.0);
      }
    }
  }
}

TEST_CASE("run_experiment produces one sorted row per task") {
  ExperimentSpec spec;
  spec.problems = pick({"sphere", "booth"});
  spec.trials = 2;
  REQUIRE_EQ(spec.problems.size(), 2);
  spec.validate();
  ExperimentResult res = run_experiment(spec);
  REQUIRE_EQ(res.rows.size(), 2 * 3 * 2);
  CHECK(res.starts_hash != 0);

  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    const auto& a = res.rows[i - 1];
    const auto& b = res.rows[i];
    auto key = [](const ResultRow& r) {
      return std::make_tuple(r.problem, algorithm_name(r.algorithm), r.trial);
    };
    CHECK(key(a) < key(b));
  }
  for (const auto& r : res.rows) {
    CHECK_EQ(r.total_evals, r.objective_evals + r.gradient_evals);
    CHECK(r.wall_time_s >= 0.0);
    CHECK_EQ(r.category, "n/a");  // categorize defaults off
    CHECK(is_successful(r.status));  // smooth problems converge
  }

  SUBCASE("spec validation rejects empty selections") {
    ExperimentSpec bad = spec;
    bad.problems.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = spec;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_CASE("write_csv emits the pinned schema") {
  ExperimentSpec spec;
  spec.problems = pick({"sphere"});
  spec.trials = 1;
  ExperimentResult res = run_experiment(spec);
  std::ostringstream out;
  write_csv(res, out);
  auto ls = lines_of(out.str());
  REQUIRE_EQ(ls.size(), 2 + res.rows.size());
  CHECK_EQ(ls[0].rfind("# starts_hash=", 0), 0);
  CHECK_EQ(ls[1], kCsvHeader);
  for (std::size_t i = 2; i < ls.size(); ++i) {
    CHECK_EQ(std::count(ls[i].begin(), ls[i].end(), ','), 10);  // 11 columns
  }
}

TEST_CASE("summarize aggregates medians, quartiles, and relative changes") {
  // Hand-built CSV: one problem, two algorithms, three trials each. The
  // gd_armijo run of trial 2 fails, so relative changes use trials {0,1}.
  std::ostringstream csv;
  csv << kCsvHeader << "\n";
  csv << "p,novel,0,ConvergedGradient,10,20,0,30,0.001,1e-06,n/a\n";
  csv << "p,novel,1,ConvergedGradient,20,40,0,60,0.001,1e-06,n/a\n";
  csv << "p,novel,2,ConvergedGradient,30,60,0,90,0.001,1e-06,n/a\n";
  csv << "p,gd_armijo,0,ConvergedGradient,40,10,0,50,0.001,1e-06,n/a\n";
  csv << "p,gd_armijo,1,ConvergedGradient,60,30,0,90,0.001,1e-06,n/a\n";
  csv << "p,gd_armijo,2,Failed,5,5,0,10,0.001,2.5,n/a\n";
  std::istringstream in(csv.str());
  std::string text = summarize(in);
  auto ls = lines_of(text);
  REQUIRE(!ls.empty());
  CHECK_EQ(ls[0], "section,problem,algorithm,metric,value");

  auto has = [&](const std::string& needle) {
    return text.find(needle) != std::string::npos;
  };
  // Medians of {10,20,30} and {40,60,5}: 20 and 40.
  CHECK(has("algo_stats,p,novel,median_objective_evals,20"));
  CHECK(has("algo_stats,p,novel,q1_objective_evals,10"));
  CHECK(has("algo_stats,p,novel,q3_objective_evals,30"));
  CHECK(has("algo_stats,p,novel,trials,3"));
  CHECK(has("algo_stats,p,gd_armijo,median_objective_evals,40"));

  // Qualifying trials are those where every algorithm succeeded: {0,1}.
  // Objective changes: (40-10)/40 = 0.75 and (60-20)/60 = 2/3; median ~0.7083.
  CHECK(has("relative_change,p,gd_armijo,qualifying_trials,2"));
  CHECK(has("relative_change,p,gd_armijo,median_relative_change_objective_evals,"
            "0.70833333333333326"));

  SUBCASE("idempotent over identical input") {
    std::istringstream in2(csv.str());
    CHECK_EQ(summarize(in2), text);
  }
}

TEST_CASE("summarize counts terminal categories when present") {
  std::ostringstream csv;
  csv << kCsvHeader << "\n";
  csv << "fieller,novel,0,ConvergedGradient,10,20,30,30,0.001,1e-06,minimizer\n";
  csv << "fieller,novel,1,ConvergedGradient,10,20,30,30,0.001,1e-06,minimizer\n";
  csv << "fieller,novel,2,MaxOuterIterations,10,20,30,30,0.001,0.5,neither\n";
  std::istringstream in(csv.str());
  std::string text = summarize(in);
  CHECK(text.find("categories,fieller,novel,minimizer,2") != std::string::npos);
  CHECK(text.find("categories,fieller,novel,maximizer,0") != std::string::npos);
  CHECK(text.find("categories,fieller,novel,neither,1") != std::string::npos);
}

TEST_CASE("summarize rejects schema drift with a diagnosis") {
  SUBCASE("wrong header") {
    std::istringstream in("problem,algorithm,trial\na,b,0\n");
    CHECK_THROWS_AS(summarize(in), SchemaError);
    std::istringstream in2("problem,algorithm,trial\na,b,0\n");
    try {
      summarize(in2);
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("column") != std::string::npos);
    }
  }
  SUBCASE("malformed cell") {
    std::ostringstream csv;
    csv << kCsvHeader << "\n";
    csv << "p,novel,zero,ConvergedGradient,10,20,0,30,0.001,1e-06,n/a\n";
    std::istringstream in(csv.str());
    CHECK_THROWS_AS(summarize(in), SchemaError);
  }
  SUBCASE("wrong column count") {
    std::ostringstream csv;
    csv << kCsvHeader << "\n";
    csv << "p,novel,0\n";
    std::istringstream in(csv.str());
    CHECK_THROWS_AS(summarize(in), SchemaError);
  }
}

TEST_CASE("run_algorithm dispatches to the three solvers") {
  Problem q = trigger_descent::testing::make_quadratic(2);
  for (Algorithm a : all_algorithms()) {
    RunResult r = run_algorithm(a, q, {1.0, 1.0}, 1e-5, 1000);
    CHECK(is_successful(r.status));
    CHECK(r.terminal_grad_norm <= 1e-5);
  }
}
