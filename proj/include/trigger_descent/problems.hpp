// Built-in analytic test suite plus two estimating-equation problems whose
// objectives are path integrals of the estimating function, evaluated by
// composite Gauss-Legendre quadrature.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "trigger_descent/oracle.hpp"

namespace trigger_descent {

// Analytic problems with gradients and standard starts.
std::vector<Problem> builtin_suite();

// Nodes/weights on [0,1]; weights sum to 1 and the rule is exact for
// polynomials of degree <= 2*count - 1.
struct QuadratureRule {
  std::vector<std::pair<double, double>> nodes;  // (abscissa, weight)
  int count = 0;
};
QuadratureRule gauss_legendre_01(int count);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Either a 90-row (site, variety, proportion) table for the leaf-blotch
// quasi-likelihood problem or a 50-pair ratio-of-means table. Proportions at
// exactly 0 or 1 are clipped to [1e-6, 1 - 1e-6] on load, with the offending
// row indices reported in clipped_rows.
struct GeeDataset {
  enum class Kind { Wedderburn, Fieller };

  struct WRow {
    int site = 0;     // 1..10
    int variety = 0;  // 1..10
    double y = 0.0;   // proportion in (0,1) after clipping
  };

  Kind kind = Kind::Fieller;
  std::vector<WRow> wrows;                    // exactly 90 when Wedderburn
  std::vector<std::array<double, 2>> pairs;   // exactly 50 when Fieller
  double sigma = 0.05;                        // Fieller noise scale
  std::vector<int> clipped_rows;              // load report
};

inline constexpr int kWedderburnRows = 90;
inline constexpr int kFiellerPairs = 50;
inline constexpr int kWedderburnDim = 20;

// Seeds chosen so the default datasets have well-placed stationary points
// (the ratio problem's minimizer sits inside [4.9, 5.0] and its maximizer
// inside [-0.21, -0.2]).
inline constexpr std::uint64_t kDefaultFiellerSeed = 65;
inline constexpr std::uint64_t kDefaultWedderburnSeed = 7;

// 50 pairs with means (mu_i, mu_i/5), mu_i evenly spaced on [1,3], both
// components perturbed by N(0, 0.05); sigma stored as 0.05.
GeeDataset simulate_fieller_data(std::uint64_t seed);

// 9 sites x 10 varieties; y = logistic(site effect + variety effect + noise),
// strictly inside (0,1) so no clipping is needed.
GeeDataset simulate_wedderburn_data(std::uint64_t seed);

// Estimating function of the ratio-of-means problem:
//   Fdot(theta) = -sum_i (Y_i2 + theta Y_i1)(Y_i1 - theta Y_i2)
//                 / (sigma^2 (1 + theta^2)^2).
double fieller_gradient(double theta, const GeeDataset& data);

// F(theta) = integral of fieller_gradient over [0, theta] (signed); each
// integrand call accrues one inner_oracle_eval when counters are supplied.
double fieller_objective(double theta, const GeeDataset& data,
                         const QuadratureRule& rule,
                         EvalCounters* counters = nullptr);

// Quasi-score of the leaf-blotch problem with logistic mean and variance
// function mu^2 (1-mu)^2:
//   Fdot(theta) = -sum_i (y_i - mu_i) / (mu_i (1 - mu_i)) x_i,
// with x_i the site/variety indicator pair. Evaluation is guarded against
// overflow so finite inputs always give finite output.
Vector wedderburn_gradient(const Vector& theta, const GeeDataset& data);

// Straight-line path integral from theta_ref:
//   F(theta) = integral_0^1 Fdot(p(t)) . (theta - theta_ref) dt,
// p(t) = theta_ref + t (theta - theta_ref). F(theta_ref) = 0.
double wedderburn_objective(const Vector& theta, const GeeDataset& data,
                            const Vector& theta_ref,
                            const QuadratureRule& rule,
                            EvalCounters* counters = nullptr);

// CSV formats:
//   leaf blotch:    header "site,variety,y", 90 rows;
//   ratio of means: comment "# sigma=<real>", header "y1,y2", 50 rows.
// Malformed input raises ParseError with the line number. write/load round
// trips bit-exactly.
GeeDataset load_gee_csv(const std::string& path);
void write_gee_csv(const GeeDataset& data, const std::string& path);

// Problem wrappers; the dataset is shared immutably across concurrent runs.
Problem make_fieller_problem(std::shared_ptr<const GeeDataset> data,
                             int quadrature_nodes = 16);
Problem make_wedderburn_problem(std::shared_ptr<const GeeDataset> data,
                                Vector theta_ref = {},
                                int quadrature_nodes = 16);

}  // namespace trigger_descent
