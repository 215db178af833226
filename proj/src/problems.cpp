#include "trigger_descent/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "trigger_descent/rng.hpp"
#include "trigger_descent/util.hpp"

namespace trigger_descent {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Composite panels never exceed this count: far-field integrand tails are
// smooth and low-order, so accuracy is preserved while the cost of objective
// evaluations at extreme arguments stays bounded.
constexpr int kMaxPanels = 64;

ObjectiveFn plain(double (*f)(const Vector&)) {
  return [f](const Vector& x, EvalCounters&) { return f(x); };
}

// ---- analytic suite ----

double sphere_f(const Vector& x) { return 0.5 * dot(x, x); }
Vector sphere_g(const Vector& x) { return x; }

double rosenbrock_f(const Vector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
    const double a = 1.0 - x[i];
    const double b = x[i + 1] - x[i] * x[i];
    s += a * a + 100.0 * b * b;
  }
  return s;
}
Vector rosenbrock_g(const Vector& x) {
  Vector g(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
    const double b = x[i + 1] - x[i] * x[i];
    g[i] = -2.0 * (1.0 - x[i]) - 400.0 * x[i] * b;
    g[i + 1] = 200.0 * b;
  }
  return g;
}

double illcond_diag(std::size_t i, std::size_t n) {
  return std::pow(10.0, 4.0 * static_cast<double>(i) /
                            static_cast<double>(n - 1));
}
double illcond_f(const Vector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += 0.5 * illcond_diag(i, x.size()) * x[i] * x[i];
  return s;
}
Vector illcond_g(const Vector& x) {
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    g[i] = illcond_diag(i, x.size()) * x[i];
  return g;
}

double beale_f(const Vector& v) {
  const double x = v[0], y = v[1];
  const double t1 = 1.5 - x + x * y;
  const double t2 = 2.25 - x + x * y * y;
  const double t3 = 2.625 - x + x * y * y * y;
  return t1 * t1 + t2 * t2 + t3 * t3;
}
Vector beale_g(const Vector& v) {
  const double x = v[0], y = v[1];
  const double t1 = 1.5 - x + x * y;
  const double t2 = 2.25 - x + x * y * y;
  const double t3 = 2.625 - x + x * y * y * y;
  return {2.0 * t1 * (y - 1.0) + 2.0 * t2 * (y * y - 1.0) +
              2.0 * t3 * (y * y * y - 1.0),
          2.0 * t1 * x + 2.0 * t2 * (2.0 * x * y) +
              2.0 * t3 * (3.0 * x * y * y)};
}

double himmelblau_f(const Vector& v) {
  const double x = v[0], y = v[1];
  const double a = x * x + y - 11.0;
  const double b = x + y * y - 7.0;
  return a * a + b * b;
}
Vector himmelblau_g(const Vector& v) {
  const double x = v[0], y = v[1];
  const double a = x * x + y - 11.0;
  const double b = x + y * y - 7.0;
  return {4.0 * a * x + 2.0 * b, 2.0 * a + 4.0 * b * y};
}

double booth_f(const Vector& v) {
  const double a = v[0] + 2.0 * v[1] - 7.0;
  const double b = 2.0 * v[0] + v[1] - 5.0;
  return a * a + b * b;
}
Vector booth_g(const Vector& v) {
  const double a = v[0] + 2.0 * v[1] - 7.0;
  const double b = 2.0 * v[0] + v[1] - 5.0;
  return {2.0 * a + 4.0 * b, 4.0 * a + 2.0 * b};
}

double matyas_f(const Vector& v) {
  return 0.26 * (v[0] * v[0] + v[1] * v[1]) - 0.48 * v[0] * v[1];
}
Vector matyas_g(const Vector& v) {
  return {0.52 * v[0] - 0.48 * v[1], 0.52 * v[1] - 0.48 * v[0]};
}

double quartic_f(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += 0.25 * v * v * v * v;
  return s;
}
Vector quartic_g(const Vector& x) {
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] * x[i] * x[i];
  return g;
}

double expquad_f(const Vector& x) { return std::exp(0.5 * dot(x, x)); }
Vector expquad_g(const Vector& x) { return scale(expquad_f(x), x); }

// Tiny linearly separable classification set; the objective has unbounded
// level sets and an infimum that is not attained.
const std::vector<std::pair<Vector, double>>& logistic_data() {
  static const std::vector<std::pair<Vector, double>> data = {
      {{1.0, 1.0, 1.0}, 1.0},   {{2.0, 1.0, 1.0}, 1.0},
      {{1.5, 2.5, 1.0}, 1.0},   {{-1.0, -1.0, 1.0}, -1.0},
      {{-2.0, -1.0, 1.0}, -1.0}, {{-1.5, -2.5, 1.0}, -1.0}};
  return data;
}
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}
double logistic_cdf(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                  : std::exp(t) / (1.0 + std::exp(t));
}
double logistic_f(const Vector& th) {
  double s = 0.0;
  for (const auto& [x, y] : logistic_data()) s += softplus(-y * dot(th, x));
  return s;
}
Vector logistic_g(const Vector& th) {
  Vector g(th.size(), 0.0);
  for (const auto& [x, y] : logistic_data()) {
    const double p = logistic_cdf(-y * dot(th, x));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= y * p * x[i];
  }
  return g;
}

double powell_f(const Vector& v) {
  const double a = v[0] + 10.0 * v[1];
  const double b = v[2] - v[3];
  const double c = v[1] - 2.0 * v[2];
  const double d = v[0] - v[3];
  return a * a + 5.0 * b * b + c * c * c * c + 10.0 * d * d * d * d;
}
Vector powell_g(const Vector& v) {
  const double a = v[0] + 10.0 * v[1];
  const double b = v[2] - v[3];
  const double c = v[1] - 2.0 * v[2];
  const double d = v[0] - v[3];
  return {2.0 * a + 40.0 * d * d * d, 20.0 * a + 4.0 * c * c * c,
          10.0 * b - 8.0 * c * c * c, -10.0 * b - 40.0 * d * d * d};
}

Problem make(std::string name, int dim, ObjectiveFn f, GradientFn g,
             Vector start, std::optional<Vector> minimizer,
             std::optional<double> lb) {
  Problem p;
  p.name = std::move(name);
  p.dimension = dim;
  p.objective = std::move(f);
  p.gradient = std::move(g);
  p.standard_start = std::move(start);
  p.known_minimizer = std::move(minimizer);
  p.lower_bound = lb;
  return p;
}

}  // namespace

std::vector<Problem> builtin_suite() {
  std::vector<Problem> suite;
  suite.push_back(make("sphere", 5, plain(sphere_f), sphere_g,
                       Vector(5, 2.0), Vector(5, 0.0), 0.0));
  suite.push_back(make("rosenbrock_2", 2, plain(rosenbrock_f), rosenbrock_g,
                       {-1.2, 1.0}, Vector{1.0, 1.0}, 0.0));
  {
    Vector start(10), ones(10, 1.0);
    for (std::size_t i = 0; i < 10; i += 2) {
      start[i] = -1.2;
      start[i + 1] = 1.0;
    }
    suite.push_back(make("rosenbrock_10", 10, plain(rosenbrock_f),
                         rosenbrock_g, start, ones, 0.0));
  }
  suite.push_back(make("illcond_quadratic", 10, plain(illcond_f), illcond_g,
                       Vector(10, 1.0), Vector(10, 0.0), 0.0));
  suite.push_back(make("beale", 2, plain(beale_f), beale_g, {1.0, 1.0},
                       Vector{3.0, 0.5}, 0.0));
  suite.push_back(make("himmelblau", 2, plain(himmelblau_f), himmelblau_g,
                       {0.0, 0.0}, std::nullopt, 0.0));
  suite.push_back(make("booth", 2, plain(booth_f), booth_g, {0.0, 0.0},
                       Vector{1.0, 3.0}, 0.0));
  suite.push_back(make("matyas", 2, plain(matyas_f), matyas_g, {3.0, 4.0},
                       Vector{0.0, 0.0}, 0.0));
  suite.push_back(make("quartic", 4, plain(quartic_f), quartic_g,
                       {1.0, -1.0, 1.0, -1.0}, Vector(4, 0.0), 0.0));
  suite.push_back(make("exp_quadratic", 2, plain(expquad_f), expquad_g,
                       {1.5, 1.0}, Vector{0.0, 0.0}, 1.0));
  suite.push_back(make("logistic_separable", 3, plain(logistic_f), logistic_g,
                       {0.0, 0.0, 0.0}, std::nullopt, 0.0));
  suite.push_back(make("powell_singular", 4, plain(powell_f), powell_g,
                       {3.0, -1.0, 0.0, 1.0}, Vector(4, 0.0), 0.0));
  return suite;
}

// ---- quadrature ----

QuadratureRule gauss_legendre_01(int count) {
  if (count < 1) throw std::invalid_argument("quadrature count must be >= 1");
  QuadratureRule rule;
  rule.count = count;
  rule.nodes.resize(count);
  const int n = count;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on the Legendre polynomial from the Chebyshev guess.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1]; weights halve and sum to 1.
    rule.nodes[i] = {0.5 * (1.0 - x), 0.5 * w};
    rule.nodes[n - 1 - i] = {0.5 * (1.0 + x), 0.5 * w};
  }
  return rule;
}

namespace {

int panel_count(double span) {
  const double c = std::ceil(std::fabs(span));
  return std::clamp(static_cast<int>(c), 1, kMaxPanels);
}

// Composite rule for f over [a, b] (signed width allowed).
template <typename F>
double integrate(F&& f, double a, double b, const QuadratureRule& rule,
                 int panels) {
  const double width = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double left = a + width * p;
    for (const auto& [xi, w] : rule.nodes) s += w * f(left + xi * width);
  }
  return s * width;
}

}  // namespace

// ---- ratio-of-means problem ----

GeeDataset simulate_fieller_data(std::uint64_t seed) {
  GeeDataset d;
  d.kind = GeeDataset::Kind::Fieller;
  d.sigma = 0.05;
  Rng rng(seed);
  for (int i = 0; i < kFiellerPairs; ++i) {
    const double mu = 1.0 + 2.0 * i / (kFiellerPairs - 1.0);
    const double y1 = rng.normal(mu, 0.05);
    const double y2 = rng.normal(mu / 5.0, 0.05);
    d.pairs.push_back({y1, y2});
  }
  return d;
}

double fieller_gradient(double theta, const GeeDataset& data) {
  const double s2 = data.sigma * data.sigma;
  const double q = 1.0 + theta * theta;
  double sum = 0.0;
  for (const auto& p : data.pairs) {
    sum += (p[1] + theta * p[0]) * (p[0] - theta * p[1]);
  }
  return -sum / (s2 * q * q);
}

double fieller_objective(double theta, const GeeDataset& data,
                         const QuadratureRule& rule, EvalCounters* counters) {
  if (theta == 0.0) return 0.0;
  const int panels = panel_count(theta);
  return integrate(
      [&](double t) {
        if (counters) ++counters->inner_oracle_evals;
        return fieller_gradient(t, data);
      },
      0.0, theta, rule, panels);
}

// ---- leaf-blotch problem ----

GeeDataset simulate_wedderburn_data(std::uint64_t seed) {
  GeeDataset d;
  d.kind = GeeDataset::Kind::Wedderburn;
  Rng rng(seed);
  double site_eff[9], variety_eff[10];
  for (double& v : site_eff) v = rng.uniform(-1.5, 1.5);
  for (double& v : variety_eff) v = rng.uniform(-1.5, 1.5);
  for (int s = 1; s <= 9; ++s) {
    for (int v = 1; v <= 10; ++v) {
      const double eta = site_eff[s - 1] + variety_eff[v - 1] +
                         rng.normal(0.0, 0.3);
      d.wrows.push_back({s, v, logistic_cdf(eta)});
    }
  }
  return d;
}

Vector wedderburn_gradient(const Vector& theta, const GeeDataset& data) {
  Vector g(kWedderburnDim, 0.0);
  for (const auto& row : data.wrows) {
    const int i1 = row.site - 1;
    const int i2 = 10 + row.variety - 1;
    // (y - mu) / (mu (1 - mu)) rewritten as
    // (y - 1) e^eta + (2y - 1) + y e^-eta, which avoids the catastrophic
    // mu (1 - mu) underflow; eta is saturated far outside the data scale.
    const double eta = std::clamp(theta[i1] + theta[i2], -500.0, 500.0);
    const double e = std::exp(eta);
    const double term = (row.y - 1.0) * e + (2.0 * row.y - 1.0) + row.y / e;
    g[i1] -= term;
    g[i2] -= term;
  }
  return g;
}

double wedderburn_objective(const Vector& theta, const GeeDataset& data,
                            const Vector& theta_ref,
                            const QuadratureRule& rule,
                            EvalCounters* counters) {
  const Vector d = sub(theta, theta_ref);
  const double span = norm2(d);
  if (span == 0.0) return 0.0;
  const int panels = panel_count(span);
  return integrate(
      [&](double t) {
        if (counters) ++counters->inner_oracle_evals;
        return dot(wedderburn_gradient(axpy(theta_ref, t, d), data), d);
      },
      0.0, 1.0, rule, panels);
}

// ---- CSV I/O ----

namespace {

constexpr double kClipLo = 1e-6;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_num(const std::string& s, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, "malformed number '" + s + "'");
  }
}

}  // namespace

GeeDataset load_gee_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  GeeDataset d;
  bool have_sigma = false;
  bool have_header = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("sigma=");
      if (pos != std::string::npos) {
        d.sigma = parse_num(line.substr(pos + 6), line_no);
        have_sigma = true;
      }
      continue;
    }
    if (!have_header) {
      if (line == "site,variety,y") {
        d.kind = GeeDataset::Kind::Wedderburn;
      } else if (line == "y1,y2") {
        d.kind = GeeDataset::Kind::Fieller;
      } else {
        throw ParseError(line_no, "unrecognized header '" + line + "'");
      }
      have_header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (d.kind == GeeDataset::Kind::Wedderburn) {
      if (cells.size() != 3)
        throw ParseError(line_no, "expected 3 columns, got " +
                                      std::to_string(cells.size()));
      GeeDataset::WRow row;
      row.site = static_cast<int>(parse_num(cells[0], line_no));
      row.variety = static_cast<int>(parse_num(cells[1], line_no));
      row.y = parse_num(cells[2], line_no);
      if (row.site < 1 || row.site > 10)
        throw ParseError(line_no, "site out of range 1..10");
      if (row.variety < 1 || row.variety > 10)
        throw ParseError(line_no, "variety out of range 1..10");
      if (row.y < 0.0 || row.y > 1.0)
        throw ParseError(line_no, "proportion outside [0,1]");
      if (row.y < kClipLo) {
        row.y = kClipLo;
        d.clipped_rows.push_back(static_cast<int>(d.wrows.size()));
      } else if (row.y > 1.0 - kClipLo) {
        row.y = 1.0 - kClipLo;
        d.clipped_rows.push_back(static_cast<int>(d.wrows.size()));
      }
      d.wrows.push_back(row);
    } else {
      if (cells.size() != 2)
        throw ParseError(line_no, "expected 2 columns, got " +
                                      std::to_string(cells.size()));
      d.pairs.push_back(
          {parse_num(cells[0], line_no), parse_num(cells[1], line_no)});
    }
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  if (d.kind == GeeDataset::Kind::Wedderburn &&
      static_cast<int>(d.wrows.size()) != kWedderburnRows)
    throw ParseError(line_no, "expected " + std::to_string(kWedderburnRows) +
                                  " rows, got " +
                                  std::to_string(d.wrows.size()));
  if (d.kind == GeeDataset::Kind::Fieller) {
    if (static_cast<int>(d.pairs.size()) != kFiellerPairs)
      throw ParseError(line_no, "expected " + std::to_string(kFiellerPairs) +
                                    " rows, got " +
                                    std::to_string(d.pairs.size()));
    if (!have_sigma) throw ParseError(line_no, "missing '# sigma=' line");
    if (!(d.sigma > 0.0)) throw ParseError(line_no, "sigma must be positive");
  }
  return d;
}

void write_gee_csv(const GeeDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (data.kind == GeeDataset::Kind::Wedderburn) {
    out << "site,variety,y\n";
    for (const auto& r : data.wrows)
      out << r.site << ',' << r.variety << ',' << format_double(r.y) << '\n';
  } else {
    out << "# sigma=" << format_double(data.sigma) << '\n' << "y1,y2\n";
    for (const auto& p : data.pairs)
      out << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
  }
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

// ---- problem wrappers ----

Problem make_fieller_problem(std::shared_ptr<const GeeDataset> data,
                             int quadrature_nodes) {
  if (!data || data->kind != GeeDataset::Kind::Fieller)
    throw std::invalid_argument("fieller problem needs a Fieller dataset");
  Problem p;
  p.name = "fieller";
  p.dimension = 1;
  const QuadratureRule rule = gauss_legendre_01(quadrature_nodes);
  p.objective = [data, rule](const Vector& x, EvalCounters& c) {
    return fieller_objective(x[0], *data, rule, &c);
  };
  p.gradient = [data](const Vector& x) {
    return Vector{fieller_gradient(x[0], *data)};
  };
  p.standard_start = {0.5};
  p.fd_box_lo = -1.0;
  p.fd_box_hi = 6.0;
  return p;
}

Problem make_wedderburn_problem(std::shared_ptr<const GeeDataset> data,
                                Vector theta_ref, int quadrature_nodes) {
  if (!data || data->kind != GeeDataset::Kind::Wedderburn)
    throw std::invalid_argument(
        "wedderburn problem needs a Wedderburn dataset");
  if (theta_ref.empty()) theta_ref.assign(kWedderburnDim, 0.0);
  if (static_cast<int>(theta_ref.size()) != kWedderburnDim)
    throw std::invalid_argument("reference point must have dimension 20");
  Problem p;
  p.name = "wedderburn";
  p.dimension = kWedderburnDim;
  const QuadratureRule rule = gauss_legendre_01(quadrature_nodes);
  p.objective = [data, rule, theta_ref](const Vector& x, EvalCounters& c) {
    return wedderburn_objective(x, *data, theta_ref, rule, &c);
  };
  p.gradient = [data](const Vector& x) {
    return wedderburn_gradient(x, *data);
  };
  p.standard_start = Vector(kWedderburnDim, 0.0);
  p.fd_box_lo = -1.0;
  p.fd_box_hi = 1.0;
  return p;
}

}  // namespace trigger_descent
