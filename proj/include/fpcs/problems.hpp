#pragma once
// Continuous search problems: region A, feature map g, criterion set C and
// the derived indicator f(x) = [x in A and g(x) in C]. Includes the six
// stationary-point benchmarks (gradient threshold eps) and user-defined
// problems built from expression strings.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpcs/error.hpp"
#include "fpcs/expression.hpp"

namespace fpcs {

inline constexpr double kDefaultEpsilon = 0.1;
inline constexpr int kMaxFeatureDim = 9;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

using PointPredicate = std::function<bool(std::span<const double>)>;
using VectorField = std::function<void(std::span<const double>, std::span<double>)>;

struct SearchProblem {
  std::string name;
  int dimension = 0;
  std::vector<Interval> bounding_box;
  PointPredicate region;  // constraints beyond the bounding box; empty means "box only"
  int feature_dim = 0;
  VectorField feature;
  PointPredicate criterion;
  /// Grid resolution that resolves the smallest target features of this problem.
  int suggested_grid_resolution = 256;

  bool in_box(std::span<const double> x) const {
    for (int i = 0; i < dimension; ++i)
      if (!bounding_box[i].contains(x[i])) return false;
    return true;
  }

  bool in_region(std::span<const double> x) const { return in_box(x) && (!region || region(x)); }

  bool indicator(std::span<const double> x) const { return in_region(x) && meets_criterion(x); }

  /// criterion(g(x)) without the membership test for A.
  bool meets_criterion(std::span<const double> x) const {
    std::array<double, kMaxFeatureDim> g;
    feature(x, std::span<double>(g.data(), feature_dim));
    return criterion(std::span<const double>(g.data(), feature_dim));
  }

  double box_volume() const {
    double v = 1.0;
    for (const Interval& iv : bounding_box) v *= iv.width();
    return v;
  }
};

struct Constraint {
  std::string description;  // human-readable form, "expr <= bound"
  PointPredicate holds;
};

/// An objective with analytic (or finite-difference) gradient over a domain.
struct TestFunction {
  std::string name;
  std::string formula;
  int dimension = 2;
  std::function<double(std::span<const double>)> objective;
  VectorField gradient;
  std::vector<Interval> box;
  std::vector<Constraint> constraints;
  double epsilon = kDefaultEpsilon;
  bool analytic_gradient = true;
  std::optional<double> region_measure;  // m(A) when known in closed form
  int suggested_grid_resolution = 1024;
  std::string note;

  bool in_domain(std::span<const double> x) const {
    for (int i = 0; i < dimension; ++i)
      if (!box[i].contains(x[i])) return false;
    for (const Constraint& c : constraints)
      if (!c.holds(x)) return false;
    return true;
  }
};

/// 1 iff x lies in the domain and every |d_j h(x)| <= eps. The gradient is
/// the unconstrained one even on the domain boundary.
inline int gradient_indicator(const TestFunction& fn, std::span<const double> x) {
  if (!fn.in_domain(x)) return 0;
  std::array<double, kMaxFeatureDim> g{};
  fn.gradient(x, std::span<double>(g.data(), fn.dimension));
  for (int j = 0; j < fn.dimension; ++j)
    if (!(std::abs(g[j]) <= fn.epsilon)) return 0;
  return 1;
}

/// g = grad h, C = l_inf ball of radius eps, A = box and constraints.
inline SearchProblem to_search_problem(const TestFunction& fn) {
  auto shared = std::make_shared<const TestFunction>(fn);
  SearchProblem p;
  p.name = fn.name;
  p.dimension = fn.dimension;
  p.bounding_box = fn.box;
  if (!fn.constraints.empty()) {
    p.region = [shared](std::span<const double> x) {
      for (const Constraint& c : shared->constraints)
        if (!c.holds(x)) return false;
      return true;
    };
  }
  p.feature_dim = fn.dimension;
  p.feature = fn.gradient;
  const double eps = fn.epsilon;
  p.criterion = [eps](std::span<const double> g) {
    for (double v : g)
      if (!(std::abs(v) <= eps)) return false;
    return true;
  };
  p.suggested_grid_resolution = fn.suggested_grid_resolution;
  return p;
}

namespace benchmarks {

using std::numbers::pi;

inline TestFunction rastrigin() {
  TestFunction f;
  f.name = "rastrigin";
  f.formula = "sum_i (x_i^2 - 10 cos(2 pi x_i))";
  f.objective = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v);
    return s;
  };
  f.gradient = [](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i] + 20.0 * pi * std::sin(2.0 * pi * x[i]);
  };
  f.box = {{-2.0, 2.0}, {-2.0, 2.0}};
  f.region_measure = 16.0;
  // Target cells are ~5e-4 wide squares around each of 81 stationary points.
  f.suggested_grid_resolution = 16384;
  return f;
}

inline TestFunction styblinski_tang() {
  TestFunction f;
  f.name = "styblinski_tang";
  f.formula = "(1/2) sum_i (x_i^4 - 16 x_i^2 + 5 x_i)";
  f.objective = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v * v * v - 16.0 * v * v + 5.0 * v;
    return 0.5 * s;
  };
  f.gradient = [](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 0.5 * (4.0 * x[i] * x[i] * x[i] - 32.0 * x[i] + 5.0);
  };
  f.box = {{-2.0, 2.0}, {-2.0, 2.0}};
  f.region_measure = 16.0;
  f.suggested_grid_resolution = 2048;
  return f;
}

inline constexpr double kAlpineSingularFloor = 1e-9;

inline TestFunction alpine02() {
  TestFunction f;
  f.name = "alpine02";
  f.formula = "-prod_i (sqrt(x_i) sin(x_i))";
  f.objective = [](std::span<const double> x) {
    double prod = 1.0;
    for (double v : x) prod *= std::sqrt(v) * std::sin(v);
    return -prod;
  };
  // The gradient diverges as any x_i -> 0+; report +inf there so the point
  // can never satisfy the threshold.
  f.gradient = [](std::span<const double> x, std::span<double> g) {
    const std::size_t d = x.size();
    for (std::size_t i = 0; i < d; ++i) {
      if (x[i] < kAlpineSingularFloor) {
        for (std::size_t j = 0; j < d; ++j) g[j] = std::numeric_limits<double>::infinity();
        return;
      }
    }
    std::array<double, kMaxFeatureDim> factor{}, slope{};
    for (std::size_t i = 0; i < d; ++i) {
      const double r = std::sqrt(x[i]), s = std::sin(x[i]);
      factor[i] = r * s;
      slope[i] = s / (2.0 * r) + r * std::cos(x[i]);
    }
    for (std::size_t i = 0; i < d; ++i) {
      double rest = 1.0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) rest *= factor[j];
      g[i] = -slope[i] * rest;
    }
  };
  f.box = {{0.0, 10.0}, {0.0, 10.0}};
  f.region_measure = 100.0;
  // Near x_i = 0 the target set is a strip only ~5e-4 wide.
  f.suggested_grid_resolution = 32768;
  return f;
}

/// The "Himmelblan" row exactly as printed: the first bracket is linear in x1,
/// unlike the classical Himmelblau function. On [-2, 2]^2 its first partial
/// derivative never drops below 16 in magnitude, so the target set is empty.
inline TestFunction himmelblan() {
  TestFunction f;
  f.name = "himmelblan";
  f.formula = "(x1 + x2 - 11)^2 + (x1 + x2^2 - 7)^2";
  f.objective = [](std::span<const double> x) {
    const double a = x[0] + x[1] - 11.0, b = x[0] + x[1] * x[1] - 7.0;
    return a * a + b * b;
  };
  f.gradient = [](std::span<const double> x, std::span<double> g) {
    const double a = x[0] + x[1] - 11.0, b = x[0] + x[1] * x[1] - 7.0;
    g[0] = 2.0 * a + 2.0 * b;
    g[1] = 2.0 * a + 4.0 * x[1] * b;
  };
  f.box = {{-2.0, 2.0}, {-2.0, 2.0}};
  f.region_measure = 16.0;
  f.suggested_grid_resolution = 2048;
  f.note = "printed form; differs from classical Himmelblau (x1^2 in the first bracket)";
  return f;
}

/// Classical Himmelblau, provided for comparison only.
inline TestFunction himmelblau() {
  TestFunction f;
  f.name = "himmelblau";
  f.formula = "(x1^2 + x2 - 11)^2 + (x1 + x2^2 - 7)^2";
  f.objective = [](std::span<const double> x) {
    const double a = x[0] * x[0] + x[1] - 11.0, b = x[0] + x[1] * x[1] - 7.0;
    return a * a + b * b;
  };
  f.gradient = [](std::span<const double> x, std::span<double> g) {
    const double a = x[0] * x[0] + x[1] - 11.0, b = x[0] + x[1] * x[1] - 7.0;
    g[0] = 4.0 * x[0] * a + 2.0 * b;
    g[1] = 2.0 * a + 4.0 * x[1] * b;
  };
  f.box = {{-2.0, 2.0}, {-2.0, 2.0}};
  f.region_measure = 16.0;
  f.suggested_grid_resolution = 4096;
  f.note = "classical form, not part of the benchmark table";
  return f;
}

inline TestFunction rosenbrock() {
  TestFunction f;
  f.name = "rosenbrock";
  f.formula = "(1 - x1)^2 + 100 (x2 - x1^2)^2";
  f.objective = [](std::span<const double> x) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  f.gradient = [](std::span<const double> x, std::span<double> g) {
    const double b = x[1] - x[0] * x[0];
    g[0] = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
  };
  const double r = std::numbers::sqrt2;
  f.box = {{-r, r}, {-r, r}};
  f.constraints.push_back({"x1^2 + x2^2 <= 2", [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] <= 2.0; }});
  f.region_measure = 2.0 * pi;
  // The target set is a ~2e-4 wide sliver along the valley near (1, 1).
  f.suggested_grid_resolution = 32768;
  return f;
}

inline TestFunction gomez_levy() {
  TestFunction f;
  f.name = "gomez_levy";
  f.formula = "4 x1^2 - 2.1 x1^4 + x1^6/3 + x1 x2 - 4 x2^2 + 4 x2^4";
  f.objective = [](std::span<const double> x) {
    const double a = x[0], b = x[1];
    const double a2 = a * a, b2 = b * b;
    return 4.0 * a2 - 2.1 * a2 * a2 + a2 * a2 * a2 / 3.0 + a * b - 4.0 * b2 + 4.0 * b2 * b2;
  };
  f.gradient = [](std::span<const double> x, std::span<double> g) {
    const double a = x[0], b = x[1];
    g[0] = 8.0 * a - 8.4 * a * a * a + 2.0 * a * a * a * a * a + b;
    g[1] = a - 8.0 * b + 16.0 * b * b * b;
  };
  f.box = {{-1.0, 0.75}, {-1.0, 1.0}};
  f.constraints.push_back({"-sin(4 pi x1) + 2 sin^2(2 pi x2) <= 1.5", [](std::span<const double> x) {
                             const double s = std::sin(2.0 * pi * x[1]);
                             return -std::sin(4.0 * pi * x[0]) + 2.0 * s * s <= 1.5;
                           }});
  f.suggested_grid_resolution = 4096;
  return f;
}

}  // namespace benchmarks

/// The six benchmark rows in table order.
inline std::vector<TestFunction> builtin_suite() {
  return {benchmarks::rastrigin(), benchmarks::styblinski_tang(), benchmarks::alpine02(),
          benchmarks::himmelblan(), benchmarks::rosenbrock(),     benchmarks::gomez_levy()};
}

/// Looks up a builtin by name; also knows the classical "himmelblau" alias.
inline std::optional<TestFunction> find_builtin(std::string_view name) {
  for (TestFunction& f : builtin_suite())
    if (f.name == name) return std::move(f);
  if (name == "himmelblau") return benchmarks::himmelblau();
  return std::nullopt;
}

/// Central finite-difference gradient with step h * max(1, |x_i|).
inline void finite_difference_gradient(const std::function<double(std::span<const double>)>& h, std::span<const double> x,
                                       std::span<double> g, double step = 1e-6) {
  std::array<double, kMaxFeatureDim> work{};
  const std::size_t d = x.size();
  std::copy(x.begin(), x.end(), work.begin());
  std::span<const double> view(work.data(), d);
  for (std::size_t i = 0; i < d; ++i) {
    const double hi = step * std::max(1.0, std::abs(x[i]));
    work[i] = x[i] + hi;
    const double up = h(view);
    work[i] = x[i] - hi;
    const double down = h(view);
    work[i] = x[i];
    g[i] = (up - down) / (2.0 * hi);
  }
}

/// A user-defined problem as it appears in a config file.
struct CustomProblemSpec {
  std::string name;
  int dimension = 2;
  std::string objective;
  std::vector<Interval> box;
  std::vector<std::string> constraints;  // each "lhs <= rhs", "lhs >= rhs" or "expr" (meaning expr <= 0)
  double epsilon = kDefaultEpsilon;
  int grid_resolution = 1024;
};

namespace detail {

inline Constraint compile_constraint(const std::string& text, int dimension) {
  auto split = [&](std::string_view op) -> std::optional<std::pair<std::string, std::string>> {
    const auto at = text.find(op);
    if (at == std::string::npos) return std::nullopt;
    return std::pair{text.substr(0, at), text.substr(at + op.size())};
  };
  if (auto parts = split("<=")) {
    auto lhs = std::make_shared<Expression>(Expression::parse(parts->first, dimension));
    auto rhs = std::make_shared<Expression>(Expression::parse(parts->second, dimension));
    return {text, [lhs, rhs](std::span<const double> x) { return (*lhs)(x) <= (*rhs)(x); }};
  }
  if (auto parts = split(">=")) {
    auto lhs = std::make_shared<Expression>(Expression::parse(parts->first, dimension));
    auto rhs = std::make_shared<Expression>(Expression::parse(parts->second, dimension));
    return {text, [lhs, rhs](std::span<const double> x) { return (*lhs)(x) >= (*rhs)(x); }};
  }
  auto expr = std::make_shared<Expression>(Expression::parse(text, dimension));
  return {text + " <= 0", [expr](std::span<const double> x) { return (*expr)(x) <= 0.0; }};
}

}  // namespace detail

/// Builds a TestFunction whose gradient is taken by central finite differences.
inline TestFunction make_custom_problem(const CustomProblemSpec& spec) {
  detail::require(spec.dimension >= 1 && spec.dimension <= 9, "custom problem: dimension must lie in [1, 9]");
  detail::require(static_cast<int>(spec.box.size()) == spec.dimension, "custom problem: box needs one interval per dimension");
  for (const Interval& iv : spec.box)
    detail::require(iv.lo < iv.hi, "custom problem: every interval needs lo < hi");
  detail::require(spec.epsilon > 0.0, "custom problem: epsilon must be positive");

  auto expr = std::make_shared<Expression>(Expression::parse(spec.objective, spec.dimension));
  TestFunction f;
  f.name = spec.name;
  f.formula = spec.objective;
  f.dimension = spec.dimension;
  f.objective = [expr](std::span<const double> x) { return (*expr)(x); };
  f.gradient = [expr](std::span<const double> x, std::span<double> g) {
    finite_difference_gradient([&](std::span<const double> y) { return (*expr)(y); }, x, g);
  };
  f.analytic_gradient = false;
  f.box = spec.box;
  for (const std::string& c : spec.constraints) f.constraints.push_back(detail::compile_constraint(c, spec.dimension));
  f.epsilon = spec.epsilon;
  if (f.constraints.empty()) {
    double v = 1.0;
    for (const Interval& iv : f.box) v *= iv.width();
    f.region_measure = v;
  }
  f.suggested_grid_resolution = spec.grid_resolution;
  return f;
}

}  // namespace fpcs
