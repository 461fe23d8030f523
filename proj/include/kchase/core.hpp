#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kchase {

inline constexpr double kTol = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Raised when a requested computation exceeds a declared state-space budget.
// The CLI maps it to exit code 3.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- Metric spaces ------------------------------------------------------------

struct Point;

// One of: the real line, Euclidean R^d, or a finite point set with an
// explicit distance matrix.  Finite metrics validate symmetry, zero
// diagonal and the triangle inequality on construction.
class Metric {
 public:
  enum class Kind { Line, Euclidean, Finite };

  static Metric line();
  static Metric euclidean(int dim);
  static Metric finite(std::vector<std::string> labels,
                       std::vector<std::vector<double>> dist);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  // Finite metrics only.
  int size() const;
  const std::string& label(int site) const;
  double site_dist(int a, int b) const;
  double diameter() const;

  double dist(const Point& a, const Point& b) const;
  bool same_space(const Metric& other) const;

 private:
  struct FiniteData {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> dist;
  };
  Metric(Kind kind, int dim) : kind_(kind), dim_(dim) {}
  Kind kind_;
  int dim_;
  std::shared_ptr<const FiniteData> finite_;
};

// A location in a metric space: coordinates for line/euclidean metrics,
// a site index for finite ones.
struct Point {
  std::vector<double> coords;
  int site = -1;

  static Point on_line(double x) { return Point{{x}, -1}; }
  static Point at(std::vector<double> c) { return Point{std::move(c), -1}; }
  static Point at_site(int s) { return Point{{}, s}; }

  double x() const { return coords.at(0); }
  bool is_site() const { return site >= 0; }
};

bool same_point(const Metric& m, const Point& a, const Point& b,
                double tol = kTol);

// -- Requests -----------------------------------------------------------------

// A request is a tagged cost function over a metric space.  Every variant
// is convex where applicable and exposes value(x), minimizer() and a
// (possibly infinite) Lipschitz bound.
class Request {
 public:
  enum class Kind {
    IntervalIndicator,  // line: 0 on [a,b], +inf outside
    PiecewiseLinear,    // line: convex, linear extension beyond end breakpoints
    PowerDistance,      // any metric: c * dist(x,z)^gamma, gamma >= 1, c > 0
    Linear,             // euclidean: w . x, |w| <= 1
    PlanarBody,         // euclidean d=2: 0 inside a convex polygon, +inf outside
    Custom,             // user-declared sampled function with a declared center
  };

  static Request interval_indicator(double a, double b);
  static Request piecewise_linear(std::vector<double> xs, std::vector<double> values);
  static Request power_distance(const Metric& m, Point center, double gamma,
                                double scale = 1.0);
  static Request linear(std::vector<double> w);
  // Vertices of a convex polygon, counter-clockwise.
  static Request planar_body(std::vector<std::array<double, 2>> vertices);
  static Request custom(const Metric& m, std::function<double(const Point&)> fn,
                        Point center, double lipschitz = kInf);

  Kind kind() const { return kind_; }
  const Metric& metric() const { return metric_; }

  double value(const Point& x) const;
  // Flat argmin sets resolve to their midpoint (line) or vertex centroid
  // (planar body).  Empty when the request has no finite minimizer.
  std::optional<Point> minimizer() const;
  double min_value() const;
  double lipschitz_bound() const;

  // s*f, for request splitting.
  Request scaled(double s) const;

  // PowerDistance / Custom center.
  const Point& center() const;
  double gamma() const { return gamma_; }
  double scale() const { return scale_; }

  const std::vector<double>& breakpoints() const { return xs_; }
  const std::vector<double>& breakpoint_values() const { return vals_; }
  double interval_lo() const { return xs_.at(0); }
  double interval_hi() const { return xs_.at(1); }
  const std::vector<double>& direction() const { return w_; }
  const std::vector<std::array<double, 2>>& vertices() const { return poly_; }

 private:
  explicit Request(Kind kind, Metric m) : kind_(kind), metric_(std::move(m)) {}

  Kind kind_;
  Metric metric_;
  std::vector<double> xs_, vals_;   // pwl breakpoints / indicator [a,b]
  Point center_;                    // power / custom
  double gamma_ = 1.0;
  double scale_ = 1.0;
  std::vector<double> w_;           // linear
  std::vector<std::array<double, 2>> poly_;
  std::function<double(const Point&)> fn_;
  double lipschitz_ = kInf;
};

// -- Configurations -----------------------------------------------------------

// An ordered multiset of k server positions.  Line and finite-metric
// configurations are kept sorted after every operation.
class Configuration {
 public:
  Configuration(Metric m, std::vector<Point> positions);

  int k() const { return static_cast<int>(positions_.size()); }
  const Metric& metric() const { return metric_; }
  const std::vector<Point>& positions() const { return positions_; }
  const Point& at(int i) const { return positions_.at(i); }

  // Replace position i; the result is re-canonicalized.
  Configuration with(int i, Point p) const;
  // Sorted site multiset (finite metrics only).
  std::vector<int> sites() const;

 private:
  void canonicalize();
  Metric metric_;
  std::vector<Point> positions_;
};

// Minimum-cost perfect matching between equal-cardinality configurations.
// On the line this is the sorted coordinate-wise sum; elsewhere a Hungarian
// assignment over the pairwise distances.
double match_cost(const Configuration& X, const Configuration& Y);

// min over servers of f; +inf is possible for indicator variants.
double serve_cost(const Configuration& X, const Request& f);

// Sum of distances over unordered server pairs.
double pairwise_spread(const Configuration& X);

// Index of the server closest to z (lowest index on ties).
int nearest_server(const Configuration& X, const Point& z);

// O(n^3) Hungarian assignment on a square cost matrix.
double assignment_min_cost(const std::vector<std::vector<double>>& cost);

// -- Cost accounting ----------------------------------------------------------

// Service and movement totals kept separate so blind vs standard charging
// stays explicit.  Rejects negative and infinite entries: an algorithm must
// move into a body before being charged.
class CostLedger {
 public:
  void add(double service, double movement);
  double service_total() const { return service_total_; }
  double movement_total() const { return movement_total_; }
  double total() const { return service_total_ + movement_total_; }
  const std::vector<std::pair<double, double>>& per_step() const {
    return steps_;
  }
  bool consistent(double tol = kTol) const;

 private:
  double service_total_ = 0.0;
  double movement_total_ = 0.0;
  std::vector<std::pair<double, double>> steps_;
};

// -- Seeded randomness --------------------------------------------------------

// Deterministic stream derivation: the same (master seed, path) always
// yields the same stream, distinct paths independent ones.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t master_seed);

  SeedTree child(std::string_view label) const;
  SeedTree child(std::string_view label, std::uint64_t index) const;

  std::uint64_t node_seed() const { return state_; }
  std::mt19937_64 stream() const;

 private:
  explicit SeedTree() = default;
  std::uint64_t state_ = 0;
};

// -- Trajectory serialization ---------------------------------------------------

// One CSV row per step: step, service_cost, movement_cost, then k position
// columns (euclidean coordinates semicolon-separated).
struct TrajectoryRow {
  int step;
  double service;
  double movement;
  std::vector<Point> positions;
};

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

}  // namespace kchase
