#include "kchase/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace kchase {

namespace {

double sq(double v) { return v * v; }

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += sq(a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

// -- Metric -------------------------------------------------------------------

Metric Metric::line() { return Metric(Kind::Line, 1); }

Metric Metric::euclidean(int dim) {
  if (dim < 1) throw std::invalid_argument("euclidean metric needs dim >= 1");
  return Metric(Kind::Euclidean, dim);
}

Metric Metric::finite(std::vector<std::string> labels,
                      std::vector<std::vector<double>> dist) {
  const std::size_t n = labels.size();
  if (n == 0) throw std::invalid_argument("finite metric needs at least one point");
  if (dist.size() != n)
    throw std::invalid_argument("distance matrix size does not match labels");
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i].size() != n)
      throw std::invalid_argument("distance matrix must be square");
    if (std::abs(dist[i][i]) > 0.0)
      throw std::invalid_argument("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(dist[i][j] >= 0.0))
        throw std::invalid_argument("distances must be non-negative");
      if (std::abs(dist[i][j] - dist[j][i]) > kTol)
        throw std::invalid_argument("distance matrix must be symmetric");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        if (dist[i][j] > dist[i][l] + dist[l][j] + kTol)
          throw std::invalid_argument("triangle inequality violated");
  Metric m(Kind::Finite, 0);
  m.finite_ = std::make_shared<const FiniteData>(
      FiniteData{std::move(labels), std::move(dist)});
  return m;
}

int Metric::size() const {
  if (kind_ != Kind::Finite) throw std::logic_error("size(): not a finite metric");
  return static_cast<int>(finite_->labels.size());
}

const std::string& Metric::label(int site) const {
  if (kind_ != Kind::Finite) throw std::logic_error("label(): not a finite metric");
  return finite_->labels.at(site);
}

double Metric::site_dist(int a, int b) const {
  if (kind_ != Kind::Finite)
    throw std::logic_error("site_dist(): not a finite metric");
  return finite_->dist.at(a).at(b);
}

double Metric::diameter() const {
  if (kind_ != Kind::Finite)
    throw std::logic_error("diameter(): not a finite metric");
  double d = 0.0;
  for (const auto& row : finite_->dist)
    for (double v : row) d = std::max(d, v);
  return d;
}

double Metric::dist(const Point& a, const Point& b) const {
  switch (kind_) {
    case Kind::Line:
      return std::abs(a.x() - b.x());
    case Kind::Euclidean:
      if (static_cast<int>(a.coords.size()) != dim_ ||
          static_cast<int>(b.coords.size()) != dim_)
        throw std::invalid_argument("point dimension does not match metric");
      return euclid(a.coords, b.coords);
    case Kind::Finite:
      if (!a.is_site() || !b.is_site())
        throw std::invalid_argument("finite metric expects site points");
      return site_dist(a.site, b.site);
  }
  return 0.0;
}

bool Metric::same_space(const Metric& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::Euclidean) return dim_ == other.dim_;
  if (kind_ == Kind::Finite) return finite_ == other.finite_;
  return true;
}

bool same_point(const Metric& m, const Point& a, const Point& b, double tol) {
  return m.dist(a, b) <= tol;
}

// -- Request ------------------------------------------------------------------

Request Request::interval_indicator(double a, double b) {
  if (!(a <= b)) throw std::invalid_argument("interval indicator needs a <= b");
  Request r(Kind::IntervalIndicator, Metric::line());
  r.xs_ = {a, b};
  return r;
}

Request Request::piecewise_linear(std::vector<double> xs,
                                  std::vector<double> values) {
  if (xs.size() != values.size() || xs.size() < 2)
    throw std::invalid_argument("piecewise linear needs >= 2 breakpoints");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument("breakpoints must be strictly increasing");
  double prev_slope = -kInf;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double slope = (values[i] - values[i - 1]) / (xs[i] - xs[i - 1]);
    if (slope < prev_slope - kTol)
      throw std::invalid_argument("breakpoint values are not convex");
    prev_slope = std::max(prev_slope, slope);
  }
  Request r(Kind::PiecewiseLinear, Metric::line());
  r.xs_ = std::move(xs);
  r.vals_ = std::move(values);
  return r;
}

Request Request::power_distance(const Metric& m, Point center, double gamma,
                                double scale) {
  if (!(gamma >= 1.0)) throw std::invalid_argument("power distance needs gamma >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("power distance needs scale > 0");
  Request r(Kind::PowerDistance, m);
  r.center_ = std::move(center);
  r.gamma_ = gamma;
  r.scale_ = scale;
  return r;
}

Request Request::linear(std::vector<double> w) {
  double norm = 0.0;
  for (double v : w) norm += sq(v);
  norm = std::sqrt(norm);
  if (norm > 1.0 + 1e-12)
    throw std::invalid_argument("linear request needs |w| <= 1");
  Request r(Kind::Linear, Metric::euclidean(static_cast<int>(w.size())));
  r.lipschitz_ = norm;
  r.w_ = std::move(w);
  return r;
}

Request Request::planar_body(std::vector<std::array<double, 2>> vertices) {
  if (vertices.size() < 3)
    throw std::invalid_argument("planar body needs >= 3 vertices");
  Request r(Kind::PlanarBody, Metric::euclidean(2));
  r.poly_ = std::move(vertices);
  return r;
}

Request Request::custom(const Metric& m, std::function<double(const Point&)> fn,
                        Point center, double lipschitz) {
  Request r(Kind::Custom, m);
  r.fn_ = std::move(fn);
  r.center_ = std::move(center);
  r.lipschitz_ = lipschitz;
  return r;
}

double Request::value(const Point& x) const {
  switch (kind_) {
    case Kind::IntervalIndicator:
      return (x.x() >= xs_[0] && x.x() <= xs_[1]) ? 0.0 : kInf;
    case Kind::PiecewiseLinear: {
      const double p = x.x();
      const std::size_t n = xs_.size();
      if (p <= xs_[0]) {
        const double slope = (vals_[1] - vals_[0]) / (xs_[1] - xs_[0]);
        return vals_[0] + slope * (p - xs_[0]);
      }
      if (p >= xs_[n - 1]) {
        const double slope =
            (vals_[n - 1] - vals_[n - 2]) / (xs_[n - 1] - xs_[n - 2]);
        return vals_[n - 1] + slope * (p - xs_[n - 1]);
      }
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), p);
      const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
      const double t = (p - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
      return vals_[j - 1] + t * (vals_[j] - vals_[j - 1]);
    }
    case Kind::PowerDistance:
      return scale_ * std::pow(metric_.dist(x, center_), gamma_);
    case Kind::Linear: {
      double s = 0.0;
      for (std::size_t i = 0; i < w_.size(); ++i) s += w_[i] * x.coords.at(i);
      return scale_ * s;
    }
    case Kind::PlanarBody: {
      const double px = x.coords.at(0), py = x.coords.at(1);
      const std::size_t n = poly_.size();
      for (std::size_t i = 0; i < n; ++i) {
        const auto& a = poly_[i];
        const auto& b = poly_[(i + 1) % n];
        const double cross =
            (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0]);
        if (cross < -kTol) return kInf;
      }
      return 0.0;
    }
    case Kind::Custom:
      return scale_ * fn_(x);
  }
  return 0.0;
}

std::optional<Point> Request::minimizer() const {
  switch (kind_) {
    case Kind::IntervalIndicator:
      return Point::on_line(0.5 * (xs_[0] + xs_[1]));
    case Kind::PiecewiseLinear: {
      const std::size_t n = xs_.size();
      const double left_slope = (vals_[1] - vals_[0]) / (xs_[1] - xs_[0]);
      const double right_slope =
          (vals_[n - 1] - vals_[n - 2]) / (xs_[n - 1] - xs_[n - 2]);
      if (left_slope > kTol || right_slope < -kTol)
        return std::nullopt;  // value decreases without bound on some side
      // With non-decreasing slopes the minimum is attained at a breakpoint;
      // flat bottoms resolve to the midpoint of the argmin interval.
      double best = kInf;
      for (double v : vals_) best = std::min(best, v);
      double lo = kInf, hi = -kInf;
      for (std::size_t i = 0; i < n; ++i) {
        if (vals_[i] <= best + 1e-12) {
          lo = std::min(lo, xs_[i]);
          hi = std::max(hi, xs_[i]);
        }
      }
      return Point::on_line(0.5 * (lo + hi));
    }
    case Kind::PowerDistance:
      return center_;
    case Kind::Linear:
      return std::nullopt;
    case Kind::PlanarBody: {
      double cx = 0.0, cy = 0.0;
      for (const auto& v : poly_) {
        cx += v[0];
        cy += v[1];
      }
      const double n = static_cast<double>(poly_.size());
      return Point::at({cx / n, cy / n});
    }
    case Kind::Custom:
      return center_;
  }
  return std::nullopt;
}

double Request::min_value() const {
  const auto m = minimizer();
  if (!m) throw std::invalid_argument("request has no finite minimizer");
  return value(*m);
}

double Request::lipschitz_bound() const {
  switch (kind_) {
    case Kind::IntervalIndicator:
    case Kind::PlanarBody:
      return kInf;
    case Kind::PiecewiseLinear: {
      double worst = 0.0;
      for (std::size_t i = 1; i < xs_.size(); ++i)
        worst = std::max(
            worst, std::abs((vals_[i] - vals_[i - 1]) / (xs_[i] - xs_[i - 1])));
      return worst;
    }
    case Kind::PowerDistance:
      return gamma_ == 1.0 ? scale_ : kInf;
    case Kind::Linear:
    case Kind::Custom:
      return scale_ * lipschitz_;
  }
  return kInf;
}

Request Request::scaled(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("scale factor must be positive");
  Request r = *this;
  switch (kind_) {
    case Kind::IntervalIndicator:
    case Kind::PlanarBody:
      break;  // 0/inf values are scale-invariant
    case Kind::PiecewiseLinear:
      for (double& v : r.vals_) v *= s;
      break;
    case Kind::PowerDistance:
    case Kind::Linear:
    case Kind::Custom:
      r.scale_ *= s;
      break;
  }
  return r;
}

const Point& Request::center() const {
  if (kind_ != Kind::PowerDistance && kind_ != Kind::Custom)
    throw std::logic_error("request has no declared center");
  return center_;
}

// -- Configuration ------------------------------------------------------------

Configuration::Configuration(Metric m, std::vector<Point> positions)
    : metric_(std::move(m)), positions_(std::move(positions)) {
  if (positions_.empty())
    throw std::invalid_argument("configuration needs k >= 1 servers");
  canonicalize();
}

void Configuration::canonicalize() {
  if (metric_.kind() == Metric::Kind::Line) {
    std::sort(positions_.begin(), positions_.end(),
              [](const Point& a, const Point& b) { return a.x() < b.x(); });
  } else if (metric_.kind() == Metric::Kind::Finite) {
    std::sort(positions_.begin(), positions_.end(),
              [](const Point& a, const Point& b) { return a.site < b.site; });
  }
}

Configuration Configuration::with(int i, Point p) const {
  std::vector<Point> pos = positions_;
  pos.at(i) = std::move(p);
  return Configuration(metric_, std::move(pos));
}

std::vector<int> Configuration::sites() const {
  std::vector<int> s;
  s.reserve(positions_.size());
  for (const auto& p : positions_) {
    if (!p.is_site()) throw std::logic_error("sites(): not a finite metric");
    s.push_back(p.site);
  }
  return s;
}

// -- Operations ---------------------------------------------------------------

double assignment_min_cost(const std::vector<std::vector<double>>& cost) {
  // Hungarian algorithm with potentials, O(n^3).
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost[p[j] - 1][j - 1];
  return total;
}

double match_cost(const Configuration& X, const Configuration& Y) {
  if (X.k() != Y.k())
    throw std::invalid_argument("match_cost: configurations differ in k");
  if (!X.metric().same_space(Y.metric()))
    throw std::invalid_argument("match_cost: configurations differ in metric");
  const int k = X.k();
  if (X.metric().kind() == Metric::Kind::Line) {
    double s = 0.0;  // both are stored sorted
    for (int i = 0; i < k; ++i) s += std::abs(X.at(i).x() - Y.at(i).x());
    return s;
  }
  std::vector<std::vector<double>> cost(k, std::vector<double>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) cost[i][j] = X.metric().dist(X.at(i), Y.at(j));
  return assignment_min_cost(cost);
}

double serve_cost(const Configuration& X, const Request& f) {
  double best = kInf;
  for (const auto& p : X.positions()) best = std::min(best, f.value(p));
  return best;
}

double pairwise_spread(const Configuration& X) {
  double s = 0.0;
  for (int i = 0; i < X.k(); ++i)
    for (int j = i + 1; j < X.k(); ++j)
      s += X.metric().dist(X.at(i), X.at(j));
  return s;
}

int nearest_server(const Configuration& X, const Point& z) {
  int best = 0;
  double best_d = kInf;
  for (int i = 0; i < X.k(); ++i) {
    const double d = X.metric().dist(X.at(i), z);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// -- CostLedger -----------------------------------------------------------------

void CostLedger::add(double service, double movement) {
  if (!(service >= 0.0) || !(movement >= 0.0))
    throw std::invalid_argument("ledger entries must be non-negative");
  if (std::isinf(service) || std::isinf(movement))
    throw std::invalid_argument("ledger rejects infinite cost");
  steps_.emplace_back(service, movement);
  service_total_ += service;
  movement_total_ += movement;
}

bool CostLedger::consistent(double tol) const {
  double s = 0.0, m = 0.0;
  for (const auto& [sv, mv] : steps_) {
    if (sv < 0.0 || mv < 0.0) return false;
    s += sv;
    m += mv;
  }
  return std::abs(s - service_total_) <= tol &&
         std::abs(m - movement_total_) <= tol;
}

// -- SeedTree -------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SeedTree::SeedTree(std::uint64_t master_seed)
    : state_(splitmix64(master_seed)) {}

SeedTree SeedTree::child(std::string_view label) const {
  SeedTree t;
  t.state_ = splitmix64(fnv1a(label, state_ ^ 0xcbf29ce484222325ULL));
  return t;
}

SeedTree SeedTree::child(std::string_view label, std::uint64_t index) const {
  return child(label).child(std::to_string(index));
}

std::mt19937_64 SeedTree::stream() const { return std::mt19937_64(state_); }

// -- Trajectory CSV -------------------------------------------------------------

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  const int k = rows.empty() ? 0 : static_cast<int>(rows[0].positions.size());
  out << "step,service_cost,movement_cost";
  for (int i = 0; i < k; ++i) out << ",pos" << i;
  out << "\n";
  for (const auto& row : rows) {
    out << row.step << "," << row.service << "," << row.movement;
    for (const auto& p : row.positions) {
      out << ",";
      if (p.is_site()) {
        out << p.site;
      } else {
        for (std::size_t c = 0; c < p.coords.size(); ++c) {
          if (c) out << ";";
          out << p.coords[c];
        }
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace kchase
