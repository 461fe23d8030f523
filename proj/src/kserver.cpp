#include "kchase/kserver.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace kchase {

namespace {

constexpr std::size_t kConfigCap = 1'000'000;

std::size_t multiset_count(int n, int k) {
  // C(n+k-1, k), saturating at the capacity guard
  std::size_t num = 1;
  for (int i = 1; i <= k; ++i) {
    num = num * static_cast<std::size_t>(n + i - 1) / static_cast<std::size_t>(i);
    if (num > 100 * kConfigCap) return num;
  }
  return num;
}

int moved_servers(const std::vector<int>& a, const std::vector<int>& b) {
  // multiset difference size between sorted site lists
  std::vector<int> diff;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(diff));
  return static_cast<int>(diff.size());
}

}  // namespace

FiniteConfigSpace::FiniteConfigSpace(const Metric& metric, int k)
    : metric_(metric), k_(k) {
  if (metric.kind() != Metric::Kind::Finite)
    throw std::invalid_argument("config space needs a finite metric");
  if (k < 1) throw std::invalid_argument("config space needs k >= 1");
  const int n = metric.size();
  if (multiset_count(n, k) > kConfigCap)
    throw CapacityError("configuration space exceeds 10^6 entries");

  std::vector<int> cur(k, 0);
  while (true) {
    configs_.push_back(cur);
    int c = k - 1;
    while (c >= 0 && cur[c] == n - 1) --c;
    if (c < 0) break;
    ++cur[c];
    for (int j = c + 1; j < k; ++j) cur[j] = cur[c];
  }

  const int m = count();
  match_.assign(m, std::vector<double>(m, 0.0));
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      double cost;
      if (k == 1) {
        cost = metric_.site_dist(configs_[a][0], configs_[b][0]);
      } else {
        std::vector<std::vector<double>> c(k, std::vector<double>(k));
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j)
            c[i][j] = metric_.site_dist(configs_[a][i], configs_[b][j]);
        cost = assignment_min_cost(c);
      }
      match_[a][b] = match_[b][a] = cost;
    }
  }

  containing_.assign(n, {});
  for (int a = 0; a < m; ++a)
    for (int s = 0; s < n; ++s)
      if (contains_site(a, s)) containing_[s].push_back(a);
}

int FiniteConfigSpace::id_of(const std::vector<int>& sorted_sites) const {
  const auto it =
      std::lower_bound(configs_.begin(), configs_.end(), sorted_sites);
  if (it == configs_.end() || *it != sorted_sites)
    throw std::invalid_argument("configuration not in space");
  return static_cast<int>(it - configs_.begin());
}

bool FiniteConfigSpace::contains_site(int id, int site) const {
  const auto& c = configs_[id];
  return std::binary_search(c.begin(), c.end(), site);
}

Configuration FiniteConfigSpace::configuration(int id) const {
  std::vector<Point> pos;
  for (int s : configs_.at(id)) pos.push_back(Point::at_site(s));
  return Configuration(metric_, std::move(pos));
}

WorkFunction::WorkFunction(std::shared_ptr<const FiniteConfigSpace> space,
                           const Configuration& X0)
    : space_(std::move(space)) {
  const int x0 = space_->id_of(X0.sites());
  values_.resize(space_->count());
  for (int c = 0; c < space_->count(); ++c) values_[c] = space_->match(x0, c);
}

void WorkFunction::update(int request_site) {
  const auto& holders = space_->containing(request_site);
  std::vector<double> next(values_.size());
  for (std::size_t c = 0; c < values_.size(); ++c) {
    double best = kInf;
    for (int h : holders)
      best = std::min(best, values_[h] + space_->match(h, static_cast<int>(c)));
    next[c] = best;
  }
  values_ = std::move(next);
  ++step_;
}

bool WorkFunction::lipschitz_ok(double tol) const {
  for (std::size_t a = 0; a < values_.size(); ++a)
    for (std::size_t b = a + 1; b < values_.size(); ++b)
      if (std::abs(values_[a] - values_[b]) >
          space_->match(static_cast<int>(a), static_cast<int>(b)) + tol)
        return false;
  return true;
}

WfaStepResult wfa_step(WorkFunction& w, const Configuration& X,
                       const Point& r) {
  if (!r.is_site())
    throw std::invalid_argument("wfa_step: request must be a site point");
  const auto& space = w.space();
  const int x = space.id_of(X.sites());
  w.update(r.site);

  int best = -1;
  double best_score = kInf;
  int best_moved = 0;
  for (int c : space.containing(r.site)) {
    const double score = w.value(c) + space.match(x, c);
    const int moved = moved_servers(space.sites(c), space.sites(x));
    if (score < best_score - 1e-12 ||
        (score <= best_score + 1e-12 && moved < best_moved)) {
      best = c;
      best_score = score;
      best_moved = moved;
    }
  }
  return {space.configuration(best), space.match(x, best), best};
}

double kserver_opt(const Metric& metric, int k,
                   const std::vector<Point>& requests,
                   const Configuration& X0) {
  const FiniteConfigSpace space(metric, k);
  const int m = space.count();
  std::vector<double> val(m, kInf);
  val[space.id_of(X0.sites())] = 0.0;
  for (const auto& r : requests) {
    std::vector<double> next(m, kInf);
    for (int c : space.containing(r.site)) {
      for (int p = 0; p < m; ++p) {
        if (val[p] >= kInf) continue;
        next[c] = std::min(next[c], val[p] + space.match(p, c));
      }
    }
    val = std::move(next);
  }
  return *std::min_element(val.begin(), val.end());
}

Configuration double_coverage_line(const Configuration& X, double r) {
  if (X.metric().kind() != Metric::Kind::Line)
    throw std::invalid_argument("double coverage: line metric required");
  const int k = X.k();
  for (int i = 0; i < k; ++i)
    if (std::abs(X.at(i).x() - r) <= 1e-12) return X;

  std::vector<Point> pos = X.positions();
  if (r < X.at(0).x()) {
    pos[0] = Point::on_line(r);
  } else if (r > X.at(k - 1).x()) {
    pos[k - 1] = Point::on_line(r);
  } else {
    int left = 0;
    while (left + 1 < k && X.at(left + 1).x() < r) ++left;
    const double delta = std::min(r - X.at(left).x(), X.at(left + 1).x() - r);
    pos[left] = Point::on_line(X.at(left).x() + delta);
    pos[left + 1] = Point::on_line(X.at(left + 1).x() - delta);
  }
  return Configuration(X.metric(), std::move(pos));
}

WfaBackend::WfaBackend(std::shared_ptr<const FiniteConfigSpace> space,
                       const Configuration& X0)
    : work_(std::move(space), X0), config_(X0) {}

double WfaBackend::serve(const Point& r) {
  WfaStepResult res = wfa_step(work_, config_, r);
  config_ = res.post;
  return res.movement;
}

double DoubleCoverageBackend::serve(const Point& r) {
  Configuration next = double_coverage_line(config_, r.x());
  const double movement = match_cost(config_, next);
  config_ = next;
  return movement;
}

}  // namespace kchase
