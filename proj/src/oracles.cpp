#include "kchase/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace kchase {

namespace {

constexpr std::size_t kStateCap = 1'000'000;

std::vector<double> dedupe(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (out.empty() || x - out.back() > 1e-12) out.push_back(x);
  return out;
}

std::size_t pow_size(std::size_t g, int k) {
  std::size_t s = 1;
  for (int i = 0; i < k; ++i) {
    if (s > kStateCap / g + 1) return kStateCap + 1;
    s *= g;
  }
  return s;
}

// min_i val[i] + |x_j - x_i| along each grid line, one coordinate at a time.
void l1_transform(std::vector<double>& val, const std::vector<double>& grid,
                  int k) {
  const std::size_t g = grid.size();
  std::size_t stride = 1;
  for (int c = 0; c < k; ++c) {
    const std::size_t block = stride * g;
    for (std::size_t base = 0; base < val.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        double best = kInf;
        for (std::size_t j = 0; j < g; ++j) {
          if (j > 0) best += grid[j] - grid[j - 1];
          best = std::min(best, val[base + off + j * stride]);
          val[base + off + j * stride] = best;
        }
        best = kInf;
        for (std::size_t j = g; j-- > 0;) {
          if (j + 1 < g) best += grid[j + 1] - grid[j];
          best = std::min(best, val[base + off + j * stride]);
          val[base + off + j * stride] = std::min(val[base + off + j * stride], best);
        }
      }
    }
    stride = block;
  }
}

std::vector<std::size_t> state_indices(std::size_t s, std::size_t g, int k) {
  std::vector<std::size_t> idx(k);
  for (int c = 0; c < k; ++c) {
    idx[c] = s % g;
    s /= g;
  }
  return idx;
}

double state_serve(std::size_t s, std::size_t g, int k,
                   const std::vector<double>& fv) {
  double best = kInf;
  for (int c = 0; c < k; ++c) {
    best = std::min(best, fv[s % g]);
    s /= g;
  }
  return best;
}

// match between two line states = L1 between their sorted coordinates
double state_match(std::size_t a, std::size_t b, std::size_t g, int k,
                   const std::vector<double>& grid) {
  auto ia = state_indices(a, g, k), ib = state_indices(b, g, k);
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());
  double m = 0.0;
  for (int c = 0; c < k; ++c) m += std::abs(grid[ia[c]] - grid[ib[c]]);
  return m;
}

std::size_t locate(const std::vector<double>& grid, double x) {
  const auto it =
      std::min_element(grid.begin(), grid.end(), [x](double a, double b) {
        return std::abs(a - x) < std::abs(b - x);
      });
  if (std::abs(*it - x) > 1e-9)
    throw std::invalid_argument("grid does not contain a required point");
  return static_cast<std::size_t>(it - grid.begin());
}

std::vector<double> per_point_values(const Request& f,
                                     const std::vector<double>& grid) {
  std::vector<double> fv(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    fv[j] = f.value(Point::on_line(grid[j]));
  return fv;
}

}  // namespace

std::vector<double> line_grid_for(const std::vector<Request>& requests,
                                  const Configuration& X0,
                                  double extra_resolution) {
  std::vector<double> pts;
  for (const auto& p : X0.positions()) pts.push_back(p.x());
  for (const auto& f : requests) {
    if (const auto m = f.minimizer()) pts.push_back(m->x());
    switch (f.kind()) {
      case Request::Kind::IntervalIndicator:
        pts.push_back(f.interval_lo());
        pts.push_back(f.interval_hi());
        break;
      case Request::Kind::PiecewiseLinear:
        for (double b : f.breakpoints()) pts.push_back(b);
        break;
      default:
        break;
    }
  }
  if (extra_resolution > 0.0) {
    const auto [lo_it, hi_it] = std::minmax_element(pts.begin(), pts.end());
    const double lo = *lo_it, hi = *hi_it;
    const auto n = static_cast<std::size_t>(
        std::ceil((hi - lo) / extra_resolution - 1e-12));
    for (std::size_t i = 0; i <= n; ++i)
      pts.push_back(std::min(lo + static_cast<double>(i) * extra_resolution, hi));
  }
  return dedupe(std::move(pts));
}

namespace {

struct LineDp {
  std::size_t g = 0;
  std::size_t total = 0;
  std::vector<std::vector<double>> layers;  // layers[t] = values after step t
};

LineDp run_line_dp(const std::vector<Request>& requests, int k,
                   const Configuration& X0, const std::vector<double>& grid,
                   bool blind, bool keep_layers) {
  if (X0.metric().kind() != Metric::Kind::Line)
    throw std::invalid_argument("chasing OPT: line metric required");
  LineDp dp;
  dp.g = grid.size();
  dp.total = pow_size(dp.g, k);
  if (dp.total > kStateCap)
    throw CapacityError("chasing OPT: grid^k exceeds 10^6 states");
  if (keep_layers && dp.total * (requests.size() + 1) > 40'000'000)
    throw CapacityError("chasing OPT: trajectory table exceeds capacity");

  // initial state: X0 exactly
  std::size_t s0 = 0, mul = 1;
  for (int c = 0; c < k; ++c) {
    s0 += locate(grid, X0.at(c).x()) * mul;
    mul *= dp.g;
  }
  std::vector<double> val(dp.total, kInf);
  val[s0] = 0.0;
  if (keep_layers) dp.layers.push_back(val);

  for (const auto& f : requests) {
    const auto fv = per_point_values(f, grid);
    if (blind) {
      for (std::size_t s = 0; s < dp.total; ++s)
        if (val[s] < kInf) val[s] += state_serve(s, dp.g, k, fv);
      l1_transform(val, grid, k);
    } else {
      l1_transform(val, grid, k);
      for (std::size_t s = 0; s < dp.total; ++s) {
        const double sv = state_serve(s, dp.g, k, fv);
        val[s] = (sv < kInf && val[s] < kInf) ? val[s] + sv : kInf;
      }
    }
    if (keep_layers) dp.layers.push_back(val);
  }
  if (!keep_layers) dp.layers.push_back(std::move(val));
  return dp;
}

Configuration state_config(std::size_t s, std::size_t g, int k,
                           const std::vector<double>& grid) {
  std::vector<Point> pos;
  for (int c = 0; c < k; ++c) {
    pos.push_back(Point::on_line(grid[s % g]));
    s /= g;
  }
  return Configuration(Metric::line(), std::move(pos));
}

}  // namespace

LineOptResult chasing_opt_line(const std::vector<Request>& requests, int k,
                               const Configuration& X0,
                               const std::vector<double>& grid) {
  const LineDp dp = run_line_dp(requests, k, X0, grid, false, true);
  const auto& last = dp.layers.back();
  std::size_t best = 0;
  for (std::size_t s = 1; s < dp.total; ++s)
    if (last[s] < last[best]) best = s;

  LineOptResult res;
  res.value = last[best];
  const int T = static_cast<int>(requests.size());
  std::vector<std::size_t> states(T + 1);
  states[T] = best;
  for (int t = T; t >= 1; --t) {
    const auto& prev = dp.layers[t - 1];
    std::size_t arg = 0;
    double argv = kInf;
    for (std::size_t s = 0; s < dp.total; ++s) {
      if (prev[s] >= kInf) continue;
      const double v =
          prev[s] + state_match(s, states[t], dp.g, k, grid);
      if (v < argv - 1e-12) {
        argv = v;
        arg = s;
      }
    }
    states[t - 1] = arg;
  }
  for (int t = 0; t <= T; ++t)
    res.trajectory.push_back(state_config(states[t], dp.g, k, grid));
  return res;
}

double blind_opt_line(const std::vector<Request>& requests, int k,
                      const Configuration& X0,
                      const std::vector<double>& grid) {
  const LineDp dp = run_line_dp(requests, k, X0, grid, true, false);
  const auto& last = dp.layers.back();
  return *std::min_element(last.begin(), last.end());
}

RefineReport chasing_opt_refine(const std::vector<Request>& requests, int k,
                                const Configuration& X0,
                                const std::vector<double>& resolutions) {
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (!(resolutions[i] < resolutions[i - 1]))
      throw std::invalid_argument("resolutions must be strictly decreasing");
  RefineReport rep;
  rep.resolutions = resolutions;
  for (double h : resolutions) {
    const auto grid = line_grid_for(requests, X0, h);
    const auto r = chasing_opt_line(requests, k, X0, grid);
    rep.values.push_back(r.value);
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.values.size(); ++i) {
    if (rep.values[i] > rep.values[i - 1] + kTol) rep.monotone = false;
    rep.gap = std::abs(rep.values[i] - rep.values[i - 1]);
  }
  rep.final_value = rep.values.empty() ? 0.0 : rep.values.back();
  return rep;
}

// -- Finite-metric chasing OPT ---------------------------------------------------

namespace {

void enumerate_multisets(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(k, 0);
  while (true) {
    out.push_back(cur);
    int c = k - 1;
    while (c >= 0 && cur[c] == n - 1) --c;
    if (c < 0) break;
    ++cur[c];
    for (int j = c + 1; j < k; ++j) cur[j] = cur[c];
  }
}

double multiset_match(const Metric& m, const std::vector<int>& a,
                      const std::vector<int>& b) {
  const int k = static_cast<int>(a.size());
  if (k == 1) return m.site_dist(a[0], b[0]);
  std::vector<std::vector<double>> cost(k, std::vector<double>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) cost[i][j] = m.site_dist(a[i], b[j]);
  return assignment_min_cost(cost);
}

}  // namespace

SiteOptResult chasing_opt_sites(const Metric& metric,
                                const std::vector<int>& candidate_sites, int k,
                                const std::vector<Request>& requests,
                                const Configuration& X0, bool blind) {
  if (metric.kind() != Metric::Kind::Finite)
    throw std::invalid_argument("chasing_opt_sites: finite metric required");
  const int n = static_cast<int>(candidate_sites.size());
  std::vector<std::vector<int>> states;  // indices into candidate_sites
  enumerate_multisets(n, k, states);
  const std::size_t M = states.size();
  if (M > kStateCap) throw CapacityError("chasing_opt_sites: state overflow");

  auto sites_of = [&](const std::vector<int>& st) {
    std::vector<int> s(st.size());
    for (std::size_t i = 0; i < st.size(); ++i) s[i] = candidate_sites[st[i]];
    return s;
  };

  std::vector<std::vector<double>> match(M, std::vector<double>(M));
  for (std::size_t a = 0; a < M; ++a)
    for (std::size_t b = a; b < M; ++b)
      match[a][b] = match[b][a] =
          multiset_match(metric, sites_of(states[a]), sites_of(states[b]));

  const std::vector<int> x0 = X0.sites();
  std::size_t s0 = M;
  for (std::size_t a = 0; a < M; ++a)
    if (sites_of(states[a]) == x0) s0 = a;
  if (s0 == M)
    throw std::invalid_argument("chasing_opt_sites: X0 not in candidate set");

  auto serve_at = [&](std::size_t a, const Request& f) {
    double best = kInf;
    for (int idx : states[a])
      best = std::min(best, f.value(Point::at_site(candidate_sites[idx])));
    return best;
  };

  std::vector<std::vector<double>> layers;
  std::vector<double> val(M, kInf);
  val[s0] = 0.0;
  layers.push_back(val);
  for (const auto& f : requests) {
    std::vector<double> next(M, kInf);
    for (std::size_t c = 0; c < M; ++c) {
      for (std::size_t p = 0; p < M; ++p) {
        if (val[p] >= kInf) continue;
        const double charge = blind ? serve_at(p, f) : serve_at(c, f);
        if (charge >= kInf) continue;
        next[c] = std::min(next[c], val[p] + charge + match[p][c]);
      }
    }
    val = std::move(next);
    layers.push_back(val);
  }

  SiteOptResult res;
  std::size_t best = 0;
  for (std::size_t a = 1; a < M; ++a)
    if (val[a] < val[best]) best = a;
  res.value = val[best];

  const int T = static_cast<int>(requests.size());
  std::vector<std::size_t> path(T + 1);
  path[T] = best;
  for (int t = T; t >= 1; --t) {
    std::size_t arg = 0;
    double argv = kInf;
    for (std::size_t p = 0; p < M; ++p) {
      if (layers[t - 1][p] >= kInf) continue;
      const double charge =
          blind ? serve_at(p, requests[t - 1]) : serve_at(path[t], requests[t - 1]);
      if (charge >= kInf) continue;
      const double v = layers[t - 1][p] + charge + match[p][path[t]];
      if (v < argv - 1e-12) {
        argv = v;
        arg = p;
      }
    }
    path[t - 1] = arg;
  }
  for (int t = 0; t <= T; ++t) res.trajectory.push_back(sites_of(states[path[t]]));
  return res;
}

double kmedian_opt(const Metric& metric, int k,
                   const std::vector<std::pair<double, Point>>& requests,
                   const Configuration& X0, bool blind) {
  std::vector<int> candidates;
  for (const auto& [c, z] : requests) candidates.push_back(z.site);
  for (const auto& p : X0.positions()) candidates.push_back(p.site);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  std::vector<Request> fs;
  fs.reserve(requests.size());
  for (const auto& [c, z] : requests)
    fs.push_back(Request::power_distance(metric, z, 1.0, c));
  return chasing_opt_sites(metric, candidates, k, fs, X0, blind).value;
}

}  // namespace kchase
