#include "kchase/line_chaser.hpp"

#include <algorithm>
#include <cmath>

namespace kchase {

namespace {

// One server travelling from start toward the argmin; value(t) is the
// request evaluated at its position after travelling t.
struct Mover {
  double start = 0.0;
  double dir = 0.0;  // +1 or -1

  double pos(double t) const { return start + dir * t; }
};

double mover_value(const Request& f, const Mover& m, double t) {
  return f.value(Point::on_line(m.pos(t)));
}

// Times in (0, limit) at which a mover crosses a breakpoint of f, i.e. the
// kinks of t -> f(pos(t)) for piecewise-linear requests.
std::vector<double> kink_times(const Request& f, const Mover& m, double limit) {
  std::vector<double> ts;
  if (f.kind() == Request::Kind::PiecewiseLinear) {
    for (double b : f.breakpoints()) {
      const double t = (b - m.start) * m.dir;
      if (t > 1e-15 && t < limit - 1e-15) ts.push_back(t);
    }
  }
  return ts;
}

bool analytic_kind(const Request& f) {
  switch (f.kind()) {
    case Request::Kind::PiecewiseLinear:
      return true;
    case Request::Kind::PowerDistance:
      return f.gamma() == 1.0;
    default:
      return false;
  }
}

// Earliest t in (0, t_max] with min_i f(mover_i(t)) <= rate * t, or t_max
// when the balance never triggers.  rate is the number of movers (total
// movement per unit time).
double stop_time(const Request& f, const std::vector<Mover>& movers,
                 double t_max, double rate) {
  auto g = [&](double t) {
    double best = kInf;
    for (const auto& m : movers) best = std::min(best, mover_value(f, m, t));
    return best - rate * t;
  };
  if (f.kind() == Request::Kind::IntervalIndicator) {
    // +inf outside the body: the movers proceed until one enters it.
    double entry = t_max;
    for (const auto& m : movers) {
      const double to_lo = (f.interval_lo() - m.start) * m.dir;
      const double to_hi = (f.interval_hi() - m.start) * m.dir;
      const double lo = std::min(to_lo, to_hi), hi = std::max(to_lo, to_hi);
      if (hi >= 0.0) entry = std::min(entry, std::max(lo, 0.0));
    }
    return std::min(entry, t_max);
  }
  if (analytic_kind(f)) {
    std::vector<double> ts{0.0};
    for (const auto& m : movers)
      for (double t : kink_times(f, m, t_max)) ts.push_back(t);
    ts.push_back(t_max);
    std::sort(ts.begin(), ts.end());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      const double t1 = ts[i], t2 = ts[i + 1];
      if (t2 - t1 <= 1e-15) continue;
      double best_root = kInf;
      for (const auto& m : movers) {
        const double u1 = mover_value(f, m, t1) - rate * t1;
        const double u2 = mover_value(f, m, t2) - rate * t2;
        if (u1 <= 0.0) return t1;  // only reachable at the very first kink
        if (u2 > 0.0) continue;
        best_root = std::min(best_root, t1 + u1 * (t2 - t1) / (u1 - u2));
      }
      if (best_root < kInf) return std::min(best_root, t_max);
    }
    return t_max;
  }
  // General convex request: g is continuous and strictly decreasing.
  if (g(t_max) > 0.0) return t_max;
  double lo = 0.0, hi = t_max;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

ChaseStep chase_step(const Configuration& X, const Request& f) {
  if (X.metric().kind() != Metric::Kind::Line)
    throw std::invalid_argument("chase_step: line metric required");
  if (f.metric().kind() != Metric::Kind::Line)
    throw std::invalid_argument("chase_step: request is not line-capable");
  const auto argmin = f.minimizer();
  if (!argmin)
    throw std::invalid_argument("chase_step: request has no finite minimizer");

  const double a = argmin->x();
  const double fmin = f.value(*argmin);
  const int k = X.k();

  ChaseStep step;
  step.pre = X;
  step.post = X;

  const double current = serve_cost(X, f);
  if (current <= fmin + 1e-12) {
    // A server already sits in the argmin set: do nothing.
    step.stop_reason = StopReason::AlreadyAtArgmin;
    step.service = current;
    return step;
  }

  std::vector<Mover> movers;
  std::vector<int> moved;
  double t_max = 0.0;
  if (a < X.at(0).x() || a > X.at(k - 1).x()) {
    const int idx = a < X.at(0).x() ? 0 : k - 1;
    const double start = X.at(idx).x();
    movers.push_back({start, a > start ? 1.0 : -1.0});
    moved.push_back(idx);
    t_max = std::abs(a - start);
  } else {
    int left = 0;
    while (left + 1 < k && X.at(left + 1).x() < a) ++left;
    const int right = left + 1;
    movers.push_back({X.at(left).x(), 1.0});
    movers.push_back({X.at(right).x(), -1.0});
    moved = {left, right};
    t_max = std::min(a - X.at(left).x(), X.at(right).x() - a);
  }

  const double rate = static_cast<double>(movers.size());
  const double t = stop_time(f, movers, t_max, rate);

  std::vector<Point> pos = X.positions();
  for (std::size_t i = 0; i < movers.size(); ++i)
    pos[moved[i]] = Point::on_line(movers[i].pos(t));
  step.post = Configuration(X.metric(), std::move(pos));
  step.moved = moved;
  step.movement = rate * t;
  step.service = serve_cost(step.post, f);
  const bool at_argmin =
      t >= t_max - 1e-15 || step.service <= fmin + 1e-12;
  step.stop_reason =
      at_argmin ? StopReason::ReachedArgmin : StopReason::CostBalance;
  return step;
}

PotentialState potential(const Configuration& X, const Configuration& Y) {
  const double phi =
      2.0 * X.k() * match_cost(X, Y) + 2.0 * pairwise_spread(X);
  return PotentialState{phi};
}

bool certify_step(const Configuration& X, const Configuration& X_post,
                  const Configuration& Y, const Configuration& Y_post,
                  const Request& f, double tol) {
  const double lhs = potential(X_post, Y_post).phi - potential(X, Y).phi;
  const double rhs =
      4.0 * X.k() * (match_cost(Y, Y_post) + serve_cost(Y_post, f)) -
      (match_cost(X, X_post) + serve_cost(X_post, f));
  return lhs <= rhs + tol;
}

LineChaseRun run_line_chaser(const Configuration& X0,
                             const std::vector<Request>& requests) {
  LineChaseRun run;
  Configuration cur = X0;
  for (const auto& f : requests) {
    ChaseStep s = chase_step(cur, f);
    cur = s.post;
    run.ledger.add(s.service, s.movement);
    run.steps.push_back(std::move(s));
  }
  return run;
}

StepCosts LineChaser::step(const Request& f) {
  ChaseStep s = chase_step(config_, f);
  config_ = s.post;
  return {s.service, s.movement};
}

}  // namespace kchase
