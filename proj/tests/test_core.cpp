#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "kchase/core.hpp"

using namespace kchase;

namespace {

Configuration line_config(std::vector<double> xs) {
  std::vector<Point> pos;
  for (double x : xs) pos.push_back(Point::on_line(x));
  return Configuration(Metric::line(), std::move(pos));
}

// Exhaustive matching oracle, independent of the Hungarian path.
double brute_match(const Configuration& X, const Configuration& Y) {
  const int k = X.k();
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double s = 0.0;
    for (int i = 0; i < k; ++i)
      s += X.metric().dist(X.at(i), Y.at(perm[i]));
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("match_cost on the line uses the sorted pairing") {
  CHECK(match_cost(line_config({0, 2}), line_config({1, 3})) == doctest::Approx(2.0));
  CHECK(match_cost(line_config({0, 10}), line_config({0, 10})) == doctest::Approx(0.0));
  // sorted pairing, not naive index pairing
  const auto X = line_config({0, 10});
  const auto Y = line_config({9, 1});
  CHECK(match_cost(X, Y) == doctest::Approx(brute_match(X, Y)));
  CHECK(match_cost(X, Y) == doctest::Approx(2.0));
}

TEST_CASE("match_cost rejects mismatched configurations") {
  CHECK_THROWS_AS(match_cost(line_config({0}), line_config({0, 1})),
                  std::invalid_argument);
  const auto E = Configuration(Metric::euclidean(2),
                               {Point::at({0, 0}), Point::at({1, 1})});
  CHECK_THROWS_AS(match_cost(line_config({0, 1}), E), std::invalid_argument);
}

TEST_CASE("match_cost is a metric and agrees with the Hungarian assignment") {
  std::mt19937_64 rng(SeedTree(7).child("core-metric").node_seed());
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<int> ks(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = ks(rng);
    std::vector<double> a(k), b(k), c(k);
    for (int i = 0; i < k; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = u(rng);
    }
    const auto X = line_config(a), Y = line_config(b), Z = line_config(c);
    const double xy = match_cost(X, Y);
    CHECK(xy == doctest::Approx(match_cost(Y, X)).epsilon(1e-9));
    CHECK(xy <= match_cost(X, Z) + match_cost(Z, Y) + 1e-9);
    CHECK(xy == doctest::Approx(brute_match(X, Y)).epsilon(1e-9));
    CHECK(match_cost(X, X) == doctest::Approx(0.0));
  }
}

TEST_CASE("Hungarian assignment matches brute force on euclidean configurations") {
  std::mt19937_64 rng(SeedTree(7).child("hungarian").node_seed());
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const auto m = Metric::euclidean(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(trial % 3);
    std::vector<Point> xs, ys;
    for (int i = 0; i < k; ++i) {
      xs.push_back(Point::at({u(rng), u(rng)}));
      ys.push_back(Point::at({u(rng), u(rng)}));
    }
    const Configuration X(m, xs), Y(m, ys);
    CHECK(match_cost(X, Y) == doctest::Approx(brute_match(X, Y)).epsilon(1e-9));
  }
}

TEST_CASE("serve_cost") {
  const auto m = Metric::line();
  const auto f = Request::power_distance(m, Point::on_line(4), 1.0, 1.0);
  CHECK(serve_cost(line_config({0, 10}), f) == doctest::Approx(4.0));
  CHECK(serve_cost(line_config({3}), Request::interval_indicator(2, 5)) == 0.0);
  CHECK(serve_cost(line_config({0}), Request::interval_indicator(2, 5)) == kInf);
}

TEST_CASE("serve_cost is 1-Lipschitz when the request is") {
  std::mt19937_64 rng(SeedTree(7).child("lipschitz").node_seed());
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  const auto m = Metric::line();
  for (int trial = 0; trial < 100; ++trial) {
    const auto f =
        Request::power_distance(m, Point::on_line(u(rng)), 1.0, 0.5 + 0.05 * (trial % 10));
    REQUIRE(f.lipschitz_bound() <= 1.0);
    auto X = line_config({u(rng), u(rng)});
    const double h = 1e-6;
    const double base = serve_cost(X, f);
    const auto bumped = X.with(0, Point::on_line(X.at(0).x() + h));
    CHECK(std::abs(serve_cost(bumped, f) - base) <= h + 1e-9);
  }
}

TEST_CASE("pairwise_spread") {
  CHECK(pairwise_spread(line_config({0, 2})) == doctest::Approx(2.0));
  CHECK(pairwise_spread(line_config({0, 1, 3})) == doctest::Approx(6.0));
  CHECK(pairwise_spread(line_config({5, 5, 5})) == doctest::Approx(0.0));
}

TEST_CASE("finite metric validates on construction") {
  CHECK_NOTHROW(Metric::finite({"a", "b"}, {{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(Metric::finite({"a", "b"}, {{0, 1}, {2, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Metric::finite({"a", "b", "c"},
                                 {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}),
                  std::invalid_argument);  // 5 > 1 + 1
  CHECK_THROWS_AS(Metric::finite({"a"}, {{0.5}}), std::invalid_argument);
}

TEST_CASE("piecewise linear requests") {
  const auto f = Request::piecewise_linear({-2, 0, 1, 3}, {4, 0, 0, 4});
  CHECK(f.value(Point::on_line(0.5)) == doctest::Approx(0.0));
  CHECK(f.value(Point::on_line(-1)) == doctest::Approx(2.0));
  CHECK(f.value(Point::on_line(5)) == doctest::Approx(8.0));   // linear extension
  CHECK(f.minimizer()->x() == doctest::Approx(0.5));           // flat bottom midpoint
  CHECK(f.lipschitz_bound() == doctest::Approx(2.0));
  CHECK_THROWS_AS(Request::piecewise_linear({0, 1, 2}, {0, 3, 4}),
                  std::invalid_argument);  // concave kink
}

TEST_CASE("power distance and linear requests") {
  const auto m = Metric::euclidean(2);
  const auto f = Request::power_distance(m, Point::at({0, 0}), 2.0, 1.0);
  CHECK(f.value(Point::at({3, 4})) == doctest::Approx(25.0));
  CHECK(f.lipschitz_bound() == kInf);
  const auto g = Request::power_distance(m, Point::at({0, 0}), 1.0, 0.5);
  CHECK(g.lipschitz_bound() == doctest::Approx(0.5));
  CHECK(g.scaled(0.5).value(Point::at({2, 0})) == doctest::Approx(0.5));

  const auto lin = Request::linear({0.6, 0.8});
  CHECK(lin.value(Point::at({1, 0})) == doctest::Approx(0.6));
  CHECK(!lin.minimizer().has_value());
  CHECK_THROWS_AS(Request::linear({3.0, 0.0}), std::invalid_argument);
}

TEST_CASE("planar body membership") {
  const auto body = Request::planar_body({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(body.value(Point::at({0.5, 0.5})) == 0.0);
  CHECK(body.value(Point::at({1.5, 0.5})) == kInf);
  const auto c = body.minimizer();
  CHECK(c->coords[0] == doctest::Approx(0.5));
  CHECK(body.value(*c) == 0.0);
}

TEST_CASE("cost ledger") {
  CostLedger ledger;
  ledger.add(1.5, 0.5);
  ledger.add(0.0, 2.0);
  CHECK(ledger.service_total() == doctest::Approx(1.5));
  CHECK(ledger.movement_total() == doctest::Approx(2.5));
  CHECK(ledger.per_step().size() == 2);
  CHECK(ledger.consistent());
  CHECK_THROWS_AS(ledger.add(kInf, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ledger.add(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("seed tree streams are reproducible and path-dependent") {
  const SeedTree root(42);
  auto a1 = root.child("filter").child("trial").stream();
  auto a2 = root.child("filter").child("trial").stream();
  auto b = root.child("adversary").child("trial").stream();
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = a1(), y = a2(), z = b();
    all_equal = all_equal && (x == y);
    any_diff = any_diff || (x != z);
  }
  CHECK(all_equal);
  CHECK(any_diff);
  CHECK(root.child("a", 3).node_seed() != root.child("a", 4).node_seed());
}

TEST_CASE("configurations stay sorted on the line") {
  const auto X = line_config({5, -1, 3});
  CHECK(X.at(0).x() == doctest::Approx(-1));
  CHECK(X.at(2).x() == doctest::Approx(5));
  const auto Y = X.with(0, Point::on_line(100.0));
  CHECK(Y.at(2).x() == doctest::Approx(100.0));
}

TEST_CASE("trajectory csv layout") {
  std::vector<TrajectoryRow> rows;
  rows.push_back({1, 0.5, 1.0, {Point::on_line(0), Point::on_line(2)}});
  rows.push_back({2, 0.0, 0.0, {Point::at({1, 2}), Point::at({3, 4})}});
  const auto csv = trajectory_csv(rows);
  CHECK(csv.find("step,service_cost,movement_cost,pos0,pos1") == 0);
  CHECK(csv.find("1;2") != std::string::npos);  // semicolon-separated coords
}
