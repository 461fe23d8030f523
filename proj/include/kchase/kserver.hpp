#pragma once

#include <memory>
#include <vector>

#include "kchase/core.hpp"

namespace kchase {

// Enumerated k-server configuration space over a finite metric:
// configurations are sorted site multisets, with the pairwise matching
// costs cached.  Shared read-only across runs.
class FiniteConfigSpace {
 public:
  FiniteConfigSpace(const Metric& metric, int k);

  const Metric& metric() const { return metric_; }
  int k() const { return k_; }
  int count() const { return static_cast<int>(configs_.size()); }
  const std::vector<int>& sites(int id) const { return configs_.at(id); }
  int id_of(const std::vector<int>& sorted_sites) const;
  double match(int a, int b) const { return match_.at(a).at(b); }
  const std::vector<int>& containing(int site) const {
    return containing_.at(site);
  }
  bool contains_site(int id, int site) const;
  Configuration configuration(int id) const;

 private:
  Metric metric_;
  int k_;
  std::vector<std::vector<int>> configs_;
  std::vector<std::vector<double>> match_;
  std::vector<std::vector<int>> containing_;
};

// Work function over a finite configuration space.  1-Lipschitz w.r.t.
// match_cost and pointwise non-decreasing in t, both scannable.
class WorkFunction {
 public:
  WorkFunction(std::shared_ptr<const FiniteConfigSpace> space,
               const Configuration& X0);

  double value(int id) const { return values_.at(id); }
  const std::vector<double>& table() const { return values_; }
  int step_index() const { return step_; }
  const FiniteConfigSpace& space() const { return *space_; }
  std::shared_ptr<const FiniteConfigSpace> space_ptr() const { return space_; }

  // w_t(C) = min over C' containing r of w_{t-1}(C') + match(C', C).
  void update(int request_site);

  bool lipschitz_ok(double tol = kTol) const;

 private:
  std::shared_ptr<const FiniteConfigSpace> space_;
  std::vector<double> values_;
  int step_ = 0;
};

struct WfaStepResult {
  Configuration post;
  double movement = 0.0;
  int config_id = 0;
};

// Updates the work function and moves to a configuration containing r
// that minimizes w_t(C) + match(X, C).  Ties prefer the fewest moved
// servers, then the lexicographically smallest configuration.
WfaStepResult wfa_step(WorkFunction& w, const Configuration& X,
                       const Point& r);

// Exact offline k-server optimum (total movement) by DP over configurations.
double kserver_opt(const Metric& metric, int k,
                   const std::vector<Point>& requests,
                   const Configuration& X0);

// Classical double coverage on the line for a point request.
Configuration double_coverage_line(const Configuration& X, double r);

// -- Backends for the k-median filter ------------------------------------------

class KServerBackend {
 public:
  virtual ~KServerBackend() = default;
  virtual const Configuration& configuration() const = 0;
  // Serves the request point and returns the movement charged.
  virtual double serve(const Point& r) = 0;
  virtual std::unique_ptr<KServerBackend> clone() const = 0;
};

class WfaBackend : public KServerBackend {
 public:
  WfaBackend(std::shared_ptr<const FiniteConfigSpace> space,
             const Configuration& X0);
  const Configuration& configuration() const override { return config_; }
  double serve(const Point& r) override;
  std::unique_ptr<KServerBackend> clone() const override {
    return std::make_unique<WfaBackend>(*this);
  }

 private:
  WorkFunction work_;
  Configuration config_;
};

class DoubleCoverageBackend : public KServerBackend {
 public:
  explicit DoubleCoverageBackend(Configuration X0) : config_(std::move(X0)) {}
  const Configuration& configuration() const override { return config_; }
  double serve(const Point& r) override;
  std::unique_ptr<KServerBackend> clone() const override {
    return std::make_unique<DoubleCoverageBackend>(*this);
  }

 private:
  Configuration config_;
};

}  // namespace kchase
