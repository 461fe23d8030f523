#pragma once

#include <vector>

#include "kchase/chasing.hpp"
#include "kchase/core.hpp"

namespace kchase {

// Deterministic double-coverage chasing of convex functions on the line:
// move toward the request's argmin while the service cost at the current
// location exceeds the movement spent in the step.

enum class StopReason { AlreadyAtArgmin, ReachedArgmin, CostBalance };

struct ChaseStep {
  Configuration pre;
  Configuration post;
  std::vector<int> moved;  // sorted-order server indices, size 0, 1 or 2
  StopReason stop_reason = StopReason::AlreadyAtArgmin;
  double service = 0.0;
  double movement = 0.0;
};

ChaseStep chase_step(const Configuration& X, const Request& f);

struct PotentialState {
  double phi = 0.0;
};

// 2k * match(X,Y) + 2 * pairwise_spread(X)
PotentialState potential(const Configuration& X, const Configuration& Y);

// Per-step potential inequality: Phi(X',Y') - Phi(X,Y) <=
// 4k*(match(Y,Y') + serve(Y',f)) - (match(X,X') + serve(X',f)) + tol.
bool certify_step(const Configuration& X, const Configuration& X_post,
                  const Configuration& Y, const Configuration& Y_post,
                  const Request& f, double tol = 1e-7);

struct LineChaseRun {
  CostLedger ledger;
  std::vector<ChaseStep> steps;
};

LineChaseRun run_line_chaser(const Configuration& X0,
                             const std::vector<Request>& requests);

class LineChaser : public ChasingAlgorithm {
 public:
  explicit LineChaser(Configuration X0) : config_(std::move(X0)) {}
  const Configuration& configuration() const override { return config_; }
  StepCosts step(const Request& f) override;
  std::unique_ptr<ChasingAlgorithm> clone() const override {
    return std::make_unique<LineChaser>(*this);
  }

 private:
  Configuration config_;
};

}  // namespace kchase
