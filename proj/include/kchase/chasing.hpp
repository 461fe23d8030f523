#pragma once

#include <memory>

#include "kchase/core.hpp"

namespace kchase {

struct StepCosts {
  double service = 0.0;
  double movement = 0.0;
};

// An online chasing algorithm: holds a configuration, serves one request
// per step and reports the costs charged for that step.
class ChasingAlgorithm {
 public:
  virtual ~ChasingAlgorithm() = default;
  virtual const Configuration& configuration() const = 0;
  virtual StepCosts step(const Request& f) = 0;
  virtual std::unique_ptr<ChasingAlgorithm> clone() const = 0;
};

}  // namespace kchase
