#pragma once

#include <utility>
#include <vector>

#include "kchase/core.hpp"

namespace kchase {

// Exact offline optima at desk scale: dynamic programs over candidate
// configurations, used as the comparator for every ratio experiment.

struct LineOptResult {
  double value = 0.0;
  // trajectory[0] is the initial configuration, trajectory[t] the
  // configuration after serving request t.
  std::vector<Configuration> trajectory;
};

// Candidate grid for a line instance: initial positions, request
// minimizers, breakpoints and indicator endpoints.  extra_resolution > 0
// additionally lays a uniform grid of that spacing over the hull.
std::vector<double> line_grid_for(const std::vector<Request>& requests,
                                  const Configuration& X0,
                                  double extra_resolution = 0.0);

// DP over grid^k states: value(t,C) = min_{C'} value(t-1,C') + match(C',C)
// + serve(C, f_t).  Requires the grid to contain X0.  Throws CapacityError
// when grid^k exceeds 10^6 states.
LineOptResult chasing_opt_line(const std::vector<Request>& requests, int k,
                               const Configuration& X0,
                               const std::vector<double>& grid);

// Same DP with service charged at the pre-move configuration.
double blind_opt_line(const std::vector<Request>& requests, int k,
                      const Configuration& X0,
                      const std::vector<double>& grid);

struct RefineReport {
  std::vector<double> resolutions;
  std::vector<double> values;
  bool monotone = false;   // values non-increasing within tolerance
  double final_value = 0.0;
  double gap = 0.0;        // last observed first-difference magnitude
};

// Re-solves the instance on nested uniform grids of decreasing resolution
// and reports the convergence of OPT_h.
RefineReport chasing_opt_refine(const std::vector<Request>& requests, int k,
                                const Configuration& X0,
                                const std::vector<double>& resolutions);

struct SiteOptResult {
  double value = 0.0;
  std::vector<std::vector<int>> trajectory;  // sorted site multisets
};

// Chasing OPT over a finite metric restricted to candidate sites.  X0 must
// occupy candidate sites.
SiteOptResult chasing_opt_sites(const Metric& metric,
                                const std::vector<int>& candidate_sites, int k,
                                const std::vector<Request>& requests,
                                const Configuration& X0, bool blind = false);

// k-median chasing OPT with candidates restricted to request centers plus
// initial positions.
double kmedian_opt(const Metric& metric, int k,
                   const std::vector<std::pair<double, Point>>& requests,
                   const Configuration& X0, bool blind = false);

}  // namespace kchase
