/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>
#include <vector>

#include "core/ipm.hpp"
#include "core/transform.hpp"

namespace edgecache {

enum class BranchRule { most_fractional, lowest_index };

struct BnbParams {
  double eta = 0.01;         // optimality tolerance
  bool eta_relative = true;  // eta scales the incumbent upper bound
  double tau = 1e-4;         // integrality gap threshold, in (0, 0.5)
  long max_nodes = 50000;
  BranchRule branching = BranchRule::most_fractional;
  uint64_t seed = 0;
  // Guards against local relaxation minima (the products make the relaxation
  // nonconvex): start from the distributed heuristic's incumbent, and re-solve
  // with extra random starts before trusting a prune or integrality accept.
  bool warm_incumbent = true;
  int verify_starts = 2;
  IpmParams ipm;
};

enum class SolveStatus { eta_optimal, node_limit, infeasible };

struct SolveReport {
  Placement placement;
  std::vector<int> delivery;  // per (n,i): serving neighbor, -1 for Case 1/3
  std::vector<double> z_hat;
  double objective = 0.0;     // exact total average delay of the incumbent
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  long nodes_explored = 0;
  int first_leaf_depth = 0;   // depth of the first integrality-accepted node
  double wall_time_s = 0.0;
  SolveStatus status = SolveStatus::infeasible;
};

// Depth-first branch-and-bound over the binary variables with interior-point
// relaxation solves, bound pruning, integrality acceptance and eta-optimal
// termination. Deterministic for fixed problem, params and seed.
SolveReport solve(const MinlpProblem& problem, const BnbParams& params);

// Pick the branching variable among free fractional binaries (x block then y
// block). Throws when every free binary is within tau of an integer.
int branch_variable(const MinlpProblem& problem, const Assignment& relaxed, const Fixings& fixings,
                    BranchRule rule, double tau);

struct RoundResult {
  bool ok = false;
  Placement placement;
  std::vector<int> delivery;
  Eigen::VectorXd z;
  double exact_objective = 0.0;
};

// Round the binaries, evict lowest-value contents until capacities hold, and
// rebuild the delivery choices and z exactly from the rounded placement.
RoundResult round_and_repair(const MinlpProblem& problem, const Assignment& relaxed);

std::string report_to_text(const SolveReport& report);

}  // namespace edgecache
