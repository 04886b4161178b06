/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "core/transform.hpp"

namespace edgecache {

// Interior-point parameters, exposed through the solver config section.
struct IpmParams {
  double kkt_tolerance = 1e-8;
  double feasibility_tolerance = 1e-8;
  double gamma0 = 0.1;          // initial barrier parameter
  double gamma_factor = 0.2;    // multiplicative decrease per outer stage
  int max_outer = 100;          // barrier stages
  int max_cg = 200;             // conjugate-gradient iterations per step
  int multistarts = 3;          // center / parent / random starts
  double fraction_to_boundary = 0.995;
  uint64_t seed = 0;
};

enum class RelaxStatus { optimal, infeasible, iteration_limit };

// Lagrange multiplier estimates per constraint family.
struct Multipliers {
  Eigen::VectorXd capacity;   // per node
  Eigen::VectorXd selection;  // per big-M row (n, neighbor, i)
  Eigen::VectorXd lower;      // per variable (x, then y, then z)
  Eigen::VectorXd upper;      // per binary (x, then y)
  Eigen::VectorXd equality;   // per (n, i) selection-count row
};

struct RelaxedSolution {
  Assignment assignment;
  double objective = 0.0;
  double kkt_residual = 0.0;
  RelaxStatus status = RelaxStatus::iteration_limit;
  Multipliers multipliers;
  double gamma_final = 0.0;
  int newton_iterations = 0;
  int stages = 0;
};

// fixings: one entry per binary variable (x block then y block); -1 free,
// 0 or 1 fixed by branching. An empty vector means everything is free.
using Fixings = std::vector<int8_t>;

// Exact optimum of the phase-1 slack minimization: the constraint families
// decompose per row, so the minimal total violation has a closed form.
// A value above the feasibility tolerance means no feasible point exists.
double phase1_violation(const MinlpProblem& p, const Fixings& fixings);

// Log-barrier solve of the continuous relaxation with the given fixings
// honored exactly. Nonconvex products can leave local KKT points, hence the
// multistart; bound validity is checked empirically against the oracle suite.
RelaxedSolution solve_relaxation(const MinlpProblem& p, const Fixings& fixings,
                                 const IpmParams& params, const Assignment* warm_start = nullptr);

// Max-norm KKT residual: stationarity of the Lagrangian, primal feasibility
// and complementarity sigma*lambda - gamma.
double kkt_residual(const MinlpProblem& p, const Assignment& a, const Multipliers& m,
                    double gamma = 0.0);

struct QuadStep {
  Assignment dp;               // direction in (x, y, z)
  Eigen::VectorXd dsigma1;     // induced capacity-slack change
  Eigen::VectorXd dsigma2;     // induced big-M-slack change
  double step_length = 0.0;    // fraction-to-boundary cap, at most 1
  bool negative_curvature = false;
};

// One damped Newton step of the barrier problem at the given interior
// iterate: quadratic model minimized by projected conjugate gradients, with
// steepest descent as the indefinite-curvature fallback.
QuadStep quadratic_step(const MinlpProblem& p, const Fixings& fixings, const Assignment& iterate,
                        double gamma, const IpmParams& params = {});

}  // namespace edgecache
