/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "core/scenario.hpp"

namespace edgecache {

// Continuous-valued point in the transformed variable space. Binary-feasible
// assignments have all x and y entries in {0,1}.
struct Assignment {
  Eigen::VectorXd x;  // N*I, caching decisions
  Eigen::VectorXd y;  // per (n, neighbor, i) selection helpers
  Eigen::VectorXd z;  // N*I, delivery-delay auxiliaries
};

// The MINLP obtained from the nested dual delay minimization: binary x and y,
// non-negative z, big-M selection constraints and per-(node, content)
// equality constraints forcing exactly one selected neighbor.
//
// y is indexed per (requesting node, neighbor, content) rather than per
// (neighbor, content): the best delivering neighbor differs per requester.
// Neighbor sets are the static adjacency (the V penalty prices non-caching
// neighbors out of the min).
class MinlpProblem {
 public:
  Scenario scenario;
  double big_m = 0.0;  // V: prices non-caching neighbors out of the min

  int x_count = 0;
  int y_count = 0;
  int z_count = 0;

  // per-(n,i) constants of the objective
  std::vector<double> weight;   // f_n^i * U_n
  std::vector<double> d_alpha;  // c_i / b_n
  std::vector<double> d_delta;  // Case-3 delay (BS branch at the BS)

  std::vector<int> y_base;  // start of node n's y block

  int contents() const { return scenario.content_count(); }
  int nodes() const { return scenario.node_count(); }
  int x_index(int n, int i) const { return n * contents() + i; }
  int z_index(int n, int i) const { return n * contents() + i; }
  int y_index(int n, int k, int i) const { return y_base[n] + k * contents() + i; }
  int degree(int n) const { return static_cast<int>(scenario.neighbors(n).size()); }

  // binary variables are globally indexed x first, then y
  int binary_count() const { return x_count + y_count; }

  // Q_n^i(x_m): delivery time from neighbor m with the V penalty when m does
  // not cache the content
  double q_value(int n, int m, int i, double x_m) const {
    const double per_link = scenario.contents[i].size_mbit / scenario.topology.link_bandwidth(n, m);
    return (x_m + (1.0 - x_m) * big_m) * per_link;
  }
  // dQ/dx_m
  double q_slope(int n, int m, int i) const {
    const double per_link = scenario.contents[i].size_mbit / scenario.topology.link_bandwidth(n, m);
    return (1.0 - big_m) * per_link;
  }

  // Per-row deactivation coefficient: y = 1 must void its selection row at
  // any x in [0,1], which needs at least Q(0) = V*c/l. The single shared
  // constant of the source formulation cannot do this once c/l > 1.
  double deactivation(int n, int m, int i) const { return q_value(n, m, i, 0.0) + 1.0; }
};

// AUTO sets V high enough that a V-penalized term can never win the inner min.
double auto_big_m(const Scenario& s);

MinlpProblem transform(const Scenario& s, double big_m = 0.0);  // big_m <= 0 -> AUTO

// Exact value of the transformed objective, defined for fractional points.
double evaluate_objective(const MinlpProblem& p, const Assignment& a);

void objective_gradient(const MinlpProblem& p, const Assignment& a, Eigen::VectorXd& grad_x,
                        Eigen::VectorXd& grad_z);
// Hessian-vector product of the objective (y block is identically zero).
void objective_hvp(const MinlpProblem& p, const Assignment& a, const Eigen::VectorXd& vx,
                   const Eigen::VectorXd& vz, Eigen::VectorXd& out_x, Eigen::VectorXd& out_z);

struct Violation {
  enum class Kind { dimensions, capacity, selection, equality, bounds };
  Kind kind;
  int node = -1;
  int content = -1;
  int neighbor = -1;
  double amount = 0.0;
  std::string text;
};

std::vector<Violation> check_feasibility(const MinlpProblem& p, const Assignment& a, double tol);

// Line-oriented description of variables, constraints and V, for inspection.
void dump_problem(const MinlpProblem& p, std::ostream& os);

// The y/z completion Eq.(19)-style for a binary x: y = 0 exactly at the
// neighbor minimizing Q (lowest id on ties), z at its lower bound.
Assignment complete_binary_assignment(const MinlpProblem& p, const Eigen::VectorXd& x);

}  // namespace edgecache
