/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "core/distributed.hpp"
#include "core/rng.hpp"

namespace edgecache {

namespace {

double fractionality(double v) { return std::abs(v - std::round(v)); }

// max |v - round(v)| over the binary blocks
double integrality_gap(const Assignment& a) {
  double xi = 0.0;
  for (Eigen::Index j = 0; j < a.x.size(); ++j) xi = std::max(xi, fractionality(a.x[j]));
  for (Eigen::Index j = 0; j < a.y.size(); ++j) xi = std::max(xi, fractionality(a.y[j]));
  return xi;
}

struct TreeNode {
  Fixings fixings;
  double bound;        // parent relaxation objective (Algorithm-1 quantity)
  double valid_bound;  // certified lower bound for the subtree
  int depth;
  std::shared_ptr<const Assignment> parent_point;
  std::vector<double> mu;  // warm multipliers for the column bound
};

// The delay objective decomposes per content over the caching pattern of its
// column, so dualizing the capacity rows gives a certified lower bound that
// is immune to the relaxation's local minima: L(mu) is concave and every
// evaluation is a per-content scan over allowed patterns.
class ColumnBound {
 public:
  ColumnBound(const MinlpProblem& problem) : p_(&problem) {
    const Scenario& s = problem.scenario;
    const int N = s.node_count();
    const int I = s.content_count();
    if (N > 16 || (size_t{1} << N) * static_cast<size_t>(I) > (size_t{1} << 24)) return;
    patterns_ = 1u << N;
    values_.resize(static_cast<size_t>(patterns_) * I);
    for (uint32_t pat = 0; pat < patterns_; ++pat) {
      for (int i = 0; i < I; ++i) {
        double total = 0.0;
        for (int n = 0; n < N; ++n) {
          auto cached = [&](int m, int) { return ((pat >> m) & 1u) != 0; };
          total += s.foa_at(n, i) * s.nodes[n].user_count *
                   request_route_with(s, cached, n, i).seconds;
        }
        values_[static_cast<size_t>(pat) * I + i] = total;
      }
    }
  }

  bool enabled() const { return patterns_ != 0; }

  // Polyak subgradient ascent on the capacity dual; upper_ref must be a valid
  // upper bound on the optimum. mu is warm-started and returned updated.
  double evaluate(const Fixings& fixings, double upper_ref, std::vector<double>& mu,
                  int iterations = 40) const {
    if (!enabled()) return -std::numeric_limits<double>::infinity();
    const Scenario& s = p_->scenario;
    const int N = s.node_count();
    const int I = s.content_count();
    if (static_cast<int>(mu.size()) != N) mu.assign(N, 0.0);

    // per-content masks from the x fixings
    std::vector<uint32_t> force_one(I, 0), force_zero(I, 0);
    if (!fixings.empty()) {
      for (int n = 0; n < N; ++n) {
        for (int i = 0; i < I; ++i) {
          const int8_t f = fixings[p_->x_index(n, i)];
          if (f == 1) force_one[i] |= 1u << n;
          if (f == 0) force_zero[i] |= 1u << n;
        }
      }
    }

    std::vector<double> load(N);
    double best = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < iterations; ++it) {
      double value = 0.0;
      std::fill(load.begin(), load.end(), 0.0);
      for (int i = 0; i < I; ++i) {
        const double c = s.contents[i].size_mbit;
        double best_i = std::numeric_limits<double>::infinity();
        uint32_t best_pat = 0;
        for (uint32_t pat = 0; pat < patterns_; ++pat) {
          if ((pat & force_one[i]) != force_one[i] || (pat & force_zero[i]) != 0) continue;
          double v = values_[static_cast<size_t>(pat) * I + i];
          for (int n = 0; n < N; ++n)
            if ((pat >> n) & 1u) v += mu[n] * c;
          if (v < best_i) {
            best_i = v;
            best_pat = pat;
          }
        }
        if (best_i == std::numeric_limits<double>::infinity()) return best;  // contradictory fix
        value += best_i;
        for (int n = 0; n < N; ++n)
          if ((best_pat >> n) & 1u) load[n] += c;
      }
      double lower = value;
      double grad_sq = 0.0;
      for (int n = 0; n < N; ++n) {
        lower -= mu[n] * s.nodes[n].capacity_mbit;
        const double g = load[n] - s.nodes[n].capacity_mbit;
        grad_sq += g * g;
      }
      best = std::max(best, lower);
      if (grad_sq <= 1e-18 || upper_ref <= lower) break;
      const double step = std::max(0.0, upper_ref - lower) / grad_sq;
      if (step <= 0.0) break;
      for (int n = 0; n < N; ++n)
        mu[n] = std::max(0.0, mu[n] + step * (load[n] - s.nodes[n].capacity_mbit));
    }
    return best;
  }

 private:
  const MinlpProblem* p_;
  uint32_t patterns_ = 0;
  std::vector<double> values_;
};

// fallback branching target when the relaxed point is integral but the node
// cannot be closed: the most requested undecided caching decision
int pseudo_branch_variable(const MinlpProblem& problem, const Fixings& fixings) {
  int best = -1;
  double best_score = -1.0;
  for (int j = 0; j < problem.x_count; ++j) {
    if (!fixings.empty() && fixings[j] >= 0) continue;
    const double score = problem.weight[j] * (problem.d_delta[j] - problem.d_alpha[j]);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  if (best >= 0) return best;
  for (int j = problem.x_count; j < problem.binary_count(); ++j)
    if (fixings.empty() || fixings[j] < 0) return j;
  return -1;
}

}  // namespace

int branch_variable(const MinlpProblem& problem, const Assignment& relaxed, const Fixings& fixings,
                    BranchRule rule, double tau) {
  const int jx = problem.x_count;
  const int jy = problem.y_count;
  auto value_of = [&](int j) { return j < jx ? relaxed.x[j] : relaxed.y[j - jx]; };
  auto is_free = [&](int j) { return fixings.empty() || fixings[j] < 0; };

  if (rule == BranchRule::lowest_index) {
    for (int j = 0; j < jx + jy; ++j)
      if (is_free(j) && fractionality(value_of(j)) >= tau) return j;
    throw ScenarioError("branch_variable called with an integral assignment");
  }
  int best = -1;
  double best_frac = -1.0;
  for (int j = 0; j < jx + jy; ++j) {
    if (!is_free(j)) continue;
    const double f = fractionality(value_of(j));
    if (f > best_frac) {  // strict: ties keep the lowest index
      best_frac = f;
      best = j;
    }
  }
  if (best < 0 || best_frac < tau)
    throw ScenarioError("branch_variable called with an integral assignment");
  return best;
}

RoundResult round_and_repair(const MinlpProblem& problem, const Assignment& relaxed) {
  const Scenario& s = problem.scenario;
  const int N = s.node_count();
  const int I = s.content_count();

  RoundResult result;
  result.placement = Placement(N, I);
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < I; ++i)
      result.placement.set(n, i, std::round(relaxed.x[problem.x_index(n, i)]) >= 0.5);

  // repair: evict the content with the smallest weighted delay saving until
  // the capacity holds again
  for (int n = 0; n < N; ++n) {
    double used = 0.0;
    for (int i = 0; i < I; ++i)
      if (result.placement.cached(n, i)) used += s.contents[i].size_mbit;
    while (used > s.nodes[n].capacity_mbit) {
      int evict = -1;
      double evict_score = std::numeric_limits<double>::infinity();
      for (int i = 0; i < I; ++i) {
        if (!result.placement.cached(n, i)) continue;
        result.placement.set(n, i, false);
        const double uncached = request_route(s, result.placement, n, i).seconds;
        result.placement.set(n, i, true);
        const double d_alpha = s.contents[i].size_mbit / s.nodes[n].user_bandwidth_mbps;
        const double score = s.foa_at(n, i) * s.nodes[n].user_count * (uncached - d_alpha);
        if (score < evict_score) {
          evict_score = score;
          evict = i;
        }
      }
      if (evict < 0) break;
      result.placement.set(n, evict, false);
      used -= s.contents[evict].size_mbit;
    }
  }
  if (!placement_feasible(s, result.placement)) return result;  // ok stays false

  Eigen::VectorXd x(problem.x_count);
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < I; ++i) x[problem.x_index(n, i)] = result.placement.cached(n, i) ? 1.0 : 0.0;
  const Assignment completed = complete_binary_assignment(problem, x);
  result.z = completed.z;
  result.delivery.assign(static_cast<size_t>(N) * I, -1);
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < I; ++i)
      result.delivery[static_cast<size_t>(n) * I + i] =
          request_route(s, result.placement, n, i).neighbor;
  result.exact_objective = total_average_delay(s, result.placement);
  result.ok = true;
  return result;
}

SolveReport solve(const MinlpProblem& problem, const BnbParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  report.status = SolveStatus::infeasible;
  report.upper_bound = std::numeric_limits<double>::infinity();
  report.lower_bound = -std::numeric_limits<double>::infinity();
  report.first_leaf_depth = 0;

  std::vector<TreeNode> stack;
  stack.push_back({Fixings(), -std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity(), 0, nullptr, {}});

  bool have_incumbent = false;
  bool first_leaf_seen = false;
  double psi = std::numeric_limits<double>::infinity();  // incumbent value
  long node_counter = 0;
  bool node_limit_hit = false;

  auto store_incumbent = [&](const Placement& placement) {
    const double exact = total_average_delay(problem.scenario, placement);
    if (exact >= psi) return;
    Eigen::VectorXd x(problem.x_count);
    for (int n = 0; n < placement.nodes; ++n)
      for (int i = 0; i < placement.contents; ++i)
        x[problem.x_index(n, i)] = placement.cached(n, i) ? 1.0 : 0.0;
    const Assignment completed = complete_binary_assignment(problem, x);
    psi = exact;
    report.placement = placement;
    report.objective = exact;
    report.upper_bound = exact;
    report.z_hat.assign(completed.z.data(), completed.z.data() + completed.z.size());
    report.delivery.assign(static_cast<size_t>(placement.nodes) * placement.contents, -1);
    for (int n = 0; n < placement.nodes; ++n)
      for (int i = 0; i < placement.contents; ++i)
        report.delivery[static_cast<size_t>(n) * placement.contents + i] =
            request_route(problem.scenario, placement, n, i).neighbor;
    have_incumbent = true;
  };

  if (params.warm_incumbent) {
    const CoopResult heuristic =
        cooperate(problem.scenario, local_optimal_placement(problem.scenario));
    store_incumbent(heuristic.placement);
  }

  const ColumnBound column_bound(problem);

  auto stack_bound = [&]() {
    double b = std::numeric_limits<double>::infinity();
    for (const TreeNode& n : stack)
      b = std::min(b, column_bound.enabled() ? n.valid_bound : n.bound);
    return b;
  };
  auto eta_eff = [&]() { return params.eta_relative ? params.eta * psi : params.eta; };

  while (!stack.empty()) {
    if (have_incumbent) {
      const double beta_l = std::min(stack_bound(), psi);
      if (psi - beta_l <= eta_eff()) {
        report.lower_bound = beta_l;
        break;
      }
    }
    if (report.nodes_explored >= params.max_nodes) {
      node_limit_hit = true;
      break;
    }

    TreeNode node = std::move(stack.back());
    stack.pop_back();
    // With the certified column bound available, pruning runs on it alone;
    // the raw relaxation value can sit above the subtree's true minimum (a
    // local KKT point) and would cut off the optimum.
    if (column_bound.enabled()) {
      if (node.valid_bound >= psi) continue;  // certified: cannot improve
    } else if (node.bound > psi) {
      continue;  // Algorithm-1 prune on the parent value
    }

    IpmParams ipm = params.ipm;
    ipm.seed = Rng::mix(params.seed, static_cast<uint64_t>(++node_counter));
    RelaxedSolution relax = solve_relaxation(problem, node.fixings, ipm, node.parent_point.get());
    ++report.nodes_explored;
    if (relax.status == RelaxStatus::infeasible) continue;

    // The products make the relaxation nonconvex, so a single solve may land
    // on a local minimum above the subtree's true bound. Before acting on a
    // prune, retry from extra random starts (the root always gets them: its
    // value anchors the reported bound).
    auto verify = [&](RelaxedSolution& best) {
      for (int extra = 0; extra < params.verify_starts; ++extra) {
        IpmParams retry = params.ipm;
        retry.multistarts = 1;
        retry.seed = Rng::mix(params.seed ^ 0x9e37u,
                              static_cast<uint64_t>(node_counter * 131 + extra + 1));
        RelaxedSolution other = solve_relaxation(problem, node.fixings, retry, nullptr);
        if (other.status != RelaxStatus::infeasible && other.objective < best.objective)
          best = std::move(other);
      }
    };
    if (node.depth == 0) verify(relax);
    double psi_c = relax.objective;
    if (!column_bound.enabled() && psi_c > psi) {
      verify(relax);
      psi_c = relax.objective;
      if (psi_c > psi) continue;  // pruned by bound
    }

    // rounding heuristic: every relaxation point is a candidate incumbent
    RoundResult rounded = round_and_repair(problem, relax.assignment);
    double xi = integrality_gap(relax.assignment);
    if (rounded.ok && rounded.exact_objective < psi) store_incumbent(rounded.placement);

    // certified subtree bound from the capacity dual (warm multipliers)
    double node_valid = node.valid_bound;
    if (column_bound.enabled()) {
      const double lag = column_bound.evaluate(node.fixings, psi, node.mu);
      node_valid = std::max(node_valid, lag);
      if (node_valid >= psi) continue;  // certified prune
    }

    bool accept_leaf = xi < params.tau;
    if (accept_leaf && column_bound.enabled() && node_valid < psi - eta_eff()) {
      // the relaxed point collapsed to a vertex but the certified bound says
      // the subtree may still hold something better: keep branching
      accept_leaf = false;
    }
    if (accept_leaf) {
      if (!first_leaf_seen) {
        first_leaf_seen = true;
        report.first_leaf_depth = node.depth;
      }
      continue;
    }

    int zeta;
    if (xi >= params.tau) {
      zeta = branch_variable(problem, relax.assignment, node.fixings, params.branching, params.tau);
    } else {
      zeta = pseudo_branch_variable(problem, node.fixings);
      if (zeta < 0) {  // fully decided: the rounded incumbent covered it
        if (!first_leaf_seen) {
          first_leaf_seen = true;
          report.first_leaf_depth = node.depth;
        }
        continue;
      }
    }
    const double value =
        zeta < problem.x_count ? relax.assignment.x[zeta] : relax.assignment.y[zeta - problem.x_count];
    const int8_t preferred = std::round(value) >= 0.5 ? 1 : 0;

    Fixings child = node.fixings;
    if (child.empty()) child.assign(static_cast<size_t>(problem.binary_count()), int8_t{-1});
    auto parent_point = std::make_shared<const Assignment>(relax.assignment);

    child[zeta] = static_cast<int8_t>(1 - preferred);
    stack.push_back({child, psi_c, node_valid, node.depth + 1, parent_point, node.mu});
    child[zeta] = preferred;  // pushed last: explored first
    stack.push_back({std::move(child), psi_c, node_valid, node.depth + 1, parent_point,
                     std::move(node.mu)});
  }

  if (stack.empty() && have_incumbent) {
    report.lower_bound = psi;  // tree exhausted: the bound closes completely
  } else if (!stack.empty()) {
    report.lower_bound = std::min(stack_bound(), psi);
  }

  if (!have_incumbent) {
    report.status = SolveStatus::infeasible;
  } else if (node_limit_hit) {
    report.status = SolveStatus::node_limit;
  } else {
    report.status = SolveStatus::eta_optimal;
  }
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string report_to_text(const SolveReport& report) {
  std::ostringstream os;
  const char* status = report.status == SolveStatus::eta_optimal  ? "eta_optimal"
                       : report.status == SolveStatus::node_limit ? "node_limit"
                                                                  : "infeasible";
  os << "status=" << status << "\n";
  os << "objective_s=" << report.objective << "\n";
  os << "lower_bound_s=" << report.lower_bound << "\n";
  os << "upper_bound_s=" << report.upper_bound << "\n";
  os << "nodes_explored=" << report.nodes_explored << "\n";
  os << "first_leaf_depth=" << report.first_leaf_depth << "\n";
  os << "wall_time_s=" << report.wall_time_s << "\n";
  for (int n = 0; n < report.placement.nodes; ++n) {
    os << "cache node=" << (n + 1) << ":";
    for (int i = 0; i < report.placement.contents; ++i)
      if (report.placement.cached(n, i)) os << " " << (i + 1);
    os << "\n";
  }
  for (int n = 0; n < report.placement.nodes; ++n) {
    for (int i = 0; i < report.placement.contents; ++i) {
      const int m = report.delivery.empty()
                        ? -1
                        : report.delivery[static_cast<size_t>(n) * report.placement.contents + i];
      if (m >= 0) os << "deliver n=" << (n + 1) << " i=" << (i + 1) << " from=" << (m + 1) << "\n";
    }
  }
  return os.str();
}

}  // namespace edgecache
