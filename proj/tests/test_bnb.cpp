/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <doctest.h>

#include "core/bnb.hpp"
#include "core/oracle.hpp"
#include "test_support.hpp"

using namespace edgecache;
using namespace edgecache::test;

TEST_CASE("two-node instance solves to the oracle optimum") {
  const Scenario s = two_node_instance();
  const MinlpProblem p = transform(s);
  const SolveReport report = solve(p, BnbParams{});
  CHECK(report.status == SolveStatus::eta_optimal);
  CHECK(report.objective == doctest::Approx(177.7778).epsilon(1e-4));
  CHECK(report.lower_bound <= report.objective + 1e-9);
  CHECK(report.upper_bound == doctest::Approx(report.objective));
  CHECK(placement_feasible(s, report.placement));
  // the split optimum fetches each missing content from the other node
  const int served = report.delivery[0 * 2 + 0] >= 0 ? 1 : 0;
  const int served2 = report.delivery[1 * 2 + 1] >= 0 ? 1 : 0;
  CHECK(served + served2 >= 1);
}

TEST_CASE("zero capacity forces the all-zero placement") {
  Scenario s = two_node_instance();
  s.nodes[0].capacity_mbit = 0.0;
  s.nodes[1].capacity_mbit = 0.0;
  const MinlpProblem p = transform(s);
  const SolveReport report = solve(p, BnbParams{});
  CHECK(report.status == SolveStatus::eta_optimal);
  for (auto v : report.placement.x) CHECK(v == 0);
  // pure case-3 sum
  const double expected = 2 * (0.5 * (80.0 + 800.0 / 45.0 + 800.0 / 60.0)) +
                          2 * (0.5 * (80.0 + 800.0 / 60.0));
  CHECK(report.objective == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("matches the oracle within eta on random tiny instances") {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const Scenario s = random_small_instance(seed, 3, 6);
    const MinlpProblem p = transform(s);
    const OracleResult oracle = exhaustive_optimal(s);
    BnbParams params;
    const SolveReport report = solve(p, params);
    CHECK(report.status == SolveStatus::eta_optimal);
    CHECK(report.objective <= oracle.objective * (1.0 + params.eta) + 1e-6);
    CHECK(report.objective >= oracle.objective - 1e-9);
    // termination certificate
    const double eta_eff = params.eta * report.upper_bound;
    CHECK(report.lower_bound <= report.objective + 1e-9);
    CHECK(report.objective <= report.upper_bound + 1e-9);
    CHECK(report.upper_bound - report.lower_bound <= eta_eff + 1e-9);
    CHECK(report.nodes_explored >= 1 + report.first_leaf_depth);
  }
}

TEST_CASE("branch variable selection rules") {
  const Scenario s = two_node_instance();
  const MinlpProblem p = transform(s);
  Assignment a;
  a.x.resize(4);
  a.x << 0.1, 0.5, 0.9, 1.0;
  a.y = Eigen::VectorXd::Zero(p.y_count);
  a.z = Eigen::VectorXd::Zero(p.z_count);
  CHECK(branch_variable(p, a, {}, BranchRule::most_fractional, 1e-4) == 1);
  CHECK(branch_variable(p, a, {}, BranchRule::lowest_index, 1e-4) == 0);

  a.x << 0.5, 0.5, 1.0, 0.0;
  CHECK(branch_variable(p, a, {}, BranchRule::most_fractional, 1e-4) == 0);  // tie: lowest index

  a.x << 1.0, 0.0, 1.0, 0.0;
  CHECK_THROWS_AS(branch_variable(p, a, {}, BranchRule::most_fractional, 0.01), ScenarioError);
}

TEST_CASE("round and repair") {
  const Scenario s = two_node_instance();
  const MinlpProblem p = transform(s);

  // already binary: identity
  Eigen::VectorXd x(4);
  x << 1.0, 0.0, 0.0, 1.0;
  Assignment a = complete_binary_assignment(p, x);
  const RoundResult same = round_and_repair(p, a);
  CHECK(same.ok);
  CHECK(same.placement.cached(0, 0));
  CHECK(!same.placement.cached(0, 1));
  CHECK(same.exact_objective == doctest::Approx(177.7778).epsilon(1e-5));

  // node 0 one content over capacity: the lower-value content is evicted
  Eigen::VectorXd over(4);
  over << 0.9, 0.9, 0.0, 0.9;
  Assignment b = complete_binary_assignment(p, Eigen::VectorXd::Zero(4));
  b.x = over;
  const RoundResult repaired = round_and_repair(p, b);
  CHECK(repaired.ok);
  CHECK(placement_feasible(s, repaired.placement));
  int cached_at_0 = 0;
  for (int i = 0; i < 2; ++i) cached_at_0 += repaired.placement.cached(0, i) ? 1 : 0;
  CHECK(cached_at_0 == 1);
}

TEST_CASE("rounded placements stay within the relaxation objective on tiny instances") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const Scenario s = random_small_instance(seed, 2, 5);
    const MinlpProblem p = transform(s);
    const OracleResult oracle = exhaustive_optimal(s);
    const RelaxedSolution root = solve_relaxation(p, {}, IpmParams{});
    const RoundResult rounded = round_and_repair(p, root.assignment);
    CHECK(rounded.ok);
    CHECK(rounded.exact_objective >= oracle.objective - 1e-6);
  }
}

TEST_CASE("node limit returns the incumbent") {
  const Scenario s = random_small_instance(8, 3, 6);
  const MinlpProblem p = transform(s);
  BnbParams params;
  params.max_nodes = 1;
  params.eta = 1e-9;
  params.eta_relative = false;
  const SolveReport report = solve(p, params);
  CHECK(report.status == SolveStatus::node_limit);
  CHECK(placement_feasible(s, report.placement));
  CHECK(report.objective < std::numeric_limits<double>::infinity());
}

TEST_CASE("deterministic reports for equal seeds") {
  const Scenario s = random_small_instance(4, 3, 6);
  const MinlpProblem p = transform(s);
  BnbParams params;
  params.seed = 123;
  const SolveReport a = solve(p, params);
  const SolveReport b = solve(p, params);
  CHECK(a.objective == b.objective);
  CHECK(a.nodes_explored == b.nodes_explored);
  CHECK(a.lower_bound == b.lower_bound);
  CHECK(a.placement.x == b.placement.x);
}

TEST_CASE("incumbent bound is monotone under the accept rule") {
  // the report's upper bound equals its exact objective and brackets hold
  const Scenario s = random_small_instance(2, 3, 6);
  const MinlpProblem p = transform(s);
  const SolveReport report = solve(p, BnbParams{});
  CHECK(report.upper_bound == doctest::Approx(report.objective));
  CHECK(report.lower_bound <= report.upper_bound + 1e-12);
  CHECK(report.objective ==
        doctest::Approx(total_average_delay(s, report.placement)).epsilon(1e-12));
}

TEST_CASE("report serializes to a text record") {
  const Scenario s = two_node_instance();
  const MinlpProblem p = transform(s);
  const SolveReport report = solve(p, BnbParams{});
  const std::string text = report_to_text(report);
  CHECK(text.find("status=eta_optimal") != std::string::npos);
  CHECK(text.find("objective_s=") != std::string::npos);
  CHECK(text.find("cache node=1:") != std::string::npos);
}
