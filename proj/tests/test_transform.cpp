/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <doctest.h>

#include <sstream>

#include "core/transform.hpp"
#include "test_support.hpp"

using namespace edgecache;
using namespace edgecache::test;

namespace {

Scenario fifteen_content_pair() {
  nlohmann::json config;
  config["seed"] = 4;
  config["backhaul_mbps"] = 60.0;
  config["nodes"] = {{"count", 2}, {"capacity_mb", 1000.0}, {"users", 5},
                     {"user_bandwidth_mbps", 10.0}};
  config["links"] = {{"men_men_mbps", 45.0}, {"men_bs_mbps", 10.0}, {"mean_men_degree", 2.0}};
  config["contents"] = {{"count", 15}, {"size_mb_min", 100.0}, {"size_mb_max", 300.0}};
  config["foa"] = {{"zipf_shape", 0.1}, {"per_node_shuffle", true}};
  return scenario_from_json(config);
}

// every feasible binary x, with y tried at each neighbor in turn and z at its
// lower bound: the smallest transformed value must equal the dispatch value
double min_over_selections(const MinlpProblem& p, const Eigen::VectorXd& x) {
  Assignment a = complete_binary_assignment(p, x);
  double best = evaluate_objective(p, a);
  for (int n = 0; n < p.nodes(); ++n) {
    for (int i = 0; i < p.contents(); ++i) {
      const int deg = p.degree(n);
      Assignment probe = a;
      for (int pick = 0; pick < deg; ++pick) {
        for (int t = 0; t < deg; ++t) probe.y[p.y_index(n, t, i)] = t == pick ? 0.0 : 1.0;
        const int m = p.scenario.neighbors(n)[pick];
        probe.z[p.z_index(n, i)] = p.q_value(n, m, i, x[p.x_index(m, i)]);
        best = std::min(best, evaluate_objective(p, probe));
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("variable counts") {
  const Scenario s = fifteen_content_pair();
  const MinlpProblem p = transform(s);
  CHECK(p.x_count == 30);
  CHECK(p.z_count == 30);
  CHECK(p.y_count == 30);  // two nodes, one neighbor each
}

TEST_CASE("selection count per node follows its degree") {
  nlohmann::json config;
  config["seed"] = 3;
  config["backhaul_mbps"] = 60.0;
  config["nodes"] = {{"count", 4}, {"capacity_mb", 600.0}, {"users", 5},
                     {"user_bandwidth_mbps", 10.0}};
  config["links"] = {{"men_men_mbps", 45.0}, {"men_bs_mbps", 45.0}, {"mean_men_degree", 2.0}};
  config["contents"] = {{"count", 2}, {"size_mb_min", 50.0}, {"size_mb_max", 200.0}};
  config["foa"] = {{"zipf_shape", 0.1}, {"per_node_shuffle", true}};
  const Scenario s = scenario_from_json(config);
  const MinlpProblem p = transform(s);
  REQUIRE(p.degree(0) == 3);  // full mesh
  Assignment a = complete_binary_assignment(p, Eigen::VectorXd::Zero(p.x_count));
  const auto violations = check_feasibility(p, a, 1e-9);
  CHECK(violations.empty());
  // breaking one selection row by hand trips the equality check
  a.y[p.y_index(0, 0, 0)] = 0.0;
  a.y[p.y_index(0, 1, 0)] = 0.0;
  bool found_equality = false;
  for (const auto& v : check_feasibility(p, a, 1e-9))
    found_equality = found_equality || v.kind == Violation::Kind::equality;
  CHECK(found_equality);
}

TEST_CASE("AUTO big-M dominates the case-study scale") {
  nlohmann::json config;
  config["seed"] = 1;
  config["backhaul_mbps"] = 60.0;
  config["nodes"] = {{"count", 4}, {"capacity_mb", 600.0}, {"users", 5},
                     {"user_bandwidth_mbps", 10.0}};
  config["links"] = {{"men_men_mbps", 45.0}, {"men_bs_mbps", 45.0}, {"mean_men_degree", 2.0}};
  config["contents"] = {{"count", 30}, {"size_mb_min", 50.0}, {"size_mb_max", 200.0}};
  config["foa"] = {{"zipf_shape", 0.1}, {"per_node_shuffle", true}};
  const Scenario s = scenario_from_json(config);
  CHECK(auto_big_m(s) > 355.6);
}

TEST_CASE("all-ones x reduces to the pure case-1 sum") {
  const Scenario s = two_node_instance();
  const MinlpProblem p = transform(s);
  Assignment a;
  a.x = Eigen::VectorXd::Ones(p.x_count);
  a.y = Eigen::VectorXd::Zero(p.y_count);
  a.z = Eigen::VectorXd::Constant(p.z_count, 123.0);  // must not matter
  double case1 = 0.0;
  for (int n = 0; n < 2; ++n)
    for (int i = 0; i < 2; ++i) case1 += 0.5 * s.contents[i].size_mbit / 10.0;
  CHECK(evaluate_objective(p, a) == doctest::Approx(case1).epsilon(1e-12));
}

TEST_CASE("binary optimum matches the dispatch evaluator") {
  const Scenario s = two_node_instance();
  const MinlpProblem p = transform(s);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  x[p.x_index(0, 0)] = 1.0;
  x[p.x_index(1, 1)] = 1.0;
  const Assignment a = complete_binary_assignment(p, x);
  CHECK(evaluate_objective(p, a) == doctest::Approx(177.7778).epsilon(1e-5));
  CHECK(check_feasibility(p, a, 1e-9).empty());
}

TEST_CASE("fractional point evaluates the literal polynomial") {
  nlohmann::json config;
  config["seed"] = 0;
  config["backhaul_mbps"] = 60.0;
  config["nodes"] = nlohmann::json::array({
      {{"capacity_mb", 100.0}, {"users", 1}, {"user_bandwidth_mbps", 10.0}},
      {{"capacity_mb", 100.0}, {"users", 1}, {"user_bandwidth_mbps", 10.0}},
  });
  config["links"] = nlohmann::json::array({{{"a", 1}, {"b", 2}, {"bandwidth_mbps", 45.0}}});
  config["contents"] = nlohmann::json::array({100.0});
  config["foa"] = nlohmann::json::array({{1.0}, {1.0}});
  const Scenario s = scenario_from_json(config);
  const MinlpProblem p = transform(s);
  Assignment a;
  a.x = Eigen::VectorXd::Constant(2, 0.5);
  a.y = Eigen::VectorXd::Zero(2);
  a.z = Eigen::VectorXd::Constant(2, 3.7);
  // hand-expanded degree-2 polynomial, one term per node
  const double d_alpha = 80.0;
  const double d_delta_men = 80.0 + 800.0 / 45.0 + 800.0 / 60.0;
  const double d_delta_bs = 80.0 + 800.0 / 60.0;
  const double men = 0.5 * d_alpha + 0.5 * (0.5 * (d_alpha + 3.7) + 0.5 * d_delta_men);
  const double bs = 0.5 * d_alpha + 0.5 * (0.5 * (d_alpha + 3.7) + 0.5 * d_delta_bs);
  CHECK(evaluate_objective(p, a) == doctest::Approx(men + bs).epsilon(1e-12));
}

TEST_CASE("feasibility report names the offending node") {
  const Scenario s = two_node_instance();
  const MinlpProblem p = transform(s);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  x[p.x_index(0, 0)] = 1.0;
  x[p.x_index(0, 1)] = 1.0;  // two 100 MB contents in a 100 MB cache
  const Assignment a = complete_binary_assignment(p, x);
  const auto violations = check_feasibility(p, a, 1e-9);
  REQUIRE(!violations.empty());
  CHECK(violations.front().kind == Violation::Kind::capacity);
  CHECK(violations.front().node == 0);

  Assignment bad = a;
  bad.x = Eigen::VectorXd::Zero(4);
  bad.z.setZero();  // z below Q of the selected neighbor
  bool found_selection = false;
  for (const auto& v : check_feasibility(p, bad, 1e-9))
    found_selection = found_selection || v.kind == Violation::Kind::selection;
  CHECK(found_selection);
}

TEST_CASE("transformed binary minimum equals the dispatch value") {
  for (uint64_t seed = 20; seed < 32; ++seed) {
    const Scenario s = random_small_instance(seed);
    const MinlpProblem p = transform(s);
    for (uint64_t t = 0; t < 4; ++t) {
      const Placement placement = random_feasible_placement(s, Rng::mix(seed, t));
      Eigen::VectorXd x(p.x_count);
      for (int n = 0; n < s.node_count(); ++n)
        for (int i = 0; i < s.content_count(); ++i)
          x[p.x_index(n, i)] = placement.cached(n, i) ? 1.0 : 0.0;
      const double dispatch = total_average_delay(s, placement);
      CHECK(min_over_selections(p, x) == doctest::Approx(dispatch).epsilon(1e-9));
    }
  }
}

TEST_CASE("raising V never changes a binary objective") {
  const Scenario s = random_small_instance(8);
  const MinlpProblem p1 = transform(s);
  const MinlpProblem p2 = transform(s, 10.0 * p1.big_m);
  for (uint64_t t = 0; t < 6; ++t) {
    const Placement placement = random_feasible_placement(s, 900 + t);
    Eigen::VectorXd x(p1.x_count);
    for (int n = 0; n < s.node_count(); ++n)
      for (int i = 0; i < s.content_count(); ++i)
        x[p1.x_index(n, i)] = placement.cached(n, i) ? 1.0 : 0.0;
    const double v1 = evaluate_objective(p1, complete_binary_assignment(p1, x));
    const double v2 = evaluate_objective(p2, complete_binary_assignment(p2, x));
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
  }
}

TEST_CASE("objective gradient and hvp match finite differences") {
  for (uint64_t seed = 40; seed < 44; ++seed) {
    const Scenario s = random_small_instance(seed);
    const MinlpProblem p = transform(s);
    Rng rng(seed);
    Assignment a;
    a.x.resize(p.x_count);
    a.y = Eigen::VectorXd::Zero(p.y_count);
    a.z.resize(p.z_count);
    for (int j = 0; j < p.x_count; ++j) a.x[j] = rng.uniform(0.1, 0.9);
    for (int j = 0; j < p.z_count; ++j) a.z[j] = rng.uniform(0.5, 5.0);

    Eigen::VectorXd gx, gz;
    objective_gradient(p, a, gx, gz);
    const double h = 1e-6;
    for (int j = 0; j < p.x_count; ++j) {
      Assignment up = a, down = a;
      up.x[j] += h;
      down.x[j] -= h;
      const double fd = (evaluate_objective(p, up) - evaluate_objective(p, down)) / (2 * h);
      CHECK(gx[j] == doctest::Approx(fd).epsilon(1e-5));
    }
    for (int j = 0; j < p.z_count; ++j) {
      Assignment up = a, down = a;
      up.z[j] += h;
      down.z[j] -= h;
      const double fd = (evaluate_objective(p, up) - evaluate_objective(p, down)) / (2 * h);
      CHECK(gz[j] == doctest::Approx(fd).epsilon(1e-5));
    }

    // Hessian-vector product against differentiated gradients
    Eigen::VectorXd vx(p.x_count), vz(p.z_count);
    for (int j = 0; j < p.x_count; ++j) vx[j] = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < p.z_count; ++j) vz[j] = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd hx, hz;
    objective_hvp(p, a, vx, vz, hx, hz);
    Assignment up = a, down = a;
    up.x += h * vx;
    up.z += h * vz;
    down.x -= h * vx;
    down.z -= h * vz;
    Eigen::VectorXd gxu, gzu, gxd, gzd;
    objective_gradient(p, up, gxu, gzu);
    objective_gradient(p, down, gxd, gzd);
    const Eigen::VectorXd fd_x = (gxu - gxd) / (2 * h);
    const Eigen::VectorXd fd_z = (gzu - gzd) / (2 * h);
    CHECK((hx - fd_x).cwiseAbs().maxCoeff() < 1e-5 * (1.0 + fd_x.cwiseAbs().maxCoeff()));
    CHECK((hz - fd_z).cwiseAbs().maxCoeff() < 1e-5 * (1.0 + fd_z.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("problem dump lists sizes and V") {
  const Scenario s = two_node_instance();
  const MinlpProblem p = transform(s);
  std::ostringstream os;
  dump_problem(p, os);
  CHECK(os.str().find("vars x=4 y=4 z=4") != std::string::npos);
  CHECK(os.str().find("V=") != std::string::npos);
}
