/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "core/distributed.hpp"
#include "core/rng.hpp"
#include "core/scenario_io.hpp"
#include "core/transform.hpp"

namespace edgecache {

using nlohmann::json;

SweepAxis axis_from_name(const std::string& name) {
  if (name == "capacity") return SweepAxis::capacity;
  if (name == "content_count" || name == "contents") return SweepAxis::content_count;
  if (name == "men_count" || name == "mens") return SweepAxis::men_count;
  throw ScenarioError("unknown sweep axis: " + name);
}

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::capacity:
      return "capacity";
    case SweepAxis::content_count:
      return "content_count";
    case SweepAxis::men_count:
      return "men_count";
  }
  return "?";
}

SolverConfig solver_config_from_json(const json& config) {
  SolverConfig sc;
  if (!config.is_object()) return sc;
  // accept either a document with a "solver" section or the bare section
  const json solver = config.contains("solver") ? config.at("solver") : config;
  sc.bnb.eta = solver.value("eta", sc.bnb.eta);
  const std::string eta_mode = solver.value("eta_mode", std::string("relative"));
  sc.bnb.eta_relative = eta_mode != "absolute";
  sc.bnb.tau = solver.value("tau", sc.bnb.tau);
  sc.bnb.max_nodes = solver.value("max_nodes", sc.bnb.max_nodes);
  sc.bnb.seed = solver.value("seed", sc.bnb.seed);
  const std::string rule = solver.value("branching_rule", std::string("most_fractional"));
  sc.bnb.branching =
      rule == "lowest_index" ? BranchRule::lowest_index : BranchRule::most_fractional;
  sc.bnb.ipm.kkt_tolerance = solver.value("kkt_tolerance", sc.bnb.ipm.kkt_tolerance);
  sc.bnb.ipm.feasibility_tolerance =
      solver.value("feasibility_tolerance", sc.bnb.ipm.feasibility_tolerance);
  sc.bnb.ipm.gamma0 = solver.value("gamma0", sc.bnb.ipm.gamma0);
  sc.bnb.ipm.gamma_factor = solver.value("gamma_factor", sc.bnb.ipm.gamma_factor);
  sc.bnb.ipm.max_outer = solver.value("max_outer", sc.bnb.ipm.max_outer);
  sc.bnb.ipm.max_cg = solver.value("max_cg", sc.bnb.ipm.max_cg);
  sc.bnb.ipm.multistarts = solver.value("multistarts", sc.bnb.ipm.multistarts);
  sc.oracle_budget = solver.value("oracle_budget", sc.oracle_budget);
  sc.centralized_binary_cap = solver.value("centralized_binary_cap", sc.centralized_binary_cap);
  return sc;
}

SweepSpec sweep_spec_from_json(const json& spec) {
  SweepSpec out;
  out.axis = axis_from_name(spec.at("axis").get<std::string>());
  out.values = spec.at("values").get<std::vector<double>>();
  if (out.values.empty()) throw ScenarioError("sweep values must be non-empty");
  for (size_t k = 1; k < out.values.size(); ++k)
    if (out.values[k] <= out.values[k - 1])
      throw ScenarioError("sweep values must be strictly increasing");
  out.scenario_template = spec.value("template", default_template());
  out.policies = spec.at("policies").get<std::vector<std::string>>();
  out.repetitions = spec.value("repetitions", 1);
  if (out.repetitions < 1) throw ScenarioError("repetitions must be >= 1");
  out.base_seed = spec.value("base_seed", 0ull);
  out.request_count = spec.value("requests", 10000);
  out.per_node = spec.value("per_node", false);
  out.score_baselines_cooperatively = spec.value("score_baselines_cooperatively", false);
  out.solver = solver_config_from_json(spec);
  return out;
}

json default_template() {
  json tmpl;
  tmpl["seed"] = 0;
  tmpl["backhaul_mbps"] = 60.0;
  tmpl["nodes"] = {{"count", 5},
                   {"capacity_mb", 5000.0},
                   {"users", 5},
                   {"user_bandwidth_mbps", 10.0}};
  tmpl["links"] = {{"men_men_mbps", 45.0}, {"men_bs_mbps", 10.0}, {"mean_men_degree", 2.0}};
  tmpl["contents"] = {{"count", 200}, {"size_mb_min", 100.0}, {"size_mb_max", 300.0}};
  tmpl["foa"] = {{"zipf_shape", 0.1}, {"per_node_shuffle", true}};
  return tmpl;
}

json case_study_template() {
  json tmpl;
  tmpl["seed"] = 0;
  tmpl["backhaul_mbps"] = 60.0;
  tmpl["nodes"] = {{"count", 4},
                   {"capacity_mb", 600.0},
                   {"bs_capacity_mb", 1000.0},
                   {"users", 5},
                   {"user_bandwidth_mbps", 10.0}};
  // every node pair directly connected at the same bandwidth
  tmpl["links"] = {{"men_men_mbps", 45.0}, {"men_bs_mbps", 45.0}, {"mean_men_degree", 2.0}};
  tmpl["contents"] = {{"count", 30}, {"size_mb_min", 50.0}, {"size_mb_max", 200.0}};
  tmpl["foa"] = {{"zipf_shape", 0.1}, {"per_node_shuffle", true}};
  return tmpl;
}

Scenario scenario_from_template_plain(json tmpl, uint64_t seed) {
  tmpl["seed"] = seed;
  return scenario_from_json(tmpl);
}

Scenario scenario_from_template(json tmpl, SweepAxis axis, double value, uint64_t seed) {
  tmpl["seed"] = seed;
  switch (axis) {
    case SweepAxis::capacity:
      if (!tmpl.at("nodes").is_object())
        throw ScenarioError("capacity sweep needs a generative nodes template");
      tmpl["nodes"]["capacity_mb"] = value;
      tmpl["nodes"]["bs_capacity_mb"] = value;
      break;
    case SweepAxis::content_count:
      if (!tmpl.at("contents").is_object())
        throw ScenarioError("content sweep needs a generative contents template");
      tmpl["contents"]["count"] = static_cast<int>(value);
      break;
    case SweepAxis::men_count:
      if (!tmpl.at("nodes").is_object())
        throw ScenarioError("MEN sweep needs a generative nodes template");
      tmpl["nodes"]["count"] = static_cast<int>(value);
      break;
  }
  return scenario_from_json(tmpl);
}

namespace {

long centralized_binary_estimate(const Scenario& s) {
  long degs = 0;
  for (int n = 0; n < s.node_count(); ++n) degs += static_cast<long>(s.neighbors(n).size());
  return static_cast<long>(s.node_count()) * s.content_count() +
         degs * static_cast<long>(s.content_count());
}

}  // namespace

PolicyRun run_policy(const Scenario& s, const std::string& policy, const SolverConfig& solver,
                     bool score_baselines_cooperatively) {
  PolicyRun run;
  const auto t0 = std::chrono::steady_clock::now();
  if (policy == "centralized") {
    if (centralized_binary_estimate(s) > solver.centralized_binary_cap)
      throw IntractableError("centralized solve rejected: " +
                             std::to_string(centralized_binary_estimate(s)) +
                             " binaries exceed the tractability cap " +
                             std::to_string(solver.centralized_binary_cap));
    const MinlpProblem problem = transform(s);
    const SolveReport report = edgecache::solve(problem, solver.bnb);
    if (report.status == SolveStatus::infeasible)
      throw ScenarioError("centralized solve infeasible");
    run.placement = report.placement;
    run.objective = report.objective;
    run.cooperative_delay = report.objective;
    run.lower_bound = report.lower_bound;
    run.upper_bound = report.upper_bound;
    run.nodes_explored = report.nodes_explored;
    run.solver_status = report.status;
  } else if (policy == "distributed") {
    const CoopResult coop = cooperate(s, local_optimal_placement(s));
    run.placement = coop.placement;
    run.objective = coop.final_delay;
    run.cooperative_delay = coop.final_delay;
  } else if (policy == "oracle") {
    const OracleResult oracle = exhaustive_optimal(s, OracleBudget{solver.oracle_budget});
    run.placement = oracle.placement;
    run.objective = oracle.objective;
    run.cooperative_delay = oracle.objective;
  } else {
    PolicyKind kind;
    if (policy == "greedy")
      kind = PolicyKind::greedy;
    else if (policy == "most-foa")
      kind = PolicyKind::most_foa;
    else if (policy == "guaranteed-greedy")
      kind = PolicyKind::guaranteed_greedy;
    else if (policy == "locally-optimal")
      kind = PolicyKind::locally_optimal;
    else
      throw ScenarioError("unknown policy: " + policy);
    run.placement = place(s, kind);
    run.cooperative_delay = total_average_delay(s, run.placement);
    run.cooperative_scoring = score_baselines_cooperatively;
    run.objective = score_baselines_cooperatively ? run.cooperative_delay
                                                  : noncooperative_delay(s, run.placement);
  }
  if (policy != "centralized") {
    run.lower_bound = policy == "oracle" ? run.objective : 0.0;
    run.upper_bound = run.objective;
  }
  run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

int sweep_thread_count() {
  if (const char* env = std::getenv("EDGECACHE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

SweepResult run_sweep(const SweepSpec& spec) {
  SweepResult result;
  result.per_node = spec.per_node;
  const size_t tasks = spec.values.size() * static_cast<size_t>(spec.repetitions);
  const size_t rows = tasks * spec.policies.size();
  result.rows.resize(rows);

  auto run_task = [&](size_t task) {
    const size_t vi = task / spec.repetitions;
    const int rep = static_cast<int>(task % spec.repetitions);
    const double value = spec.values[vi];
    const uint64_t seed = spec.base_seed + static_cast<uint64_t>(rep);
    const Scenario scenario = scenario_from_template(spec.scenario_template, spec.axis, value, seed);
    const RequestStream stream =
        generate_requests(scenario, spec.request_count, Rng::mix(seed, 0x5eed));

    for (size_t pi = 0; pi < spec.policies.size(); ++pi) {
      const std::string& policy = spec.policies[pi];
      const PolicyRun run =
          run_policy(scenario, policy, spec.solver, spec.score_baselines_cooperatively);
      const bool coop_rates = run.cooperative_scoring;
      const HitReport hits = hit_rates(scenario, run.placement, stream, coop_rates);

      SweepRow row;
      row.axis_value = value;
      row.policy = policy;
      row.repetition = rep;
      row.objective = run.objective;
      row.h_tot = hits.h_tot;
      row.h_star_tot = hits.h_star_tot;
      row.nodes_explored = run.nodes_explored;
      row.wall_time = run.wall_time;
      if (spec.per_node) {
        row.per_node_delay.resize(scenario.node_count());
        for (int n = 0; n < scenario.node_count(); ++n)
          row.per_node_delay[n] = run.cooperative_scoring
                                      ? node_delay(scenario, run.placement, n)
                                      : noncooperative_node_delay(scenario, run.placement, n);
      }
      result.rows[task * spec.policies.size() + pi] = std::move(row);
    }
  };

  const int workers = std::min<int>(sweep_thread_count(), static_cast<int>(tasks));
  if (workers <= 1) {
    for (size_t t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const size_t t = next.fetch_add(1);
          if (t >= tasks) return;
          run_task(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return result;
}

std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void emit_csv(const SweepResult& result, std::ostream& os, bool with_timing) {
  os << "axis_value,policy,repetition,objective_s,h_tot,h_star_tot,nodes_explored,wall_time_s\n";
  for (const SweepRow& row : result.rows) {
    os << format_g6(row.axis_value) << ',' << csv_field(row.policy) << ',' << row.repetition << ','
       << format_g6(row.objective) << ',' << format_g6(row.h_tot) << ','
       << format_g6(row.h_star_tot) << ',' << row.nodes_explored << ','
       << (with_timing ? format_g6(row.wall_time) : std::string()) << '\n';
  }
}

void emit_csv_file(const SweepResult& result, const std::string& path, bool with_timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write CSV file: " + path);
  emit_csv(result, out, with_timing);
}

void emit_per_node_csv(const SweepResult& result, std::ostream& os) {
  os << "axis_value,policy,repetition,node,avg_delay_s\n";
  for (const SweepRow& row : result.rows) {
    for (size_t n = 0; n < row.per_node_delay.size(); ++n) {
      os << format_g6(row.axis_value) << ',' << csv_field(row.policy) << ',' << row.repetition
         << ',' << (n + 1) << ',' << format_g6(row.per_node_delay[n]) << '\n';
    }
  }
}

std::string hit_rates_csv(const Scenario& s, const std::vector<std::string>& policies,
                          const SolverConfig& solver, int request_count, uint64_t stream_seed,
                          bool show_greedy_global) {
  const RequestStream stream = generate_requests(s, request_count, stream_seed);
  std::string out = "policy,n,local_hit,global_hit,h_tot,h_star_tot,seed,count\n";
  for (const std::string& policy : policies) {
    const PolicyRun run = run_policy(s, policy, solver);
    const HitReport hits = hit_rates(s, run.placement, stream, run.cooperative_scoring);
    const bool hide_global = (policy == "greedy") && !show_greedy_global;
    for (int n = 0; n < s.node_count(); ++n) {
      out += csv_field(policy) + ',' + std::to_string(n + 1) + ',' +
             format_g6(hits.local_hit[n]) + ',' +
             (hide_global ? std::string() : format_g6(hits.global_hit[n])) + ',' +
             format_g6(hits.h_tot) + ',' + format_g6(hits.h_star_tot) + ',' +
             std::to_string(stream_seed) + ',' + std::to_string(request_count) + '\n';
    }
  }
  return out;
}

int distinct_contents(const Placement& p) {
  int distinct = 0;
  for (int i = 0; i < p.contents; ++i) {
    for (int n = 0; n < p.nodes; ++n) {
      if (p.cached(n, i)) {
        ++distinct;
        break;
      }
    }
  }
  return distinct;
}

json case_study_json(uint64_t seed, const SolverConfig& solver) {
  const Scenario s = scenario_from_template_plain(case_study_template(), seed);
  json out;
  out["seed"] = seed;
  out["nodes"] = s.node_count();
  out["contents"] = s.content_count();
  for (const char* policy : {"locally-optimal", "distributed", "centralized"}) {
    const PolicyRun run = run_policy(s, policy, solver);
    json entry;
    entry["objective_s"] = run.objective;
    entry["cooperative_delay_s"] = run.cooperative_delay;
    entry["distinct_contents"] = distinct_contents(run.placement);
    json cached = json::array();
    for (int n = 0; n < s.node_count(); ++n) {
      json row = json::array();
      for (int i = 0; i < s.content_count(); ++i)
        if (run.placement.cached(n, i)) row.push_back(i + 1);
      cached.push_back(std::move(row));
    }
    entry["cached"] = std::move(cached);
    out[policy] = std::move(entry);
  }
  return out;
}

}  // namespace edgecache
