/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Experiment runner for the edgecache library. Subcommands: solve, oracle,
 * sweep, hit-rates, case-study. Talks to the library through its C API only.
 */
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgecache.h"

namespace {

int report_error(int code) {
  std::cerr << "error: " << ec_last_error() << "\n";
  return code;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool write_or_print(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return false;
  }
  out << text;
  return true;
}

const std::set<std::string> kPolicies = {"greedy",          "most-foa",    "guaranteed-greedy",
                                         "locally-optimal", "distributed", "centralized",
                                         "oracle"};

bool check_policies(const std::vector<std::string>& policies) {
  for (const auto& p : policies) {
    if (!kPolicies.count(p)) {
      std::cerr << "error: unknown policy '" << p << "'\n";
      return false;
    }
  }
  return true;
}

std::string json_number_list(const std::vector<double>& values) {
  std::string out = "[";
  char buf[64];
  for (size_t k = 0; k < values.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[k]);
    out += buf;
    if (k + 1 < values.size()) out += ",";
  }
  return out + "]";
}

std::string json_string_list(const std::vector<std::string>& values) {
  std::string out = "[";
  for (size_t k = 0; k < values.size(); ++k) {
    out += "\"" + values[k] + "\"";
    if (k + 1 < values.size()) out += ",";
  }
  return out + "]";
}

struct ScenarioHandle {
  ec_scenario* ptr = nullptr;
  ~ScenarioHandle() { ec_scenario_free(ptr); }
};

struct ReportHandle {
  ec_report* ptr = nullptr;
  ~ReportHandle() { ec_report_free(ptr); }
};

int load_scenario(const std::string& config, std::optional<uint64_t> seed, ScenarioHandle& s) {
  if (seed) return ec_scenario_load_with_seed(config.c_str(), *seed, &s.ptr);
  return ec_scenario_load(config.c_str(), &s.ptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative edge caching and delivery optimization"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run one policy on one scenario");
  std::string solve_config, solve_policy, solve_out, solve_solver;
  std::optional<uint64_t> solve_seed;
  solve->add_option("--config", solve_config, "scenario config path")->required();
  solve->add_option("--policy", solve_policy, "policy to run")->required();
  solve->add_option("--seed", solve_seed, "override the scenario seed");
  solve->add_option("--out", solve_out, "write the report here instead of stdout");
  solve->add_option("--solver", solve_solver, "solver settings path (JSON)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exhaustive optimal placement");
  std::string oracle_config, oracle_out;
  std::optional<uint64_t> oracle_seed;
  uint64_t oracle_budget = uint64_t{1} << 24;
  oracle->add_option("--config", oracle_config, "scenario config path")->required();
  oracle->add_option("--seed", oracle_seed, "override the scenario seed");
  oracle->add_option("--budget", oracle_budget, "enumeration budget");
  oracle->add_option("--out", oracle_out, "write the report here instead of stdout");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "seeded experiment sweep to CSV");
  std::string sweep_axis = "capacity", sweep_config, sweep_out, sweep_solver;
  std::vector<double> sweep_values;
  std::vector<std::string> sweep_policies;
  int sweep_reps = 1, sweep_requests = 10000;
  uint64_t sweep_seed = 0;
  bool sweep_per_node = false, sweep_timing = false;
  sweep->add_option("--axis", sweep_axis, "capacity | content_count | men_count");
  sweep->add_option("--values", sweep_values, "axis values (capacity in MB)")
      ->required()
      ->delimiter(',');
  sweep->add_option("--policy", sweep_policies, "policy, repeatable")->required();
  sweep->add_option("--reps", sweep_reps, "repetitions per value");
  sweep->add_option("--seed", sweep_seed, "base seed");
  sweep->add_option("--requests", sweep_requests, "request stream length");
  sweep->add_option("--config", sweep_config, "scenario template path (JSON)");
  sweep->add_option("--solver", sweep_solver, "solver settings path (JSON)");
  sweep->add_option("--out", sweep_out, "output CSV path")->required();
  sweep->add_flag("--per-node", sweep_per_node, "also emit <out>.pernode.csv");
  sweep->add_flag("--timing", sweep_timing, "fill wall_time (breaks byte reproducibility)");

  // hit-rates
  auto* hits = app.add_subcommand("hit-rates", "cache hit rates over a uniform request stream");
  std::string hits_config, hits_out, hits_solver;
  std::vector<std::string> hits_policies;
  std::optional<uint64_t> hits_scenario_seed;
  uint64_t hits_stream_seed = 0;
  int hits_requests = 10000;
  bool hits_greedy_global = false;
  hits->add_option("--config", hits_config, "scenario config path")->required();
  hits->add_option("--policy", hits_policies, "policy, repeatable")->required();
  hits->add_option("--seed", hits_scenario_seed, "override the scenario seed");
  hits->add_option("--stream-seed", hits_stream_seed, "request stream seed");
  hits->add_option("--requests", hits_requests, "request count");
  hits->add_option("--solver", hits_solver, "solver settings path (JSON)");
  hits->add_option("--out", hits_out, "output CSV path (stdout when omitted)");
  hits->add_flag("--show-greedy-global", hits_greedy_global,
                 "report the greedy policy's global hits too");

  // case-study
  auto* cs = app.add_subcommand("case-study", "4-node/30-content policy comparison");
  uint64_t cs_seed = 0;
  std::string cs_out, cs_solver;
  cs->add_option("--seed", cs_seed, "scenario seed");
  cs->add_option("--solver", cs_solver, "solver settings path (JSON)");
  cs->add_option("--out", cs_out, "output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  auto solver_text = [&](const std::string& solver_path,
                         const std::string& config_path) -> std::optional<std::string> {
    if (!solver_path.empty()) {
      auto text = read_file(solver_path);
      if (!text) std::cerr << "error: cannot read " << solver_path << "\n";
      return text;
    }
    if (!config_path.empty()) {
      auto text = read_file(config_path);
      if (!text) std::cerr << "error: cannot read " << config_path << "\n";
      return text;  // scenario configs may carry a solver section
    }
    return std::string();
  };

  if (solve->parsed()) {
    if (!check_policies({solve_policy})) return 2;
    ScenarioHandle s;
    if (int rc = load_scenario(solve_config, solve_seed, s)) return report_error(rc);
    const auto solver = solver_text(solve_solver, solve_config);
    if (!solver) return 2;
    ReportHandle r;
    const int rc = ec_solve(s.ptr, solve_policy.c_str(), solver->c_str(), &r.ptr);
    if (rc != EC_OK && rc != EC_ERR_LIMIT) return report_error(rc);
    char* text = nullptr;
    if (int rc2 = ec_report_to_json(r.ptr, &text)) return report_error(rc2);
    const bool ok = write_or_print(text, solve_out);
    ec_string_free(text);
    if (!ok) return 1;
    if (rc == EC_ERR_LIMIT) {
      std::cerr << "warning: " << ec_last_error() << "\n";
      return EC_ERR_LIMIT;
    }
    return 0;
  }

  if (oracle->parsed()) {
    ScenarioHandle s;
    if (int rc = load_scenario(oracle_config, oracle_seed, s)) return report_error(rc);
    const std::string solver = "{\"oracle_budget\":" + std::to_string(oracle_budget) + "}";
    ReportHandle r;
    if (int rc = ec_solve(s.ptr, "oracle", solver.c_str(), &r.ptr)) return report_error(rc);
    char* text = nullptr;
    if (int rc = ec_report_to_json(r.ptr, &text)) return report_error(rc);
    const bool ok = write_or_print(text, oracle_out);
    ec_string_free(text);
    return ok ? 0 : 1;
  }

  if (sweep->parsed()) {
    if (!check_policies(sweep_policies)) return 2;
    std::string tmpl;
    if (!sweep_config.empty()) {
      auto text = read_file(sweep_config);
      if (!text) {
        std::cerr << "error: cannot read " << sweep_config << "\n";
        return 2;
      }
      tmpl = *text;
    }
    const auto solver = solver_text(sweep_solver, "");
    if (!solver) return 2;
    std::string spec = "{";
    spec += "\"axis\":\"" + sweep_axis + "\",";
    spec += "\"values\":" + json_number_list(sweep_values) + ",";
    spec += "\"policies\":" + json_string_list(sweep_policies) + ",";
    spec += "\"repetitions\":" + std::to_string(sweep_reps) + ",";
    spec += "\"base_seed\":" + std::to_string(sweep_seed) + ",";
    spec += "\"requests\":" + std::to_string(sweep_requests);
    if (!tmpl.empty()) spec += ",\"template\":" + tmpl;
    if (!solver->empty()) spec += ",\"solver\":" + *solver;
    spec += "}";
    const std::string per_node_path = sweep_out + ".pernode.csv";
    const int rc = ec_sweep_run(spec.c_str(), sweep_out.c_str(),
                                sweep_per_node ? per_node_path.c_str() : nullptr,
                                sweep_timing ? 1 : 0);
    if (rc != EC_OK) return report_error(rc);
    return 0;
  }

  if (hits->parsed()) {
    if (!check_policies(hits_policies)) return 2;
    ScenarioHandle s;
    if (int rc = load_scenario(hits_config, hits_scenario_seed, s)) return report_error(rc);
    const auto solver = solver_text(hits_solver, hits_config);
    if (!solver) return 2;
    std::string policy_list;
    for (size_t k = 0; k < hits_policies.size(); ++k) {
      policy_list += hits_policies[k];
      if (k + 1 < hits_policies.size()) policy_list += ",";
    }
    char* text = nullptr;
    if (int rc = ec_hit_rates_csv(s.ptr, policy_list.c_str(), solver->c_str(), hits_requests,
                                  hits_stream_seed, hits_greedy_global ? 1 : 0, &text))
      return report_error(rc);
    const bool ok = write_or_print(text, hits_out);
    ec_string_free(text);
    return ok ? 0 : 1;
  }

  if (cs->parsed()) {
    const auto solver = solver_text(cs_solver, "");
    if (!solver) return 2;
    char* text = nullptr;
    if (int rc = ec_case_study(cs_seed, solver->c_str(), &text)) return report_error(rc);
    const bool ok = write_or_print(text, cs_out);
    ec_string_free(text);
    return ok ? 0 : 1;
  }
  return 0;
}
