/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "edgecache.h"

#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "core/oracle.hpp"
#include "core/scenario_io.hpp"
#include "core/sweep.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

// maps exceptions from the core onto error codes
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const edgecache::IntractableError& e) {
    return fail(EC_ERR_INTRACTABLE, e.what());
  } catch (const edgecache::OracleBudgetError& e) {
    return fail(EC_ERR_LIMIT, e.what());
  } catch (const edgecache::ScenarioError& e) {
    return fail(EC_ERR_CONFIG, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(EC_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(EC_ERROR, e.what());
  }
}

char* dup_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

edgecache::SolverConfig parse_solver(const char* solver_json) {
  if (!solver_json || !*solver_json) return {};
  return edgecache::solver_config_from_json(nlohmann::json::parse(solver_json));
}

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

struct ec_scenario {
  edgecache::Scenario scenario;
};

struct ec_report {
  std::string policy;
  edgecache::PolicyRun run;
  edgecache::SolveStatus status = edgecache::SolveStatus::eta_optimal;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

extern "C" {

const char* ec_version(void) { return "0.1.0"; }

const char* ec_last_error(void) { return g_last_error.c_str(); }

void ec_string_free(char* text) { delete[] text; }

int ec_scenario_load(const char* path, ec_scenario** out) {
  if (!path || !out) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    auto* handle = new ec_scenario{edgecache::load_scenario_file(path)};
    *out = handle;
    return EC_OK;
  });
}

int ec_scenario_from_json(const char* json_text, ec_scenario** out) {
  if (!json_text || !out) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    auto config = nlohmann::json::parse(json_text);
    auto* handle = new ec_scenario{edgecache::scenario_from_json(config)};
    *out = handle;
    return EC_OK;
  });
}

int ec_scenario_load_with_seed(const char* path, uint64_t seed, ec_scenario** out) {
  if (!path || !out) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw edgecache::ScenarioError(std::string("cannot open config file: ") + path);
    nlohmann::json config;
    in >> config;
    config["seed"] = seed;
    auto* handle = new ec_scenario{edgecache::scenario_from_json(config)};
    *out = handle;
    return EC_OK;
  });
}

int ec_scenario_save(const ec_scenario* s, const char* path) {
  if (!s || !path) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    edgecache::save_scenario_file(s->scenario, path);
    return EC_OK;
  });
}

int ec_scenario_to_json(const ec_scenario* s, char** out_text) {
  if (!s || !out_text) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    *out_text = dup_string(edgecache::scenario_to_text(s->scenario));
    return EC_OK;
  });
}

void ec_scenario_free(ec_scenario* s) { delete s; }

int ec_scenario_nodes(const ec_scenario* s) { return s ? s->scenario.node_count() : 0; }

int ec_scenario_contents(const ec_scenario* s) { return s ? s->scenario.content_count() : 0; }

int ec_solve(const ec_scenario* s, const char* policy, const char* solver_json, ec_report** out) {
  if (!s || !policy || !out) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    const edgecache::SolverConfig solver = parse_solver(solver_json);
    auto* report = new ec_report;
    report->policy = policy;
    try {
      report->run = edgecache::run_policy(s->scenario, policy, solver);
    } catch (...) {
      delete report;
      throw;
    }
    report->status = report->run.solver_status;
    report->lower_bound = report->run.lower_bound;
    report->upper_bound = report->run.upper_bound;
    *out = report;
    if (report->status == edgecache::SolveStatus::node_limit)
      return fail(EC_ERR_LIMIT, "centralized solver stopped on its node limit");
    return static_cast<int>(EC_OK);
  });
}

double ec_report_objective_s(const ec_report* r) { return r ? r->run.objective : 0.0; }

double ec_report_lower_bound_s(const ec_report* r) { return r ? r->lower_bound : 0.0; }

double ec_report_upper_bound_s(const ec_report* r) { return r ? r->upper_bound : 0.0; }

long ec_report_nodes_explored(const ec_report* r) { return r ? r->run.nodes_explored : 0; }

int ec_report_cached(const ec_report* r, int node, int content) {
  if (!r) return 0;
  const edgecache::Placement& p = r->run.placement;
  if (node < 1 || node > p.nodes || content < 1 || content > p.contents) return 0;
  return p.cached(node - 1, content - 1) ? 1 : 0;
}

int ec_report_to_json(const ec_report* r, char** out_text) {
  if (!r || !out_text) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    nlohmann::json out;
    out["policy"] = r->policy;
    out["objective_s"] = r->run.objective;
    out["cooperative_delay_s"] = r->run.cooperative_delay;
    out["lower_bound_s"] = r->lower_bound;
    out["upper_bound_s"] = r->upper_bound;
    out["nodes_explored"] = r->run.nodes_explored;
    out["status"] = r->status == edgecache::SolveStatus::eta_optimal  ? "eta_optimal"
                    : r->status == edgecache::SolveStatus::node_limit ? "node_limit"
                                                                      : "infeasible";
    nlohmann::json cached = nlohmann::json::array();
    for (int n = 0; n < r->run.placement.nodes; ++n) {
      nlohmann::json row = nlohmann::json::array();
      for (int i = 0; i < r->run.placement.contents; ++i)
        if (r->run.placement.cached(n, i)) row.push_back(i + 1);
      cached.push_back(std::move(row));
    }
    out["cached"] = std::move(cached);
    *out_text = dup_string(out.dump(2) + "\n");
    return EC_OK;
  });
}

void ec_report_free(ec_report* r) { delete r; }

int ec_total_average_delay(const ec_scenario* s, const ec_report* r, double* out_seconds) {
  if (!s || !r || !out_seconds) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    *out_seconds = edgecache::total_average_delay(s->scenario, r->run.placement);
    return EC_OK;
  });
}

int ec_hit_rates_csv(const ec_scenario* s, const char* policies, const char* solver_json,
                     int request_count, uint64_t stream_seed, int show_greedy_global,
                     char** out_csv) {
  if (!s || !policies || !out_csv) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    const auto list = split_csv_list(policies);
    if (list.empty()) throw edgecache::ScenarioError("no policies given");
    *out_csv = dup_string(edgecache::hit_rates_csv(s->scenario, list, parse_solver(solver_json),
                                                   request_count, stream_seed,
                                                   show_greedy_global != 0));
    return EC_OK;
  });
}

int ec_sweep_run(const char* spec_json, const char* csv_path, const char* per_node_csv_path,
                 int with_timing) {
  if (!spec_json || !csv_path) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    edgecache::SweepSpec spec =
        edgecache::sweep_spec_from_json(nlohmann::json::parse(spec_json));
    if (per_node_csv_path) spec.per_node = true;
    const edgecache::SweepResult result = edgecache::run_sweep(spec);
    edgecache::emit_csv_file(result, csv_path, with_timing != 0);
    if (per_node_csv_path) {
      std::ofstream out(per_node_csv_path, std::ios::binary);
      if (!out)
        throw edgecache::ScenarioError(std::string("cannot write CSV file: ") + per_node_csv_path);
      edgecache::emit_per_node_csv(result, out);
    }
    return EC_OK;
  });
}

int ec_case_study(uint64_t seed, const char* solver_json, char** out_json) {
  if (!out_json) return fail(EC_ERR_CONFIG, "null argument");
  return guarded([&] {
    *out_json =
        dup_string(edgecache::case_study_json(seed, parse_solver(solver_json)).dump(2) + "\n");
    return EC_OK;
  });
}

}  // extern "C"
