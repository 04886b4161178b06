/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/bnb.hpp"
#include "core/metrics.hpp"
#include "core/oracle.hpp"
#include "core/policies.hpp"
#include "core/scenario.hpp"

namespace edgecache {

class IntractableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepAxis { capacity, content_count, men_count };

SweepAxis axis_from_name(const std::string& name);
const char* axis_name(SweepAxis axis);

struct SolverConfig {
  BnbParams bnb;
  uint64_t oracle_budget = uint64_t{1} << 24;
  long centralized_binary_cap = 2000;  // tractability estimate for sweeps
};

SolverConfig solver_config_from_json(const nlohmann::json& config);

struct SweepSpec {
  SweepAxis axis = SweepAxis::capacity;
  std::vector<double> values;       // capacity in MB, or counts
  nlohmann::json scenario_template; // generative scenario config
  std::vector<std::string> policies;
  int repetitions = 1;
  uint64_t base_seed = 0;
  int request_count = 10000;
  bool per_node = false;
  bool score_baselines_cooperatively = false;
  SolverConfig solver;
};

SweepSpec sweep_spec_from_json(const nlohmann::json& spec);

struct SweepRow {
  double axis_value = 0.0;
  std::string policy;
  int repetition = 0;
  double objective = 0.0;  // seconds, scored per the policy's delay model
  double h_tot = 0.0;
  double h_star_tot = 0.0;
  long nodes_explored = 0;
  double wall_time = 0.0;
  std::vector<double> per_node_delay;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool per_node = false;
};

// One policy evaluated on one scenario. objective follows the comparison rule
// of the experiments: cooperative delay for centralized/distributed/oracle,
// non-cooperative for the baselines (unless score_cooperatively).
struct PolicyRun {
  Placement placement;
  double objective = 0.0;
  double cooperative_delay = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  long nodes_explored = 0;
  double wall_time = 0.0;
  SolveStatus solver_status = SolveStatus::eta_optimal;
  bool cooperative_scoring = true;
};

PolicyRun run_policy(const Scenario& s, const std::string& policy, const SolverConfig& solver,
                     bool score_baselines_cooperatively = false);

// Worker count for sweep rows; EDGECACHE_THREADS caps it. Results never
// depend on the worker count.
int sweep_thread_count();

SweepResult run_sweep(const SweepSpec& spec);

// RFC-4180-style CSV, floats at 6 significant digits, deterministic order.
// Timing values are left empty unless with_timing is set, so default output
// is byte-reproducible.
void emit_csv(const SweepResult& result, std::ostream& os, bool with_timing = false);
void emit_csv_file(const SweepResult& result, const std::string& path, bool with_timing = false);
void emit_per_node_csv(const SweepResult& result, std::ostream& os);

// Scenario construction for experiments.
nlohmann::json default_template();     // paper-default bandwidths and Zipf
nlohmann::json case_study_template();  // the 4-node/30-content setup
Scenario scenario_from_template(nlohmann::json tmpl, SweepAxis axis, double value, uint64_t seed);
Scenario scenario_from_template_plain(nlohmann::json tmpl, uint64_t seed);

std::string csv_field(const std::string& raw);  // RFC-4180 quoting
std::string format_g6(double v);                // %.6g

// Hit-rate table for one or more policies over a shared uniform request
// stream. The greedy policy's global-hit column is blank unless
// show_greedy_global is set (it duplicates every cache).
std::string hit_rates_csv(const Scenario& s, const std::vector<std::string>& policies,
                          const SolverConfig& solver, int request_count, uint64_t stream_seed,
                          bool show_greedy_global = false);

// The illustrative 4-node/30-content comparison: locally-optimal, distributed
// and centralized placements with their delays and distinct-content counts.
nlohmann::json case_study_json(uint64_t seed, const SolverConfig& solver);

int distinct_contents(const Placement& p);

}  // namespace edgecache
