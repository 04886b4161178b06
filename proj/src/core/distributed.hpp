/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "core/scenario.hpp"

namespace edgecache {

// Per-node caching problem: maximize total delay savings under the storage
// capacity. Savings are f_n^i * U_n * (uncached delay - cached delay), so
// they are never negative for a single node.
struct LocalProblem {
  int node = 0;
  std::vector<double> savings;       // seconds saved per cached content
  std::vector<double> weights_mbit;  // content sizes
  double capacity_mbit = 0.0;
};

// BS row must be decided first (MEN savings depend on it); pass it through
// bs_row for the MEN problems, empty for the BS itself.
LocalProblem build_local_problem(const Scenario& s, int node, std::span<const uint8_t> bs_row);

// Exact 0-1 knapsack by dynamic programming over whole megabits (sizes are
// rounded up). Ties prefer the lowest content index.
std::vector<uint8_t> knapsack_max_savings(const LocalProblem& problem);

// Locally optimal caching without cooperation: BS first, then each MEN given
// the BS row.
Placement local_optimal_placement(const Scenario& s);

// Records which placement rows were read on behalf of which deciding node;
// used by tests to enforce the locality contract of the cooperation pass.
struct RowAccessLog {
  std::vector<std::pair<int, int>> reads;  // (deciding node, accessed row)
  void note(int reader, int row) { reads.emplace_back(reader, row); }
};

struct CoopOptions {
  bool multi_pass = false;       // repeat full passes until no round is accepted
  std::ostream* trace = nullptr; // per-round line trace
};

struct CoopStats {
  long candidate_evaluations = 0;  // inner candidate checks (polynomial-work counter)
  int passes = 0;
  int accepted_rounds = 0;
};

struct CoopResult {
  Placement placement;
  double final_delay = 0.0;  // total_average_delay of the final placement
  CoopStats stats;
};

// Neighbor-cooperation deduplication sweep: for each content (ascending id)
// and node, tentatively swap a duplicated content for the best fitting
// candidate, then keep the round only if the network-wide delay improves.
CoopResult cooperate(const Scenario& s, const Placement& start, const CoopOptions& options = {},
                     RowAccessLog* access_log = nullptr);

}  // namespace edgecache
