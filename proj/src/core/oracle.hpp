/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <stdexcept>

#include "core/scenario.hpp"

namespace edgecache {

struct OracleBudget {
  uint64_t max_enumerations = uint64_t{1} << 24;
};

class OracleBudgetError : public std::runtime_error {
 public:
  OracleBudgetError(uint64_t estimate, uint64_t budget)
      : std::runtime_error("oracle budget exceeded: estimated at least " +
                           std::to_string(estimate) + " placements > budget " +
                           std::to_string(budget)),
        estimate(estimate),
        budget(budget) {}
  uint64_t estimate;
  uint64_t budget;
};

struct OracleResult {
  Placement placement;
  double objective = 0.0;
  uint64_t feasible_estimate = 0;  // product of per-node feasible subset counts
};

// Exact global minimizer of total_average_delay over all feasible binary
// placements. Per-node feasible subsets are generated by capacity-bounded
// DFS; the cross product is explored depth-first with an admissible partial
// bound, which preserves exactness. Ties resolve to the lexicographically
// smallest placement (row-major).
OracleResult exhaustive_optimal(const Scenario& s, const OracleBudget& budget = {});

}  // namespace edgecache
