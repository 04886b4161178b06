/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <vector>

#include "core/scenario.hpp"

namespace edgecache {

struct RequestStream {
  std::vector<std::pair<int, int>> requests;  // (node, content), 0-based
  uint64_t seed = 0;
};

// Node and content drawn independently and uniformly; deterministic per seed.
RequestStream generate_requests(const Scenario& s, int count, uint64_t seed);

struct HitReport {
  std::vector<double> local_hit;   // per node: served from own cache
  std::vector<double> global_hit;  // per node: neighbor cache (cooperative) or
                                   // BS cache (non-cooperative)
  double h_tot = 0.0;       // network average, conventional weighting
  double h_star_tot = 0.0;  // network average with cooperative global hits
};

// Hit/miss accounting for a static placement over a request stream. The
// cooperative flag selects which global-hit event the per-node rates report;
// h_tot and h_star_tot are always both computed.
HitReport hit_rates(const Scenario& s, const Placement& p, const RequestStream& stream,
                    bool cooperative);

}  // namespace edgecache
