/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>

#include "core/scenario.hpp"

namespace edgecache {

enum class PolicyKind { greedy, most_foa, guaranteed_greedy, locally_optimal };

struct PolicyOptions {
  // guaranteed-greedy runs one global loop by default; per_node restricts the
  // candidate pairs to one node at a time (BS first, then each MEN)
  bool guaranteed_greedy_per_node = false;
};

Placement place(const Scenario& s, PolicyKind kind, const PolicyOptions& options = {});

// Delay model without horizontal cooperation: an MEN serves from its own
// cache, else from the BS cache, else from the CS through the BS. Used to
// score the baseline policies.
double noncooperative_delay(const Scenario& s, const Placement& p);
double noncooperative_node_delay(const Scenario& s, const Placement& p, int n);

const char* policy_name(PolicyKind kind);

}  // namespace edgecache
