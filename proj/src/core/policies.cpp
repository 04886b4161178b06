/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/policies.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "core/distributed.hpp"

namespace edgecache {

namespace {

Placement place_greedy(const Scenario& s) {
  // as many contents as possible: smallest sizes first
  Placement p(s.node_count(), s.content_count());
  std::vector<int> order(s.content_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return s.contents[a].size_mbit < s.contents[b].size_mbit;
  });
  for (int n = 0; n < s.node_count(); ++n) {
    double used = 0.0;
    for (int i : order) {
      if (used + s.contents[i].size_mbit > s.nodes[n].capacity_mbit) break;
      used += s.contents[i].size_mbit;
      p.set(n, i, true);
    }
  }
  return p;
}

Placement place_most_foa(const Scenario& s) {
  Placement p(s.node_count(), s.content_count());
  std::vector<int> order(s.content_count());
  for (int n = 0; n < s.node_count(); ++n) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return s.foa_at(n, a) > s.foa_at(n, b); });
    double used = 0.0;
    for (int i : order) {  // skip what does not fit, keep scanning
      if (used + s.contents[i].size_mbit > s.nodes[n].capacity_mbit) continue;
      used += s.contents[i].size_mbit;
      p.set(n, i, true);
    }
  }
  return p;
}

// Marginal non-cooperative delay reduction of caching content i at node n,
// given the current placement. The BS's gain includes the c/B saved at every
// MEN that does not cache i itself.
double marginal_gain(const Scenario& s, const Placement& p, int n, int i) {
  const int bs = s.bs_index();
  const double c = s.contents[i].size_mbit;
  const double backhaul = s.topology.backhaul_mbps();
  if (n == bs) {
    double gain = s.foa_at(bs, i) * s.nodes[bs].user_count * (c / backhaul);
    for (int m = 0; m < bs; ++m)
      if (!p.cached(m, i)) gain += s.foa_at(m, i) * s.nodes[m].user_count * (c / backhaul);
    return gain;
  }
  const double l = s.topology.link_bandwidth(n, bs);
  const double extra = c / l + (p.cached(bs, i) ? 0.0 : c / backhaul);
  return s.foa_at(n, i) * s.nodes[n].user_count * extra;
}

void greedy_fill(const Scenario& s, Placement& p, std::vector<double>& used, int only_node) {
  const int node_count = s.node_count();
  for (;;) {
    double best_density = 0.0;
    int best_n = -1, best_i = -1;
    for (int n = 0; n < node_count; ++n) {
      if (only_node >= 0 && n != only_node) continue;
      for (int i = 0; i < s.content_count(); ++i) {
        if (p.cached(n, i)) continue;
        const double c = s.contents[i].size_mbit;
        if (used[n] + c > s.nodes[n].capacity_mbit) continue;
        const double density = marginal_gain(s, p, n, i) / c;
        if (density > best_density) {
          best_density = density;
          best_n = n;
          best_i = i;
        }
      }
    }
    if (best_n < 0) break;
    p.set(best_n, best_i, true);
    used[best_n] += s.contents[best_i].size_mbit;
  }
}

Placement place_guaranteed_greedy(const Scenario& s, bool per_node) {
  Placement p(s.node_count(), s.content_count());
  std::vector<double> used(s.node_count(), 0.0);
  if (per_node) {
    greedy_fill(s, p, used, s.bs_index());
    for (int n = 0; n < s.bs_index(); ++n) greedy_fill(s, p, used, n);
  } else {
    greedy_fill(s, p, used, -1);
  }
  return p;
}

}  // namespace

Placement place(const Scenario& s, PolicyKind kind, const PolicyOptions& options) {
  switch (kind) {
    case PolicyKind::greedy:
      return place_greedy(s);
    case PolicyKind::most_foa:
      return place_most_foa(s);
    case PolicyKind::guaranteed_greedy:
      return place_guaranteed_greedy(s, options.guaranteed_greedy_per_node);
    case PolicyKind::locally_optimal:
      return local_optimal_placement(s);
  }
  throw ScenarioError("unknown policy");
}

double noncooperative_node_delay(const Scenario& s, const Placement& p, int n) {
  const int bs = s.bs_index();
  const double users = static_cast<double>(s.nodes[n].user_count);
  const double backhaul = s.topology.backhaul_mbps();
  double total = 0.0;
  for (int i = 0; i < s.content_count(); ++i) {
    const double c = s.contents[i].size_mbit;
    const double d_alpha = delay_case1(c, s.nodes[n].user_bandwidth_mbps);
    double d;
    if (p.cached(n, i)) {
      d = d_alpha;
    } else if (n == bs) {
      d = d_alpha + c / backhaul;  // d_delta(BS)
    } else {
      const double l = s.topology.link_bandwidth(n, bs);
      d = d_alpha + c / l + (p.cached(bs, i) ? 0.0 : c / backhaul);
    }
    total += s.foa_at(n, i) * users * d;
  }
  return total;
}

double noncooperative_delay(const Scenario& s, const Placement& p) {
  if (!placement_feasible(s, p))
    throw ScenarioError("infeasible placement passed to noncooperative_delay");
  double total = 0.0;
  for (int n = 0; n < s.node_count(); ++n) total += noncooperative_node_delay(s, p, n);
  return total;
}

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::greedy:
      return "greedy";
    case PolicyKind::most_foa:
      return "most-foa";
    case PolicyKind::guaranteed_greedy:
      return "guaranteed-greedy";
    case PolicyKind::locally_optimal:
      return "locally-optimal";
  }
  return "?";
}

}  // namespace edgecache
