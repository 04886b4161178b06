/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace edgecache {

namespace {

// All subsets of contents fitting the node's capacity, by DFS in content
// order (exclude branch first).
std::vector<uint64_t> feasible_subsets(const Scenario& s, int node, uint64_t abort_above) {
  std::vector<uint64_t> out;
  const int items = s.content_count();
  const double cap = s.nodes[node].capacity_mbit;
  struct Frame {
    int item;
    uint64_t mask;
    double used;
  };
  std::vector<Frame> stack{{0, 0, 0.0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.item == items) {
      out.push_back(f.mask);
      if (out.size() > abort_above) return out;
      continue;
    }
    // include branch pushed first so the exclude branch is explored first
    const double with = f.used + s.contents[f.item].size_mbit;
    if (with <= cap) stack.push_back({f.item + 1, f.mask | (uint64_t{1} << f.item), with});
    stack.push_back({f.item + 1, f.mask, f.used});
  }
  return out;
}

// Per-content delay contribution for one caching pattern over the effective
// nodes (bit e of pattern = content cached at eff_nodes[e]).
double content_delay(const Scenario& s, const std::vector<int>& node_bit, int i,
                     uint32_t pattern) {
  auto cached = [&](int m) {
    const int bit = node_bit[m];
    return bit >= 0 && ((pattern >> bit) & 1u) != 0;
  };
  const double c = s.contents[i].size_mbit;
  const int bs = s.bs_index();
  double total = 0.0;
  for (int n = 0; n < s.node_count(); ++n) {
    const double d_alpha = c / s.nodes[n].user_bandwidth_mbps;
    double d;
    if (cached(n)) {
      d = d_alpha;
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (int m : s.neighbors(n))
        if (cached(m)) best = std::min(best, c / s.topology.link_bandwidth(n, m));
      if (best < std::numeric_limits<double>::infinity()) {
        d = d_alpha + best;
      } else if (n == bs) {
        d = d_alpha + c / s.topology.backhaul_mbps();
      } else {
        d = d_alpha + c / s.topology.link_bandwidth(n, bs) + c / s.topology.backhaul_mbps();
      }
    }
    total += s.foa_at(n, i) * s.nodes[n].user_count * d;
  }
  return total;
}

struct Search {
  const Scenario* s;
  std::vector<int> eff_nodes;              // nodes with a real caching choice
  std::vector<std::vector<uint64_t>> subsets;  // per eff node
  int levels = 0;
  int items = 0;
  // layer[d][prefix * items + i] = min over completions of content i's delay
  std::vector<std::vector<double>> layer;
  double best = std::numeric_limits<double>::infinity();
  std::vector<uint32_t> best_pattern;  // per content
  std::vector<uint32_t> prefix;

  void run(int depth, double bound) {
    if (depth == levels) {
      if (bound < best || (bound == best && lex_smaller())) {
        best = bound;
        best_pattern = prefix;
      }
      return;
    }
    for (uint64_t mask : subsets[depth]) {
      double next_bound = 0.0;
      const auto& next_layer = layer[depth + 1];
      for (int i = 0; i < items; ++i) {
        uint32_t p = prefix[i] | (((mask >> i) & 1u) ? (1u << depth) : 0u);
        prefix[i] = p;  // temporarily advanced; restored below
        next_bound += next_layer[static_cast<size_t>(p) * items + i];
      }
      if (next_bound <= best) run(depth + 1, next_bound);
      const uint32_t clear = ~(1u << depth);
      for (int i = 0; i < items; ++i) prefix[i] &= clear;
    }
  }

  bool lex_smaller() const {
    // row-major comparison of the candidate placement against the incumbent
    for (int e = 0; e < levels; ++e) {
      for (int i = 0; i < items; ++i) {
        const int a = (prefix[i] >> e) & 1u;
        const int b = (best_pattern[i] >> e) & 1u;
        if (a != b) return a < b;
      }
    }
    return false;
  }
};

}  // namespace

OracleResult exhaustive_optimal(const Scenario& s, const OracleBudget& budget) {
  if (s.content_count() > 64) throw ScenarioError("oracle supports at most 64 contents");

  Search search;
  search.s = &s;
  search.items = s.content_count();

  uint64_t estimate = 1;
  std::vector<int> node_bit(s.node_count(), -1);
  for (int n = 0; n < s.node_count(); ++n) {
    auto subs = feasible_subsets(s, n, budget.max_enumerations);
    if (estimate > budget.max_enumerations / subs.size())
      throw OracleBudgetError(budget.max_enumerations + 1, budget.max_enumerations);
    estimate *= subs.size();
    if (subs.size() > 1) {
      node_bit[n] = static_cast<int>(search.eff_nodes.size());
      search.eff_nodes.push_back(n);
      search.subsets.push_back(std::move(subs));
    }
  }
  if (estimate > budget.max_enumerations)
    throw OracleBudgetError(estimate, budget.max_enumerations);

  search.levels = static_cast<int>(search.eff_nodes.size());
  const int levels = search.levels;
  const int items = search.items;
  if (levels > 22 || (size_t{1} << levels) * static_cast<size_t>(items) > (size_t{1} << 23))
    throw ScenarioError("oracle: instance shape too large for the pattern tables");

  // exact per-content delay for every pattern, then suffix-min layers
  search.layer.resize(levels + 1);
  search.layer[levels].resize((size_t{1} << levels) * items);
  for (uint32_t p = 0; p < (1u << levels); ++p)
    for (int i = 0; i < items; ++i)
      search.layer[levels][static_cast<size_t>(p) * items + i] = content_delay(s, node_bit, i, p);
  for (int d = levels - 1; d >= 0; --d) {
    search.layer[d].resize((size_t{1} << d) * items);
    for (uint32_t p = 0; p < (1u << d); ++p)
      for (int i = 0; i < items; ++i)
        search.layer[d][static_cast<size_t>(p) * items + i] =
            std::min(search.layer[d + 1][static_cast<size_t>(p) * items + i],
                     search.layer[d + 1][(static_cast<size_t>(p) | (size_t{1} << d)) * items + i]);
  }

  // explore the most promising first-level subsets first; pruning then cuts
  // nearly everything else
  if (levels > 0) {
    auto& first = search.subsets[0];
    std::vector<double> bound_of(first.size());
    const auto& l1 = search.layer[1];
    for (size_t k = 0; k < first.size(); ++k) {
      double b = 0.0;
      for (int i = 0; i < items; ++i) {
        const uint32_t p = (first[k] >> i) & 1u;
        b += l1[static_cast<size_t>(p) * items + i];
      }
      bound_of[k] = b;
    }
    std::vector<size_t> order(first.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return bound_of[a] < bound_of[b]; });
    std::vector<uint64_t> sorted(first.size());
    for (size_t k = 0; k < first.size(); ++k) sorted[k] = first[order[k]];
    first = std::move(sorted);
  }

  search.prefix.assign(items, 0);
  search.best_pattern.assign(items, 0);
  if (levels == 0) {
    double total = 0.0;
    for (int i = 0; i < items; ++i) total += content_delay(s, node_bit, i, 0);
    search.best = total;
  } else {
    search.run(0, 0.0);
  }

  OracleResult result;
  result.objective = search.best;
  result.feasible_estimate = estimate;
  result.placement = Placement(s.node_count(), items);
  for (int e = 0; e < levels; ++e)
    for (int i = 0; i < items; ++i)
      if ((search.best_pattern[i] >> e) & 1u) result.placement.set(search.eff_nodes[e], i, true);
  return result;
}

}  // namespace edgecache
