/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace edgecache {

LocalProblem build_local_problem(const Scenario& s, int node, std::span<const uint8_t> bs_row) {
  const int bs = s.bs_index();
  LocalProblem p;
  p.node = node;
  p.capacity_mbit = s.nodes[node].capacity_mbit;
  p.savings.resize(s.content_count());
  p.weights_mbit.resize(s.content_count());

  const double users = static_cast<double>(s.nodes[node].user_count);
  const double backhaul = s.topology.backhaul_mbps();
  for (int i = 0; i < s.content_count(); ++i) {
    const double c = s.contents[i].size_mbit;
    p.weights_mbit[i] = c;
    double uncached_extra;  // delay beyond d_alpha when not cached locally
    if (node == bs) {
      uncached_extra = c / backhaul;  // d_delta(BS) = d_alpha + c/B
    } else {
      const double l = s.topology.link_bandwidth(node, bs);
      const bool bs_caches = !bs_row.empty() && bs_row[i] != 0;
      // BS cached: d_beta(BS fetch) = d_alpha + c/l; else d_delta adds c/B
      uncached_extra = c / l + (bs_caches ? 0.0 : c / backhaul);
    }
    p.savings[i] = s.foa_at(node, i) * users * uncached_extra;
  }
  return p;
}

std::vector<uint8_t> knapsack_max_savings(const LocalProblem& problem) {
  const int items = static_cast<int>(problem.savings.size());
  const auto capacity = static_cast<long>(std::floor(problem.capacity_mbit));
  std::vector<uint8_t> chosen(items, 0);
  if (capacity <= 0) return chosen;

  std::vector<long> weight(items);
  for (int i = 0; i < items; ++i) weight[i] = static_cast<long>(std::ceil(problem.weights_mbit[i]));

  const size_t width = static_cast<size_t>(capacity) + 1;
  std::vector<double> best(width, 0.0);
  std::vector<uint8_t> take(static_cast<size_t>(items) * width, 0);
  for (int i = 0; i < items; ++i) {
    const long w = weight[i];
    if (w > capacity || problem.savings[i] <= 0.0) continue;
    const double v = problem.savings[i];
    for (long cap = capacity; cap >= w; --cap) {
      const double with = best[cap - w] + v;
      if (with > best[cap]) {  // strict: ties keep the lower-index solution
        best[cap] = with;
        take[static_cast<size_t>(i) * width + cap] = 1;
      }
    }
  }
  long cap = capacity;
  for (int i = items - 1; i >= 0; --i) {
    if (take[static_cast<size_t>(i) * width + cap]) {
      chosen[i] = 1;
      cap -= weight[i];
    }
  }
  return chosen;
}

Placement local_optimal_placement(const Scenario& s) {
  Placement p(s.node_count(), s.content_count());
  const int bs = s.bs_index();
  const auto bs_choice = knapsack_max_savings(build_local_problem(s, bs, {}));
  for (int i = 0; i < s.content_count(); ++i) p.set(bs, i, bs_choice[i] != 0);
  for (int n = 0; n < bs; ++n) {
    const auto choice = knapsack_max_savings(build_local_problem(s, n, p.row(bs)));
    for (int i = 0; i < s.content_count(); ++i) p.set(n, i, choice[i] != 0);
  }
  return p;
}

namespace {

double used_capacity(const Scenario& s, const Placement& p, int n) {
  double used = 0.0;
  for (int i = 0; i < s.content_count(); ++i)
    if (p.cached(n, i)) used += s.contents[i].size_mbit;
  return used;
}

}  // namespace

CoopResult cooperate(const Scenario& s, const Placement& start, const CoopOptions& options,
                     RowAccessLog* access_log) {
  if (!placement_feasible(s, start)) throw ScenarioError("cooperate: infeasible start placement");

  const int node_count = s.node_count();
  const int content_count = s.content_count();

  CoopResult result;
  result.placement = start;
  Placement& current = result.placement;

  // Per-node delay where every row read is attributed to the computing node;
  // a node only ever needs its own row and its direct neighbors' rows.
  auto tracked_node_delay = [&](const Placement& p, int n) {
    auto cached = [&](int m, int j) {
      if (access_log) access_log->note(n, m);
      return p.cached(m, j);
    };
    double total = 0.0;
    const double users = static_cast<double>(s.nodes[n].user_count);
    for (int i = 0; i < content_count; ++i)
      total += s.foa_at(n, i) * users * request_route_with(s, cached, n, i).seconds;
    return total;
  };

  auto network_delay = [&](const Placement& p) {
    double total = 0.0;
    for (int n = 0; n < node_count; ++n) total += tracked_node_delay(p, n);
    return total;
  };

  double psi = network_delay(current);

  bool accepted_any_pass = true;
  while (accepted_any_pass) {
    accepted_any_pass = false;
    ++result.stats.passes;

    for (int i = 0; i < content_count; ++i) {
      Placement tentative = current;
      struct Change {
        int node;
        int inserted;  // -1 when nothing fit
      };
      std::vector<Change> changes;

      for (int n = 0; n < node_count; ++n) {
        auto cached = [&](int m, int j) {
          if (access_log) access_log->note(n, m);
          return tentative.cached(m, j);
        };
        if (!cached(n, i)) continue;
        bool duplicated = false;
        for (int m : s.neighbors(n))
          if (cached(m, i)) {
            duplicated = true;
            break;
          }
        if (!duplicated) continue;

        // evict the duplicate and free its capacity
        tentative.set(n, i, false);
        double used = used_capacity(s, tentative, n);

        // candidate scan, by descending FoA (ties to the lowest id): prefer a
        // content absent from this node and all of its neighbors; fall back to
        // any content absent from this node
        std::vector<int> order(content_count);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
          const double fa = s.foa_at(n, a), fb = s.foa_at(n, b);
          if (fa != fb) return fa > fb;
          return a < b;
        });
        int strict = -1, fallback = -1;
        for (int cand : order) {
          if (cand == i) continue;
          ++result.stats.candidate_evaluations;
          if (cached(n, cand)) continue;
          if (used + s.contents[cand].size_mbit > s.nodes[n].capacity_mbit) continue;
          if (fallback < 0) fallback = cand;
          bool neighbor_has = false;
          for (int m : s.neighbors(n))
            if (cached(m, cand)) {
              neighbor_has = true;
              break;
            }
          if (!neighbor_has) {
            strict = cand;
            break;
          }
        }
        const int pick = strict >= 0 ? strict : fallback;
        if (pick >= 0) tentative.set(n, pick, true);
        changes.push_back({n, pick});
      }

      if (changes.empty()) continue;

      const double psi_candidate = network_delay(tentative);
      const bool accept = psi_candidate < psi;
      if (options.trace) {
        for (const Change& ch : changes) {
          *options.trace << "pass=" << result.stats.passes << " content=" << (i + 1)
                         << " node=" << (ch.node + 1) << " inserted="
                         << (ch.inserted >= 0 ? std::to_string(ch.inserted + 1) : "-")
                         << " psi_before=" << psi << " psi_after=" << psi_candidate
                         << (accept ? " accepted" : " reverted") << "\n";
        }
      }
      if (accept) {
        current = std::move(tentative);
        psi = psi_candidate;
        ++result.stats.accepted_rounds;
        accepted_any_pass = true;
      }
    }

    if (!options.multi_pass) break;
  }

  result.final_delay = psi;
  return result;
}

}  // namespace edgecache
