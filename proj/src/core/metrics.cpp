/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/metrics.hpp"

#include "core/rng.hpp"

namespace edgecache {

RequestStream generate_requests(const Scenario& s, int count, uint64_t seed) {
  if (count < 1) throw ScenarioError("request count must be >= 1");
  RequestStream stream;
  stream.seed = seed;
  stream.requests.reserve(count);
  Rng rng(seed);
  for (int k = 0; k < count; ++k) {
    const int n = rng.below_int(s.node_count());
    const int i = rng.below_int(s.content_count());
    stream.requests.emplace_back(n, i);
  }
  return stream;
}

HitReport hit_rates(const Scenario& s, const Placement& p, const RequestStream& stream,
                    bool cooperative) {
  if (!placement_feasible(s, p)) throw ScenarioError("infeasible placement passed to hit_rates");
  const int node_count = s.node_count();
  const int bs = s.bs_index();

  std::vector<long> total(node_count, 0), local(node_count, 0);
  std::vector<long> neighbor_hits(node_count, 0), bs_hits(node_count, 0);
  for (const auto& [n, i] : stream.requests) {
    ++total[n];
    if (p.cached(n, i)) {
      ++local[n];
      continue;
    }
    for (int m : s.neighbors(n)) {
      if (p.cached(m, i)) {
        ++neighbor_hits[n];
        break;
      }
    }
    if (n != bs && p.cached(bs, i)) ++bs_hits[n];
  }

  HitReport report;
  report.local_hit.resize(node_count, 0.0);
  report.global_hit.resize(node_count, 0.0);
  std::vector<double> coop_global(node_count, 0.0);
  for (int n = 0; n < node_count; ++n) {
    if (total[n] == 0) continue;
    const double denom = static_cast<double>(total[n]);
    report.local_hit[n] = local[n] / denom;
    coop_global[n] = neighbor_hits[n] / denom;
    report.global_hit[n] = (cooperative ? neighbor_hits[n] : bs_hits[n]) / denom;
  }

  // h_tot: local rates with the BS counted once per node's misses
  double sum_men = 0.0;
  for (int n = 0; n < node_count - 1; ++n) sum_men += report.local_hit[n];
  report.h_tot = (sum_men + node_count * report.local_hit[bs]) / node_count;

  // h_star_tot: local plus cooperative neighbor hits
  double sum_star = 0.0;
  for (int n = 0; n < node_count; ++n) sum_star += report.local_hit[n] + coop_global[n];
  report.h_star_tot = sum_star / node_count;

  return report;
}

}  // namespace edgecache
