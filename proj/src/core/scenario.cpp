/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/rng.hpp"

namespace edgecache {

Topology::Topology(int node_count, double backhaul_mbps)
    : node_count_(node_count),
      backhaul_mbps_(backhaul_mbps),
      bandwidth_(static_cast<size_t>(node_count) * node_count, 0.0),
      neighbors_(node_count) {}

void Topology::add_link(int n, int m, double bandwidth_mbps) {
  if (n == m) throw ScenarioError("self link at node " + std::to_string(n + 1));
  if (connected(n, m))
    throw ScenarioError("duplicate link " + std::to_string(n + 1) + "-" + std::to_string(m + 1));
  if (bandwidth_mbps <= 0.0)
    throw ScenarioError("non-positive bandwidth on link " + std::to_string(n + 1) + "-" +
                        std::to_string(m + 1));
  bandwidth_[static_cast<size_t>(n) * node_count_ + m] = bandwidth_mbps;
  bandwidth_[static_cast<size_t>(m) * node_count_ + n] = bandwidth_mbps;
  neighbors_[n].insert(std::lower_bound(neighbors_[n].begin(), neighbors_[n].end(), m), m);
  neighbors_[m].insert(std::lower_bound(neighbors_[m].begin(), neighbors_[m].end(), n), n);
  ++link_count_;
}

bool Topology::connected(int n, int m) const {
  return bandwidth_[static_cast<size_t>(n) * node_count_ + m] > 0.0;
}

double Topology::link_bandwidth(int n, int m) const {
  return bandwidth_[static_cast<size_t>(n) * node_count_ + m];
}

void Scenario::validate() const {
  const int n_count = node_count();
  const int i_count = content_count();
  if (n_count < 1) throw ScenarioError("scenario needs at least the BS node");
  if (i_count < 1) throw ScenarioError("scenario needs at least one content");
  if (topology.node_count() != n_count) throw ScenarioError("topology size mismatch");
  if (topology.backhaul_mbps() <= 0.0) throw ScenarioError("non-positive backhaul bandwidth");

  for (int n = 0; n < n_count; ++n) {
    const Node& node = nodes[n];
    if (node.id != n + 1) throw ScenarioError("node ids must be contiguous from 1");
    if (node.capacity_mbit < 0.0) throw ScenarioError("negative capacity at node " + std::to_string(node.id));
    if (node.user_count < 1) throw ScenarioError("node " + std::to_string(node.id) + " has no users");
    if (node.user_bandwidth_mbps <= 0.0)
      throw ScenarioError("non-positive user bandwidth at node " + std::to_string(node.id));
    const bool should_be_bs = (n == n_count - 1);
    if (node.is_bs != should_be_bs) throw ScenarioError("exactly node N must be the BS");
  }
  for (int i = 0; i < i_count; ++i) {
    if (contents[i].id != i + 1) throw ScenarioError("content ids must be contiguous from 1");
    if (contents[i].size_mbit <= 0.0)
      throw ScenarioError("non-positive size for content " + std::to_string(i + 1));
  }
  // every MEN must reach the BS directly; Case 3 routes through that link
  const int bs = bs_index();
  for (int n = 0; n + 1 < n_count; ++n) {
    if (!topology.connected(n, bs))
      throw ScenarioError("disconnected node " + std::to_string(n + 1) + " (no BS link)");
  }
  if (foa.size() != static_cast<size_t>(n_count) * i_count) throw ScenarioError("foa dimensions mismatch");
  for (int n = 0; n < n_count; ++n) {
    double row = 0.0;
    for (int i = 0; i < i_count; ++i) {
      const double f = foa_at(n, i);
      if (f < 0.0) throw ScenarioError("negative FoA entry");
      row += f;
    }
    if (std::abs(row - 1.0) > 1e-6)
      throw ScenarioError("FoA row " + std::to_string(n + 1) + " does not sum to 1");
  }
}

double delay_case1(double content_mbit, double user_bandwidth_mbps) {
  if (user_bandwidth_mbps <= 0.0) throw ScenarioError("zero bandwidth in Case 1");
  return content_mbit / user_bandwidth_mbps;
}

Case2Result delay_case2(double content_mbit, double user_bandwidth_mbps,
                        std::span<const NeighborLink> links) {
  double best = std::numeric_limits<double>::infinity();
  int best_node = -1;
  for (const NeighborLink& link : links) {
    if (!link.cached) continue;  // the V-penalty semantics: never pick these
    const double t = content_mbit / link.bandwidth_mbps;
    if (t < best || (t == best && best_node >= 0 && link.node < best_node)) {
      best = t;
      best_node = link.node;
    }
  }
  if (best_node < 0) throw ScenarioError("Case 2 called without a caching neighbor");
  return {delay_case1(content_mbit, user_bandwidth_mbps) + best, best_node};
}

double delay_case3(double content_mbit, double user_bandwidth_mbps, double link_to_bs_mbps,
                   double backhaul_mbps, bool requester_is_bs) {
  const double d_alpha = delay_case1(content_mbit, user_bandwidth_mbps);
  if (requester_is_bs) return d_alpha + content_mbit / backhaul_mbps;
  return d_alpha + content_mbit / link_to_bs_mbps + content_mbit / backhaul_mbps;
}

RequestRoute request_route(const Scenario& s, const Placement& p, int n, int i) {
  return request_route_with(
      s, [&p](int m, int j) { return p.cached(m, j); }, n, i);
}

bool placement_feasible(const Scenario& s, const Placement& p, double tol) {
  if (p.nodes != s.node_count() || p.contents != s.content_count()) return false;
  for (int n = 0; n < s.node_count(); ++n) {
    double used = 0.0;
    for (int i = 0; i < s.content_count(); ++i)
      if (p.cached(n, i)) used += s.contents[i].size_mbit;
    if (used > s.nodes[n].capacity_mbit + tol) return false;
  }
  return true;
}

double node_delay(const Scenario& s, const Placement& p, int n) {
  double total = 0.0;
  const double users = static_cast<double>(s.nodes[n].user_count);
  for (int i = 0; i < s.content_count(); ++i)
    total += s.foa_at(n, i) * users * request_route(s, p, n, i).seconds;
  return total;
}

double total_average_delay(const Scenario& s, const Placement& p) {
  if (!placement_feasible(s, p))
    throw ScenarioError("infeasible placement passed to total_average_delay");
  double total = 0.0;
  for (int n = 0; n < s.node_count(); ++n) total += node_delay(s, p, n);
  return total;
}

std::vector<double> zipf_foa(int node_count, int content_count, double shape, uint64_t seed,
                             bool per_node_rank_shuffle) {
  if (content_count < 1) throw ScenarioError("zipf_foa needs at least one content");
  if (shape < 0.0) throw ScenarioError("zipf_foa shape must be non-negative");

  std::vector<double> weights(content_count);
  double sum = 0.0;
  for (int r = 0; r < content_count; ++r) {
    weights[r] = std::pow(static_cast<double>(r + 1), -shape);
    sum += weights[r];
  }
  for (double& w : weights) w /= sum;

  std::vector<double> foa(static_cast<size_t>(node_count) * content_count);
  std::vector<int> ranks(content_count);
  for (int n = 0; n < node_count; ++n) {
    for (int i = 0; i < content_count; ++i) ranks[i] = i;
    if (per_node_rank_shuffle) {
      Rng rng(Rng::mix(seed, static_cast<uint64_t>(n)));
      rng.shuffle(ranks);
    }
    for (int i = 0; i < content_count; ++i)
      foa[static_cast<size_t>(n) * content_count + i] = weights[ranks[i]];
  }
  return foa;
}

}  // namespace edgecache
