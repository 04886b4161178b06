/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgecache {

// All sizes are stored in megabits and all bandwidths in megabits/second, so
// every delay comes out in seconds. Config files speak megabytes; conversion
// (x8) happens at ingestion only.
constexpr double kMbitPerMb = 8.0;

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Content {
  int id = 0;  // 1-based, contiguous
  double size_mbit = 0.0;
};

struct Node {
  int id = 0;  // 1-based; the last node is the base station
  double capacity_mbit = 0.0;
  int user_count = 1;
  double user_bandwidth_mbps = 0.0;
  bool is_bs = false;
};

// Symmetric partial link map plus the BS<->CS backhaul. Node indices are
// 0-based here and everywhere below; public ids stay 1-based.
class Topology {
 public:
  Topology() = default;
  Topology(int node_count, double backhaul_mbps);

  void add_link(int n, int m, double bandwidth_mbps);
  bool connected(int n, int m) const;
  double link_bandwidth(int n, int m) const;  // 0 when not connected
  double backhaul_mbps() const { return backhaul_mbps_; }
  int node_count() const { return node_count_; }
  const std::vector<int>& neighbors(int n) const { return neighbors_[n]; }
  int link_count() const { return link_count_; }

 private:
  int node_count_ = 0;
  double backhaul_mbps_ = 0.0;
  int link_count_ = 0;
  std::vector<double> bandwidth_;       // dense N*N, 0 = absent
  std::vector<std::vector<int>> neighbors_;  // sorted ascending
};

struct Scenario {
  std::vector<Node> nodes;
  std::vector<Content> contents;
  Topology topology;
  std::vector<double> foa;  // row-major N x I, each row sums to 1
  uint64_t seed = 0;        // seed the generative sections were resolved from

  int node_count() const { return static_cast<int>(nodes.size()); }
  int content_count() const { return static_cast<int>(contents.size()); }
  int bs_index() const { return node_count() - 1; }
  double foa_at(int n, int i) const { return foa[static_cast<size_t>(n) * contents.size() + i]; }
  const std::vector<int>& neighbors(int n) const { return topology.neighbors(n); }

  // throws ScenarioError when an invariant is broken
  void validate() const;
};

struct Placement {
  int nodes = 0;
  int contents = 0;
  std::vector<uint8_t> x;  // row-major N x I

  Placement() = default;
  Placement(int n, int i) : nodes(n), contents(i), x(static_cast<size_t>(n) * i, 0) {}

  bool cached(int n, int i) const { return x[static_cast<size_t>(n) * contents + i] != 0; }
  void set(int n, int i, bool v) { x[static_cast<size_t>(n) * contents + i] = v ? 1 : 0; }
  std::span<const uint8_t> row(int n) const {
    return {x.data() + static_cast<size_t>(n) * contents, static_cast<size_t>(contents)};
  }
};

// --- delay primitives (Case 1-3 of the cooperative model) ---

double delay_case1(double content_mbit, double user_bandwidth_mbps);

struct NeighborLink {
  int node = 0;  // 0-based index of the neighbor
  bool cached = false;
  double bandwidth_mbps = 0.0;
};

struct Case2Result {
  double seconds = 0.0;
  int neighbor = -1;
};

// Requires at least one caching neighbor; ties go to the lowest node index.
Case2Result delay_case2(double content_mbit, double user_bandwidth_mbps,
                        std::span<const NeighborLink> links);

double delay_case3(double content_mbit, double user_bandwidth_mbps, double link_to_bs_mbps,
                   double backhaul_mbps, bool requester_is_bs);

// Per-request delay for (n, i) under the cooperative case dispatch, and the
// serving neighbor (-1 for Case 1/3).
struct RequestRoute {
  double seconds = 0.0;
  int neighbor = -1;
};

// Case dispatch against any cache predicate cached(node, content) -> bool.
// Lets callers observe exactly which rows a node's delay depends on.
template <typename CachedFn>
RequestRoute request_route_with(const Scenario& s, CachedFn&& cached, int n, int i) {
  const double c = s.contents[i].size_mbit;
  const double b = s.nodes[n].user_bandwidth_mbps;
  if (cached(n, i)) return {delay_case1(c, b), -1};

  double best = std::numeric_limits<double>::infinity();
  int best_node = -1;
  for (int m : s.neighbors(n)) {
    if (!cached(m, i)) continue;
    const double t = c / s.topology.link_bandwidth(n, m);
    if (t < best) {  // neighbors are sorted ascending, ties keep the lowest id
      best = t;
      best_node = m;
    }
  }
  if (best_node >= 0) return {delay_case1(c, b) + best, best_node};

  const bool is_bs = (n == s.bs_index());
  const double l = is_bs ? 0.0 : s.topology.link_bandwidth(n, s.bs_index());
  return {delay_case3(c, b, l, s.topology.backhaul_mbps(), is_bs), -1};
}

RequestRoute request_route(const Scenario& s, const Placement& p, int n, int i);

bool placement_feasible(const Scenario& s, const Placement& p, double tol = 1e-9);

// Total average delay F(x): sum over contents, nodes and users of the
// per-request delay, weighted by the frequency-of-access.
double total_average_delay(const Scenario& s, const Placement& p);

// Node n's additive contribution to F(x).
double node_delay(const Scenario& s, const Placement& p, int n);

// Zipf frequency-of-access matrix (row-major node_count x content_count).
// Weight of rank r is r^-shape, normalized per row; when per_node_rank_shuffle
// is set every node draws an independent rank permutation from the seed.
std::vector<double> zipf_foa(int node_count, int content_count, double shape, uint64_t seed,
                             bool per_node_rank_shuffle);

}  // namespace edgecache
