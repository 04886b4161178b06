/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "core/rng.hpp"

namespace edgecache {

using nlohmann::json;

namespace {

// deterministic sub-streams of the scenario seed
enum : uint64_t { kStreamContents = 1, kStreamLinks = 2, kStreamFoa = 3 };

double require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw ScenarioError(std::string("non-positive ") + what);
  return v;
}

std::vector<Node> parse_nodes(const json& cfg) {
  std::vector<Node> nodes;
  if (cfg.is_array()) {
    int id = 1;
    for (const auto& jn : cfg) {
      Node n;
      n.id = id++;
      n.capacity_mbit = jn.at("capacity_mb").get<double>() * kMbitPerMb;
      n.user_count = jn.value("users", 1);
      n.user_bandwidth_mbps = jn.at("user_bandwidth_mbps").get<double>();
      nodes.push_back(n);
    }
  } else {
    const int count = cfg.at("count").get<int>();
    if (count < 1) throw ScenarioError("nodes.count must be >= 1");
    const double cap_mb = cfg.at("capacity_mb").get<double>();
    const double bs_cap_mb = cfg.value("bs_capacity_mb", cap_mb);
    const int users = cfg.value("users", 5);
    const double ub = cfg.value("user_bandwidth_mbps", 10.0);
    for (int i = 0; i < count; ++i) {
      Node n;
      n.id = i + 1;
      n.capacity_mbit = (i + 1 == count ? bs_cap_mb : cap_mb) * kMbitPerMb;
      n.user_count = users;
      n.user_bandwidth_mbps = ub;
      nodes.push_back(n);
    }
  }
  if (nodes.empty()) throw ScenarioError("empty nodes section");
  nodes.back().is_bs = true;
  return nodes;
}

std::vector<Content> parse_contents(const json& cfg, uint64_t seed) {
  std::vector<Content> contents;
  if (cfg.is_array()) {
    int id = 1;
    for (const auto& sz : cfg)
      contents.push_back({id++, require_positive(sz.get<double>(), "content size") * kMbitPerMb});
  } else {
    const int count = cfg.at("count").get<int>();
    if (count < 1) throw ScenarioError("contents.count must be >= 1");
    const double lo = cfg.at("size_mb_min").get<double>();
    const double hi = cfg.at("size_mb_max").get<double>();
    if (!(lo > 0.0) || hi < lo) throw ScenarioError("invalid content size range");
    Rng rng(Rng::mix(seed, kStreamContents));
    for (int i = 0; i < count; ++i)
      contents.push_back({i + 1, rng.uniform(lo, hi) * kMbitPerMb});
  }
  return contents;
}

Topology parse_links(const json& cfg, int node_count, double backhaul_mbps, uint64_t seed) {
  Topology topo(node_count, require_positive(backhaul_mbps, "backhaul bandwidth"));
  const int bs = node_count - 1;
  if (cfg.is_array()) {
    for (const auto& jl : cfg) {
      const int a = jl.at("a").get<int>() - 1;
      const int b = jl.at("b").get<int>() - 1;
      if (a < 0 || a >= node_count || b < 0 || b >= node_count)
        throw ScenarioError("link endpoint out of range");
      topo.add_link(a, b, jl.at("bandwidth_mbps").get<double>());
    }
  } else {
    // BS star plus seeded random MEN-MEN links with a target mean degree
    const double men_men = cfg.value("men_men_mbps", 45.0);
    const double men_bs = cfg.value("men_bs_mbps", 10.0);
    const double mean_degree = cfg.value("mean_men_degree", 2.0);
    for (int n = 0; n < bs; ++n) topo.add_link(n, bs, men_bs);
    const int men = bs;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < men; ++a)
      for (int b = a + 1; b < men; ++b) pairs.emplace_back(a, b);
    Rng rng(Rng::mix(seed, kStreamLinks));
    rng.shuffle(pairs);
    const auto want = static_cast<size_t>(std::max(0.0, mean_degree * men / 2.0 + 0.5));
    const size_t take = std::min(pairs.size(), want);
    for (size_t k = 0; k < take; ++k) topo.add_link(pairs[k].first, pairs[k].second, men_men);
  }
  return topo;
}

std::vector<double> parse_foa(const json& cfg, int node_count, int content_count, uint64_t seed) {
  if (cfg.is_array()) {
    if (static_cast<int>(cfg.size()) != node_count) throw ScenarioError("foa row count mismatch");
    std::vector<double> foa(static_cast<size_t>(node_count) * content_count);
    for (int n = 0; n < node_count; ++n) {
      const auto& row = cfg.at(n);
      if (static_cast<int>(row.size()) != content_count) throw ScenarioError("foa column count mismatch");
      double sum = 0.0;
      for (int i = 0; i < content_count; ++i) {
        const double f = row.at(i).get<double>();
        if (f < 0.0) throw ScenarioError("negative FoA entry");
        foa[static_cast<size_t>(n) * content_count + i] = f;
        sum += f;
      }
      if (!(sum > 0.0)) throw ScenarioError("FoA row with zero mass");
      // normalize only rows that are genuinely off; re-dividing a row that
      // already sums to 1 up to rounding would break save/load idempotence
      if (std::abs(sum - 1.0) > 1e-9)
        for (int i = 0; i < content_count; ++i)
          foa[static_cast<size_t>(n) * content_count + i] /= sum;
    }
    return foa;
  }
  const double shape = cfg.value("zipf_shape", 0.1);
  const bool shuffle = cfg.value("per_node_shuffle", true);
  return zipf_foa(node_count, content_count, shape, Rng::mix(seed, kStreamFoa), shuffle);
}

}  // namespace

Scenario scenario_from_json(const json& config) {
  if (!config.is_object()) throw ScenarioError("config root must be an object");
  const uint64_t seed = config.value("seed", 0ull);
  Scenario s;
  s.seed = seed;
  s.nodes = parse_nodes(config.at("nodes"));
  s.contents = parse_contents(config.at("contents"), seed);
  s.topology = parse_links(config.at("links"), s.node_count(),
                           config.value("backhaul_mbps", 60.0), seed);
  s.foa = parse_foa(config.at("foa"), s.node_count(), s.content_count(), seed);
  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json out;
  out["seed"] = s.seed;
  out["backhaul_mbps"] = s.topology.backhaul_mbps();
  json nodes = json::array();
  for (const Node& n : s.nodes) {
    nodes.push_back({{"capacity_mb", n.capacity_mbit / kMbitPerMb},
                     {"users", n.user_count},
                     {"user_bandwidth_mbps", n.user_bandwidth_mbps}});
  }
  out["nodes"] = std::move(nodes);
  json contents = json::array();
  for (const Content& c : s.contents) contents.push_back(c.size_mbit / kMbitPerMb);
  out["contents"] = std::move(contents);
  json links = json::array();
  for (int a = 0; a < s.node_count(); ++a)
    for (int b = a + 1; b < s.node_count(); ++b)
      if (s.topology.connected(a, b))
        links.push_back(
            {{"a", a + 1}, {"b", b + 1}, {"bandwidth_mbps", s.topology.link_bandwidth(a, b)}});
  out["links"] = std::move(links);
  json foa = json::array();
  for (int n = 0; n < s.node_count(); ++n) {
    json row = json::array();
    for (int i = 0; i < s.content_count(); ++i) row.push_back(s.foa_at(n, i));
    foa.push_back(std::move(row));
  }
  out["foa"] = std::move(foa);
  return out;
}

std::string scenario_to_text(const Scenario& s) {
  return scenario_to_json(s).dump(2) + "\n";
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open config file: " + path);
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw ScenarioError("config parse error in " + path + ": " + e.what());
  }
  return scenario_from_json(config);
}

void save_scenario_file(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write config file: " + path);
  out << scenario_to_text(s);
}

}  // namespace edgecache
