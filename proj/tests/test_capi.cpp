/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "edgecache.h"

namespace {

const char* kTwoNode = R"({
  "seed": 1,
  "backhaul_mbps": 60.0,
  "nodes": [
    {"capacity_mb": 100.0, "users": 1, "user_bandwidth_mbps": 10.0},
    {"capacity_mb": 100.0, "users": 1, "user_bandwidth_mbps": 10.0}
  ],
  "links": [{"a": 1, "b": 2, "bandwidth_mbps": 45.0}],
  "contents": [100.0, 100.0],
  "foa": [[0.5, 0.5], [0.5, 0.5]]
})";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

}  // namespace

TEST_CASE("scenario handles load, save and report errors") {
  ec_scenario* s = nullptr;
  REQUIRE(ec_scenario_from_json(kTwoNode, &s) == EC_OK);
  CHECK(ec_scenario_nodes(s) == 2);
  CHECK(ec_scenario_contents(s) == 2);

  const char* path = "capi_scenario.json";
  REQUIRE(ec_scenario_save(s, path) == EC_OK);
  ec_scenario* reloaded = nullptr;
  REQUIRE(ec_scenario_load(path, &reloaded) == EC_OK);
  char* text = nullptr;
  REQUIRE(ec_scenario_to_json(reloaded, &text) == EC_OK);
  CHECK(slurp(path) == text);
  ec_string_free(text);
  ec_scenario_free(reloaded);
  ec_scenario_free(s);
  std::remove(path);

  ec_scenario* bad = nullptr;
  CHECK(ec_scenario_from_json("{\"nodes\": []}", &bad) == EC_ERR_CONFIG);
  CHECK(std::string(ec_last_error()).size() > 0);
  CHECK(ec_scenario_load("/no/such/file.json", &bad) == EC_ERR_CONFIG);
}

TEST_CASE("solving through the C surface") {
  ec_scenario* s = nullptr;
  REQUIRE(ec_scenario_from_json(kTwoNode, &s) == EC_OK);

  for (const char* policy : {"oracle", "centralized", "distributed", "locally-optimal"}) {
    ec_report* report = nullptr;
    REQUIRE(ec_solve(s, policy, nullptr, &report) == EC_OK);
    CHECK(ec_report_objective_s(report) > 0.0);
    double coop = 0.0;
    REQUIRE(ec_total_average_delay(s, report, &coop) == EC_OK);
    CHECK(coop == doctest::Approx(177.7778).epsilon(1e-4));
    char* text = nullptr;
    REQUIRE(ec_report_to_json(report, &text) == EC_OK);
    CHECK(std::string(text).find("\"policy\"") != std::string::npos);
    ec_string_free(text);
    ec_report_free(report);
  }

  ec_report* report = nullptr;
  CHECK(ec_solve(s, "no-such-policy", nullptr, &report) == EC_ERR_CONFIG);
  ec_scenario_free(s);
}

TEST_CASE("report placement accessors use 1-based indices") {
  ec_scenario* s = nullptr;
  REQUIRE(ec_scenario_from_json(kTwoNode, &s) == EC_OK);
  ec_report* report = nullptr;
  REQUIRE(ec_solve(s, "oracle", nullptr, &report) == EC_OK);
  int cached = 0;
  for (int n = 1; n <= 2; ++n)
    for (int i = 1; i <= 2; ++i) cached += ec_report_cached(report, n, i);
  CHECK(cached == 2);
  CHECK(ec_report_cached(report, 0, 1) == 0);
  CHECK(ec_report_cached(report, 3, 1) == 0);
  ec_report_free(report);
  ec_scenario_free(s);
}

TEST_CASE("hit rates and sweeps through the C surface") {
  ec_scenario* s = nullptr;
  REQUIRE(ec_scenario_from_json(kTwoNode, &s) == EC_OK);
  char* csv = nullptr;
  REQUIRE(ec_hit_rates_csv(s, "greedy,distributed", nullptr, 200, 3, 0, &csv) == EC_OK);
  CHECK(std::string(csv).find("policy,n,local_hit") == 0);
  ec_string_free(csv);
  ec_scenario_free(s);

  const char* spec = R"({
    "axis": "capacity",
    "values": [100.0, 200.0],
    "template": {
      "seed": 0,
      "backhaul_mbps": 60.0,
      "nodes": {"count": 2, "capacity_mb": 100.0, "users": 1, "user_bandwidth_mbps": 10.0},
      "links": {"men_men_mbps": 45.0, "men_bs_mbps": 45.0, "mean_men_degree": 1.0},
      "contents": {"count": 4, "size_mb_min": 50.0, "size_mb_max": 100.0},
      "foa": {"zipf_shape": 0.1, "per_node_shuffle": true}
    },
    "policies": ["distributed", "greedy"],
    "repetitions": 2,
    "base_seed": 4,
    "requests": 100
  })";
  REQUIRE(ec_sweep_run(spec, "capi_sweep.csv", nullptr, 0) == EC_OK);
  REQUIRE(ec_sweep_run(spec, "capi_sweep_again.csv", nullptr, 0) == EC_OK);
  CHECK(slurp("capi_sweep.csv") == slurp("capi_sweep_again.csv"));
  CHECK(slurp("capi_sweep.csv").find("axis_value,policy") == 0);
  std::remove("capi_sweep.csv");
  std::remove("capi_sweep_again.csv");
}

TEST_CASE("case study json through the C surface") {
  char* text = nullptr;
  const char* solver = "{\"max_nodes\": 10}";  // keep it quick
  REQUIRE(ec_case_study(2, solver, &text) == EC_OK);
  const std::string out(text);
  CHECK(out.find("locally-optimal") != std::string::npos);
  CHECK(out.find("distributed") != std::string::npos);
  CHECK(out.find("centralized") != std::string::npos);
  ec_string_free(text);
}

TEST_CASE("version string") { CHECK(std::string(ec_version()) == "0.1.0"); }
