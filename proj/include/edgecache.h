/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the edgecache library: cooperative content caching and
 * delivery optimization for mobile-edge networks. Handles are opaque; every
 * function returns an error code (EC_OK on success) and leaves a diagnostic
 * retrievable through ec_last_error() on failure.
 */
#ifndef EDGECACHE_H
#define EDGECACHE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  EC_OK = 0,
  EC_ERROR = 1,       /* unexpected internal failure */
  EC_ERR_CONFIG = 2,  /* invalid config, arguments or I/O */
  EC_ERR_INTRACTABLE = 3,
  EC_ERR_LIMIT = 4 /* solver or enumeration budget hit */
};

typedef struct ec_scenario ec_scenario;
typedef struct ec_report ec_report;

const char* ec_version(void);

/* Thread-local message describing the last failing call. */
const char* ec_last_error(void);

/* Strings returned through out parameters are released with this. */
void ec_string_free(char* text);

/* --- scenarios ------------------------------------------------------- */

/* Load a scenario config (JSON document, see README for the schema).
 * Generative sections are resolved deterministically from its seed. */
int ec_scenario_load(const char* path, ec_scenario** out);
int ec_scenario_from_json(const char* json_text, ec_scenario** out);

/* Same as ec_scenario_load with the config's seed replaced first. */
int ec_scenario_load_with_seed(const char* path, uint64_t seed, ec_scenario** out);

/* Canonical explicit form; saving and re-loading is byte-identical. */
int ec_scenario_save(const ec_scenario* s, const char* path);
int ec_scenario_to_json(const ec_scenario* s, char** out_text);

void ec_scenario_free(ec_scenario* s);

int ec_scenario_nodes(const ec_scenario* s);
int ec_scenario_contents(const ec_scenario* s);

/* --- solving ---------------------------------------------------------- */

/* policy: greedy | most-foa | guaranteed-greedy | locally-optimal |
 *         distributed | centralized | oracle
 * solver_json: optional JSON text holding a "solver" section (NULL for
 * defaults). Returns EC_ERR_LIMIT when the centralized solver stops on its
 * node limit (the incumbent is still reported). */
int ec_solve(const ec_scenario* s, const char* policy, const char* solver_json, ec_report** out);

double ec_report_objective_s(const ec_report* r);
double ec_report_lower_bound_s(const ec_report* r);
double ec_report_upper_bound_s(const ec_report* r);
long ec_report_nodes_explored(const ec_report* r);
/* 1 when content i is cached at node n (1-based indices), else 0. */
int ec_report_cached(const ec_report* r, int node, int content);
int ec_report_to_json(const ec_report* r, char** out_text);
void ec_report_free(ec_report* r);

/* Cooperative total average delay of the report's placement. */
int ec_total_average_delay(const ec_scenario* s, const ec_report* r, double* out_seconds);

/* --- experiments ------------------------------------------------------ */

/* Hit-rate table (CSV text) for comma-separated policies over one uniform
 * request stream. */
int ec_hit_rates_csv(const ec_scenario* s, const char* policies, const char* solver_json,
                     int request_count, uint64_t stream_seed, int show_greedy_global,
                     char** out_csv);

/* Run a sweep spec (JSON text, see README) and write its CSV. Pass a
 * non-NULL per_node_csv_path to also emit the per-node delay breakdown.
 * with_timing fills the wall_time column (breaks byte-reproducibility). */
int ec_sweep_run(const char* spec_json, const char* csv_path, const char* per_node_csv_path,
                 int with_timing);

/* The 4-node/30-content comparison of locally-optimal, distributed and
 * centralized placements (JSON text). */
int ec_case_study(uint64_t seed, const char* solver_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* EDGECACHE_H */
