/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>

#include <json.hpp>

#include "core/scenario.hpp"

namespace edgecache {

// Scenario configs are JSON documents with sections `nodes`, `links`,
// `contents`, `foa` and `seed`. Each section accepts either an explicit form
// or a generative rule resolved deterministically from the seed (see README
// for the field reference). Saving always emits the explicit canonical form,
// which round-trips byte-identically through load -> save.
Scenario scenario_from_json(const nlohmann::json& config);
nlohmann::json scenario_to_json(const Scenario& s);

Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const Scenario& s, const std::string& path);

// Serialized canonical text (what save_scenario_file writes).
std::string scenario_to_text(const Scenario& s);

}  // namespace edgecache
