/*
 Copyright 2026 The cloudmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef CLOUDMPC_CONFIG_HPP
#define CLOUDMPC_CONFIG_HPP

#include "cloudmpc/sim.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cloudmpc {

using Json = nlohmann::json;

/// Names accepted by preset_config (aliases included).
std::vector<std::string> preset_names();

/// Complete experiment config for a named preset; throws ConfigError for unknown names.
Json preset_config(const std::string& name);

Json load_config(const std::string& path);

/**
 * Applies "a.b.c=value". The value is parsed as JSON when possible and kept
 * as a string otherwise; missing intermediate objects are created and
 * numeric segments index into existing arrays.
 */
void apply_override(Json& config, const std::string& assignment);

/// Optional sampled check of the configured Lipschitz constants.
struct LipschitzCheck {
    SampleBox box;
    int samples = 2000;
};

/**
 * Validates the config and assembles the scenario. Schema problems are
 * collected and reported together as a ConfigError naming every offending key.
 */
Scenario build_scenario(const Json& config);

std::optional<LipschitzCheck> lipschitz_check(const Json& config, const Scenario& scenario);

/// FNV-1a 64 over the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const Json& config);

} // namespace cloudmpc

#endif // CLOUDMPC_CONFIG_HPP
