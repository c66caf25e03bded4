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
#ifndef CLOUDMPC_IO_HPP
#define CLOUDMPC_IO_HPP

#include "cloudmpc/config.hpp"
#include "cloudmpc/sim.hpp"

#include <string>
#include <vector>

namespace cloudmpc {

std::string tool_version();

/**
 * Column order of the trace CSV. Per-dimension columns expand as x0..x{n-1},
 * u0..u{m-1} and w0..w{n-1}. sign_policy is sign((J_bar+eta_bar)-(J_hat+eta_hat))
 * and sign_oracle is sign(J_l - J_c); the last row (t = N) carries only the
 * terminal state and the counterfactual costs.
 */
std::vector<std::string> trace_columns(int state_dim, int control_dim);

/// Doubles are written with 17 significant digits so that a replay from the CSV is exact.
std::string trace_csv(const Scenario& scenario, const SimTrace& trace, const Counterfactuals& cf);

Json summary_json(const Scenario& scenario, const SimTrace& trace, const RunMetrics& metrics,
                  const std::string& config_hash);

/// Per-seed rows plus per-mode aggregates (mean, std, min, max).
Json batch_json(const Scenario& scenario, const std::vector<BatchRow>& rows, const std::string& config_hash);

Json audit_json(const BoundAudit& audit, const std::string& config_hash, std::size_t max_listed = 50);

struct RunManifest {
    std::string config_path;
    std::string config_hash;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> outputs;
    std::string version = tool_version();

    Json to_json() const;
};

/// Writes through a temporary file and renames it into place.
void write_text_file(const std::string& path, const std::string& contents);

} // namespace cloudmpc

#endif // CLOUDMPC_IO_HPP
