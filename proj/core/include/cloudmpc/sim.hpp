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
#ifndef CLOUDMPC_SIM_HPP
#define CLOUDMPC_SIM_HPP

#include "cloudmpc/controllers.hpp"
#include "cloudmpc/fusion.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cloudmpc {

enum class RunMode { Fused, CloudOnly, LocalOnly };

RunMode parse_run_mode(const std::string& name);
std::string to_string(RunMode mode);

/// A fully resolved experiment.
struct Scenario {
    std::string name;
    ControllerSetup setup;
    DelaySpec delay;
    /// Controls applied by the plant during the delay window (also assumed by the prediction).
    Trajectory assumed_controls;
    /// When set, the cloud starts from x_0 + injected_error instead of the delay prediction.
    std::optional<Vector> injected_error;
    DisturbanceSpec disturbance;
    /// Plant state when the cloud request is sent.
    Vector initial_state;
    PolicySpec policy;
    /// State components whose Euclidean norm is the tracking error (empty: none).
    std::vector<int> position_indices;
    std::optional<double> terminal_threshold;

    int horizon() const { return setup.cost.horizon(); }
};

struct StepRecord {
    int t = 0;
    Vector x;
    Vector u;
    SwitchDecision decision;
    LocalStatus local_status = LocalStatus::Infeasible;
};

struct SimTrace {
    RunMode mode = RunMode::Fused;
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    Trajectory states;        ///< x_0..x_N
    Trajectory controls;      ///< applied u_0..u_{N-1}
    Trajectory disturbances;  ///< w_0..w_{N-1}
    Trajectory pre_window_disturbances;
    Vector x_request;
    Vector x_hat0;
    double delta0 = 0.0;
    std::optional<CloudPlan> cloud;
    /// Local plan computed at each t (fused and local modes).
    std::vector<LocalPlan> local_plans;
    /// x_T in X_T for each configured constraint, in order.
    std::vector<bool> constraint_ok;

    bool all_constraints_ok() const;
};

/**
 * Seeded closed loop. Disturbances for the delay window and the task are
 * drawn up front so every mode sees the same realisation for a given seed.
 */
SimTrace run_closed_loop(const Scenario& scenario, RunMode mode, std::uint64_t seed);

/// True-plant re-simulations from each logged x_t under the logged disturbances.
struct Counterfactuals {
    std::vector<double> J_c;  ///< t = 0..N
    std::vector<double> J_l;  ///< t = 0..N, +inf without a local plan
    std::vector<Trajectory> cloud_tails;
    std::vector<Trajectory> local_tails;
};

Counterfactuals counterfactual_costs(const Scenario& scenario, const SimTrace& trace);

struct RunMetrics {
    double mre = 0.0;
    double total_cost = 0.0;
    double terminal_norm = 0.0;
    bool constraints_ok = true;
    std::optional<double> switch_match;
    std::optional<double> rms_position_error;
    int cloud_steps = 0;
    int local_steps = 0;
};

RunMetrics compute_metrics(const Scenario& scenario, const SimTrace& trace, const Counterfactuals* counterfactuals);

/// One bound audit failure.
struct BoundViolation {
    std::uint64_t seed = 0;
    std::string kind;
    int k = 0;
    int tau = 0;
    double measured = 0.0;
    double bound = 0.0;
};

/// Worst measured/bound ratio per audited inequality, plus all violations.
struct BoundAudit {
    int trials = 0;
    std::int64_t checks = 0;
    double worst_cloud_state = 0.0;
    double worst_cloud_cost = 0.0;
    double worst_local_state = 0.0;
    double worst_local_cost = 0.0;
    std::vector<BoundViolation> violations;
};

/**
 * Monte-Carlo audit of the cloud and local state and cost-to-go bounds plus
 * the constraint guarantee, over fused closed-loop runs with seeds first_seed..
 */
BoundAudit verify_bounds(const Scenario& scenario, int trials, std::uint64_t first_seed = 0, int threads = 0);

struct BatchRow {
    std::uint64_t seed = 0;
    RunMode mode = RunMode::Fused;
    RunMetrics metrics;
};

/// Runs every (mode, seed) pair, in parallel across seeds when threads != 1.
std::vector<BatchRow> run_batch(const Scenario& scenario, const std::vector<RunMode>& modes,
                                const std::vector<std::uint64_t>& seeds, int threads = 0);

} // namespace cloudmpc

#endif // CLOUDMPC_SIM_HPP
