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
#ifndef CLOUDMPC_CONTROLLERS_HPP
#define CLOUDMPC_CONTROLLERS_HPP

#include "cloudmpc/bounds.hpp"
#include "cloudmpc/costs.hpp"
#include "cloudmpc/geometry.hpp"
#include "cloudmpc/models.hpp"
#include "cloudmpc/trajopt.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cloudmpc {

/// Request-response delay of the single cloud request.
struct DelaySpec {
    enum class Prediction { HoldState, ForwardSimulate };
    int delta_t = 0;
    Prediction prediction = Prediction::ForwardSimulate;
    /// Overrides the computed bound delta_0 on ||x_hat_0 - x_0||.
    std::optional<double> explicit_eps0;
};

DelaySpec::Prediction parse_prediction(const std::string& name);
std::string to_string(DelaySpec::Prediction prediction);

struct ControlBounds {
    Vector lower;
    Vector upper;

    static ControlBounds unbounded(int control_dim);
};

/// Everything both controllers need, shared read-only across a run.
struct ControllerSetup {
    TimeVaryingModel model;
    CostSpec cost;
    std::vector<PolytopeConstraint> constraints;
    ControlBounds bounds;
    UnitBallPolytope gauges;
    double omega = 0.0;
    SolverOptions solver;

    BoundContext context() const { return BoundContext::from(model, cost, omega); }
};

struct InitialPrediction {
    Vector x_hat0;
    double delta0 = 0.0;
};

/**
 * Predicts the state at the time the cloud plan takes effect from the state
 * measured at request time. Pre-window steps use the t = 0 stage of the model.
 */
InitialPrediction predict_initial_state(const TimeVaryingModel& model, double omega, const Vector& x_measured,
                                        const DelaySpec& delay, std::span<const Vector> assumed_controls);

struct CloudPlan {
    Trajectory controls;
    Trajectory states;
    std::vector<double> cost_to_go;
    std::vector<double> delta;
    /// Cost-to-go error bounds evaluated at eps_k = delta_k.
    std::vector<double> eta;
    std::vector<PolytopeConstraint> tightened;
    SolveStatus status = SolveStatus::Infeasible;
    double violation = 0.0;
    BoundContext ctx;

    /// Cost-to-go error bound at step k for a measured ||x_hat_k - x_k||.
    double eta_at(int k, double eps) const { return cloud_cost_bound(ctx, eps, k); }
};

/// Solves the one-shot cloud problem; throws InfeasibleError when the tightened problem has no solution.
CloudPlan solve_cloud(const ControllerSetup& setup, const Vector& x_hat0, double delta0);

enum class LocalStatus { Fresh, FailSafeCarryover, Infeasible };

std::string to_string(LocalStatus status);

struct LocalPlan {
    int t = 0;
    LocalStatus status = LocalStatus::Infeasible;
    Trajectory controls;
    Trajectory states;
    /// Gauge pairs for l = t..N-1 entering the error bounds.
    std::vector<Gauge> gauges;
    /// Number of leading gauge pairs that are decision variables (the rest are exact norms).
    int solved_gauges = 0;
    double J_bar = 0.0;
    double eta_bar = 0.0;
    /// (T, xi_{T|t}) for every constrained time T > t.
    std::vector<std::pair<int, double>> xi;
    SolveStatus solver_status = SolveStatus::Infeasible;
    double violation = 0.0;
    /// True when the shifted previous plan was kept because it is feasible and optimal within tolerance.
    bool kept_previous = false;

    bool has_controls() const { return !controls.empty(); }
};

/**
 * Shrinking-horizon local problem at time t from the measured state. On
 * infeasibility the previous plan's tail is carried over with J_bar = +inf.
 */
LocalPlan solve_local(const ControllerSetup& setup, int t, const Vector& x_t, const LocalPlan* previous);

/// The local problem as handed to the trajectory optimiser (exposed for tests and benchmarks).
TrajOptProblem build_local_problem(const ControllerSetup& setup, int t, const Vector& x_t);

/// The tightened cloud problem (exposed for tests and benchmarks).
TrajOptProblem build_cloud_problem(const ControllerSetup& setup, const Vector& x_hat0,
                                   std::span<const double> delta, std::vector<PolytopeConstraint>* tightened);

} // namespace cloudmpc

#endif // CLOUDMPC_CONTROLLERS_HPP
