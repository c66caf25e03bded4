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
#include "cloudmpc/controllers.hpp"

#include "cloudmpc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cloudmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Constraints still ahead of time t, and the latest such time (t when none).
int last_constrained_time(const ControllerSetup& setup, int t)
{
    int last = t;
    for (const auto& c : setup.constraints)
        if (c.time > t) last = std::max(last, c.time);
    return last;
}

struct GaugeCounts {
    int alpha = 0;
    int beta = 0;
};

GaugeCounts gauge_counts(const ControllerSetup& setup, const BoundContext& ctx, int t)
{
    const int span = last_constrained_time(setup, t) - t;
    GaugeCounts counts;
    if (span > 0 && ctx.L_f > 0.0) counts.alpha = span;
    if (span > 0 && ctx.M_f > 0.0) counts.beta = span;
    return counts;
}

/// Gauge pairs for l = t..N-1: decision-variable gauges where present, exact norms elsewhere.
std::vector<Gauge> bound_gauges(const ControllerSetup& setup, const LocalPlan& plan, const Vector& alpha,
                                const Vector& beta)
{
    const NormKind norm = setup.model.norm();
    std::vector<Gauge> gauges(plan.controls.size());
    for (std::size_t k = 0; k < gauges.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        gauges[k].alpha = i < alpha.size() ? alpha[i] : vector_norm(plan.states[k], norm);
        gauges[k].beta = i < beta.size() ? beta[i] : vector_norm(plan.controls[k], norm);
    }
    return gauges;
}

/// Smallest gauges consistent with a trajectory, for the first `counts` steps.
std::pair<Vector, Vector> canonical_gauges(const ControllerSetup& setup, const GaugeCounts& counts,
                                           const Trajectory& states, const Trajectory& controls)
{
    Vector alpha(counts.alpha);
    Vector beta(counts.beta);
    for (int k = 0; k < counts.alpha; ++k)
        alpha[k] = minimal_gauge(setup.gauges, GaugeKind::State, states[static_cast<std::size_t>(k)]);
    for (int k = 0; k < counts.beta; ++k)
        beta[k] = minimal_gauge(setup.gauges, GaugeKind::Control, controls[static_cast<std::size_t>(k)]);
    return {alpha, beta};
}

void finish_bounds(const ControllerSetup& setup, const BoundContext& ctx, LocalPlan& plan, const Vector& alpha,
                   const Vector& beta)
{
    plan.gauges = bound_gauges(setup, plan, alpha, beta);
    plan.eta_bar = local_cost_bound(ctx, plan.gauges, plan.t);
    plan.xi.clear();
    for (const auto& c : setup.constraints) {
        if (c.time <= plan.t) continue;
        const std::span<const Gauge> head(plan.gauges.data(), static_cast<std::size_t>(c.time - plan.t));
        plan.xi.emplace_back(c.time, local_state_bound(ctx, head, plan.t, c.time));
    }
}

} // namespace

DelaySpec::Prediction parse_prediction(const std::string& name)
{
    if (name == "hold_state") return DelaySpec::Prediction::HoldState;
    if (name == "forward_simulate") return DelaySpec::Prediction::ForwardSimulate;
    throw ConfigError("unknown prediction mode '" + name + "' (expected hold_state or forward_simulate)");
}

std::string to_string(DelaySpec::Prediction prediction)
{
    return prediction == DelaySpec::Prediction::HoldState ? "hold_state" : "forward_simulate";
}

std::string to_string(LocalStatus status)
{
    switch (status) {
    case LocalStatus::Fresh: return "fresh";
    case LocalStatus::FailSafeCarryover: return "fail_safe_carryover";
    case LocalStatus::Infeasible: return "infeasible";
    }
    return "unknown";
}

ControlBounds ControlBounds::unbounded(int control_dim)
{
    return {Vector::Constant(control_dim, -kInf), Vector::Constant(control_dim, kInf)};
}

InitialPrediction predict_initial_state(const TimeVaryingModel& model, double omega, const Vector& x_measured,
                                        const DelaySpec& delay, std::span<const Vector> assumed_controls)
{
    if (delay.delta_t < 0) throw ConfigError("delay must be non-negative");
    if (x_measured.size() != model.state_dim()) throw ConfigError("measured state has the wrong dimension");
    const auto steps = static_cast<std::size_t>(delay.delta_t);
    Trajectory controls(steps, Vector::Zero(model.control_dim()));
    if (assumed_controls.size() == steps)
        std::copy(assumed_controls.begin(), assumed_controls.end(), controls.begin());
    else if (delay.prediction == DelaySpec::Prediction::ForwardSimulate && steps > 0)
        throw ConfigError("forward simulation over the delay window needs one assumed control per step");

    const SystemModel& stage = model.stage(0);
    const double c = model.a() + model.L_f();
    InitialPrediction out;
    double bound = 0.0;
    if (delay.prediction == DelaySpec::Prediction::ForwardSimulate) {
        out.x_hat0 = x_measured;
        for (const auto& u : controls) {
            out.x_hat0 = step_cloud(stage, out.x_hat0, u);
            bound = c * bound + omega;
        }
    } else {
        // Holding the request-time state: each step adds the disturbance and the model's own motion.
        out.x_hat0 = x_measured;
        for (const auto& u : controls)
            bound = c * bound + omega + vector_norm(step_cloud(stage, x_measured, u) - x_measured, model.norm());
    }
    out.delta0 = delay.explicit_eps0.value_or(bound);
    if (!(out.delta0 >= 0.0)) throw ConfigError("delta_0 must be non-negative");
    return out;
}

TrajOptProblem build_cloud_problem(const ControllerSetup& setup, const Vector& x_hat0,
                                   std::span<const double> delta, std::vector<PolytopeConstraint>* tightened)
{
    TrajOptProblem p;
    p.model = &setup.model;
    p.cost = &setup.cost;
    p.stepper = StepperKind::Cloud;
    p.start = 0;
    p.x0 = x_hat0;
    p.u_lower = setup.bounds.lower;
    p.u_upper = setup.bounds.upper;
    for (const auto& c : setup.constraints) {
        const auto set = tighten_by_ball(c, delta[static_cast<std::size_t>(c.time)], setup.model.norm());
        for (const auto& row : set.rows) {
            LinearRow lr;
            lr.state_time = set.time;
            lr.state_coeff = row.G;
            lr.rhs = row.g;
            p.rows.push_back(std::move(lr));
        }
        if (tightened) tightened->push_back(set);
    }
    return p;
}

CloudPlan solve_cloud(const ControllerSetup& setup, const Vector& x_hat0, double delta0)
{
    CloudPlan plan;
    plan.ctx = setup.context();
    const int N = setup.cost.horizon();
    for (const auto& c : setup.constraints) validate_constraint(c, setup.model.state_dim(), N);
    plan.delta = delta_sequence(plan.ctx, delta0, N);
    const TrajOptProblem problem = build_cloud_problem(setup, x_hat0, plan.delta, &plan.tightened);
    const TrajOptSolution sol = solve(problem, setup.solver);
    if (sol.status == SolveStatus::Infeasible) {
        std::ostringstream msg;
        msg << "cloud problem is infeasible (smallest violation " << sol.violation << ")";
        throw InfeasibleError(msg.str());
    }
    plan.controls = sol.controls;
    plan.states = sol.states;
    plan.status = sol.status;
    plan.violation = sol.violation;
    plan.cost_to_go = cost_to_go_sequence(setup.cost, plan.states, plan.controls, 0);
    plan.eta.resize(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k)
        plan.eta[static_cast<std::size_t>(k)] = cloud_cost_bound(plan.ctx, plan.delta[static_cast<std::size_t>(k)], k);
    return plan;
}

TrajOptProblem build_local_problem(const ControllerSetup& setup, int t, const Vector& x_t)
{
    const BoundContext ctx = setup.context();
    const GaugeCounts counts = gauge_counts(setup, ctx, t);
    const double c = ctx.growth();
    const NormKind norm = setup.model.norm();

    TrajOptProblem p;
    p.model = &setup.model;
    p.cost = &setup.cost;
    p.stepper = StepperKind::Local;
    p.start = t;
    p.x0 = x_t;
    p.u_lower = setup.bounds.lower;
    p.u_upper = setup.bounds.upper;
    p.num_alpha = counts.alpha;
    p.num_beta = counts.beta;

    // ||x_bar_tau|| <= alpha_tau and ||u_bar_tau|| <= beta_tau through the gauge polytopes.
    const Matrix& G = setup.gauges.matrix(GaugeKind::State);
    const Vector& g = setup.gauges.offsets(GaugeKind::State);
    for (int k = 0; k < counts.alpha; ++k) {
        for (Eigen::Index i = 0; i < G.rows(); ++i) {
            LinearRow row;
            row.state_time = t + k;
            row.state_coeff = G.row(i).transpose();
            row.alpha.push_back({k, -g[i]});
            p.rows.push_back(std::move(row));
        }
    }
    const Matrix& H = setup.gauges.matrix(GaugeKind::Control);
    const Vector& h = setup.gauges.offsets(GaugeKind::Control);
    for (int k = 0; k < counts.beta; ++k) {
        for (Eigen::Index i = 0; i < H.rows(); ++i) {
            LinearRow row;
            row.control_time = t + k;
            row.control_coeff = H.row(i).transpose();
            row.beta.push_back({k, -h[i]});
            p.rows.push_back(std::move(row));
        }
    }

    // G^T x_bar_T + h_B(G) xi_{T|t} <= g with xi linear in the gauges.
    for (const auto& con : setup.constraints) {
        if (con.time <= t) continue;
        const int T = con.time;
        for (const auto& hrow : con.rows) {
            const double support = support_ball(norm, hrow.G);
            LinearRow row;
            row.state_time = T;
            row.state_coeff = hrow.G;
            double omega_part = 0.0;
            for (int l = t; l < T; ++l) {
                const double weight = support * std::pow(c, T - l - 1);
                omega_part += weight * ctx.omega;
                if (l - t < counts.alpha) row.alpha.push_back({l - t, weight * ctx.L_f});
                if (l - t < counts.beta) row.beta.push_back({l - t, weight * ctx.M_f});
            }
            row.rhs = hrow.g - omega_part;
            p.rows.push_back(std::move(row));
        }
    }
    return p;
}

LocalPlan solve_local(const ControllerSetup& setup, int t, const Vector& x_t, const LocalPlan* previous)
{
    const int N = setup.cost.horizon();
    if (t < 0 || t >= N) throw ConfigError("local problem time outside 0..N-1");
    const BoundContext ctx = setup.context();
    const GaugeCounts counts = gauge_counts(setup, ctx, t);
    TrajOptProblem problem = build_local_problem(setup, t, x_t);

    // Tail of the previous plan, shifted to start at t.
    std::optional<Trajectory> tail;
    if (previous && previous->has_controls() && previous->t < t) {
        const auto shift = static_cast<std::size_t>(t - previous->t);
        if (previous->controls.size() == static_cast<std::size_t>(N - previous->t))
            tail = Trajectory(previous->controls.begin() + static_cast<std::ptrdiff_t>(shift), previous->controls.end());
    }
    if (tail && setup.solver.warm_start) {
        const Trajectory warm_states = rollout(setup.model, StepperKind::Local, x_t, *tail, std::nullopt, t);
        auto [alpha, beta] = canonical_gauges(setup, counts, warm_states, *tail);
        problem.warm_controls = *tail;
        problem.warm_alpha = alpha;
        problem.warm_beta = beta;
    }

    LocalPlan plan;
    plan.t = t;
    const TrajOptSolution sol = solve(problem, setup.solver);
    plan.solver_status = sol.status;

    if (sol.status == SolveStatus::Infeasible) {
        if (!tail) {
            plan.status = LocalStatus::Infeasible;
            plan.J_bar = kInf;
            plan.eta_bar = kInf;
            plan.violation = sol.violation;
            return plan;
        }
        plan.status = LocalStatus::FailSafeCarryover;
        plan.controls = *tail;
        plan.states = rollout(setup.model, StepperKind::Local, x_t, plan.controls, std::nullopt, t);
        plan.J_bar = kInf;
        finish_bounds(setup, ctx, plan, Vector(), Vector());
        plan.violation = max_violation(problem, plan.controls, Vector::Zero(counts.alpha), Vector::Zero(counts.beta));
        return plan;
    }

    plan.status = LocalStatus::Fresh;
    plan.controls = sol.controls;
    plan.states = sol.states;
    if (tail) {
        // Keep the shifted previous plan when it is still feasible and optimal within tolerance.
        const Trajectory tail_states = rollout(setup.model, StepperKind::Local, x_t, *tail, std::nullopt, t);
        const auto [ta, tb] = canonical_gauges(setup, counts, tail_states, *tail);
        const double tail_violation = max_violation(problem, *tail, ta, tb);
        const double tail_cost = cost_to_go(setup.cost, tail_states, *tail, t);
        if (tail_violation <= setup.solver.feas_tol &&
            tail_cost <= sol.objective + setup.solver.opt_tol * std::max(1.0, std::abs(sol.objective))) {
            plan.controls = *tail;
            plan.states = tail_states;
            plan.kept_previous = true;
        }
    }
    const auto [alpha, beta] = canonical_gauges(setup, counts, plan.states, plan.controls);
    plan.solved_gauges = std::max(counts.alpha, counts.beta);
    plan.violation = max_violation(problem, plan.controls, alpha, beta);
    plan.J_bar = cost_to_go(setup.cost, plan.states, plan.controls, t);
    finish_bounds(setup, ctx, plan, alpha, beta);
    return plan;
}

} // namespace cloudmpc
