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
#include "cloudmpc/sim.hpp"

#include "cloudmpc/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace cloudmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Runs job(i) for i in [0, count) on a small thread pool; the first exception is rethrown.
template <typename Job>
void parallel_for(std::size_t count, int threads, Job job)
{
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

bool exceeds(double measured, double bound) { return measured > bound * (1.0 + 1e-9) + 1e-12; }

} // namespace

RunMode parse_run_mode(const std::string& name)
{
    if (name == "fused") return RunMode::Fused;
    if (name == "cloud" || name == "cloud_only") return RunMode::CloudOnly;
    if (name == "local" || name == "local_only") return RunMode::LocalOnly;
    throw ConfigError("unknown mode '" + name + "' (expected fused, cloud or local)");
}

std::string to_string(RunMode mode)
{
    switch (mode) {
    case RunMode::Fused: return "fused";
    case RunMode::CloudOnly: return "cloud";
    case RunMode::LocalOnly: return "local";
    }
    return "fused";
}

bool SimTrace::all_constraints_ok() const
{
    return std::all_of(constraint_ok.begin(), constraint_ok.end(), [](bool ok) { return ok; });
}

SimTrace run_closed_loop(const Scenario& sc, RunMode mode, std::uint64_t seed)
{
    const auto& setup = sc.setup;
    const int N = sc.horizon();
    const int n = setup.model.state_dim();
    const int m = setup.model.control_dim();
    if (sc.initial_state.size() != n) throw ConfigError("initial state has the wrong dimension");

    SimTrace trace;
    trace.mode = mode;
    trace.seed = seed;
    DisturbanceSampler sampler(n, sc.disturbance, setup.model.norm(), seed);
    for (int l = 0; l < sc.delay.delta_t; ++l) trace.pre_window_disturbances.push_back(sampler.sample());
    for (int t = 0; t < N; ++t) trace.disturbances.push_back(sampler.sample());

    Trajectory assumed = sc.assumed_controls;
    if (assumed.empty()) assumed.assign(static_cast<std::size_t>(sc.delay.delta_t), Vector::Zero(m));
    if (assumed.size() != static_cast<std::size_t>(sc.delay.delta_t))
        throw ConfigError("assumed controls must cover the delay window");

    // The plant keeps moving while the request is in flight.
    trace.x_request = sc.initial_state;
    Vector x = sc.initial_state;
    for (std::size_t l = 0; l < assumed.size(); ++l)
        x = step_true(setup.model.stage(0), x, assumed[l], trace.pre_window_disturbances[l]);

    const InitialPrediction pred = predict_initial_state(setup.model, sc.disturbance.omega, sc.initial_state, sc.delay,
                                                         assumed);
    trace.x_hat0 = sc.injected_error ? Vector(x + *sc.injected_error) : pred.x_hat0;
    trace.delta0 = pred.delta0;

    if (mode == RunMode::LocalOnly) {
        try {
            trace.cloud = solve_cloud(setup, trace.x_hat0, trace.delta0);
        } catch (const InfeasibleError&) {
            trace.cloud.reset();
        }
    } else {
        trace.cloud = solve_cloud(setup, trace.x_hat0, trace.delta0);
    }

    const bool constrained = !setup.constraints.empty();
    std::optional<LocalPlan> previous;
    trace.states.push_back(x);
    for (int t = 0; t < N; ++t) {
        StepRecord rec;
        rec.t = t;
        rec.x = x;
        LocalPlan plan;
        plan.t = t;
        plan.J_bar = kInf;
        plan.eta_bar = kInf;
        if (mode != RunMode::CloudOnly) {
            plan = solve_local(setup, t, x, previous ? &*previous : nullptr);
            if (plan.has_controls()) previous = plan;
        }
        rec.local_status = plan.status;
        if (trace.cloud) {
            rec.decision = decide(sc.policy, constrained, t, *trace.cloud, plan, x);
        } else {
            rec.decision.t = t;
            rec.decision.j_hat = rec.decision.eta_hat = rec.decision.eps_meas = rec.decision.delta_t = kNaN;
            rec.decision.j_bar = plan.J_bar;
            rec.decision.eta_bar = plan.eta_bar;
            rec.decision.trust_ok = false;
        }
        if (mode == RunMode::CloudOnly) rec.decision.choice = Choice::Cloud;
        if (mode == RunMode::LocalOnly) rec.decision.choice = Choice::Local;

        if (rec.decision.choice == Choice::Cloud)
            rec.u = trace.cloud->controls[static_cast<std::size_t>(t)];
        else
            rec.u = plan.has_controls() ? plan.controls.front() : Vector(Vector::Zero(m));

        x = step_true(setup.model.stage(t), x, rec.u, trace.disturbances[static_cast<std::size_t>(t)]);
        if (!all_finite(x)) throw NumericError("plant state became non-finite");
        trace.controls.push_back(rec.u);
        trace.states.push_back(x);
        trace.steps.push_back(std::move(rec));
        if (mode != RunMode::CloudOnly) trace.local_plans.push_back(std::move(plan));
    }
    for (const auto& c : setup.constraints)
        trace.constraint_ok.push_back(c.contains(trace.states[static_cast<std::size_t>(c.time)]));
    return trace;
}

Counterfactuals counterfactual_costs(const Scenario& sc, const SimTrace& trace)
{
    const int N = sc.horizon();
    const auto& setup = sc.setup;
    Counterfactuals cf;
    cf.J_c.assign(static_cast<std::size_t>(N) + 1, kNaN);
    cf.J_l.assign(static_cast<std::size_t>(N) + 1, kInf);
    cf.cloud_tails.resize(static_cast<std::size_t>(N) + 1);
    cf.local_tails.resize(static_cast<std::size_t>(N) + 1);
    const std::span<const Vector> ws(trace.disturbances);
    for (int t = 0; t <= N; ++t) {
        const auto k = static_cast<std::size_t>(t);
        const Vector& x_t = trace.states[k];
        const auto w_tail = ws.subspan(k);
        if (trace.cloud) {
            const std::span<const Vector> u_tail = std::span<const Vector>(trace.cloud->controls).subspan(k);
            cf.cloud_tails[k] = rollout(setup.model, StepperKind::True, x_t, u_tail, w_tail, t);
            cf.J_c[k] = cost_to_go(setup.cost, cf.cloud_tails[k], u_tail, t);
        }
        if (t == N) {
            cf.local_tails[k] = {x_t};
            cf.J_l[k] = setup.cost.terminal(x_t);
        } else if (k < trace.local_plans.size() && trace.local_plans[k].has_controls()) {
            const auto& u_tail = trace.local_plans[k].controls;
            cf.local_tails[k] = rollout(setup.model, StepperKind::True, x_t, u_tail, w_tail, t);
            cf.J_l[k] = cost_to_go(setup.cost, cf.local_tails[k], u_tail, t);
        }
    }
    return cf;
}

RunMetrics compute_metrics(const Scenario& sc, const SimTrace& trace, const Counterfactuals* cf)
{
    const NormKind norm = sc.setup.model.norm();
    RunMetrics out;
    for (const auto& x : trace.states) out.mre += vector_norm(x, norm);
    out.mre /= static_cast<double>(trace.states.size());
    out.total_cost = total_cost(sc.setup.cost, trace.states, trace.controls);
    out.terminal_norm = vector_norm(trace.states.back(), norm);
    out.constraints_ok = trace.all_constraints_ok();
    for (const auto& step : trace.steps) (step.decision.choice == Choice::Cloud ? out.cloud_steps : out.local_steps)++;
    if (cf && trace.mode == RunMode::Fused && !trace.steps.empty()) {
        int match = 0;
        for (const auto& step : trace.steps) {
            const auto k = static_cast<std::size_t>(step.t);
            if (step.decision.choice == optimal_switch_oracle(cf->J_l[k], cf->J_c[k])) ++match;
        }
        out.switch_match = 100.0 * match / static_cast<double>(trace.steps.size());
    }
    if (!sc.position_indices.empty()) {
        double sum = 0.0;
        for (const auto& x : trace.states) {
            double sq = 0.0;
            for (int i : sc.position_indices) sq += x[i] * x[i];
            sum += sq;
        }
        out.rms_position_error = std::sqrt(sum / static_cast<double>(trace.states.size()));
    }
    return out;
}

namespace {

void audit_trial(const Scenario& sc, std::uint64_t seed, BoundAudit& audit)
{
    const auto& setup = sc.setup;
    const NormKind norm = setup.model.norm();
    const int N = sc.horizon();
    const SimTrace trace = run_closed_loop(sc, RunMode::Fused, seed);
    const Counterfactuals cf = counterfactual_costs(sc, trace);
    const CloudPlan& cloud = *trace.cloud;
    const BoundContext& ctx = cloud.ctx;

    auto record = [&](const char* kind, int k, int tau, double measured, double bound, double& worst) {
        ++audit.checks;
        if (bound > 0.0) worst = std::max(worst, measured / bound);
        else if (measured > 0.0) worst = kInf;
        if (exceeds(measured, bound)) audit.violations.push_back({seed, kind, k, tau, measured, bound});
    };

    for (int k = 0; k <= N; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double eps_k = vector_norm(cloud.states[kk] - trace.states[kk], norm);
        const auto& tail = cf.cloud_tails[kk];
        for (int tau = k + 1; tau <= N; ++tau) {
            const double measured =
                vector_norm(cloud.states[static_cast<std::size_t>(tau)] - tail[static_cast<std::size_t>(tau - k)], norm);
            record("cloud_state", k, tau, measured, cloud_state_bound(ctx, eps_k, k, tau), audit.worst_cloud_state);
        }
        record("cloud_cost", k, N, std::abs(cloud.cost_to_go[kk] - cf.J_c[kk]), cloud_cost_bound(ctx, eps_k, k),
               audit.worst_cloud_cost);
    }

    for (const auto& plan : trace.local_plans) {
        if (plan.status != LocalStatus::Fresh) continue;
        const int t = plan.t;
        const auto& tail = cf.local_tails[static_cast<std::size_t>(t)];
        for (int tau = t + 1; tau <= N; ++tau) {
            const auto i = static_cast<std::size_t>(tau - t);
            const double measured = vector_norm(plan.states[i] - tail[i], norm);
            const std::span<const Gauge> head(plan.gauges.data(), i);
            record("local_state", t, tau, measured, local_state_bound(ctx, head, t, tau), audit.worst_local_state);
        }
        record("local_cost", t, N, std::abs(plan.J_bar - cf.J_l[static_cast<std::size_t>(t)]), plan.eta_bar,
               audit.worst_local_cost);
    }

    for (std::size_t j = 0; j < setup.constraints.size(); ++j) {
        ++audit.checks;
        if (!trace.constraint_ok[j]) {
            const int T = setup.constraints[j].time;
            audit.violations.push_back({seed, "constraint", T, T,
                                        setup.constraints[j].max_residual(trace.states[static_cast<std::size_t>(T)]),
                                        0.0});
        }
    }
}

} // namespace

BoundAudit verify_bounds(const Scenario& sc, int trials, std::uint64_t first_seed, int threads)
{
    if (trials < 0) throw ConfigError("number of trials must be non-negative");
    std::vector<BoundAudit> partial(static_cast<std::size_t>(trials));
    parallel_for(partial.size(), threads, [&](std::size_t i) { audit_trial(sc, first_seed + i, partial[i]); });
    BoundAudit audit;
    audit.trials = trials;
    for (const auto& p : partial) {
        audit.checks += p.checks;
        audit.worst_cloud_state = std::max(audit.worst_cloud_state, p.worst_cloud_state);
        audit.worst_cloud_cost = std::max(audit.worst_cloud_cost, p.worst_cloud_cost);
        audit.worst_local_state = std::max(audit.worst_local_state, p.worst_local_state);
        audit.worst_local_cost = std::max(audit.worst_local_cost, p.worst_local_cost);
        audit.violations.insert(audit.violations.end(), p.violations.begin(), p.violations.end());
    }
    return audit;
}

std::vector<BatchRow> run_batch(const Scenario& sc, const std::vector<RunMode>& modes,
                                const std::vector<std::uint64_t>& seeds, int threads)
{
    std::vector<BatchRow> rows(modes.size() * seeds.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const RunMode mode = modes[i / seeds.size()];
        const std::uint64_t seed = seeds[i % seeds.size()];
        const SimTrace trace = run_closed_loop(sc, mode, seed);
        const Counterfactuals cf = counterfactual_costs(sc, trace);
        rows[i] = {seed, mode, compute_metrics(sc, trace, &cf)};
    });
    return rows;
}

} // namespace cloudmpc
