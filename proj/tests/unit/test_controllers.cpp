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

#include "cloudmpc/config.hpp"
#include "cloudmpc/controllers.hpp"
#include "cloudmpc/errors.hpp"
#include "cloudmpc/presets.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cloudmpc;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

ControllerSetup example1_setup() { return build_scenario(preset_config("example1")).setup; }

ControllerSetup unconstrained_setup()
{
    ControllerSetup s = example1_setup();
    s.constraints.clear();
    return s;
}

/// x+ = x + u with u fixed to 0 by its bounds, so x_N = x_0 whatever the plan.
ControllerSetup stuck_setup(double terminal_bound)
{
    ControllerSetup s = example1_setup();
    s.model = TimeVaryingModel(SystemModel(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0),
                                           Nonlinearity::zero(1), 0.0, 0.0));
    s.bounds = {scalar(0), scalar(0)};
    s.constraints = {{10, {{scalar(1), terminal_bound}}}};
    return s;
}

} // namespace

TEST(Controllers, PredictWithoutDelay)
{
    const TimeVaryingModel m(example1_model());
    DelaySpec d;
    const InitialPrediction p = predict_initial_state(m, 0.02, scalar(-10), d, {});
    EXPECT_EQ(p.x_hat0[0], -10.0);
    EXPECT_EQ(p.delta0, 0.0);
    d.explicit_eps0 = 0.5;
    EXPECT_EQ(predict_initial_state(m, 0.02, scalar(-10), d, {}).delta0, 0.5);
}

TEST(Controllers, PredictForwardOneStep)
{
    const TimeVaryingModel m(example1_model());
    DelaySpec d;
    d.delta_t = 1;
    const Trajectory u = {scalar(0)};
    const InitialPrediction p = predict_initial_state(m, 0.02, scalar(-10), d, u);
    EXPECT_NEAR(p.x_hat0[0], -7.65853, 5e-6);
    EXPECT_DOUBLE_EQ(p.delta0, 0.02);
    // Two steps: delta grows as c * delta + omega.
    d.delta_t = 2;
    const Trajectory u2 = {scalar(0), scalar(0)};
    EXPECT_NEAR(predict_initial_state(m, 0.02, scalar(-10), d, u2).delta0, 0.95 * 0.02 + 0.02, 1e-15);
    EXPECT_THROW(predict_initial_state(m, 0.02, scalar(-10), d, u), ConfigError);
}

TEST(Controllers, CloudAtOriginWithoutConstraints)
{
    const CloudPlan plan = solve_cloud(unconstrained_setup(), scalar(0), 0.0);
    EXPECT_NE(plan.status, SolveStatus::Infeasible);
    for (const auto& u : plan.controls) EXPECT_NEAR(u[0], 0.0, 1e-5);
    for (double J : plan.cost_to_go) EXPECT_NEAR(J, 0.0, 1e-5);
}

TEST(Controllers, CloudExample1TightenedTerminalSet)
{
    const ControllerSetup setup = example1_setup();
    const CloudPlan plan = solve_cloud(setup, scalar(-10.5), 0.5);
    ASSERT_EQ(plan.tightened.size(), 1u);
    for (const auto& row : plan.tightened.front().rows) EXPECT_NEAR(row.g, 2.0401, 1e-4);
    EXPECT_NEAR(plan.delta[10], 0.45988, 1e-5);
    EXPECT_LE(std::abs(plan.states[10][0]), 2.0401 + 1e-6);
    ASSERT_EQ(plan.cost_to_go.size(), 11u);
    for (int k = 0; k < 10; ++k)
        EXPECT_NEAR(plan.cost_to_go[k] - plan.cost_to_go[k + 1], setup.cost.stage(plan.states[k], plan.controls[k]),
                    1e-9);
    for (int k = 0; k <= 10; ++k) EXPECT_DOUBLE_EQ(plan.eta[k], plan.eta_at(k, plan.delta[k]));
}

TEST(Controllers, CloudInfeasibleThrows)
{
    EXPECT_THROW(solve_cloud(stuck_setup(0.0), scalar(5), 0.0), InfeasibleError);
}

TEST(Controllers, LocalAtOriginWithoutConstraints)
{
    const ControllerSetup setup = unconstrained_setup();
    const LocalPlan plan = solve_local(setup, 0, scalar(0), nullptr);
    EXPECT_EQ(plan.status, LocalStatus::Fresh);
    for (const auto& u : plan.controls) EXPECT_NEAR(u[0], 0.0, 1e-5);
    EXPECT_NEAR(plan.J_bar, 0.0, 1e-5);
    const std::vector<Gauge> zero(10);
    EXPECT_NEAR(plan.eta_bar, local_cost_bound(setup.context(), zero, 0), 1e-5);
}

TEST(Controllers, LocalExample1TerminalRow)
{
    const ControllerSetup setup = example1_setup();
    const LocalPlan plan = solve_local(setup, 0, scalar(-10), nullptr);
    ASSERT_EQ(plan.status, LocalStatus::Fresh);
    ASSERT_EQ(plan.xi.size(), 1u);
    EXPECT_EQ(plan.xi.front().first, 10);
    const double xi = plan.xi.front().second;
    EXPECT_NEAR(xi, local_state_bound(setup.context(), plan.gauges, 0, 10), 1e-12);
    // The nominal terminal state sits inside the set shrunk by xi.
    EXPECT_LE(std::abs(plan.states[10][0]), 2.5 - xi + 1e-6);
    EXPECT_GT(2.5 - xi, 0.0);
    // Gauges bound the predicted norms.
    for (std::size_t k = 0; k < plan.gauges.size(); ++k)
        EXPECT_GE(plan.gauges[k].alpha + 1e-9, std::abs(plan.states[k][0]));
    EXPECT_NEAR(plan.J_bar, total_cost(setup.cost, plan.states, plan.controls), 1e-9);
    EXPECT_NEAR(plan.eta_bar, local_cost_bound(setup.context(), plan.gauges, 0), 1e-12);
}

TEST(Controllers, LocalInfeasibleWithoutPreviousPlan)
{
    const LocalPlan plan = solve_local(stuck_setup(0.0), 0, scalar(5), nullptr);
    EXPECT_EQ(plan.status, LocalStatus::Infeasible);
    EXPECT_FALSE(plan.has_controls());
    EXPECT_TRUE(std::isinf(plan.J_bar));
}

TEST(Controllers, LocalFailSafeCarriesPreviousTail)
{
    const ControllerSetup setup = stuck_setup(6.0);
    const LocalPlan first = solve_local(setup, 0, scalar(5), nullptr);
    ASSERT_EQ(first.status, LocalStatus::Fresh);
    const LocalPlan second = solve_local(setup, 1, scalar(7), &first);
    EXPECT_EQ(second.status, LocalStatus::FailSafeCarryover);
    EXPECT_TRUE(std::isinf(second.J_bar));
    ASSERT_EQ(second.controls.size(), 9u);
    for (std::size_t k = 0; k < 9; ++k) EXPECT_EQ(second.controls[k], first.controls[k + 1]);
}

TEST(Controllers, LocalKeepsConsistentPlan)
{
    // With no disturbance the shifted plan is still optimal and is kept verbatim.
    ControllerSetup setup = example1_setup();
    setup.model = TimeVaryingModel(SystemModel(Matrix::Constant(1, 1, 0.75), Matrix::Constant(1, 1, 1.0),
                                               Nonlinearity::zero(1), 0.0, 0.0));
    setup.omega = 0.0;
    const LocalPlan first = solve_local(setup, 0, scalar(-10), nullptr);
    ASSERT_EQ(first.status, LocalStatus::Fresh);
    const LocalPlan second = solve_local(setup, 1, first.states[1], &first);
    ASSERT_EQ(second.status, LocalStatus::Fresh);
    ASSERT_EQ(second.controls.size(), 9u);
    for (std::size_t k = 0; k < 9; ++k) EXPECT_NEAR(second.controls[k][0], first.controls[k + 1][0], 1e-9);
    EXPECT_NEAR(second.J_bar,
                cost_to_go(setup.cost, std::span(first.states).subspan(1), std::span(first.controls).subspan(1), 1),
                1e-6);
}

TEST(Controllers, LocalRejectsTimeOutsideHorizon)
{
    EXPECT_THROW(solve_local(example1_setup(), 10, scalar(0), nullptr), ConfigError);
}
