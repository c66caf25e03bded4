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

#include "cloudmpc/costs.hpp"
#include "cloudmpc/models.hpp"
#include "cloudmpc/presets.hpp"
#include "cloudmpc/trajopt.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cloudmpc;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

CostSpec example1_cost(int N)
{
    return CostSpec(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 5.0), Matrix::Constant(1, 1, 2.0), N);
}

LinearRow state_row(int time, double coeff, double rhs)
{
    LinearRow row;
    row.state_time = time;
    row.state_coeff = scalar(coeff);
    row.rhs = rhs;
    return row;
}

TrajOptProblem scalar_problem(const TimeVaryingModel& model, const CostSpec& cost, StepperKind stepper, double x0,
                              double u_bound)
{
    TrajOptProblem p;
    p.model = &model;
    p.cost = &cost;
    p.stepper = stepper;
    p.x0 = scalar(x0);
    p.u_lower = scalar(-u_bound);
    p.u_upper = scalar(u_bound);
    return p;
}

} // namespace

TEST(Trajopt, OriginIsOptimalWithoutConstraints)
{
    const TimeVaryingModel m(example1_model());
    const CostSpec cost = example1_cost(10);
    const TrajOptSolution s = solve(scalar_problem(m, cost, StepperKind::Local, 0.0, 3.0));
    EXPECT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.objective, 0.0, 1e-6);
    for (const auto& u : s.controls) EXPECT_NEAR(u[0], 0.0, 1e-5);
}

TEST(Trajopt, TwoStepLinearMatchesGridSearch)
{
    const TimeVaryingModel m(example1_model());
    const CostSpec cost = example1_cost(2);
    TrajOptProblem p = scalar_problem(m, cost, StepperKind::Local, -4.0, 3.0);
    p.rows.push_back(state_row(2, 1.0, -0.5));  // x_2 <= -0.5
    const TrajOptSolution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);

    double best = INFINITY;
    const int G = 1200;
    for (int i = 0; i <= G; ++i) {
        for (int j = 0; j <= G; ++j) {
            const Trajectory us = {scalar(-3 + 6.0 * i / G), scalar(-3 + 6.0 * j / G)};
            const Trajectory xs = rollout(m, StepperKind::Local, p.x0, us);
            if (xs[2][0] > -0.5) continue;
            best = std::min(best, total_cost(cost, xs, us));
        }
    }
    EXPECT_LE(s.objective, best + 1e-6);
    EXPECT_GE(s.objective, best - 0.02);
    EXPECT_LE(s.states[2][0], -0.5 + 1e-6);
    EXPECT_NEAR(s.objective, total_cost(cost, s.states, s.controls), 1e-9);
}

TEST(Trajopt, ReachabilityContradictionIsInfeasible)
{
    const TimeVaryingModel m(SystemModel(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0),
                                         Nonlinearity::zero(1), 0.0, 0.0));
    const CostSpec cost = example1_cost(4);
    TrajOptProblem p = scalar_problem(m, cost, StepperKind::Local, 10.0, 0.0);
    p.rows.push_back(state_row(4, 1.0, 0.0));
    const TrajOptSolution s = solve(p);
    EXPECT_EQ(s.status, SolveStatus::Infeasible);
    EXPECT_NEAR(s.violation, 10.0, 1e-6);
}

TEST(Trajopt, NonlinearContradictionIsInfeasible)
{
    const TimeVaryingModel m(example1_model());
    const CostSpec cost = example1_cost(3);
    TrajOptProblem p = scalar_problem(m, cost, StepperKind::Cloud, -10.0, 0.1);
    p.rows.push_back(state_row(3, -1.0, -2.0));  // x_3 >= 2 is out of reach
    EXPECT_EQ(solve(p).status, SolveStatus::Infeasible);
}

TEST(Trajopt, CloudProblemIsFeasibleAndLocallyOptimal)
{
    const TimeVaryingModel m(example1_model());
    const CostSpec cost = example1_cost(10);
    TrajOptProblem p = scalar_problem(m, cost, StepperKind::Cloud, -10.5, 3.0);
    p.rows.push_back(state_row(10, 1.0, 2.0401));
    p.rows.push_back(state_row(10, -1.0, 2.0401));
    const TrajOptSolution s = solve(p);
    ASSERT_NE(s.status, SolveStatus::Infeasible);
    EXPECT_LE(s.violation, 1e-6);
    EXPECT_LE(std::abs(s.states[10][0]), 2.0401 + 1e-6);
    const Trajectory replay = rollout(m, StepperKind::Cloud, p.x0, s.controls);
    EXPECT_NEAR(replay[10][0], s.states[10][0], 1e-12);

    // No feasible random perturbation improves the objective noticeably.
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 0.05);
    int feasible = 0;
    for (int trial = 0; trial < 400; ++trial) {
        Trajectory us = s.controls;
        for (auto& u : us) u[0] = std::clamp(u[0] + g(rng), -3.0, 3.0);
        if (max_violation(p, us, Vector(), Vector()) > 1e-9) continue;
        ++feasible;
        const Trajectory xs = rollout(m, StepperKind::Cloud, p.x0, us);
        EXPECT_GE(total_cost(cost, xs, us), s.objective - 1e-4);
    }
    EXPECT_GT(feasible, 20);
}

TEST(Trajopt, ShrinkingHorizonStartsLater)
{
    const TimeVaryingModel m(example1_model());
    const CostSpec cost = example1_cost(10);
    TrajOptProblem p = scalar_problem(m, cost, StepperKind::Local, -1.0, 3.0);
    p.start = 7;
    p.rows.push_back(state_row(10, 1.0, 0.2));
    p.rows.push_back(state_row(10, -1.0, 0.2));
    const TrajOptSolution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_EQ(s.controls.size(), 3u);
    EXPECT_EQ(s.states.size(), 4u);
    EXPECT_NEAR(s.objective, cost_to_go(cost, s.states, s.controls, 7), 1e-9);
}

TEST(Trajopt, AuxiliaryScalesCoverNorms)
{
    // |x_1| <= alpha_0 via two rows; alpha is a free non-negative variable.
    const TimeVaryingModel m(example1_model());
    const CostSpec cost = example1_cost(2);
    TrajOptProblem p = scalar_problem(m, cost, StepperKind::Local, -4.0, 3.0);
    p.num_alpha = 1;
    for (double sgn : {1.0, -1.0}) {
        LinearRow row = state_row(1, sgn, 0.0);
        row.alpha.push_back({0, -1.0});
        p.rows.push_back(row);
    }
    LinearRow cap;
    cap.alpha.push_back({0, 1.0});
    cap.rhs = 1.0;
    p.rows.push_back(cap);  // alpha_0 <= 1 forces |x_1| <= 1
    const TrajOptSolution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    ASSERT_EQ(s.alpha.size(), 1);
    EXPECT_LE(std::abs(s.states[1][0]), s.alpha[0] + 1e-6);
    EXPECT_LE(s.alpha[0], 1.0 + 1e-6);
    EXPECT_GE(s.alpha[0], -1e-9);
}
