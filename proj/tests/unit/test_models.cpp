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

#include "cloudmpc/errors.hpp"
#include "cloudmpc/models.hpp"
#include "cloudmpc/presets.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cloudmpc;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

SystemModel half_u_model()
{
    NonlinearTerm term;
    term.output = 0;
    term.coeff = 0.5;
    term.factors.push_back({TermFactor::Func::Identity, true, 0, 1.0, 1});
    return SystemModel(Matrix::Constant(1, 1, 0.3), Matrix::Constant(1, 1, 1.0),
                       make_term_nonlinearity({term}, 1, 1), 0.0, 0.5);
}

SampleBox scalar_box(double x, double u)
{
    return {scalar(-x), scalar(x), scalar(-u), scalar(u)};
}

} // namespace

TEST(Models, StepTrueExample1)
{
    const SystemModel m = example1_model();
    // 0.75 * (-10) + 0.1 * (-10) - sin(-1)
    const double oracle = 0.75 * -10.0 + 0.1 * -10.0 - std::sin(-1.0);
    EXPECT_NEAR(step_true(m, scalar(-10), scalar(0), scalar(0))[0], oracle, 1e-12);
    EXPECT_NEAR(oracle, -7.65853, 5e-6);
    EXPECT_EQ(step_true(m, scalar(0), scalar(0), scalar(0))[0], 0.0);
    EXPECT_DOUBLE_EQ(step_true(m, scalar(0), scalar(0), scalar(0.02))[0], 0.02);
}

TEST(Models, CloudAndLocalSteppers)
{
    const SystemModel m = example1_model();
    EXPECT_NEAR(step_cloud(m, scalar(-10), scalar(0))[0], -7.65853, 5e-6);
    EXPECT_DOUBLE_EQ(step_local(m, scalar(-10), scalar(1))[0], -6.5);
    EXPECT_EQ(step_local(m, scalar(0), scalar(0))[0], 0.0);
    for (double x : {-3.0, -0.4, 0.0, 1.7, 9.0}) {
        for (double u : {-2.0, 0.0, 0.5}) {
            EXPECT_EQ(step_cloud(m, scalar(x), scalar(u))[0], step_true(m, scalar(x), scalar(u), scalar(0))[0]);
            EXPECT_NEAR(step_cloud(m, scalar(x), scalar(u))[0] - step_local(m, scalar(x), scalar(u))[0],
                        m.residual(scalar(x), scalar(u))[0], 1e-14);
        }
    }
}

TEST(Models, ConstructionInvariants)
{
    Nonlinearity shifted;
    shifted.eval = [](const Vector& x, const Vector&) { return Vector(x.array() + 1.0); };
    EXPECT_THROW(SystemModel(Matrix::Identity(1, 1), Matrix::Identity(1, 1), shifted, 0, 0), ConfigError);
    EXPECT_THROW(SystemModel(Matrix::Identity(1, 1), Matrix::Identity(1, 1), Nonlinearity::zero(1), -1, 0),
                 ConfigError);
    EXPECT_THROW(SystemModel(Matrix::Identity(1, 1), Matrix::Identity(1, 1), Nonlinearity::zero(1), 0, 0,
                             NormKind::Two, 2.0),
                 ConfigError);
    Matrix A(2, 2);
    A << 0, 2, 0, 0;
    const SystemModel m(A, Matrix::Identity(2, 1), Nonlinearity::zero(2), 0, 0, NormKind::Inf);
    EXPECT_DOUBLE_EQ(m.a(), 2.0);
    EXPECT_TRUE(m.linear());
}

TEST(Models, RolloutExample1)
{
    const TimeVaryingModel m(example1_model());
    const Trajectory zeros = {scalar(0), scalar(0)};
    const Trajectory traj = rollout(m, StepperKind::Cloud, scalar(-10), zeros);
    ASSERT_EQ(traj.size(), 3u);
    const double x1 = 0.75 * -10.0 + 0.1 * -10.0 - std::sin(-1.0);
    const double x2 = 0.75 * x1 + 0.1 * x1 - std::sin(0.1 * x1);
    EXPECT_DOUBLE_EQ(traj[0][0], -10.0);
    EXPECT_NEAR(traj[1][0], x1, 1e-12);
    EXPECT_NEAR(traj[2][0], x2, 1e-12);
}

TEST(Models, RolloutZeroAndSingleStep)
{
    const TimeVaryingModel m(example1_model());
    const Trajectory u = {scalar(0), scalar(0), scalar(0)};
    const Trajectory w = {scalar(0), scalar(0), scalar(0)};
    for (const auto& x : rollout(m, StepperKind::True, scalar(0), u, w)) EXPECT_EQ(x[0], 0.0);

    const Trajectory one = {scalar(0.7)};
    const Trajectory dist = {scalar(-0.01)};
    EXPECT_EQ(rollout(m, StepperKind::Local, scalar(2), one)[1][0], step_local(m.stage(0), scalar(2), one[0])[0]);
    EXPECT_EQ(rollout(m, StepperKind::True, scalar(2), one, dist)[1][0],
              step_true(m.stage(0), scalar(2), one[0], dist[0])[0]);
    EXPECT_THROW(rollout(m, StepperKind::Cloud, scalar(0), one, dist), ConfigError);
    EXPECT_THROW(rollout(m, StepperKind::True, scalar(0), one), ConfigError);
}

TEST(Models, TimeVaryingAggregatesAreMaxima)
{
    VehicleParams p;
    p.horizon = 12;
    const TimeVaryingModel m = vehicle_error_model(p, vehicle_reference(p));
    ASSERT_EQ(m.num_stages(), 12);
    double a = 0, L = 0, M = 0;
    for (int t = 0; t < m.num_stages(); ++t) {
        a = std::max(a, m.stage(t).a());
        L = std::max(L, m.stage(t).L_f());
        M = std::max(M, m.stage(t).M_f());
    }
    EXPECT_DOUBLE_EQ(m.a(), a);
    EXPECT_DOUBLE_EQ(m.L_f(), L);
    EXPECT_DOUBLE_EQ(m.M_f(), M);
}

TEST(Models, LipschitzOfZeroResidual)
{
    const SystemModel m(Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 1.0), Nonlinearity::zero(1), 0, 0);
    const LipschitzEstimate est = estimate_lipschitz(m, scalar_box(5, 5), 500, 1);
    EXPECT_EQ(est.L_f, 0.0);
    EXPECT_EQ(est.M_f, 0.0);
    EXPECT_FALSE(est.exceeds_configured);
}

TEST(Models, LipschitzOfLinearControlTerm)
{
    const LipschitzEstimate est = estimate_lipschitz(half_u_model(), scalar_box(3, 3), 2000, 2);
    EXPECT_NEAR(est.L_f, 0.0, 1e-12);
    EXPECT_NEAR(est.M_f, 0.5, 1e-9);
}

TEST(Models, LipschitzOfExample1MatchesGridSupremum)
{
    // |d/dx (0.1 x - sin(0.1 x))| = |0.1 - 0.1 cos(0.1 x)|, maximised on a fine grid.
    double grid_sup = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double x = -10.0 + 20.0 * i / 200000.0;
        grid_sup = std::max(grid_sup, std::abs(0.1 - 0.1 * std::cos(0.1 * x)));
    }
    const LipschitzEstimate est = estimate_lipschitz(example1_model(), scalar_box(10, 3), 20000, 11);
    EXPECT_LE(est.L_f, 0.2);
    EXPECT_LE(est.L_f, grid_sup * (1 + 1e-6));
    EXPECT_GE(est.L_f, 0.95 * grid_sup);
    EXPECT_EQ(est.M_f, 0.0);
    EXPECT_FALSE(est.exceeds_configured);
}

TEST(Models, LipschitzFlagsUnderstatedConstant)
{
    const SystemModel understated(Matrix::Constant(1, 1, 0.3), Matrix::Constant(1, 1, 1.0),
                                  half_u_model().f(), 0.0, 0.1);
    EXPECT_TRUE(estimate_lipschitz(understated, scalar_box(1, 1), 200, 4).exceeds_configured);
}

TEST(Models, VehicleConstantsHoldOnTheirBox)
{
    VehicleParams p;
    p.horizon = 20;
    const TimeVaryingModel m = vehicle_error_model(p, vehicle_reference(p));
    Vector x_lo(3), x_hi(3), u_lo(2), u_hi(2);
    x_lo << -5, -5, -p.box_heading;
    x_hi << 5, 5, p.box_heading;
    u_lo << -p.box_speed, -p.box_curvature;
    u_hi << p.box_speed, p.box_curvature;
    for (int t = 0; t < m.num_stages(); t += 5) {
        const LipschitzEstimate est = estimate_lipschitz(m.stage(t), {x_lo, x_hi, u_lo, u_hi}, 4000, t);
        EXPECT_FALSE(est.exceeds_configured) << "stage " << t << ": " << est.L_f << " " << est.M_f;
        EXPECT_GT(est.L_f, 0.0);
    }
}

TEST(Models, DisturbanceSamplerRespectsRadius)
{
    for (NormKind k : {NormKind::One, NormKind::Two, NormKind::Inf}) {
        DisturbanceSpec spec;
        spec.omega = 0.3;
        DisturbanceSampler inside(3, spec, k, 9);
        for (int i = 0; i < 2000; ++i) EXPECT_LE(vector_norm(inside.sample(), k), 0.3 * (1 + 1e-12));

        spec.shape = DisturbanceSpec::Shape::BallSurface;
        DisturbanceSampler surface(3, spec, k, 9);
        for (int i = 0; i < 200; ++i) EXPECT_NEAR(vector_norm(surface.sample(), k), 0.3, 1e-12);
    }
}

TEST(Models, DisturbanceSamplerIsSeeded)
{
    DisturbanceSpec spec;
    spec.omega = 1.0;
    DisturbanceSampler a(2, spec, NormKind::Two, 42), b(2, spec, NormKind::Two, 42), c(2, spec, NormKind::Two, 43);
    const Vector va = a.sample();
    EXPECT_EQ(va, b.sample());
    EXPECT_NE(va, c.sample());
}

TEST(Models, DiscretizedPendulumSplitsLinearPart)
{
    PendulumParams p;
    const ContinuousDynamics dyn = pendulum_dynamics(p);
    const SystemModel m = discretize(dyn, 4, 1, p.dt, Integrator::Euler, 3.0, 0.013, NormKind::Two);
    Vector x(4);
    x << 0.1, -0.2, 0.3, 0.05;
    Vector u(1);
    u << 2.0;
    const Vector euler = x + p.dt * dyn.rhs(x, u);
    EXPECT_TRUE(step_cloud(m, x, u).isApprox(euler, 1e-12));
    // The residual is second order at the origin.
    Matrix fx, fu;
    m.residual_jacobians(Vector::Zero(4), Vector::Zero(1), fx, fu);
    EXPECT_LT(fx.cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(fu.cwiseAbs().maxCoeff(), 1e-6);

    // RK4 tracks a finely sub-stepped integration far better than one Euler step.
    Vector fine = x;
    for (int i = 0; i < 10000; ++i) fine += (p.dt / 10000) * dyn.rhs(fine, u);
    const SystemModel rk = discretize(dyn, 4, 1, p.dt, Integrator::RK4, 3.0, 0.013, NormKind::Two);
    EXPECT_LT((step_cloud(rk, x, u) - fine).norm(), 0.1 * (euler - fine).norm());
    EXPECT_THROW(parse_integrator("midpoint"), ConfigError);
}
