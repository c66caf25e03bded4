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

#include "cloudmpc/bounds.hpp"
#include "cloudmpc/costs.hpp"
#include "cloudmpc/errors.hpp"
#include "cloudmpc/models.hpp"
#include "cloudmpc/presets.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace cloudmpc;

namespace {

BoundContext example1_ctx(int N = 10)
{
    BoundContext ctx;
    ctx.a = 0.75;
    ctx.L_f = 0.2;
    ctx.M_f = 0.0;
    ctx.omega = 0.02;
    ctx.L_phi = 1.0;
    ctx.L_psi = std::sqrt(2.0);
    ctx.N = N;
    return ctx;
}

// Geometric closed form of the cloud error recursion e <- c e + omega.
double closed_state(double c, double omega, double eps, int steps)
{
    const double cm = std::pow(c, steps);
    return c == 1.0 ? eps + omega * steps : cm * eps + omega * (cm - 1.0) / (c - 1.0);
}

// Closed form of L_phi sum_{tau=k}^{N-1} e_tau + L_psi e_N.
double closed_cost(const BoundContext& ctx, double eps, int k)
{
    const double c = ctx.growth();
    const int M = ctx.N - k;
    double stage = 0.0;
    if (c == 1.0) {
        stage = eps * M + ctx.omega * M * (M - 1) / 2.0;
    } else {
        const double geo = (std::pow(c, M) - 1.0) / (c - 1.0);
        stage = eps * geo + ctx.omega / (c - 1.0) * (geo - M);
    }
    return ctx.L_phi * stage + ctx.L_psi * closed_state(c, ctx.omega, eps, M);
}

} // namespace

TEST(Bounds, ZeroErrorsGiveZeroBounds)
{
    BoundContext ctx = example1_ctx();
    ctx.omega = 0.0;
    for (int tau = 1; tau <= 10; ++tau) EXPECT_EQ(cloud_state_bound(ctx, 0.0, 0, tau), 0.0);
    for (double d : delta_sequence(ctx, 0.0, 10)) EXPECT_EQ(d, 0.0);
    EXPECT_EQ(cloud_cost_bound(ctx, 0.0, 0), 0.0);
    const std::vector<Gauge> zero(10);
    EXPECT_EQ(local_cost_bound(ctx, zero, 0), 0.0);
    EXPECT_EQ(local_state_bound(ctx, std::span(zero).first(4), 0, 4), 0.0);
}

TEST(Bounds, CloudStateBoundExample1)
{
    const BoundContext ctx = example1_ctx();
    EXPECT_NEAR(cloud_state_bound(ctx, 0.5, 0, 1), 0.495, 1e-15);
    const double oracle = std::pow(0.95, 10) * 0.5 + 0.02 * (1 - std::pow(0.95, 10)) / 0.05;
    EXPECT_NEAR(cloud_state_bound(ctx, 0.5, 0, 10), oracle, 1e-12);
    EXPECT_NEAR(oracle, 0.45988, 1e-5);
    EXPECT_NEAR(2.5 - oracle, 2.0401, 5e-5);
}

TEST(Bounds, DeltaSequenceExample1)
{
    const auto delta = delta_sequence(example1_ctx(), 0.5, 10);
    ASSERT_EQ(delta.size(), 11u);
    EXPECT_EQ(delta[0], 0.5);
    EXPECT_NEAR(delta[1], 0.495, 1e-15);
    EXPECT_NEAR(delta[10], 0.45988, 1e-5);
    for (int k = 0; k <= 10; ++k) EXPECT_NEAR(delta[k], closed_state(0.95, 0.02, 0.5, k), 1e-12);
}

TEST(Bounds, CloudStateBoundIsShiftInvariantAndMonotone)
{
    const BoundContext ctx = example1_ctx();
    EXPECT_DOUBLE_EQ(cloud_state_bound(ctx, 0.3, 2, 6), cloud_state_bound(ctx, 0.3, 0, 4));
    for (int tau = 1; tau <= 10; ++tau)
        EXPECT_LT(cloud_state_bound(ctx, 0.2, 0, tau), cloud_state_bound(ctx, 0.3, 0, tau));
    EXPECT_THROW(cloud_state_bound(ctx, 0.3, 4, 4), ConfigError);
    EXPECT_THROW(cloud_state_bound(ctx, -0.1, 0, 4), ConfigError);
    EXPECT_THROW(cloud_state_bound(ctx, 0.1, 0, 11), ConfigError);
}

TEST(Bounds, CloudCostBoundTerminalOnly)
{
    const BoundContext ctx = example1_ctx();
    EXPECT_NEAR(cloud_cost_bound(ctx, 0.3, 10), std::sqrt(2.0) * 0.3, 1e-15);
}

TEST(Bounds, CloudCostBoundMatchesClosedForm)
{
    const BoundContext ctx = example1_ctx();
    for (int k = 0; k <= 10; ++k) {
        const double summed = cloud_cost_bound(ctx, 0.5, k);
        EXPECT_NEAR(summed, closed_cost(ctx, 0.5, k), 1e-9 * summed) << k;
    }
}

TEST(Bounds, CloudCostBoundClosedFormOnRandomBundles)
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double c : {0.5, 0.95, 1.0, 1.5}) {
        for (int s = 0; s < 25; ++s) {
            BoundContext ctx;
            ctx.L_f = c * u(rng);
            ctx.a = c - ctx.L_f;
            ctx.omega = 0.1 * u(rng);
            ctx.L_phi = 3 * u(rng);
            ctx.L_psi = 3 * u(rng);
            ctx.N = 1 + static_cast<int>(30 * u(rng));
            const int k = static_cast<int>(ctx.N * u(rng));
            const double eps = u(rng);
            const double summed = cloud_cost_bound(ctx, eps, k);
            EXPECT_NEAR(summed, closed_cost(ctx, eps, k), 1e-9 * std::max(1.0, summed));
        }
    }
}

TEST(Bounds, LocalStateBoundExamples)
{
    const BoundContext ctx = example1_ctx();
    const std::vector<Gauge> g = {{10, 3}, {5, 3}};
    EXPECT_NEAR(local_state_bound(ctx, std::span(g).first(1), 0, 1), 2.02, 1e-14);
    EXPECT_NEAR(local_state_bound(ctx, g, 0, 2), 0.95 * 2.02 + (0.2 * 5 + 0.02), 1e-14);
    EXPECT_NEAR(local_state_bound(ctx, g, 0, 2), 2.939, 1e-12);
    EXPECT_THROW(local_state_bound(ctx, g, 0, 3), ConfigError);
}

TEST(Bounds, LocalStateBoundMatchesExplicitSum)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    BoundContext ctx = example1_ctx(15);
    ctx.M_f = 0.3;
    std::vector<Gauge> g(15);
    for (auto& x : g) x = {u(rng), u(rng)};
    for (int t = 0; t < 15; ++t) {
        for (int tau = t + 1; tau <= 15; ++tau) {
            double sum = 0.0;
            for (int l = t; l < tau; ++l)
                sum += std::pow(ctx.growth(), tau - l - 1) * (ctx.L_f * g[l].alpha + ctx.M_f * g[l].beta + ctx.omega);
            EXPECT_NEAR(local_state_bound(ctx, std::span(g).subspan(t, tau - t), t, tau), sum, 1e-12);
        }
    }
}

TEST(Bounds, LocalCostBoundExamples)
{
    const BoundContext ctx = example1_ctx();
    const std::vector<Gauge> g = {{2, 1}, {1, 1}};
    const double oracle = 1.0 * (0.2 * 2 + 0.02) + std::sqrt(2.0) * (0.95 * 0.42 + 0.2 * 1 + 0.02);
    EXPECT_NEAR(local_cost_bound(ctx, g, 8), oracle, 1e-12);
    EXPECT_NEAR(oracle, 1.2954, 5e-5);

    const std::vector<Gauge> last = {{2, 1}};
    EXPECT_NEAR(local_cost_bound(ctx, last, 9), std::sqrt(2.0) * local_state_bound(ctx, last, 9, 10), 1e-15);
    EXPECT_THROW(local_cost_bound(ctx, g, 7), ConfigError);
}

TEST(Bounds, ContextFromModelAndCost)
{
    const TimeVaryingModel m(example1_model());
    const CostSpec cost(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 5.0), Matrix::Constant(1, 1, 2.0), 10);
    const BoundContext ctx = BoundContext::from(m, cost, 0.02);
    EXPECT_DOUBLE_EQ(ctx.a, 0.75);
    EXPECT_DOUBLE_EQ(ctx.L_f, 0.2);
    EXPECT_DOUBLE_EQ(ctx.growth(), 0.95);
    EXPECT_DOUBLE_EQ(ctx.L_phi, 1.0);
    EXPECT_NEAR(ctx.L_psi, std::sqrt(2.0), 1e-15);
    EXPECT_EQ(ctx.N, 10);
    EXPECT_THROW(BoundContext::from(m, cost, -1.0), ConfigError);
}

TEST(Bounds, CloudStateBoundIsSoundForExample1)
{
    // Same controls on the cloud model and the disturbed plant from states eps apart.
    const SystemModel m = example1_model();
    const BoundContext ctx = example1_ctx();
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int s = 0; s < 500; ++s) {
        Vector x_true = Vector::Constant(1, 8 * u(rng));
        const double eps = 0.5 * std::abs(u(rng));
        Vector x_pred = x_true + Vector::Constant(1, u(rng) < 0 ? -eps : eps);
        for (int tau = 1; tau <= 10; ++tau) {
            const Vector uu = Vector::Constant(1, 3 * u(rng));
            x_true = step_true(m, x_true, uu, Vector::Constant(1, 0.02 * u(rng)));
            x_pred = step_cloud(m, x_pred, uu);
            EXPECT_LE(std::abs(x_true[0] - x_pred[0]), cloud_state_bound(ctx, eps, 0, tau) + 1e-12);
        }
    }
}
