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
#include "cloudmpc/fusion.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace cloudmpc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector scalar(double v) { return Vector::Constant(1, v); }

CloudPlan cloud_plan(double J0, double delta0)
{
    CloudPlan c;
    c.ctx.a = 0.75;
    c.ctx.L_f = 0.2;
    c.ctx.omega = 0.02;
    c.ctx.L_phi = 1.0;
    c.ctx.L_psi = 1.0;
    c.ctx.N = 2;
    c.states = {scalar(1.0), scalar(0.5), scalar(0.2)};
    c.controls = {scalar(0.0), scalar(0.0)};
    c.cost_to_go = {J0, 1.0, 0.2};
    c.delta = delta_sequence(c.ctx, delta0, 2);
    for (int k = 0; k <= 2; ++k) c.eta.push_back(cloud_cost_bound(c.ctx, c.delta[k], k));
    return c;
}

LocalPlan local_plan(double J_bar, double eta_bar)
{
    LocalPlan l;
    l.status = LocalStatus::Fresh;
    l.controls = {scalar(0.0), scalar(0.0)};
    l.J_bar = J_bar;
    l.eta_bar = eta_bar;
    return l;
}

} // namespace

TEST(Fusion, UnconstrainedSwitch)
{
    EXPECT_EQ(switch_unconstrained(1, 0, 2, 0), Choice::Cloud);
    EXPECT_EQ(switch_unconstrained(2, 0, 1, 0), Choice::Local);
    EXPECT_EQ(switch_unconstrained(1, 1, 2, 0), Choice::Cloud);
    EXPECT_EQ(switch_unconstrained(1, 0.5, 1, 0.6), Choice::Cloud);
    EXPECT_EQ(switch_unconstrained(1, 0.7, 1, 0.6), Choice::Local);
}

TEST(Fusion, ConstrainedSwitch)
{
    EXPECT_EQ(switch_constrained(1, 0, 2, 0, 0.3, 0.3), Choice::Cloud);
    EXPECT_EQ(switch_constrained(1, 0, 2, 0, 0.3000001, 0.3), Choice::Local);
    EXPECT_EQ(switch_constrained(2, 0, 1, 0, 0.1, 0.3), Choice::Local);
    EXPECT_EQ(switch_constrained(1, 5, kInf, 0, 0.1, 0.3), Choice::Cloud);
    EXPECT_EQ(switch_constrained(1e300, 1e300, kInf, kInf, 0.0, 0.3), Choice::Cloud);
}

TEST(Fusion, Oracle)
{
    EXPECT_EQ(optimal_switch_oracle(5, 4), Choice::Cloud);
    EXPECT_EQ(optimal_switch_oracle(4, 5), Choice::Local);
    EXPECT_EQ(optimal_switch_oracle(4, 4), Choice::Cloud);
    EXPECT_EQ(optimal_switch_oracle(kInf, 4), Choice::Cloud);
}

TEST(Fusion, PolicyNamesRoundTrip)
{
    for (auto k : {PolicySpec::Kind::Auto, PolicySpec::Kind::Unconstrained, PolicySpec::Kind::Constrained,
                   PolicySpec::Kind::AlwaysCloud, PolicySpec::Kind::AlwaysLocal})
        EXPECT_EQ(parse_policy_kind(to_string(k)), k);
    for (auto e : {PolicySpec::EtaEps::Measured, PolicySpec::EtaEps::Delta}) EXPECT_EQ(parse_eta_eps(to_string(e)), e);
    EXPECT_THROW(parse_policy_kind("coin_flip"), ConfigError);
}

TEST(Fusion, DecideFillsTheRecord)
{
    const CloudPlan c = cloud_plan(3.0, 0.1);
    const LocalPlan l = local_plan(2.5, 0.2);
    const SwitchDecision d = decide({}, true, 0, c, l, scalar(1.05));
    EXPECT_NEAR(d.eps_meas, 0.05, 1e-15);
    EXPECT_DOUBLE_EQ(d.delta_t, 0.1);
    EXPECT_TRUE(d.trust_ok);
    EXPECT_DOUBLE_EQ(d.j_hat, 3.0);
    EXPECT_NEAR(d.eta_hat, cloud_cost_bound(c.ctx, 0.05, 0), 1e-12);
    EXPECT_DOUBLE_EQ(d.j_cloud_wc, d.j_hat + d.eta_hat);
    EXPECT_DOUBLE_EQ(d.j_local_wc, 2.7);
    EXPECT_EQ(d.choice, d.j_cloud_wc <= d.j_local_wc ? Choice::Cloud : Choice::Local);
}

TEST(Fusion, DecideUsesDeltaWhenAsked)
{
    PolicySpec p;
    p.eta_eps = PolicySpec::EtaEps::Delta;
    const CloudPlan c = cloud_plan(3.0, 0.1);
    EXPECT_DOUBLE_EQ(decide(p, true, 0, c, local_plan(2.5, 0.2), scalar(1.05)).eta_hat, c.eta[0]);
}

TEST(Fusion, DecideFallsBackToCloudWithoutLocalControls)
{
    LocalPlan none;
    none.J_bar = kInf;
    none.eta_bar = kInf;
    PolicySpec p;
    p.kind = PolicySpec::Kind::AlwaysLocal;
    // Even with trust lost, there is nothing else to apply.
    EXPECT_EQ(decide(p, true, 0, cloud_plan(3.0, 0.1), none, scalar(5.0)).choice, Choice::Cloud);
}

TEST(Fusion, DecideTrustLossForcesLocalUnderConstraints)
{
    const CloudPlan c = cloud_plan(0.1, 0.1);
    const LocalPlan l = local_plan(100.0, 100.0);
    EXPECT_EQ(decide({}, true, 0, c, l, scalar(1.5)).choice, Choice::Local);
    // Without constraints auto uses the cost comparison only.
    EXPECT_EQ(decide({}, false, 0, c, l, scalar(1.5)).choice, Choice::Cloud);
    PolicySpec forced;
    forced.kind = PolicySpec::Kind::AlwaysCloud;
    EXPECT_EQ(decide(forced, true, 0, c, l, scalar(1.5)).choice, Choice::Cloud);
}
