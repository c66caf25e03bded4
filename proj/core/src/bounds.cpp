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

#include <cmath>
#include <sstream>

namespace cloudmpc {

namespace {

void require_nonnegative(double v, const char* name)
{
    if (!(std::isfinite(v) && v >= 0.0)) {
        std::ostringstream msg;
        msg << name << " must be finite and non-negative (got " << v << ")";
        throw ConfigError(msg.str());
    }
}

/// Recursion e <- (a + L_f) e + omega from e_k = eps over tau - k steps (tau >= k).
double propagate(const BoundContext& ctx, double eps, int k, int tau)
{
    const double c = ctx.growth();
    double e = eps;
    for (int l = k; l < tau; ++l) e = c * e + ctx.omega;
    return e;
}

} // namespace

BoundContext BoundContext::from(const TimeVaryingModel& model, const CostSpec& cost, double omega)
{
    BoundContext ctx;
    ctx.a = model.a();
    ctx.L_f = model.L_f();
    ctx.M_f = model.M_f();
    ctx.omega = omega;
    ctx.L_phi = cost.L_phi();
    ctx.L_psi = cost.L_psi();
    ctx.N = cost.horizon();
    ctx.norm = model.norm();
    ctx.validate();
    return ctx;
}

void BoundContext::validate() const
{
    require_nonnegative(a, "a");
    require_nonnegative(L_f, "L_f");
    require_nonnegative(M_f, "M_f");
    require_nonnegative(omega, "omega");
    require_nonnegative(L_phi, "L_phi");
    require_nonnegative(L_psi, "L_psi");
    if (N < 1) throw ConfigError("horizon must be at least 1");
}

double cloud_state_bound(const BoundContext& ctx, double eps_k, int k, int tau)
{
    if (tau <= k) throw ConfigError("cloud_state_bound needs tau > k");
    if (k < 0 || tau > ctx.N) throw ConfigError("cloud_state_bound indices outside the horizon");
    require_nonnegative(eps_k, "eps_k");
    return propagate(ctx, eps_k, k, tau);
}

std::vector<double> delta_sequence(const BoundContext& ctx, double delta0, int T)
{
    require_nonnegative(delta0, "delta_0");
    if (T < 0 || T > ctx.N) throw ConfigError("delta_sequence length outside the horizon");
    std::vector<double> delta(static_cast<std::size_t>(T) + 1);
    delta[0] = delta0;
    for (int k = 0; k < T; ++k)
        delta[static_cast<std::size_t>(k) + 1] = ctx.growth() * delta[static_cast<std::size_t>(k)] + ctx.omega;
    return delta;
}

double cloud_cost_bound(const BoundContext& ctx, double eps_k, int k)
{
    if (k < 0 || k > ctx.N) throw ConfigError("cloud_cost_bound index outside the horizon");
    require_nonnegative(eps_k, "eps_k");
    double e = eps_k;
    double stage_sum = 0.0;
    for (int tau = k; tau < ctx.N; ++tau) {
        stage_sum += e;
        e = ctx.growth() * e + ctx.omega;
    }
    return ctx.L_phi * stage_sum + ctx.L_psi * e;
}

double local_state_bound(const BoundContext& ctx, std::span<const Gauge> gauges, int t, int tau)
{
    if (tau <= t || t < 0 || tau > ctx.N) throw ConfigError("local_state_bound needs 0 <= t < tau <= N");
    if (gauges.size() != static_cast<std::size_t>(tau - t))
        throw ConfigError("local_state_bound needs one gauge pair per step in [t, tau)");
    double xi = 0.0;
    for (const auto& gauge : gauges) xi = ctx.growth() * xi + (ctx.L_f * gauge.alpha + ctx.M_f * gauge.beta + ctx.omega);
    return xi;
}

double local_cost_bound(const BoundContext& ctx, std::span<const Gauge> gauges, int t)
{
    if (t < 0 || t >= ctx.N) throw ConfigError("local_cost_bound needs 0 <= t < N");
    if (gauges.size() != static_cast<std::size_t>(ctx.N - t))
        throw ConfigError("local_cost_bound needs one gauge pair per step in [t, N)");
    double xi = 0.0;
    double stage_sum = 0.0;
    for (std::size_t i = 0; i < gauges.size(); ++i) {
        xi = ctx.growth() * xi + (ctx.L_f * gauges[i].alpha + ctx.M_f * gauges[i].beta + ctx.omega);
        if (i + 1 < gauges.size()) stage_sum += xi;
    }
    return ctx.L_phi * stage_sum + ctx.L_psi * xi;
}

} // namespace cloudmpc
