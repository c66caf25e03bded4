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
#include "cloudmpc/fusion.hpp"

#include "cloudmpc/errors.hpp"

namespace cloudmpc {

std::string to_string(Choice choice) { return choice == Choice::Cloud ? "cloud" : "local"; }

Choice switch_unconstrained(double j_hat, double eta_hat, double j_bar, double eta_bar)
{
    return j_hat + eta_hat <= j_bar + eta_bar ? Choice::Cloud : Choice::Local;
}

Choice switch_constrained(double j_hat, double eta_hat, double j_bar, double eta_bar, double eps_meas,
                          double delta_t)
{
    if (eps_meas > delta_t) return Choice::Local;
    return switch_unconstrained(j_hat, eta_hat, j_bar, eta_bar);
}

Choice optimal_switch_oracle(double J_l, double J_c) { return J_c <= J_l ? Choice::Cloud : Choice::Local; }

PolicySpec::Kind parse_policy_kind(const std::string& name)
{
    if (name == "auto") return PolicySpec::Kind::Auto;
    if (name == "unconstrained") return PolicySpec::Kind::Unconstrained;
    if (name == "constrained") return PolicySpec::Kind::Constrained;
    if (name == "always_cloud") return PolicySpec::Kind::AlwaysCloud;
    if (name == "always_local") return PolicySpec::Kind::AlwaysLocal;
    throw ConfigError("unknown policy '" + name +
                      "' (expected auto, unconstrained, constrained, always_cloud or always_local)");
}

PolicySpec::EtaEps parse_eta_eps(const std::string& name)
{
    if (name == "measured") return PolicySpec::EtaEps::Measured;
    if (name == "delta") return PolicySpec::EtaEps::Delta;
    throw ConfigError("unknown eta_eps '" + name + "' (expected measured or delta)");
}

std::string to_string(PolicySpec::Kind kind)
{
    switch (kind) {
    case PolicySpec::Kind::Auto: return "auto";
    case PolicySpec::Kind::Unconstrained: return "unconstrained";
    case PolicySpec::Kind::Constrained: return "constrained";
    case PolicySpec::Kind::AlwaysCloud: return "always_cloud";
    case PolicySpec::Kind::AlwaysLocal: return "always_local";
    }
    return "auto";
}

std::string to_string(PolicySpec::EtaEps eps) { return eps == PolicySpec::EtaEps::Measured ? "measured" : "delta"; }

SwitchDecision decide(const PolicySpec& policy, bool has_constraints, int t, const CloudPlan& cloud,
                      const LocalPlan& local, const Vector& x_t)
{
    SwitchDecision d;
    d.t = t;
    const auto k = static_cast<std::size_t>(t);
    d.eps_meas = vector_norm(cloud.states[k] - x_t, cloud.ctx.norm);
    d.delta_t = cloud.delta[k];
    d.trust_ok = d.eps_meas <= d.delta_t;
    d.j_hat = cloud.cost_to_go[k];
    d.eta_hat = policy.eta_eps == PolicySpec::EtaEps::Measured ? cloud.eta_at(t, d.eps_meas) : cloud.eta[k];
    d.j_bar = local.J_bar;
    d.eta_bar = local.eta_bar;
    d.j_cloud_wc = d.j_hat + d.eta_hat;
    d.j_local_wc = d.j_bar + d.eta_bar;

    if (!local.has_controls()) {
        d.choice = Choice::Cloud;
        return d;
    }
    switch (policy.kind) {
    case PolicySpec::Kind::AlwaysCloud: d.choice = Choice::Cloud; break;
    case PolicySpec::Kind::AlwaysLocal: d.choice = Choice::Local; break;
    case PolicySpec::Kind::Unconstrained: d.choice = switch_unconstrained(d.j_hat, d.eta_hat, d.j_bar, d.eta_bar); break;
    case PolicySpec::Kind::Constrained:
        d.choice = switch_constrained(d.j_hat, d.eta_hat, d.j_bar, d.eta_bar, d.eps_meas, d.delta_t);
        break;
    case PolicySpec::Kind::Auto:
        d.choice = has_constraints ? switch_constrained(d.j_hat, d.eta_hat, d.j_bar, d.eta_bar, d.eps_meas, d.delta_t)
                                   : switch_unconstrained(d.j_hat, d.eta_hat, d.j_bar, d.eta_bar);
        break;
    }
    return d;
}

} // namespace cloudmpc
