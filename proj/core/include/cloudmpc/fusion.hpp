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
#ifndef CLOUDMPC_FUSION_HPP
#define CLOUDMPC_FUSION_HPP

#include "cloudmpc/controllers.hpp"

#include <string>

namespace cloudmpc {

enum class Choice { Cloud, Local };

std::string to_string(Choice choice);

/// Cloud iff j_hat + eta_hat <= j_bar + eta_bar; j_bar may be +inf.
Choice switch_unconstrained(double j_hat, double eta_hat, double j_bar, double eta_bar);

/// As switch_unconstrained, additionally requiring eps_meas <= delta_t.
Choice switch_constrained(double j_hat, double eta_hat, double j_bar, double eta_bar, double eps_meas,
                          double delta_t);

/// Cloud iff the realised cloud cost-to-go is no larger than the local one.
Choice optimal_switch_oracle(double J_l, double J_c);

struct PolicySpec {
    /// Auto picks Constrained when the setup has constraints.
    enum class Kind { Auto, Unconstrained, Constrained, AlwaysCloud, AlwaysLocal };
    /// Which eps enters eta_hat at decision time.
    enum class EtaEps { Measured, Delta };
    Kind kind = Kind::Auto;
    EtaEps eta_eps = EtaEps::Measured;
};

PolicySpec::Kind parse_policy_kind(const std::string& name);
PolicySpec::EtaEps parse_eta_eps(const std::string& name);
std::string to_string(PolicySpec::Kind kind);
std::string to_string(PolicySpec::EtaEps eps);

struct SwitchDecision {
    int t = 0;
    Choice choice = Choice::Cloud;
    double j_hat = 0.0;
    double eta_hat = 0.0;
    double j_bar = 0.0;
    double eta_bar = 0.0;
    double j_cloud_wc = 0.0;
    double j_local_wc = 0.0;
    double eps_meas = 0.0;
    double delta_t = 0.0;
    bool trust_ok = true;
};

/**
 * Evaluates the configured policy at time t. Without a usable local plan the
 * cloud control is the only option.
 */
SwitchDecision decide(const PolicySpec& policy, bool has_constraints, int t, const CloudPlan& cloud,
                      const LocalPlan& local, const Vector& x_t);

} // namespace cloudmpc

#endif // CLOUDMPC_FUSION_HPP
