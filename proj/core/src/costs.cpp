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

#include "cloudmpc/errors.hpp"

#include <sstream>

namespace cloudmpc {

namespace {

void check_lengths(const CostSpec& cost, std::size_t n_states, std::size_t n_controls, int k)
{
    if (k < 0 || k > cost.horizon())
        throw ConfigError("cost-to-go start index out of range");
    const auto expected = static_cast<std::size_t>(cost.horizon() - k);
    if (n_controls != expected || n_states != expected + 1) {
        std::ostringstream msg;
        msg << "cost evaluation from k = " << k << " with N = " << cost.horizon() << " needs "
            << expected + 1 << " states and " << expected << " controls, got " << n_states << " and "
            << n_controls;
        throw ConfigError(msg.str());
    }
}

} // namespace

CostSpec::CostSpec(Matrix Q, Matrix R, Matrix P, int horizon, NormKind norm) : horizon_(horizon)
{
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    if (Q.rows() != Q.cols() || P.rows() != P.cols() || R.rows() != R.cols())
        throw ConfigError("cost weights must be square");
    if (Q.rows() != P.rows()) throw ConfigError("Q and P must have the same dimension");
    Q_sqrt_ = psd_sqrt(Q);
    R_sqrt_ = psd_sqrt(R);
    P_sqrt_ = psd_sqrt(P);
    L_phi_ = induced_norm_to_euclidean(Q_sqrt_, norm);
    L_psi_ = induced_norm_to_euclidean(P_sqrt_, norm);
}

double CostSpec::stage(const Vector& x, const Vector& u) const
{
    if (x.size() != state_dim() || u.size() != control_dim())
        throw ConfigError("stage cost dimension mismatch");
    return (Q_sqrt_ * x).norm() + (R_sqrt_ * u).norm();
}

double CostSpec::terminal(const Vector& x) const
{
    if (x.size() != state_dim()) throw ConfigError("terminal cost dimension mismatch");
    return (P_sqrt_ * x).norm();
}

double total_cost(const CostSpec& cost, std::span<const Vector> states, std::span<const Vector> controls)
{
    return cost_to_go(cost, states, controls, 0);
}

double cost_to_go(const CostSpec& cost, std::span<const Vector> states, std::span<const Vector> controls,
                  int k)
{
    check_lengths(cost, states.size(), controls.size(), k);
    // Summed backwards so the value matches cost_to_go_sequence bit for bit.
    double total = cost.terminal(states.back());
    for (std::size_t i = controls.size(); i-- > 0;) total = cost.stage(states[i], controls[i]) + total;
    return total;
}

std::vector<double> cost_to_go_sequence(const CostSpec& cost, std::span<const Vector> states,
                                        std::span<const Vector> controls, int k)
{
    check_lengths(cost, states.size(), controls.size(), k);
    std::vector<double> J(states.size());
    J.back() = cost.terminal(states.back());
    for (std::size_t i = controls.size(); i-- > 0;) J[i] = cost.stage(states[i], controls[i]) + J[i + 1];
    return J;
}

} // namespace cloudmpc
