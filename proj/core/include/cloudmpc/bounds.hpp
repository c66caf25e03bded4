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
#ifndef CLOUDMPC_BOUNDS_HPP
#define CLOUDMPC_BOUNDS_HPP

#include "cloudmpc/linalg.hpp"

#include <span>
#include <vector>

namespace cloudmpc {

class CostSpec;
class TimeVaryingModel;

/// Constants shared by every error bound. For time-varying models these are the per-step maxima.
struct BoundContext {
    double a = 0.0;
    double L_f = 0.0;
    double M_f = 0.0;
    double omega = 0.0;
    double L_phi = 0.0;
    double L_psi = 0.0;
    int N = 1;
    NormKind norm = NormKind::Two;

    /// a + L_f, the per-step growth factor of prediction errors.
    double growth() const { return a + L_f; }

    static BoundContext from(const TimeVaryingModel& model, const CostSpec& cost, double omega);
    void validate() const;
};

/// Upper bound on ||x_hat_tau - x_tau|| given ||x_hat_k - x_k|| <= eps_k, for k < tau <= N.
double cloud_state_bound(const BoundContext& ctx, double eps_k, int k, int tau);

/// [delta_0, ..., delta_T] with delta_{k+1} = (a + L_f) delta_k + omega.
std::vector<double> delta_sequence(const BoundContext& ctx, double delta0, int T);

/**
 * Bound on |J_hat_k - J^c_k|, evaluated in summed form
 *   L_phi * sum_{tau=k}^{N-1} e_tau + L_psi * e_N,  e_tau = cloud state bound (e_k = eps_k),
 * which stays well defined when a + L_f = 1.
 */
double cloud_cost_bound(const BoundContext& ctx, double eps_k, int k);

/// Gauge pair (alpha_l, beta_l) bounding ||x_bar_l|| and ||u_bar_l||.
struct Gauge {
    double alpha = 0.0;
    double beta = 0.0;
};

/// sum_{l=t}^{tau-1} (a+L_f)^{tau-l-1} (L_f alpha_l + M_f beta_l + omega); gauges cover l = t..tau-1.
double local_state_bound(const BoundContext& ctx, std::span<const Gauge> gauges, int t, int tau);

/**
 * Bound on |J_bar_t - J^l_t|. The stage sum starts at t+1 because the local
 * prediction starts from the measured state; gauges cover l = t..N-1.
 */
double local_cost_bound(const BoundContext& ctx, std::span<const Gauge> gauges, int t);

} // namespace cloudmpc

#endif // CLOUDMPC_BOUNDS_HPP
