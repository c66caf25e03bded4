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
#ifndef CLOUDMPC_COSTS_HPP
#define CLOUDMPC_COSTS_HPP

#include "cloudmpc/linalg.hpp"

#include <span>
#include <vector>

namespace cloudmpc {

/**
 * @brief Weighted-norm stage and terminal costs over a horizon of N steps.
 *
 *   phi(x, u) = ||Q^{1/2} x||_2 + ||R^{1/2} u||_2,   psi(x) = ||P^{1/2} x||_2
 *
 * Both are globally Lipschitz in x. L_phi and L_psi are the induced norms of
 * Q^{1/2} and P^{1/2} from the configured state norm into the Euclidean norm.
 * The scalar preset Q = 1, R = 5, P = 2 gives |x| + sqrt(5)|u| and sqrt(2)|x_N|.
 */
class CostSpec {
public:
    CostSpec(Matrix Q, Matrix R, Matrix P, int horizon, NormKind norm = NormKind::Two);

    double stage(const Vector& x, const Vector& u) const;
    double terminal(const Vector& x) const;

    const Matrix& Q_sqrt() const { return Q_sqrt_; }
    const Matrix& R_sqrt() const { return R_sqrt_; }
    const Matrix& P_sqrt() const { return P_sqrt_; }
    double L_phi() const { return L_phi_; }
    double L_psi() const { return L_psi_; }
    int horizon() const { return horizon_; }
    int state_dim() const { return static_cast<int>(Q_sqrt_.cols()); }
    int control_dim() const { return static_cast<int>(R_sqrt_.cols()); }

private:
    Matrix Q_sqrt_;
    Matrix R_sqrt_;
    Matrix P_sqrt_;
    double L_phi_ = 0.0;
    double L_psi_ = 0.0;
    int horizon_ = 1;
};

/// Sum of stage costs over N steps plus the terminal cost; needs N+1 states and N controls.
double total_cost(const CostSpec& cost, std::span<const Vector> states, std::span<const Vector> controls);

/**
 * Cost-to-go from step k: states x_k..x_N and controls u_k..u_{N-1}.
 * k = N leaves only the terminal cost.
 */
double cost_to_go(const CostSpec& cost, std::span<const Vector> states, std::span<const Vector> controls,
                  int k);

/// [J_k, J_{k+1}, ..., J_N] for a trajectory starting at step k.
std::vector<double> cost_to_go_sequence(const CostSpec& cost, std::span<const Vector> states,
                                        std::span<const Vector> controls, int k = 0);

} // namespace cloudmpc

#endif // CLOUDMPC_COSTS_HPP
