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
#ifndef CLOUDMPC_CONIC_HPP
#define CLOUDMPC_CONIC_HPP

#include "cloudmpc/linalg.hpp"

#include <vector>

namespace cloudmpc {

/// ||F z + f||_2 <= g^T z + h
struct SecondOrderCone {
    Matrix F;
    Vector f;
    Vector g;
    double h = 0.0;
};

/**
 * @brief minimize c^T z  s.t.  A z <= b, second-order cones, lower <= z <= upper.
 *
 * Infinite bounds are allowed. Variables with lower == upper are eliminated
 * before solving.
 */
struct ConicProgram {
    Vector c;
    Matrix A;
    Vector b;
    std::vector<SecondOrderCone> cones;
    Vector lower;
    Vector upper;

    int num_variables() const { return static_cast<int>(c.size()); }
};

struct ConicOptions {
    double feas_tol = 1e-6;
    /// Target for the barrier gap nu/kappa, relative to max(1, |objective|).
    double gap_tol = 1e-9;
    int max_newton = 5000;
    double kappa_growth = 20.0;
    /// Magnitude cap applied to variables without finite bounds.
    double variable_cap = 1e6;
};

enum class ConicStatus { Optimal, Infeasible, IterationLimit };

struct ConicResult {
    ConicStatus status = ConicStatus::Infeasible;
    Vector z;
    double objective = 0.0;
    double max_violation = 0.0;
    /// Smallest uniform relaxation found by the feasibility phase (<= 0 when strictly feasible).
    double phase1_sigma = 0.0;
    int newton_iterations = 0;
};

/**
 * Primal log-barrier interior-point method. A feasibility phase minimising a
 * uniform relaxation of all constraints runs first unless `start` is strictly
 * feasible; the problem is declared infeasible when that relaxation cannot be
 * brought below feas_tol / 2.
 */
ConicResult solve_conic(const ConicProgram& program, const ConicOptions& options = {},
                        const Vector* start = nullptr);

/// Largest violation of any row, cone or bound at z (0 when feasible).
double conic_violation(const ConicProgram& program, const Vector& z);

} // namespace cloudmpc

#endif // CLOUDMPC_CONIC_HPP
