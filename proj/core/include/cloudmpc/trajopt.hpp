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
#ifndef CLOUDMPC_TRAJOPT_HPP
#define CLOUDMPC_TRAJOPT_HPP

#include "cloudmpc/costs.hpp"
#include "cloudmpc/linalg.hpp"
#include "cloudmpc/models.hpp"

#include <span>
#include <string>
#include <vector>

namespace cloudmpc {

/// Coefficient on one auxiliary scale variable; `index` counts from the window start.
struct ScaleTerm {
    int index = 0;
    double coeff = 0.0;
};

/**
 * @brief One linear inequality over the window:
 *   state_coeff^T x_{state_time} + control_coeff^T u_{control_time}
 *     + sum alpha terms + sum beta terms <= rhs
 *
 * Times are absolute; -1 (or an empty coefficient vector) drops the term.
 */
struct LinearRow {
    int state_time = -1;
    Vector state_coeff;
    int control_time = -1;
    Vector control_coeff;
    std::vector<ScaleTerm> alpha;
    std::vector<ScaleTerm> beta;
    double rhs = 0.0;
};

/**
 * @brief Finite-horizon problem over controls u_start..u_{N-1}, states
 * eliminated through the chosen stepper (single shooting).
 *
 * The objective is the cost-to-go from `start`. Auxiliary scales alpha_k and
 * beta_k are non-negative decision variables referenced by rows.
 */
struct TrajOptProblem {
    const TimeVaryingModel* model = nullptr;
    const CostSpec* cost = nullptr;
    StepperKind stepper = StepperKind::Local;
    int start = 0;
    Vector x0;
    std::vector<LinearRow> rows;
    Vector u_lower;
    Vector u_upper;
    int num_alpha = 0;
    int num_beta = 0;
    /// Optional initial guesses; empty means zeros.
    Trajectory warm_controls;
    Vector warm_alpha;
    Vector warm_beta;

    int horizon() const { return cost->horizon(); }
    int steps() const { return horizon() - start; }
};

enum class SolveStatus { Optimal, FeasibleSuboptimal, Infeasible };

std::string to_string(SolveStatus status);

struct SolverOptions {
    double feas_tol = 1e-6;
    double opt_tol = 1e-6;
    /// Newton-step budget of every convex solve.
    int max_iterations = 5000;
    /// Sequential convex programming iterations for nonlinear dynamics.
    int max_outer_iterations = 200;
    double penalty_initial = 1e2;
    double penalty_growth = 10.0;
    double penalty_max = 1e8;
    /// Initial trust radius on controls; <= 0 picks half the control range (or 10).
    double trust_radius = 0.0;
    bool warm_start = true;
    double variable_cap = 1e6;
};

struct TrajOptSolution {
    SolveStatus status = SolveStatus::Infeasible;
    Trajectory controls;
    Trajectory states;
    Vector alpha;
    Vector beta;
    double objective = 0.0;
    double violation = 0.0;
    int newton_iterations = 0;
    int outer_iterations = 0;
};

/**
 * Solves the problem. Linear dynamics give a convex program solved directly;
 * nonlinear dynamics use trust-region sequential convex programming with an
 * exact l1 penalty, followed by a max-violation feasibility phase before any
 * infeasibility verdict.
 */
TrajOptSolution solve(const TrajOptProblem& problem, const SolverOptions& options = {});

/// Independent re-check: rolls the stepper forward and returns the largest violation.
double max_violation(const TrajOptProblem& problem, std::span<const Vector> controls, const Vector& alpha,
                     const Vector& beta);

} // namespace cloudmpc

#endif // CLOUDMPC_TRAJOPT_HPP
