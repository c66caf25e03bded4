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
#ifndef CLOUDMPC_MODELS_HPP
#define CLOUDMPC_MODELS_HPP

#include "cloudmpc/linalg.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cloudmpc {

/**
 * @brief Nonlinear residual f(x, u) of the plant x+ = A x + B u + f(x, u) + w.
 *
 * `jacobian` is optional; when empty, derivatives are taken by central
 * differences. `identically_zero` marks the residual of a purely linear plant so
 * that downstream solvers can take the convex path.
 */
struct Nonlinearity {
    using Eval = std::function<Vector(const Vector& x, const Vector& u)>;
    using Jacobian = std::function<void(const Vector& x, const Vector& u, Matrix& fx, Matrix& fu)>;

    Eval eval;
    Jacobian jacobian;
    bool identically_zero = false;

    static Nonlinearity zero(int state_dim);
};

/// One factor func(scale * v)^power of an expression-table term.
struct TermFactor {
    enum class Func { Identity, Sin, Cos };
    Func func = Func::Identity;
    bool control = false; ///< reads u[index] instead of x[index]
    int index = 0;
    double scale = 1.0;
    int power = 1;
};

/// coeff * prod(factors), added to output component `output`.
struct NonlinearTerm {
    int output = 0;
    double coeff = 0.0;
    std::vector<TermFactor> factors;
};

/// Builds f from a polynomial/trigonometric term table (with analytic Jacobian).
Nonlinearity make_term_nonlinearity(std::vector<NonlinearTerm> terms, int state_dim, int control_dim);

/**
 * @brief Discrete-time plant model with its Lipschitz metadata.
 *
 * Invariants checked at construction: f(0,0) = 0 exactly, and the stored `a`
 * equals the induced norm of A (to 1e-9 when supplied by the caller).
 */
class SystemModel {
public:
    SystemModel(Matrix A, Matrix B, Nonlinearity f, double L_f, double M_f,
                NormKind norm = NormKind::Two, std::optional<double> a = std::nullopt);

    const Matrix& A() const { return A_; }
    const Matrix& B() const { return B_; }
    const Nonlinearity& f() const { return f_; }
    double a() const { return a_; }
    double L_f() const { return L_f_; }
    double M_f() const { return M_f_; }
    NormKind norm() const { return norm_; }
    int state_dim() const { return static_cast<int>(A_.rows()); }
    int control_dim() const { return static_cast<int>(B_.cols()); }
    bool linear() const { return f_.identically_zero; }

    Vector residual(const Vector& x, const Vector& u) const;

    /// Jacobians of the residual f (not of the full step).
    void residual_jacobians(const Vector& x, const Vector& u, Matrix& fx, Matrix& fu) const;

private:
    Matrix A_;
    Matrix B_;
    Nonlinearity f_;
    double a_ = 0.0;
    double L_f_ = 0.0;
    double M_f_ = 0.0;
    NormKind norm_ = NormKind::Two;
};

/// A x + B u + f(x,u) + w.
Vector step_true(const SystemModel& model, const Vector& x, const Vector& u, const Vector& w);
/// A x + B u + f(x,u).
Vector step_cloud(const SystemModel& model, const Vector& x, const Vector& u);
/// A x + B u.
Vector step_local(const SystemModel& model, const Vector& x, const Vector& u);

/**
 * @brief Per-step models (A_t, B_t, f_t) with aggregate constants.
 *
 * A time-invariant model is a schedule with a single stage that applies at
 * every t. Aggregates are the maxima over stages.
 */
class TimeVaryingModel {
public:
    explicit TimeVaryingModel(SystemModel constant_model);
    explicit TimeVaryingModel(std::vector<SystemModel> stages);

    const SystemModel& stage(int t) const;
    int num_stages() const { return static_cast<int>(stages_.size()); }
    bool time_invariant() const { return stages_.size() == 1; }
    bool linear() const;

    double a() const { return a_; }
    double L_f() const { return L_f_; }
    double M_f() const { return M_f_; }
    NormKind norm() const { return stages_.front().norm(); }
    int state_dim() const { return stages_.front().state_dim(); }
    int control_dim() const { return stages_.front().control_dim(); }

private:
    std::vector<SystemModel> stages_;
    double a_ = 0.0;
    double L_f_ = 0.0;
    double M_f_ = 0.0;
};

enum class StepperKind { True, Cloud, Local };

/**
 * Rolls the chosen stepper forward from x0 at absolute time `start`.
 * Disturbances must be given iff stepper == True.
 */
Trajectory rollout(const TimeVaryingModel& model, StepperKind stepper, const Vector& x0,
                   std::span<const Vector> controls,
                   std::optional<std::span<const Vector>> disturbances = std::nullopt,
                   int start = 0);

/// Bounded disturbance description; `sampler_radius` defaults to omega.
struct DisturbanceSpec {
    enum class Shape { UniformBall, BallSurface };
    double omega = 0.0;
    std::optional<double> sampler_radius;
    Shape shape = Shape::UniformBall;

    double radius() const { return sampler_radius.value_or(omega); }
};

/// Seeded sampler of w on the radius-ball of the configured norm.
class DisturbanceSampler {
public:
    DisturbanceSampler(int dim, const DisturbanceSpec& spec, NormKind norm, std::uint64_t seed);

    Vector sample();

private:
    Vector unit_direction();

    int dim_;
    double radius_;
    DisturbanceSpec::Shape shape_;
    NormKind norm_;
    std::mt19937_64 rng_;
};

struct SampleBox {
    Vector x_lo, x_hi;
    Vector u_lo, u_hi;
};

struct LipschitzEstimate {
    double L_f = 0.0;
    double M_f = 0.0;
    bool exceeds_configured = false;
};

/**
 * Sampled lower estimates of the Lipschitz constants of f on `box`.
 * Validation only: warns on stderr when an estimate exceeds the configured
 * constant, and never modifies the model.
 */
LipschitzEstimate estimate_lipschitz(const SystemModel& model, const SampleBox& box, int n_samples,
                                     std::uint64_t seed);

/// Continuous-time vector field xdot = F(x, u) with optional Jacobians.
struct ContinuousDynamics {
    std::function<Vector(const Vector&, const Vector&)> rhs;
    std::function<void(const Vector&, const Vector&, Matrix&, Matrix&)> jacobian;
};

enum class Integrator { Euler, RK4 };

Integrator parse_integrator(const std::string& name);

/**
 * Discretises F at step dt and splits the result into the linearisation
 * about the origin (A, B) plus the residual f.
 */
SystemModel discretize(const ContinuousDynamics& dynamics, int state_dim, int control_dim, double dt,
                       Integrator scheme, double L_f, double M_f, NormKind norm);

} // namespace cloudmpc

#endif // CLOUDMPC_MODELS_HPP
