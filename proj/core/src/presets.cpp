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
#include "cloudmpc/presets.hpp"

#include "cloudmpc/errors.hpp"

#include <cmath>
#include <numbers>

namespace cloudmpc {

namespace {

Nonlinearity example1_nonlinearity()
{
    Nonlinearity f;
    f.eval = [](const Vector& x, const Vector&) {
        Vector out(1);
        out[0] = 0.1 * x[0] - std::sin(0.1 * x[0]);
        return out;
    };
    f.jacobian = [](const Vector& x, const Vector& u, Matrix& fx, Matrix& fu) {
        fx.resize(1, 1);
        fx(0, 0) = 0.1 - 0.1 * std::cos(0.1 * x[0]);
        fu = Matrix::Zero(1, u.size());
    };
    return f;
}

} // namespace

SystemModel example1_model(NormKind norm)
{
    return SystemModel(Matrix::Constant(1, 1, 0.75), Matrix::Constant(1, 1, 1.0), example1_nonlinearity(), 0.2, 0.0,
                       norm);
}

Nonlinearity builtin_nonlinearity(const std::string& name, int state_dim, int control_dim)
{
    if (name == "zero") return Nonlinearity::zero(state_dim);
    if (name == "example1") {
        if (state_dim != 1 || control_dim != 1) throw ConfigError("builtin 'example1' needs a scalar model");
        return example1_nonlinearity();
    }
    throw ConfigError("unknown builtin nonlinearity '" + name + "' (expected zero or example1)");
}

ContinuousDynamics pendulum_dynamics(const PendulumParams& p)
{
    if (!(p.m_cart > 0.0 && p.m_pend > 0.0 && p.length > 0.0 && p.dt > 0.0))
        throw ConfigError("pendulum masses, length and time step must be positive");
    ContinuousDynamics dyn;
    dyn.rhs = [p](const Vector& x, const Vector& u) {
        const double zd = x[1];
        const double th = x[2];
        const double thd = x[3];
        const double s = std::sin(th);
        const double c = std::cos(th);
        const double zdd = (u[0] - p.damping * zd - p.m_pend * p.length * thd * thd * s + p.m_pend * p.gravity * s * c) /
                           (p.m_cart + p.m_pend * s * s);
        const double thdd = (zdd * c + p.gravity * s) / p.length;
        Vector out(4);
        out << zd, zdd, thd, thdd;
        return out;
    };
    return dyn;
}

VehicleReference vehicle_reference(const VehicleParams& p)
{
    if (!(p.wheelbase > 0.0 && p.dt > 0.0 && p.horizon >= 1 && p.steer_period > 0.0))
        throw ConfigError("vehicle wheelbase, time step, horizon and steering period must be positive");
    VehicleReference ref;
    Vector x = Vector::Zero(3);
    ref.states.push_back(x);
    for (int t = 0; t < p.horizon; ++t) {
        const double gamma = p.steer_amplitude * std::sin(2.0 * std::numbers::pi * t * p.dt / p.steer_period);
        Vector u(2);
        u << p.v_ref, gamma;
        ref.controls.push_back(u);
        Vector xdot(3);
        xdot << u[0] * std::cos(x[2]), u[0] * std::sin(x[2]), u[0] / p.wheelbase * gamma;
        x = x + p.dt * xdot;
        ref.states.push_back(x);
    }
    return ref;
}

TimeVaryingModel vehicle_error_model(const VehicleParams& p, const VehicleReference& ref, NormKind norm)
{
    if (norm != NormKind::Two) throw ConfigError("vehicle constants are derived for the 2-norm");
    if (!(p.box_speed >= 0.0 && p.box_curvature >= 0.0 && p.box_heading >= 0.0))
        throw ConfigError("vehicle Lipschitz box must be non-negative");
    const double l = p.wheelbase;
    const double heading = std::min(p.box_heading, 2.0);
    std::vector<SystemModel> stages;
    for (int t = 0; t < p.horizon; ++t) {
        const double phi_r = ref.states[static_cast<std::size_t>(t)][2];
        const double v_r = ref.controls[static_cast<std::size_t>(t)][0];
        const double gamma_r = ref.controls[static_cast<std::size_t>(t)][1];
        ContinuousDynamics dyn;
        dyn.rhs = [phi_r, v_r, gamma_r, l](const Vector& x, const Vector& u) {
            const double v = u[0] + v_r;
            Vector out(3);
            out << v * std::cos(x[2] + phi_r) - v_r * std::cos(phi_r), v * std::sin(x[2] + phi_r) - v_r * std::sin(phi_r),
                v * (u[1] + gamma_r) / l - v_r * gamma_r / l;
            return out;
        };
        dyn.jacobian = [phi_r, v_r, gamma_r, l](const Vector& x, const Vector& u, Matrix& Jx, Matrix& Ju) {
            const double v = u[0] + v_r;
            const double s = std::sin(x[2] + phi_r);
            const double c = std::cos(x[2] + phi_r);
            Jx = Matrix::Zero(3, 3);
            Jx(0, 2) = -v * s;
            Jx(1, 2) = v * c;
            Ju = Matrix::Zero(3, 2);
            Ju(0, 0) = c;
            Ju(1, 0) = s;
            Ju(2, 0) = (u[1] + gamma_r) / l;
            Ju(2, 1) = v / l;
        };
        // |v~| + v_ref |e^{i phi~} - 1| bounds the state Jacobian column; the
        // Frobenius norm bounds the control Jacobian.
        const double L_f = p.dt * (p.box_speed + v_r * heading);
        const double M_f =
            p.dt * std::sqrt(heading * heading + (p.box_curvature * p.box_curvature + p.box_speed * p.box_speed) / (l * l));
        stages.push_back(discretize(dyn, 3, 2, p.dt, Integrator::Euler, L_f, M_f, norm));
    }
    return TimeVaryingModel(std::move(stages));
}

} // namespace cloudmpc
