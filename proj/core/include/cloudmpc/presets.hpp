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
#ifndef CLOUDMPC_PRESETS_HPP
#define CLOUDMPC_PRESETS_HPP

#include "cloudmpc/models.hpp"

#include <string>

namespace cloudmpc {

/// x+ = 0.75 x + u + (0.1 x - sin(0.1 x)) + w with L_f = 0.2, M_f = 0.
SystemModel example1_model(NormKind norm = NormKind::Two);

/// Named residuals usable from custom model configs: "zero" and "example1".
Nonlinearity builtin_nonlinearity(const std::string& name, int state_dim, int control_dim);

/// Cart-pole with viscous cart damping; state (z, z_dot, theta, theta_dot), control force F.
struct PendulumParams {
    double m_cart = 1.0;
    double m_pend = 1.0;
    double length = 0.5;
    double damping = 10.0;
    double gravity = 9.81;
    double dt = 0.1;
};

ContinuousDynamics pendulum_dynamics(const PendulumParams& params);

/**
 * @brief Kinematic bicycle tracking a reference generated from the same model.
 *
 * The reference runs at constant speed v_ref with tan(steering) following
 * steer_amplitude * sin(2 pi t / steer_period). The Lipschitz box
 * |v~| <= box_speed, |gamma~| <= box_curvature, |phi~| <= box_heading gives
 * per-step constants for the forward-Euler error model.
 */
struct VehicleParams {
    double wheelbase = 2.5;
    double dt = 0.05;
    int horizon = 60;
    double v_ref = 5.0;
    double steer_amplitude = 0.1;
    double steer_period = 3.0;
    double box_speed = 1.0;
    double box_curvature = 0.5;
    double box_heading = 0.6;
};

struct VehicleReference {
    Trajectory states;   ///< (p_x, p_y, phi) for t = 0..N
    Trajectory controls; ///< (v, gamma) for t = 0..N-1
};

VehicleReference vehicle_reference(const VehicleParams& params);

/// Per-step error dynamics about the reference; constants are the per-step Euler bounds.
TimeVaryingModel vehicle_error_model(const VehicleParams& params, const VehicleReference& reference,
                                     NormKind norm = NormKind::Two);

} // namespace cloudmpc

#endif // CLOUDMPC_PRESETS_HPP
