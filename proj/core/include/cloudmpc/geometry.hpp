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
#ifndef CLOUDMPC_GEOMETRY_HPP
#define CLOUDMPC_GEOMETRY_HPP

#include "cloudmpc/linalg.hpp"

#include <vector>

namespace cloudmpc {

/// G^T x <= g
struct HalfspaceRow {
    Vector G;
    double g = 0.0;
};

/// Halfspace constraint set imposed on the state at time `time`.
struct PolytopeConstraint {
    int time = 0;
    std::vector<HalfspaceRow> rows;

    /// Largest row residual G^T x - g (negative inside, -inf for no rows).
    double max_residual(const Vector& x) const;
    bool contains(const Vector& x, double tol = 0.0) const;
};

/// Checks 1 <= time <= horizon, dimensions, and that every G is nonzero.
void validate_constraint(const PolytopeConstraint& set, int state_dim, int horizon);

/// Support function of the unit ball of `kind`: the dual norm of the direction.
double support_ball(NormKind kind, const Vector& direction);

/// Pontryagin difference of the set and the ball of the given radius, row by row.
PolytopeConstraint tighten_by_ball(const PolytopeConstraint& set, double radius, NormKind kind);

/// Feasibility probe; an empty tightened set is a valid value, not an error.
bool polytope_is_empty(const PolytopeConstraint& set, int state_dim);

enum class GaugeKind { State, Control };

/**
 * @brief Polyhedral inner approximations {x : Gbar x <= gbar} and
 * {u : Hbar u <= hbar} of the unit balls used to bound predicted norms.
 *
 * Containment in the unit ball is verified at construction: coordinate-wise
 * LPs establish boundedness, then vertex enumeration maximises the norm.
 */
class UnitBallPolytope {
public:
    UnitBallPolytope(Matrix G_state, Vector g_state, Matrix H_control, Vector h_control, NormKind norm);

    /// Box of half-width 1/sqrt(n) for the 2-norm, 1 for inf, 1/n for the 1-norm.
    static UnitBallPolytope default_for(int state_dim, int control_dim, NormKind norm);

    const Matrix& matrix(GaugeKind which) const { return which == GaugeKind::State ? G_ : H_; }
    const Vector& offsets(GaugeKind which) const { return which == GaugeKind::State ? g_ : h_; }
    NormKind norm() const { return norm_; }

private:
    Matrix G_;
    Vector g_;
    Matrix H_;
    Vector h_;
    NormKind norm_;
};

/// v in scale * polytope, with a 1e-12 relative allowance for rounding.
bool gauge_membership(const UnitBallPolytope& poly, GaugeKind which, const Vector& v, double scale);

/// Smallest scale with v in scale * polytope.
double minimal_gauge(const UnitBallPolytope& poly, GaugeKind which, const Vector& v);

} // namespace cloudmpc

#endif // CLOUDMPC_GEOMETRY_HPP
