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
#include "cloudmpc/geometry.hpp"

#include "cloudmpc/conic.hpp"
#include "cloudmpc/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cloudmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// max ||x|| over {x : G x <= g}; throws if the set is not inside the unit ball.
void check_inside_unit_ball(const Matrix& G, const Vector& g, NormKind norm, const char* what)
{
    const auto d = G.cols();
    if (G.rows() != g.size() || d == 0)
        throw ConfigError(std::string(what) + " gauge polytope has inconsistent dimensions");
    if (g.size() == 0 || g.minCoeff() <= 0.0)
        throw ConfigError(std::string(what) + " gauge polytope offsets must be positive");

    // Boundedness and a coarse size check: every coordinate must stay in [-1, 1].
    ConicProgram lp;
    lp.A = G;
    lp.b = g;
    lp.lower = Vector::Constant(d, -10.0);
    lp.upper = Vector::Constant(d, 10.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
            lp.c = Vector::Zero(d);
            lp.c[i] = -sign;
            const auto sol = solve_conic(lp);
            if (sol.status == ConicStatus::Infeasible)
                throw ConfigError(std::string(what) + " gauge polytope is empty");
            if (-sol.objective > 1.0 + 1e-6)
                throw ConfigError(std::string(what) + " gauge polytope is not inside the unit ball");
        }
    }
    if (norm == NormKind::Inf) return;

    const auto p = static_cast<int>(G.rows());
    if (binomial(p, static_cast<int>(d)) > 2e5)
        throw ConfigError(std::string(what) + " gauge polytope has too many rows to verify");
    std::vector<int> pick(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) pick[static_cast<std::size_t>(i)] = static_cast<int>(i);
    double worst = 0.0;
    while (true) {
        Matrix S(d, d);
        Vector s(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            S.row(i) = G.row(pick[static_cast<std::size_t>(i)]);
            s[i] = g[pick[static_cast<std::size_t>(i)]];
        }
        Eigen::FullPivLU<Matrix> lu(S);
        if (lu.rank() == d) {
            const Vector v = lu.solve(s);
            if ((G * v - g).maxCoeff() <= 1e-9) worst = std::max(worst, vector_norm(v, norm));
        }
        int k = static_cast<int>(d) - 1;
        while (k >= 0 && pick[static_cast<std::size_t>(k)] == p - static_cast<int>(d) + k) --k;
        if (k < 0) break;
        ++pick[static_cast<std::size_t>(k)];
        for (auto j = static_cast<std::size_t>(k) + 1; j < pick.size(); ++j) pick[j] = pick[j - 1] + 1;
    }
    if (worst > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg << what << " gauge polytope reaches norm " << worst << " > 1";
        throw ConfigError(msg.str());
    }
}

Matrix box_rows(int dim)
{
    Matrix G(2 * dim, dim);
    G.setZero();
    for (int i = 0; i < dim; ++i) {
        G(2 * i, i) = 1.0;
        G(2 * i + 1, i) = -1.0;
    }
    return G;
}

double box_half_width(int dim, NormKind norm)
{
    switch (norm) {
    case NormKind::Two: return 1.0 / std::sqrt(static_cast<double>(dim));
    case NormKind::Inf: return 1.0;
    case NormKind::One: return 1.0 / dim;
    }
    return 1.0;
}

} // namespace

double PolytopeConstraint::max_residual(const Vector& x) const
{
    double r = -kInf;
    for (const auto& row : rows) r = std::max(r, row.G.dot(x) - row.g);
    return r;
}

bool PolytopeConstraint::contains(const Vector& x, double tol) const
{
    return rows.empty() || max_residual(x) <= tol;
}

void validate_constraint(const PolytopeConstraint& set, int state_dim, int horizon)
{
    if (set.time < 1 || set.time > horizon) {
        std::ostringstream msg;
        msg << "constraint time " << set.time << " outside 1.." << horizon;
        throw ConfigError(msg.str());
    }
    for (const auto& row : set.rows) {
        if (row.G.size() != state_dim) throw ConfigError("constraint row has wrong dimension");
        if (!row.G.allFinite() || !std::isfinite(row.g)) throw ConfigError("constraint row is not finite");
        if (row.G.isZero(0.0)) throw ConfigError("constraint row has a zero normal");
    }
}

double support_ball(NormKind kind, const Vector& direction)
{
    if (direction.size() == 0 || direction.isZero(0.0))
        throw ConfigError("support function needs a nonzero direction");
    return dual_norm(direction, kind);
}

PolytopeConstraint tighten_by_ball(const PolytopeConstraint& set, double radius, NormKind kind)
{
    if (!(radius >= 0.0)) throw ConfigError("tightening radius must be non-negative");
    PolytopeConstraint out = set;
    for (auto& row : out.rows) row.g -= radius * support_ball(kind, row.G);
    return out;
}

bool polytope_is_empty(const PolytopeConstraint& set, int state_dim)
{
    if (set.rows.empty()) return false;
    ConicProgram lp;
    lp.c = Vector::Zero(state_dim);
    lp.A.resize(static_cast<Eigen::Index>(set.rows.size()), state_dim);
    lp.b.resize(static_cast<Eigen::Index>(set.rows.size()));
    for (std::size_t j = 0; j < set.rows.size(); ++j) {
        lp.A.row(static_cast<Eigen::Index>(j)) = set.rows[j].G.transpose();
        lp.b[static_cast<Eigen::Index>(j)] = set.rows[j].g;
    }
    lp.lower = Vector::Constant(state_dim, -kInf);
    lp.upper = Vector::Constant(state_dim, kInf);
    return solve_conic(lp).status == ConicStatus::Infeasible;
}

UnitBallPolytope::UnitBallPolytope(Matrix G_state, Vector g_state, Matrix H_control, Vector h_control,
                                   NormKind norm)
    : G_(std::move(G_state)), g_(std::move(g_state)), H_(std::move(H_control)), h_(std::move(h_control)),
      norm_(norm)
{
    check_inside_unit_ball(G_, g_, norm_, "state");
    check_inside_unit_ball(H_, h_, norm_, "control");
}

UnitBallPolytope UnitBallPolytope::default_for(int state_dim, int control_dim, NormKind norm)
{
    return UnitBallPolytope(box_rows(state_dim), Vector::Constant(2 * state_dim, box_half_width(state_dim, norm)),
                            box_rows(control_dim),
                            Vector::Constant(2 * control_dim, box_half_width(control_dim, norm)), norm);
}

bool gauge_membership(const UnitBallPolytope& poly, GaugeKind which, const Vector& v, double scale)
{
    const Matrix& G = poly.matrix(which);
    if (v.size() != G.cols()) throw ConfigError("gauge membership dimension mismatch");
    if (!(scale >= 0.0)) throw ConfigError("gauge scale must be non-negative");
    const Vector& g = poly.offsets(which);
    const Vector lhs = G * v;
    for (Eigen::Index i = 0; i < lhs.size(); ++i) {
        const double rhs = scale * g[i];
        if (lhs[i] > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) return false;
    }
    return true;
}

double minimal_gauge(const UnitBallPolytope& poly, GaugeKind which, const Vector& v)
{
    const Matrix& G = poly.matrix(which);
    if (v.size() != G.cols()) throw ConfigError("gauge dimension mismatch");
    if (!all_finite(v)) throw NumericError("gauge of a non-finite vector");
    return std::max(0.0, (G * v).cwiseQuotient(poly.offsets(which)).maxCoeff());
}

} // namespace cloudmpc
