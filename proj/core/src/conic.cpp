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
#include "cloudmpc/conic.hpp"

#include "cloudmpc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace cloudmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Strictly interior slacks of every barrier term at one point.
struct Slacks {
    Vector rows;
    Vector lower;
    Vector upper;
    Vector cone_gap;  // t - ||y||
    Vector cone_sum;  // t + ||y||
    std::vector<Vector> y;
    Vector t;
};

/// Barrier form with finite box bounds and no fixed variables.
class Barrier {
public:
    Vector c;
    Matrix A;
    Vector b;
    std::vector<SecondOrderCone> cones;
    Vector lo;
    Vector hi;

    int size() const { return static_cast<int>(c.size()); }

    double nu() const { return static_cast<double>(A.rows() + 2 * c.size() + 2 * cones.size()); }

    bool slacks(const Vector& z, Slacks& s) const
    {
        s.rows = b - A * z;
        s.lower = z - lo;
        s.upper = hi - z;
        const auto nc = static_cast<Eigen::Index>(cones.size());
        s.cone_gap.resize(nc);
        s.cone_sum.resize(nc);
        s.t.resize(nc);
        s.y.resize(cones.size());
        for (std::size_t k = 0; k < cones.size(); ++k) {
            const auto& cone = cones[k];
            s.y[k] = cone.F * z + cone.f;
            const double t = cone.g.dot(z) + cone.h;
            const double ny = s.y[k].norm();
            s.t[k] = t;
            s.cone_gap[k] = t - ny;
            s.cone_sum[k] = t + ny;
        }
        auto positive = [](const Vector& v) { return v.size() == 0 || v.minCoeff() > 0.0; };
        return positive(s.rows) && positive(s.lower) && positive(s.upper) && positive(s.cone_gap) &&
               all_finite(s.rows) && all_finite(s.cone_sum);
    }

    void derivatives(const Vector& z, double kappa, const Slacks& s, Vector& grad, Matrix& H) const
    {
        const int n = size();
        grad = kappa * c;
        H.setZero(n, n);
        if (A.rows() > 0) {
            const Vector d = s.rows.cwiseInverse();
            grad.noalias() += A.transpose() * d;
            const Matrix W = d.asDiagonal() * A;
            H.selfadjointView<Eigen::Lower>().rankUpdate(W.transpose(), 1.0);
        }
        const Vector dl = s.lower.cwiseInverse();
        const Vector du = s.upper.cwiseInverse();
        grad += du - dl;
        H.diagonal() += dl.cwiseAbs2() + du.cwiseAbs2();

        if (!cones.empty()) {
            Eigen::Index total_rows = 0;
            for (const auto& cone : cones) total_rows += cone.F.rows();
            Matrix Fs(total_rows, n);
            Matrix Gs(static_cast<Eigen::Index>(cones.size()), n);
            Matrix Vs(static_cast<Eigen::Index>(cones.size()), n);
            Eigen::Index r = 0;
            for (std::size_t k = 0; k < cones.size(); ++k) {
                const auto& cone = cones[k];
                const double D = s.cone_gap[k] * s.cone_sum[k];
                const double w = std::sqrt(2.0 / D);
                const auto kr = cone.F.rows();
                Fs.middleRows(r, kr) = w * cone.F;
                r += kr;
                Gs.row(static_cast<Eigen::Index>(k)) = w * cone.g.transpose();
                // gradient of D is 2 (t g - F^T y)
                const Vector dD = 2.0 * (s.t[k] * cone.g - cone.F.transpose() * s.y[k]);
                grad -= dD / D;
                Vs.row(static_cast<Eigen::Index>(k)) = dD.transpose() / D;
            }
            auto Hl = H.selfadjointView<Eigen::Lower>();
            Hl.rankUpdate(Fs.transpose(), 1.0);
            Hl.rankUpdate(Gs.transpose(), -1.0);
            Hl.rankUpdate(Vs.transpose(), 1.0);
        }
        (void)z;
    }

    /// barrier(z_new) - barrier(z_old), summed term by term for accuracy.
    static double barrier_change(const Slacks& old_s, const Slacks& new_s)
    {
        auto term = [](const Vector& a, const Vector& b) {
            return a.size() == 0 ? 0.0 : (a.array() / b.array()).log().sum();
        };
        return term(old_s.rows, new_s.rows) + term(old_s.lower, new_s.lower) +
               term(old_s.upper, new_s.upper) + term(old_s.cone_gap, new_s.cone_gap) +
               term(old_s.cone_sum, new_s.cone_sum);
    }

    /// Largest step along dz keeping the linear and box slacks positive.
    double linear_step_limit(const Vector& dz, const Slacks& s) const
    {
        double limit = kInf;
        if (A.rows() > 0) {
            const Vector Ad = A * dz;
            for (Eigen::Index i = 0; i < Ad.size(); ++i)
                if (Ad[i] > 0.0) limit = std::min(limit, s.rows[i] / Ad[i]);
        }
        for (Eigen::Index i = 0; i < dz.size(); ++i) {
            if (dz[i] > 0.0) limit = std::min(limit, s.upper[i] / dz[i]);
            if (dz[i] < 0.0) limit = std::min(limit, -s.lower[i] / dz[i]);
        }
        return limit;
    }
};

Vector solve_newton_system(Matrix& H, const Vector& rhs)
{
    const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    double reg = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
        if (reg > 0.0) H.diagonal().array() += reg;
        Eigen::LLT<Matrix> llt(H);
        if (llt.info() == Eigen::Success) {
            Vector dz = llt.solve(rhs);
            if (all_finite(dz)) return dz;
        }
        if (reg > 0.0) H.diagonal().array() -= reg;
        reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
    }
    throw NumericError("barrier Newton system is singular");
}

enum class CenterResult { Converged, Stopped, Budget };

/**
 * Newton centering of kappa c^T z + barrier(z). `stop` is polled after every
 * accepted step and ends the whole solve early when it returns true.
 */
CenterResult center(const Barrier& B, Vector& z, double kappa, int& budget,
                    const std::function<bool(const Vector&)>& stop)
{
    Slacks s;
    if (!B.slacks(z, s)) throw NumericError("barrier iterate left the domain");
    Vector grad;
    Matrix H;
    Slacks trial;
    for (int iter = 0; iter < 200; ++iter) {
        if (budget <= 0) return CenterResult::Budget;
        --budget;
        B.derivatives(z, kappa, s, grad, H);
        if (!all_finite(grad)) throw NumericError("non-finite barrier gradient");
        const Vector dz = solve_newton_system(H, -grad);
        const double slope = grad.dot(dz);
        if (-slope / 2.0 <= 1e-10) return CenterResult::Converged;

        double step = std::min(1.0, 0.99 * B.linear_step_limit(dz, s));
        bool accepted = false;
        for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
            const Vector zn = z + step * dz;
            if (!B.slacks(zn, trial)) continue;
            const double change = kappa * step * B.c.dot(dz) + Barrier::barrier_change(s, trial);
            if (change <= 0.25 * step * slope) {
                z = zn;
                std::swap(s, trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) return CenterResult::Converged;
        if (stop && stop(z)) return CenterResult::Stopped;
    }
    return CenterResult::Converged;
}

/// Barrier path following to nu/kappa <= gap_target(z).
CenterResult follow_path(const Barrier& B, Vector& z, const ConicOptions& opt, int& budget,
                         const std::function<double(const Vector&)>& gap_target,
                         const std::function<bool(const Vector&)>& stop)
{
    const double nu = B.nu();
    double kappa = std::clamp(nu / (1.0 + std::abs(B.c.dot(z))), 1e-2, 1e4);
    for (int stage = 0; stage < 200; ++stage) {
        const auto r = center(B, z, kappa, budget, stop);
        if (r != CenterResult::Converged) return r;
        if (nu / kappa <= gap_target(z)) return CenterResult::Converged;
        kappa *= opt.kappa_growth;
    }
    return CenterResult::Converged;
}

double row_violation(const Barrier& B, const Vector& z)
{
    double v = 0.0;
    if (B.A.rows() > 0) v = std::max(v, (B.A * z - B.b).maxCoeff());
    for (const auto& cone : B.cones)
        v = std::max(v, (cone.F * z + cone.f).norm() - cone.g.dot(z) - cone.h);
    return v;
}

/// Largest magnitude among the row and cone terms; rounding in the slacks scales with it.
double row_magnitude(const Barrier& B, const Vector& z)
{
    double m = 0.0;
    if (B.A.rows() > 0) m = std::max(m, (B.A * z).cwiseAbs().maxCoeff() + B.b.cwiseAbs().maxCoeff());
    for (const auto& cone : B.cones)
        m = std::max(m, (cone.F * z + cone.f).norm() + std::abs(cone.g.dot(z) + cone.h));
    return m;
}

} // namespace

double conic_violation(const ConicProgram& P, const Vector& z)
{
    double v = 0.0;
    if (P.A.rows() > 0) v = std::max(v, (P.A * z - P.b).maxCoeff());
    for (const auto& cone : P.cones) v = std::max(v, (cone.F * z + cone.f).norm() - cone.g.dot(z) - cone.h);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        v = std::max(v, P.lower[i] - z[i]);
        v = std::max(v, z[i] - P.upper[i]);
    }
    return v;
}

ConicResult solve_conic(const ConicProgram& P, const ConicOptions& opt, const Vector* start)
{
    const int n = P.num_variables();
    if (P.A.cols() != n && P.A.rows() > 0) throw ConfigError("conic program: A has wrong width");
    if (P.b.size() != P.A.rows()) throw ConfigError("conic program: b has wrong length");
    if (P.lower.size() != n || P.upper.size() != n) throw ConfigError("conic program: bounds have wrong length");
    for (const auto& cone : P.cones)
        if (cone.F.cols() != n || cone.f.size() != cone.F.rows() || cone.g.size() != n)
            throw ConfigError("conic program: cone has wrong dimensions");
    if (start && start->size() != n) throw ConfigError("conic program: start has wrong length");

    ConicResult result;
    Vector z_full = start ? *start : Vector::Zero(n);
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (P.lower[i] > P.upper[i]) {
            result.status = ConicStatus::Infeasible;
            result.z = z_full;
            result.max_violation = P.lower[i] - P.upper[i];
            return result;
        }
        if (P.lower[i] == P.upper[i])
            z_full[i] = P.lower[i];
        else
            free_idx.push_back(i);
    }
    const auto nf = static_cast<Eigen::Index>(free_idx.size());

    // Reduced problem over the free variables.
    Vector fixed_part = z_full;
    for (auto i : free_idx) fixed_part[i] = 0.0;
    Barrier B;
    B.c.resize(nf);
    B.lo.resize(nf);
    B.hi.resize(nf);
    B.A.resize(P.A.rows(), nf);
    for (Eigen::Index k = 0; k < nf; ++k) {
        const auto i = free_idx[static_cast<std::size_t>(k)];
        B.c[k] = P.c[i];
        B.lo[k] = std::isfinite(P.lower[i]) ? P.lower[i] : -opt.variable_cap;
        B.hi[k] = std::isfinite(P.upper[i]) ? P.upper[i] : opt.variable_cap;
        if (P.A.rows() > 0) B.A.col(k) = P.A.col(i);
    }
    B.b = P.A.rows() > 0 ? Vector(P.b - P.A * fixed_part) : Vector(P.b);
    for (const auto& cone : P.cones) {
        SecondOrderCone rc;
        rc.F.resize(cone.F.rows(), nf);
        rc.g.resize(nf);
        for (Eigen::Index k = 0; k < nf; ++k) {
            const auto i = free_idx[static_cast<std::size_t>(k)];
            rc.F.col(k) = cone.F.col(i);
            rc.g[k] = cone.g[i];
        }
        rc.f = cone.f + cone.F * fixed_part;
        rc.h = cone.h + cone.g.dot(fixed_part);
        B.cones.push_back(std::move(rc));
    }

    auto finish = [&](const Vector& zr, ConicStatus status) {
        for (Eigen::Index k = 0; k < nf; ++k) z_full[free_idx[static_cast<std::size_t>(k)]] = zr[k];
        result.z = z_full;
        result.objective = P.c.dot(z_full);
        result.max_violation = conic_violation(P, z_full);
        result.status = status;
        if (!all_finite(z_full)) throw NumericError("conic solver produced a non-finite point");
        return result;
    };

    if (nf == 0) {
        const Vector empty(0);
        const double v = conic_violation(P, z_full);
        return finish(empty, v <= opt.feas_tol ? ConicStatus::Optimal : ConicStatus::Infeasible);
    }

    Vector z(nf);
    for (Eigen::Index k = 0; k < nf; ++k) {
        const double lo = B.lo[k];
        const double hi = B.hi[k];
        const double margin = std::min(0.25 * (hi - lo), 1e-6 * std::max({1.0, std::abs(lo), std::abs(hi)}));
        z[k] = std::clamp(z_full[free_idx[static_cast<std::size_t>(k)]], lo + margin, hi - margin);
    }

    int budget = opt.max_newton;
    Slacks probe;
    if (!B.slacks(z, probe)) {
        // Feasibility phase: minimise sigma with every row and cone relaxed by sigma.
        Barrier F;
        F.c = Vector::Zero(nf + 1);
        F.c[nf] = 1.0;
        F.A.resize(B.A.rows(), nf + 1);
        if (B.A.rows() > 0) {
            F.A.leftCols(nf) = B.A;
            F.A.col(nf).setConstant(-1.0);
        }
        F.b = B.b;
        for (const auto& cone : B.cones) {
            SecondOrderCone rc;
            rc.F.resize(cone.F.rows(), nf + 1);
            rc.F.leftCols(nf) = cone.F;
            rc.F.col(nf).setZero();
            rc.f = cone.f;
            rc.g.resize(nf + 1);
            rc.g.head(nf) = cone.g;
            rc.g[nf] = 1.0;
            rc.h = cone.h;
            F.cones.push_back(std::move(rc));
        }
        F.lo.resize(nf + 1);
        F.hi.resize(nf + 1);
        F.lo.head(nf) = B.lo;
        F.hi.head(nf) = B.hi;
        Vector zs(nf + 1);
        zs.head(nf) = z;
        zs[nf] = std::max(0.0, row_violation(B, z)) + 1.0 + 1e-8 * row_magnitude(B, z);
        F.lo[nf] = -1.0;
        F.hi[nf] = std::max(opt.variable_cap, 2.0 * zs[nf]);
        const double stop_margin = 1e-3;
        const auto outcome = follow_path(
            F, zs, opt, budget, [&](const Vector&) { return 1e-3 * opt.feas_tol; },
            [&](const Vector& v) { return v[nf] < -stop_margin; });
        result.newton_iterations = opt.max_newton - budget;
        const double sigma = zs[nf];
        result.phase1_sigma = sigma;
        z = zs.head(nf);
        if (outcome == CenterResult::Budget && sigma >= 0.0) return finish(z, ConicStatus::IterationLimit);
        if (sigma > 0.5 * opt.feas_tol) return finish(z, ConicStatus::Infeasible);
        if (!B.slacks(z, probe)) {
            // Feasible only up to tolerance: relax within feas_tol so the barrier has an interior.
            B.b.array() += 0.75 * opt.feas_tol;
            for (auto& cone : B.cones) cone.h += 0.75 * opt.feas_tol;
            if (!B.slacks(z, probe)) return finish(z, ConicStatus::Infeasible);
        }
    }

    const auto outcome = follow_path(
        B, z, opt, budget, [&](const Vector& v) { return opt.gap_tol * std::max(1.0, std::abs(B.c.dot(v))); },
        nullptr);
    result.newton_iterations = opt.max_newton - budget;
    return finish(z, outcome == CenterResult::Budget ? ConicStatus::IterationLimit : ConicStatus::Optimal);
}

} // namespace cloudmpc
