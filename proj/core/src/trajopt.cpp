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
#include "cloudmpc/trajopt.hpp"

#include "cloudmpc/conic.hpp"
#include "cloudmpc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace cloudmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Mode { Hard, Penalty, Feasibility };

void validate(const TrajOptProblem& p)
{
    if (!p.model || !p.cost) throw ConfigError("trajectory problem needs a model and a cost");
    if (p.stepper == StepperKind::True) throw ConfigError("trajectory problems use the cloud or local stepper");
    const int n = p.model->state_dim();
    const int m = p.model->control_dim();
    if (p.cost->state_dim() != n || p.cost->control_dim() != m)
        throw ConfigError("cost and model dimensions differ");
    if (p.start < 0 || p.start >= p.horizon()) throw ConfigError("trajectory window is empty");
    if (p.x0.size() != n) throw ConfigError("initial state has the wrong dimension");
    if (!all_finite(p.x0)) throw NumericError("initial state is not finite");
    if (p.u_lower.size() != m || p.u_upper.size() != m) throw ConfigError("control bounds have the wrong dimension");
    if (p.num_alpha < 0 || p.num_beta < 0) throw ConfigError("negative number of scale variables");
    for (const auto& row : p.rows) {
        const bool has_state = row.state_time >= 0 && row.state_coeff.size() > 0;
        const bool has_control = row.control_time >= 0 && row.control_coeff.size() > 0;
        if (has_state && (row.state_time < p.start || row.state_time > p.horizon() || row.state_coeff.size() != n))
            throw ConfigError("row references a state outside the window");
        if (has_control &&
            (row.control_time < p.start || row.control_time >= p.horizon() || row.control_coeff.size() != m))
            throw ConfigError("row references a control outside the window");
        for (const auto& term : row.alpha)
            if (term.index < 0 || term.index >= p.num_alpha) throw ConfigError("row references a missing alpha");
        for (const auto& term : row.beta)
            if (term.index < 0 || term.index >= p.num_beta) throw ConfigError("row references a missing beta");
    }
}

Vector flatten(std::span<const Vector> u, int m)
{
    Vector out(static_cast<Eigen::Index>(u.size()) * m);
    for (std::size_t i = 0; i < u.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * m, m) = u[i];
    return out;
}

Trajectory unflatten(const Vector& u, int m)
{
    Trajectory out(static_cast<std::size_t>(u.size() / m));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = u.segment(static_cast<Eigen::Index>(i) * m, m);
    return out;
}

/// States along a reference control sequence and their affine sensitivity x_i ~ offset_i + S_i u.
struct Linearization {
    Trajectory states;
    std::vector<Matrix> S;
    std::vector<Vector> offset;
};

Linearization linearize(const TrajOptProblem& p, const Vector& u_ref)
{
    const int n = p.model->state_dim();
    const int m = p.model->control_dim();
    const int H = p.steps();
    const Trajectory controls = unflatten(u_ref, m);
    Linearization lin;
    lin.states = rollout(*p.model, p.stepper, p.x0, controls, std::nullopt, p.start);
    for (const auto& x : lin.states)
        if (!all_finite(x)) throw NumericError("dynamics produced a non-finite state");
    lin.S.assign(static_cast<std::size_t>(H) + 1, Matrix::Zero(n, H * m));
    Matrix fx, fu;
    for (int i = 0; i < H; ++i) {
        const auto& stage = p.model->stage(p.start + i);
        Matrix Jx = stage.A();
        Matrix Ju = stage.B();
        if (p.stepper == StepperKind::Cloud && !stage.linear()) {
            stage.residual_jacobians(lin.states[static_cast<std::size_t>(i)], controls[static_cast<std::size_t>(i)],
                                     fx, fu);
            if (!fx.allFinite() || !fu.allFinite()) throw NumericError("non-finite dynamics Jacobian");
            Jx += fx;
            Ju += fu;
        }
        auto& next = lin.S[static_cast<std::size_t>(i) + 1];
        next.leftCols(i * m) = Jx * lin.S[static_cast<std::size_t>(i)].leftCols(i * m);
        next.middleCols(i * m, m) = Ju;
    }
    lin.offset.resize(lin.S.size());
    for (std::size_t i = 0; i < lin.S.size(); ++i) lin.offset[i] = lin.states[i] - lin.S[i] * u_ref;
    return lin;
}

/// Index map of the convex subproblem's decision vector.
struct Layout {
    int H = 0, m = 0;
    int u = 0, nu = 0;
    int alpha = 0, na = 0;
    int beta = 0, nb = 0;
    int s = 0, ns = 0;   // state epigraphs for start+1 .. N-1
    int r = 0, nr = 0;   // control epigraphs for start .. N-1
    int sN = 0, nsN = 0; // terminal epigraph
    int slack = 0, nslack = 0;
    int total = 0;

    Layout(const TrajOptProblem& p, Mode mode)
    {
        H = p.steps();
        m = p.model->control_dim();
        const bool epi = mode != Mode::Feasibility;
        nu = H * m;
        na = p.num_alpha;
        nb = p.num_beta;
        ns = epi && !p.cost->Q_sqrt().isZero(0.0) ? H - 1 : 0;
        nr = epi && !p.cost->R_sqrt().isZero(0.0) ? H : 0;
        nsN = epi && !p.cost->P_sqrt().isZero(0.0) ? 1 : 0;
        nslack = mode == Mode::Penalty ? static_cast<int>(p.rows.size()) : (mode == Mode::Feasibility ? 1 : 0);
        u = 0;
        alpha = u + nu;
        beta = alpha + na;
        s = beta + nb;
        r = s + ns;
        sN = r + nr;
        slack = sN + nsN;
        total = slack + nslack;
    }
};

struct Subproblem {
    ConicProgram program;
    bool constant_infeasible = false;
    double constant_cost = 0.0;
};

Subproblem build(const TrajOptProblem& p, const Linearization& lin, const Layout& L, Mode mode, double mu,
                 const Vector& u_lo, const Vector& u_hi, const SolverOptions& opt)
{
    const int n = p.model->state_dim();
    const int m = L.m;
    Subproblem sub;
    auto& prog = sub.program;
    prog.c = Vector::Zero(L.total);
    prog.lower = Vector::Constant(L.total, -kInf);
    prog.upper = Vector::Constant(L.total, kInf);
    prog.lower.segment(L.u, L.nu) = u_lo;
    prog.upper.segment(L.u, L.nu) = u_hi;
    prog.lower.segment(L.alpha, L.na).setZero();
    prog.lower.segment(L.beta, L.nb).setZero();
    prog.lower.segment(L.slack, L.nslack).setZero();
    prog.c.segment(L.s, L.ns).setOnes();
    prog.c.segment(L.r, L.nr).setOnes();
    prog.c.segment(L.sN, L.nsN).setOnes();
    if (mode == Mode::Penalty) prog.c.segment(L.slack, L.nslack).setConstant(mu);
    if (mode == Mode::Feasibility) prog.c[L.slack] = 1.0;

    const Matrix& Qs = p.cost->Q_sqrt();
    const Matrix& Rs = p.cost->R_sqrt();
    const Matrix& Ps = p.cost->P_sqrt();
    sub.constant_cost = mode == Mode::Feasibility ? 0.0 : (Qs * p.x0).norm();

    auto state_cone = [&](const Matrix& W, std::size_t i, int var) {
        SecondOrderCone cone;
        cone.F = Matrix::Zero(W.rows(), L.total);
        cone.F.middleCols(L.u, L.nu) = W * lin.S[i];
        cone.f = W * lin.offset[i];
        cone.g = Vector::Zero(L.total);
        cone.g[var] = 1.0;
        prog.cones.push_back(std::move(cone));
    };
    for (int k = 0; k < L.ns; ++k) state_cone(Qs, static_cast<std::size_t>(k) + 1, L.s + k);
    for (int k = 0; k < L.nr; ++k) {
        SecondOrderCone cone;
        cone.F = Matrix::Zero(Rs.rows(), L.total);
        cone.F.middleCols(L.u + k * m, m) = Rs;
        cone.f = Vector::Zero(Rs.rows());
        cone.g = Vector::Zero(L.total);
        cone.g[L.r + k] = 1.0;
        prog.cones.push_back(std::move(cone));
    }
    if (L.nsN > 0) state_cone(Ps, static_cast<std::size_t>(L.H), L.sN);

    std::vector<Vector> coeffs;
    std::vector<double> rhs;
    for (std::size_t j = 0; j < p.rows.size(); ++j) {
        const auto& row = p.rows[j];
        Vector a = Vector::Zero(L.total);
        double b = row.rhs;
        if (row.state_time >= 0 && row.state_coeff.size() == n) {
            const auto i = static_cast<std::size_t>(row.state_time - p.start);
            a.segment(L.u, L.nu) += lin.S[i].transpose() * row.state_coeff;
            b -= row.state_coeff.dot(lin.offset[i]);
        }
        if (row.control_time >= 0 && row.control_coeff.size() == m)
            a.segment(L.u + (row.control_time - p.start) * m, m) += row.control_coeff;
        for (const auto& term : row.alpha) a[L.alpha + term.index] += term.coeff;
        for (const auto& term : row.beta) a[L.beta + term.index] += term.coeff;
        if (mode == Mode::Penalty) a[L.slack + static_cast<int>(j)] = -1.0;
        if (mode == Mode::Feasibility) a[L.slack] = -1.0;
        if (mode == Mode::Hard && a.isZero(0.0)) {
            if (b < -opt.feas_tol) sub.constant_infeasible = true;
            continue;
        }
        coeffs.push_back(std::move(a));
        rhs.push_back(b);
    }
    prog.A.resize(static_cast<Eigen::Index>(coeffs.size()), L.total);
    prog.b.resize(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        prog.A.row(static_cast<Eigen::Index>(j)) = coeffs[j].transpose();
        prog.b[static_cast<Eigen::Index>(j)] = rhs[j];
    }
    return sub;
}

/// Row residuals (lhs - rhs) along exact states.
Vector row_residuals(const TrajOptProblem& p, const Trajectory& states, std::span<const Vector> controls,
                     const Vector& alpha, const Vector& beta)
{
    Vector r(static_cast<Eigen::Index>(p.rows.size()));
    for (std::size_t j = 0; j < p.rows.size(); ++j) {
        const auto& row = p.rows[j];
        double lhs = 0.0;
        if (row.state_time >= 0 && row.state_coeff.size() > 0)
            lhs += row.state_coeff.dot(states[static_cast<std::size_t>(row.state_time - p.start)]);
        if (row.control_time >= 0 && row.control_coeff.size() > 0)
            lhs += row.control_coeff.dot(controls[static_cast<std::size_t>(row.control_time - p.start)]);
        for (const auto& term : row.alpha) lhs += term.coeff * alpha[term.index];
        for (const auto& term : row.beta) lhs += term.coeff * beta[term.index];
        r[static_cast<Eigen::Index>(j)] = lhs - row.rhs;
    }
    return r;
}

/// Evaluation of a candidate along the exact stepper.
struct Evaluation {
    Trajectory states;
    double cost = 0.0;
    double violation_sum = 0.0;
    double violation_max = 0.0;
};

Evaluation evaluate(const TrajOptProblem& p, const Vector& u, const Vector& alpha, const Vector& beta)
{
    const Trajectory controls = unflatten(u, p.model->control_dim());
    Evaluation ev;
    ev.states = rollout(*p.model, p.stepper, p.x0, controls, std::nullopt, p.start);
    for (const auto& x : ev.states)
        if (!all_finite(x)) throw NumericError("dynamics produced a non-finite state");
    ev.cost = cost_to_go(*p.cost, ev.states, controls, p.start);
    if (!std::isfinite(ev.cost)) throw NumericError("cost evaluated to a non-finite value");
    const Vector r = row_residuals(p, ev.states, controls, alpha, beta);
    for (Eigen::Index j = 0; j < r.size(); ++j) {
        const double v = std::max(0.0, r[j]);
        ev.violation_sum += v;
        ev.violation_max = std::max(ev.violation_max, v);
    }
    return ev;
}

/// Strictly interior-leaning start for the subproblem from the current iterate.
Vector pack_start(const TrajOptProblem& p, const Layout& L, const Linearization& lin, const Vector& u,
                  const Vector& alpha, const Vector& beta, Mode mode)
{
    Vector z = Vector::Zero(L.total);
    z.segment(L.u, L.nu) = u;
    z.segment(L.alpha, L.na) = alpha.cwiseMax(0.0);
    z.segment(L.beta, L.nb) = beta.cwiseMax(0.0);
    const int m = L.m;
    auto pad = [](double v) { return v + 1e-3 * (1.0 + v); };
    for (int k = 0; k < L.ns; ++k)
        z[L.s + k] = pad((p.cost->Q_sqrt() * lin.states[static_cast<std::size_t>(k) + 1]).norm());
    for (int k = 0; k < L.nr; ++k) z[L.r + k] = pad((p.cost->R_sqrt() * u.segment(k * m, m)).norm());
    if (L.nsN > 0) z[L.sN] = pad((p.cost->P_sqrt() * lin.states.back()).norm());
    if (mode != Mode::Hard) {
        const Vector r = row_residuals(p, lin.states, unflatten(u, m), alpha, beta);
        if (mode == Mode::Penalty)
            for (Eigen::Index j = 0; j < r.size(); ++j) z[L.slack + j] = pad(std::max(0.0, r[j]));
        else
            z[L.slack] = pad(r.size() > 0 ? std::max(0.0, r.maxCoeff()) : 0.0);
    }
    return z;
}

ConicOptions conic_options(const SolverOptions& opt)
{
    ConicOptions c;
    c.feas_tol = opt.feas_tol;
    c.gap_tol = 1e-3 * opt.opt_tol;
    c.max_newton = opt.max_iterations;
    c.variable_cap = opt.variable_cap;
    return c;
}

struct Iterate {
    Vector u;
    Vector alpha;
    Vector beta;
};

Iterate unpack(const Layout& L, const Vector& z)
{
    return {z.segment(L.u, L.nu), z.segment(L.alpha, L.na).cwiseMax(0.0), z.segment(L.beta, L.nb).cwiseMax(0.0)};
}

TrajOptSolution finalize(const TrajOptProblem& p, const Iterate& it, const SolverOptions& opt, SolveStatus status)
{
    TrajOptSolution sol;
    sol.controls = unflatten(it.u, p.model->control_dim());
    sol.alpha = it.alpha;
    sol.beta = it.beta;
    sol.states = rollout(*p.model, p.stepper, p.x0, sol.controls, std::nullopt, p.start);
    for (const auto& x : sol.states)
        if (!all_finite(x)) throw NumericError("dynamics produced a non-finite state");
    sol.objective = cost_to_go(*p.cost, sol.states, sol.controls, p.start);
    sol.violation = max_violation(p, sol.controls, sol.alpha, sol.beta);
    sol.status = status;
    if (status != SolveStatus::Infeasible && sol.violation > opt.feas_tol) sol.status = SolveStatus::Infeasible;
    return sol;
}

Iterate initial_iterate(const TrajOptProblem& p, const SolverOptions& opt)
{
    const int m = p.model->control_dim();
    const int H = p.steps();
    Iterate it;
    it.u = Vector::Zero(H * m);
    if (opt.warm_start && static_cast<int>(p.warm_controls.size()) == H) it.u = flatten(p.warm_controls, m);
    for (int i = 0; i < H; ++i)
        it.u.segment(i * m, m) = it.u.segment(i * m, m).cwiseMax(p.u_lower).cwiseMin(p.u_upper);
    it.alpha = Vector::Zero(p.num_alpha);
    it.beta = Vector::Zero(p.num_beta);
    if (opt.warm_start && p.warm_alpha.size() == p.num_alpha) it.alpha = p.warm_alpha.cwiseMax(0.0);
    if (opt.warm_start && p.warm_beta.size() == p.num_beta) it.beta = p.warm_beta.cwiseMax(0.0);
    return it;
}

Vector tiled(const Vector& v, int H)
{
    Vector out(v.size() * H);
    for (int i = 0; i < H; ++i) out.segment(i * v.size(), v.size()) = v;
    return out;
}

TrajOptSolution solve_convex(const TrajOptProblem& p, const SolverOptions& opt)
{
    const Iterate it0 = initial_iterate(p, opt);
    const Layout L(p, Mode::Hard);
    const Linearization lin = linearize(p, it0.u);
    const Subproblem sub =
        build(p, lin, L, Mode::Hard, 0.0, tiled(p.u_lower, p.steps()), tiled(p.u_upper, p.steps()), opt);
    if (sub.constant_infeasible) return finalize(p, it0, opt, SolveStatus::Infeasible);
    const Vector z0 = pack_start(p, L, lin, it0.u, it0.alpha, it0.beta, Mode::Hard);
    const ConicResult res = solve_conic(sub.program, conic_options(opt), &z0);
    const SolveStatus status = res.status == ConicStatus::Infeasible    ? SolveStatus::Infeasible
                               : res.status == ConicStatus::Optimal      ? SolveStatus::Optimal
                                                                         : SolveStatus::FeasibleSuboptimal;
    auto sol = finalize(p, unpack(L, res.z), opt, status);
    sol.newton_iterations = res.newton_iterations;
    return sol;
}

/// Trust-region SCP for nonlinear dynamics.
class ScpSolver {
public:
    ScpSolver(const TrajOptProblem& p, const SolverOptions& opt) : p_(p), opt_(opt)
    {
        const int m = p.model->control_dim();
        lo_ = tiled(p.u_lower, p.steps());
        hi_ = tiled(p.u_upper, p.steps());
        initial_radius_ = opt.trust_radius;
        if (initial_radius_ <= 0.0) {
            initial_radius_ = 10.0;
            double range = 0.0;
            for (int i = 0; i < m; ++i)
                if (std::isfinite(p.u_upper[i] - p.u_lower[i])) range = std::max(range, p.u_upper[i] - p.u_lower[i]);
            if (range > 0.0) initial_radius_ = 0.5 * range;
        }
    }

    TrajOptSolution run()
    {
        Iterate it = initial_iterate(p_, opt_);
        optimize(it, opt_.penalty_initial);
        if (!best_) {
            if (!restore_feasibility(it)) {
                auto sol = finalize(p_, it, opt_, SolveStatus::Infeasible);
                sol.newton_iterations = newton_;
                sol.outer_iterations = outer_;
                return sol;
            }
            optimize(it, opt_.penalty_max);
        }
        auto sol = finalize(p_, *best_, opt_, SolveStatus::FeasibleSuboptimal);
        sol.newton_iterations = newton_;
        sol.outer_iterations = outer_;
        return sol;
    }

private:
    void consider(const Iterate& it, const Evaluation& ev)
    {
        if (ev.violation_max <= opt_.feas_tol && (!best_ || ev.cost < best_cost_)) {
            best_ = it;
            best_cost_ = ev.cost;
        }
    }

    std::pair<Vector, Vector> trust_box(const Vector& u, double radius) const
    {
        const Vector lo = lo_.cwiseMax((u.array() - radius).matrix());
        const Vector hi = hi_.cwiseMin((u.array() + radius).matrix());
        return {lo, hi};
    }

    /// Exact-penalty SCP with the penalty raised until the iterate is feasible.
    void optimize(Iterate& it, double mu)
    {
        double radius = initial_radius_;
        Evaluation ev = evaluate(p_, it.u, it.alpha, it.beta);
        consider(it, ev);
        const Layout L(p_, Mode::Penalty);
        while (outer_ < opt_.max_outer_iterations) {
            ++outer_;
            const double merit = ev.cost + mu * ev.violation_sum;
            const Linearization lin = linearize(p_, it.u);
            const auto [lo, hi] = trust_box(it.u, radius);
            const Subproblem sub = build(p_, lin, L, Mode::Penalty, mu, lo, hi, opt_);
            const Vector z0 = pack_start(p_, L, lin, it.u, it.alpha, it.beta, Mode::Penalty);
            const ConicResult res = solve_conic(sub.program, conic_options(opt_), &z0);
            newton_ += res.newton_iterations;
            const double predicted = merit - (res.objective + sub.constant_cost);
            const bool stationary = res.status != ConicStatus::Infeasible &&
                                    predicted <= 1e-2 * opt_.opt_tol * (1.0 + std::abs(merit));
            if (stationary || radius < 1e-10 * (1.0 + it.u.cwiseAbs().maxCoeff())) {
                if (ev.violation_max <= opt_.feas_tol || mu >= opt_.penalty_max) return;
                mu = std::min(opt_.penalty_max, mu * opt_.penalty_growth);
                radius = initial_radius_;
                continue;
            }
            if (res.status == ConicStatus::Infeasible) {
                radius *= 0.25;
                continue;
            }
            const Iterate cand = unpack(L, res.z);
            const Evaluation cev = evaluate(p_, cand.u, cand.alpha, cand.beta);
            const double rho = (merit - (cev.cost + mu * cev.violation_sum)) / predicted;
            if (rho >= 0.1) {
                const double step = (cand.u - it.u).cwiseAbs().maxCoeff();
                it = cand;
                ev = cev;
                consider(it, ev);
                if (rho >= 0.75 && step >= 0.99 * radius) radius *= 2.0;
                if (rho < 0.25) radius *= 0.5;
            } else {
                radius *= 0.25;
            }
        }
    }

    /// Minimises the largest row violation; true when it reaches feas_tol.
    bool restore_feasibility(Iterate& it)
    {
        double radius = initial_radius_;
        const Layout L(p_, Mode::Feasibility);
        Evaluation ev = evaluate(p_, it.u, it.alpha, it.beta);
        for (int k = 0; k < opt_.max_outer_iterations; ++k) {
            if (ev.violation_max <= opt_.feas_tol) {
                consider(it, ev);
                return true;
            }
            ++outer_;
            const Linearization lin = linearize(p_, it.u);
            const auto [lo, hi] = trust_box(it.u, radius);
            const Subproblem sub = build(p_, lin, L, Mode::Feasibility, 0.0, lo, hi, opt_);
            const Vector z0 = pack_start(p_, L, lin, it.u, it.alpha, it.beta, Mode::Feasibility);
            const ConicResult res = solve_conic(sub.program, conic_options(opt_), &z0);
            newton_ += res.newton_iterations;
            const double predicted = ev.violation_max - std::max(0.0, res.objective);
            if (predicted <= 1e-9 * (1.0 + ev.violation_max) || radius < 1e-10) break;
            const Iterate cand = unpack(L, res.z);
            const Evaluation cev = evaluate(p_, cand.u, cand.alpha, cand.beta);
            const double rho = (ev.violation_max - cev.violation_max) / predicted;
            if (rho >= 0.1) {
                it = cand;
                ev = cev;
                if (rho >= 0.75) radius *= 2.0;
            } else {
                radius *= 0.25;
            }
        }
        if (ev.violation_max <= opt_.feas_tol) {
            consider(it, ev);
            return true;
        }
        return false;
    }

    const TrajOptProblem& p_;
    const SolverOptions& opt_;
    Vector lo_, hi_;
    double initial_radius_ = 1.0;
    std::optional<Iterate> best_;
    double best_cost_ = kInf;
    int newton_ = 0;
    int outer_ = 0;
};

} // namespace

std::string to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleSuboptimal: return "feasible_suboptimal";
    case SolveStatus::Infeasible: return "infeasible";
    }
    return "unknown";
}

double max_violation(const TrajOptProblem& p, std::span<const Vector> controls, const Vector& alpha,
                     const Vector& beta)
{
    validate(p);
    if (static_cast<int>(controls.size()) != p.steps()) throw ConfigError("control sequence has the wrong length");
    if (alpha.size() != p.num_alpha || beta.size() != p.num_beta) throw ConfigError("scale vectors have the wrong length");
    const Trajectory states = rollout(*p.model, p.stepper, p.x0, controls, std::nullopt, p.start);
    double v = 0.0;
    const Vector r = row_residuals(p, states, controls, alpha, beta);
    if (r.size() > 0) v = std::max(v, r.maxCoeff());
    for (const auto& u : controls) {
        v = std::max(v, (p.u_lower - u).maxCoeff());
        v = std::max(v, (u - p.u_upper).maxCoeff());
    }
    if (alpha.size() > 0) v = std::max(v, -alpha.minCoeff());
    if (beta.size() > 0) v = std::max(v, -beta.minCoeff());
    return v;
}

TrajOptSolution solve(const TrajOptProblem& problem, const SolverOptions& options)
{
    validate(problem);
    if (problem.stepper == StepperKind::Local || problem.model->linear()) return solve_convex(problem, options);
    return ScpSolver(problem, options).run();
}

} // namespace cloudmpc
