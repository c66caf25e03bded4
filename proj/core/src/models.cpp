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
#include "cloudmpc/models.hpp"

#include "cloudmpc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace cloudmpc {

namespace {

void central_difference(const Nonlinearity::Eval& f, const Vector& x, const Vector& u, Matrix& fx,
                        Matrix& fu)
{
    const Vector f0 = f(x, u);
    const auto n_out = f0.size();
    fx.resize(n_out, x.size());
    fu.resize(n_out, u.size());
    Vector xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        const Vector fp = f(xp, u);
        xp[i] = x[i] - h;
        const Vector fm = f(xp, u);
        xp[i] = x[i];
        fx.col(i) = (fp - fm) / (2.0 * h);
    }
    Vector up = u;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(u[j]));
        up[j] = u[j] + h;
        const Vector fp = f(x, up);
        up[j] = u[j] - h;
        const Vector fm = f(x, up);
        up[j] = u[j];
        fu.col(j) = (fp - fm) / (2.0 * h);
    }
}

double apply(TermFactor::Func func, double v)
{
    switch (func) {
    case TermFactor::Func::Identity: return v;
    case TermFactor::Func::Sin: return std::sin(v);
    case TermFactor::Func::Cos: return std::cos(v);
    }
    return v;
}

double apply_derivative(TermFactor::Func func, double v)
{
    switch (func) {
    case TermFactor::Func::Identity: return 1.0;
    case TermFactor::Func::Sin: return std::cos(v);
    case TermFactor::Func::Cos: return -std::sin(v);
    }
    return 1.0;
}

void check_dims(const SystemModel& model, const Vector& x, const Vector& u)
{
    if (x.size() != model.state_dim() || u.size() != model.control_dim()) {
        std::ostringstream msg;
        msg << "dimension mismatch: got x in R^" << x.size() << ", u in R^" << u.size()
            << ", model expects R^" << model.state_dim() << ", R^" << model.control_dim();
        throw ConfigError(msg.str());
    }
}

} // namespace

Nonlinearity Nonlinearity::zero(int state_dim)
{
    Nonlinearity f;
    f.eval = [state_dim](const Vector&, const Vector&) { return Vector::Zero(state_dim).eval(); };
    f.jacobian = [state_dim](const Vector& x, const Vector& u, Matrix& fx, Matrix& fu) {
        fx = Matrix::Zero(state_dim, x.size());
        fu = Matrix::Zero(state_dim, u.size());
    };
    f.identically_zero = true;
    return f;
}

Nonlinearity make_term_nonlinearity(std::vector<NonlinearTerm> terms, int state_dim, int control_dim)
{
    for (const auto& term : terms) {
        if (term.output < 0 || term.output >= state_dim)
            throw ConfigError("nonlinearity term output index out of range");
        for (const auto& factor : term.factors) {
            const int limit = factor.control ? control_dim : state_dim;
            if (factor.index < 0 || factor.index >= limit)
                throw ConfigError("nonlinearity factor index out of range");
            if (factor.power < 1)
                throw ConfigError("nonlinearity factor power must be a positive integer");
        }
    }
    auto factor_value = [](const TermFactor& fac, const Vector& x, const Vector& u) {
        const double v = fac.control ? u[fac.index] : x[fac.index];
        return std::pow(apply(fac.func, fac.scale * v), fac.power);
    };

    Nonlinearity f;
    const bool all_zero = std::all_of(terms.begin(), terms.end(),
                                      [](const NonlinearTerm& t) { return t.coeff == 0.0; });
    f.identically_zero = all_zero;
    f.eval = [terms, state_dim, factor_value](const Vector& x, const Vector& u) {
        Vector out = Vector::Zero(state_dim);
        for (const auto& term : terms) {
            double value = term.coeff;
            for (const auto& fac : term.factors) value *= factor_value(fac, x, u);
            out[term.output] += value;
        }
        return out;
    };
    f.jacobian = [terms, state_dim, factor_value](const Vector& x, const Vector& u, Matrix& fx,
                                                  Matrix& fu) {
        fx = Matrix::Zero(state_dim, x.size());
        fu = Matrix::Zero(state_dim, u.size());
        for (const auto& term : terms) {
            for (std::size_t k = 0; k < term.factors.size(); ++k) {
                const auto& fac = term.factors[k];
                const double v = fac.control ? u[fac.index] : x[fac.index];
                const double inner = fac.scale * v;
                double d = term.coeff * fac.power * std::pow(apply(fac.func, inner), fac.power - 1) *
                           apply_derivative(fac.func, inner) * fac.scale;
                for (std::size_t j = 0; j < term.factors.size(); ++j)
                    if (j != k) d *= factor_value(term.factors[j], x, u);
                if (fac.control)
                    fu(term.output, fac.index) += d;
                else
                    fx(term.output, fac.index) += d;
            }
        }
    };
    return f;
}

SystemModel::SystemModel(Matrix A, Matrix B, Nonlinearity f, double L_f, double M_f, NormKind norm,
                         std::optional<double> a)
    : A_(std::move(A)), B_(std::move(B)), f_(std::move(f)), L_f_(L_f), M_f_(M_f), norm_(norm)
{
    if (A_.rows() == 0 || A_.rows() != A_.cols())
        throw ConfigError("A must be a non-empty square matrix");
    if (B_.rows() != A_.rows() || B_.cols() == 0)
        throw ConfigError("B must have as many rows as A and at least one column");
    if (!A_.allFinite() || !B_.allFinite())
        throw ConfigError("A and B must be finite");
    if (!f_.eval)
        throw ConfigError("nonlinearity has no evaluator");
    if (!(std::isfinite(L_f_) && L_f_ >= 0.0) || !(std::isfinite(M_f_) && M_f_ >= 0.0))
        throw ConfigError("Lipschitz constants must be finite and non-negative");

    const double computed = induced_norm(A_, norm_);
    if (a) {
        if (std::abs(*a - computed) > 1e-9 * std::max(1.0, computed)) {
            std::ostringstream msg;
            msg << "a = " << *a << " differs from the induced " << to_string(norm_)
                << "-norm of A (" << computed << ")";
            throw ConfigError(msg.str());
        }
    }
    a_ = computed;

    const Vector f00 = f_.eval(Vector::Zero(state_dim()), Vector::Zero(control_dim()));
    if (f00.size() != state_dim())
        throw ConfigError("nonlinearity returns a vector of the wrong dimension");
    if (!all_finite(f00) || f00.cwiseAbs().maxCoeff() > 1e-12)
        throw ConfigError("nonlinearity must vanish at the origin");
}

Vector SystemModel::residual(const Vector& x, const Vector& u) const
{
    if (f_.identically_zero) return Vector::Zero(state_dim());
    return f_.eval(x, u);
}

void SystemModel::residual_jacobians(const Vector& x, const Vector& u, Matrix& fx, Matrix& fu) const
{
    if (f_.jacobian)
        f_.jacobian(x, u, fx, fu);
    else
        central_difference(f_.eval, x, u, fx, fu);
}

Vector step_true(const SystemModel& model, const Vector& x, const Vector& u, const Vector& w)
{
    check_dims(model, x, u);
    if (w.size() != model.state_dim()) throw ConfigError("disturbance dimension mismatch");
    return model.A() * x + model.B() * u + model.residual(x, u) + w;
}

Vector step_cloud(const SystemModel& model, const Vector& x, const Vector& u)
{
    check_dims(model, x, u);
    return model.A() * x + model.B() * u + model.residual(x, u);
}

Vector step_local(const SystemModel& model, const Vector& x, const Vector& u)
{
    check_dims(model, x, u);
    return model.A() * x + model.B() * u;
}

TimeVaryingModel::TimeVaryingModel(SystemModel constant_model)
    : TimeVaryingModel(std::vector<SystemModel>{std::move(constant_model)})
{
}

TimeVaryingModel::TimeVaryingModel(std::vector<SystemModel> stages) : stages_(std::move(stages))
{
    if (stages_.empty()) throw ConfigError("model schedule is empty");
    for (const auto& s : stages_) {
        if (s.state_dim() != stages_.front().state_dim() ||
            s.control_dim() != stages_.front().control_dim())
            throw ConfigError("model schedule mixes dimensions");
        if (s.norm() != stages_.front().norm())
            throw ConfigError("model schedule mixes norm kinds");
        a_ = std::max(a_, s.a());
        L_f_ = std::max(L_f_, s.L_f());
        M_f_ = std::max(M_f_, s.M_f());
    }
}

const SystemModel& TimeVaryingModel::stage(int t) const
{
    if (stages_.size() == 1) return stages_.front();
    if (t < 0 || t >= num_stages()) {
        std::ostringstream msg;
        msg << "model schedule has " << stages_.size() << " stages, requested t = " << t;
        throw ConfigError(msg.str());
    }
    return stages_[static_cast<std::size_t>(t)];
}

bool TimeVaryingModel::linear() const
{
    return std::all_of(stages_.begin(), stages_.end(), [](const SystemModel& s) { return s.linear(); });
}

Trajectory rollout(const TimeVaryingModel& model, StepperKind stepper, const Vector& x0,
                   std::span<const Vector> controls, std::optional<std::span<const Vector>> disturbances,
                   int start)
{
    if ((stepper == StepperKind::True) != disturbances.has_value())
        throw ConfigError("disturbances are required exactly for the true stepper");
    if (disturbances && disturbances->size() < controls.size())
        throw ConfigError("fewer disturbances than controls");
    Trajectory xs;
    xs.reserve(controls.size() + 1);
    xs.push_back(x0);
    for (std::size_t k = 0; k < controls.size(); ++k) {
        const auto& stage = model.stage(start + static_cast<int>(k));
        const Vector& x = xs.back();
        switch (stepper) {
        case StepperKind::True: xs.push_back(step_true(stage, x, controls[k], (*disturbances)[k])); break;
        case StepperKind::Cloud: xs.push_back(step_cloud(stage, x, controls[k])); break;
        case StepperKind::Local: xs.push_back(step_local(stage, x, controls[k])); break;
        }
    }
    return xs;
}

DisturbanceSampler::DisturbanceSampler(int dim, const DisturbanceSpec& spec, NormKind norm,
                                       std::uint64_t seed)
    : dim_(dim), radius_(spec.radius()), shape_(spec.shape), norm_(norm), rng_(seed)
{
    if (!(std::isfinite(spec.omega) && spec.omega >= 0.0))
        throw ConfigError("disturbance bound omega must be finite and non-negative");
    if (!(std::isfinite(radius_) && radius_ >= 0.0))
        throw ConfigError("sampler radius must be finite and non-negative");
}

Vector DisturbanceSampler::unit_direction()
{
    // Draws a point on the unit sphere of the configured norm; for the 1- and
    // inf-norms the construction also yields the uniform interior when scaled.
    Vector d(dim_);
    switch (norm_) {
    case NormKind::Two: {
        std::normal_distribution<double> gauss(0.0, 1.0);
        double len = 0.0;
        while (len < 1e-12) {
            for (int i = 0; i < dim_; ++i) d[i] = gauss(rng_);
            len = d.norm();
        }
        return d / len;
    }
    case NormKind::Inf: {
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int i = 0; i < dim_; ++i) d[i] = unif(rng_);
        std::uniform_int_distribution<int> pick(0, dim_ - 1);
        const int k = pick(rng_);
        d[k] = d[k] < 0.0 ? -1.0 : 1.0;
        return d;
    }
    case NormKind::One: {
        std::exponential_distribution<double> expo(1.0);
        std::bernoulli_distribution sign(0.5);
        double total = 0.0;
        for (int i = 0; i < dim_; ++i) {
            d[i] = expo(rng_);
            total += d[i];
        }
        for (int i = 0; i < dim_; ++i) d[i] = (sign(rng_) ? 1.0 : -1.0) * d[i] / total;
        return d;
    }
    }
    return d;
}

Vector DisturbanceSampler::sample()
{
    if (radius_ == 0.0) return Vector::Zero(dim_);
    Vector w(dim_);
    if (shape_ == DisturbanceSpec::Shape::BallSurface) {
        w = radius_ * unit_direction();
    } else {
        switch (norm_) {
        case NormKind::Two: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            const Vector dir = unit_direction();
            w = radius_ * std::pow(unif(rng_), 1.0 / dim_) * dir;
            break;
        }
        case NormKind::Inf: {
            std::uniform_real_distribution<double> unif(-radius_, radius_);
            for (int i = 0; i < dim_; ++i) w[i] = unif(rng_);
            break;
        }
        case NormKind::One: {
            // n+1 exponential spacings give a uniform point of the simplex interior.
            std::exponential_distribution<double> expo(1.0);
            std::bernoulli_distribution sign(0.5);
            double total = expo(rng_);
            for (int i = 0; i < dim_; ++i) {
                w[i] = expo(rng_);
                total += w[i];
            }
            for (int i = 0; i < dim_; ++i) w[i] = (sign(rng_) ? radius_ : -radius_) * w[i] / total;
            break;
        }
        }
    }
    const double len = vector_norm(w, norm_);
    if (len > radius_) w *= radius_ / len;
    return w;
}

LipschitzEstimate estimate_lipschitz(const SystemModel& model, const SampleBox& box, int n_samples,
                                     std::uint64_t seed)
{
    const int n = model.state_dim();
    const int m = model.control_dim();
    if (box.x_lo.size() != n || box.x_hi.size() != n || box.u_lo.size() != m || box.u_hi.size() != m)
        throw ConfigError("sample box dimension mismatch");
    if (n_samples <= 0) throw ConfigError("n_samples must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw = [&](const Vector& lo, const Vector& hi) {
        Vector v(lo.size());
        for (Eigen::Index i = 0; i < lo.size(); ++i) v[i] = lo[i] + (hi[i] - lo[i]) * unif(rng);
        return v;
    };
    auto perturb = [&](const Vector& v, const Vector& lo, const Vector& hi, bool close) {
        Vector p = close ? Vector(v + 1e-4 * (draw(lo, hi) - 0.5 * (lo + hi))) : draw(lo, hi);
        return p.cwiseMax(lo).cwiseMin(hi).eval();
    };

    LipschitzEstimate est;
    const NormKind kind = model.norm();
    for (int s = 0; s < n_samples; ++s) {
        const bool close = (s % 2) == 0;
        const Vector x = draw(box.x_lo, box.x_hi);
        const Vector u = draw(box.u_lo, box.u_hi);
        const Vector fxu = model.residual(x, u);

        const Vector x2 = perturb(x, box.x_lo, box.x_hi, close);
        const double dx = vector_norm(x - x2, kind);
        if (dx > 1e-12)
            est.L_f = std::max(est.L_f, vector_norm(fxu - model.residual(x2, u), kind) / dx);

        const Vector u2 = perturb(u, box.u_lo, box.u_hi, close);
        const double du = vector_norm(u - u2, kind);
        if (du > 1e-12)
            est.M_f = std::max(est.M_f, vector_norm(fxu - model.residual(x, u2), kind) / du);
    }

    const double slack = 1e-9;
    if (est.L_f > model.L_f() * (1.0 + slack) + slack || est.M_f > model.M_f() * (1.0 + slack) + slack) {
        est.exceeds_configured = true;
        std::cerr << "warning: sampled Lipschitz estimate (L_f ~ " << est.L_f << ", M_f ~ " << est.M_f
                  << ") exceeds the configured constants (L_f = " << model.L_f()
                  << ", M_f = " << model.M_f() << ")\n";
    }
    return est;
}

Integrator parse_integrator(const std::string& name)
{
    if (name == "euler") return Integrator::Euler;
    if (name == "rk4") return Integrator::RK4;
    throw ConfigError("unknown integrator '" + name + "' (expected euler or rk4)");
}

SystemModel discretize(const ContinuousDynamics& dynamics, int state_dim, int control_dim, double dt,
                       Integrator scheme, double L_f, double M_f, NormKind norm)
{
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    const auto rhs = dynamics.rhs;
    auto jac_c = dynamics.jacobian;
    if (!jac_c) {
        jac_c = [rhs](const Vector& x, const Vector& u, Matrix& Jx, Matrix& Ju) {
            central_difference(rhs, x, u, Jx, Ju);
        };
    }

    Matrix Ac, Bc;
    jac_c(Vector::Zero(state_dim), Vector::Zero(control_dim), Ac, Bc);
    const Matrix I = Matrix::Identity(state_dim, state_dim);

    Matrix Ad, Bd;
    std::function<Vector(const Vector&, const Vector&)> step;
    if (scheme == Integrator::Euler) {
        Ad = I + dt * Ac;
        Bd = dt * Bc;
        step = [rhs, dt](const Vector& x, const Vector& u) { return (x + dt * rhs(x, u)).eval(); };
    } else {
        // RK4 applied to the linearisation gives the truncated exponential series.
        const Matrix A2 = Ac * Ac;
        const Matrix A3 = A2 * Ac;
        Ad = I + dt * Ac + dt * dt / 2.0 * A2 + dt * dt * dt / 6.0 * A3 +
             dt * dt * dt * dt / 24.0 * A3 * Ac;
        Bd = (dt * I + dt * dt / 2.0 * Ac + dt * dt * dt / 6.0 * A2 + dt * dt * dt * dt / 24.0 * A3) * Bc;
        step = [rhs, dt](const Vector& x, const Vector& u) {
            const Vector k1 = rhs(x, u);
            const Vector k2 = rhs(x + 0.5 * dt * k1, u);
            const Vector k3 = rhs(x + 0.5 * dt * k2, u);
            const Vector k4 = rhs(x + dt * k3, u);
            return (x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
        };
    }

    Nonlinearity f;
    f.eval = [step, Ad, Bd](const Vector& x, const Vector& u) {
        return (step(x, u) - Ad * x - Bd * u).eval();
    };
    if (scheme == Integrator::Euler) {
        f.jacobian = [jac_c, Ad, Bd, dt](const Vector& x, const Vector& u, Matrix& fx, Matrix& fu) {
            Matrix Jx, Ju;
            jac_c(x, u, Jx, Ju);
            fx = Matrix::Identity(x.size(), x.size()) + dt * Jx - Ad;
            fu = dt * Ju - Bd;
        };
    }
    return SystemModel(Ad, Bd, std::move(f), L_f, M_f, norm);
}

} // namespace cloudmpc
