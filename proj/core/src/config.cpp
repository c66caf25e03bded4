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
#include "cloudmpc/config.hpp"

#include "cloudmpc/errors.hpp"
#include "cloudmpc/presets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace cloudmpc {

namespace {

Json solver_defaults()
{
    const SolverOptions d;
    return {{"feas_tol", d.feas_tol},
            {"opt_tol", d.opt_tol},
            {"max_iterations", d.max_iterations},
            {"max_outer_iterations", d.max_outer_iterations},
            {"penalty_initial", d.penalty_initial},
            {"penalty_growth", d.penalty_growth},
            {"penalty_max", d.penalty_max},
            {"trust_radius", d.trust_radius},
            {"warm_start", d.warm_start}};
}

Json example1_config()
{
    return {
        {"name", "example1"},
        {"model", {{"preset", "example1_scalar"}, {"norm", "two"}}},
        {"cost", {{"Q", {1.0}}, {"R", {5.0}}, {"P", {2.0}}, {"horizon", 10}}},
        {"constraints", Json::array({{{"time", 10},
                                      {"rows", Json::array({{{"G", {1.0}}, {"g", 2.5}},
                                                            {{"G", {-1.0}}, {"g", 2.5}}})}}})},
        {"control_bounds", {{"lower", {-3.0}}, {"upper", {3.0}}}},
        {"disturbance", {{"omega", 0.02}, {"shape", "uniform_ball"}}},
        {"delay", {{"delta_t", 0}, {"prediction", "forward_simulate"}, {"explicit_eps0", 0.5}}},
        {"initial_state", {-10.0}},
        {"injected_error", {-0.5}},
        {"policy", {{"kind", "auto"}, {"eta_eps", "measured"}}},
        {"solver", solver_defaults()},
        {"metrics", {{"terminal_threshold", 2.5}}},
    };
}

// The Lipschitz constants hold on the operating box around the upright
// equilibrium given in model.lipschitz_check (with |F| <= 30), not on the whole
// swing; see the README for how they were sized.
Json example2_config()
{
    return {
        {"name", "example2_pendulum"},
        {"model",
         {{"preset", "example2_pendulum"},
          {"norm", "two"},
          {"integrator", "euler"},
          {"params",
           {{"m_cart", 1.0}, {"m_pend", 1.0}, {"length", 0.5}, {"damping", 10.0}, {"gravity", 9.81}, {"dt", 0.1}}},
          {"L_f", 3.0},
          {"M_f", 0.013},
          {"lipschitz_check", {{"state_box", {1.0, 1.0, 0.2, 1.0}}, {"samples", 20000}}}}},
        {"cost", {{"Q", {3.0, 0.4, 3.0, 0.4}}, {"R", {1e-5}}, {"P", {3.0, 0.4, 3.0, 0.4}}, {"horizon", 30}}},
        {"constraints", Json::array()},
        {"control_bounds", {{"lower", {-30.0}}, {"upper", {30.0}}}},
        {"disturbance", {{"omega", 3e-3}, {"shape", "uniform_ball"}}},
        {"delay", {{"delta_t", 1}, {"prediction", "forward_simulate"}}},
        {"initial_state", {0.0, 0.0, 0.8, 0.0}},
        {"policy", {{"kind", "auto"}, {"eta_eps", "measured"}}},
        {"solver", solver_defaults()},
        {"metrics", {{"terminal_threshold", 0.5}}},
    };
}

Json example3_config()
{
    const VehicleParams d;
    return {
        {"name", "example3_vehicle"},
        {"model",
         {{"preset", "example3_vehicle"},
          {"norm", "two"},
          {"integrator", "euler"},
          {"params",
           {{"wheelbase", d.wheelbase},
            {"dt", d.dt},
            {"v_ref", d.v_ref},
            {"steer_amplitude", d.steer_amplitude},
            {"steer_period", d.steer_period},
            {"box_speed", d.box_speed},
            {"box_curvature", d.box_curvature},
            {"box_heading", d.box_heading}}}}},
        {"cost", {{"Q", {3.0, 3.0, 0.01}}, {"R", {1e-3, 1e-3}}, {"P", {3.0, 3.0, 0.01}}, {"horizon", d.horizon}}},
        {"constraints", Json::array()},
        {"control_bounds", {{"lower", {-d.box_speed, -d.box_curvature}}, {"upper", {d.box_speed, d.box_curvature}}}},
        {"disturbance", {{"omega", 2e-2}, {"shape", "uniform_ball"}}},
        {"delay", {{"delta_t", 1}, {"prediction", "forward_simulate"}}},
        {"initial_state", {0.0, 1.0, 0.3}},
        {"policy", {{"kind", "auto"}, {"eta_eps", "measured"}}},
        {"solver", solver_defaults()},
        {"metrics", {{"position_indices", {0, 1}}}},
    };
}

/// Collects schema problems under dotted key paths.
class Reader {
public:
    std::vector<std::string> problems;

    void fail(const std::string& path, const std::string& what) { problems.push_back(path + ": " + what); }

    bool object(const Json& j, const std::string& path, std::initializer_list<const char*> allowed)
    {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& item : j.items()) {
            const bool known = std::any_of(allowed.begin(), allowed.end(),
                                           [&](const char* k) { return item.key() == k; });
            if (!known) fail(join(path, item.key()), "unknown key");
        }
        return true;
    }

    const Json* find(const Json& j, const std::string& key, const std::string& path, bool required)
    {
        if (j.is_object()) {
            const auto it = j.find(key);
            if (it != j.end() && !it->is_null()) return &*it;
        }
        if (required) fail(join(path, key), "missing required key");
        return nullptr;
    }

    std::optional<double> number(const Json& j, const std::string& key, const std::string& path, bool required)
    {
        const Json* v = find(j, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(join(path, key), "expected a number");
            return std::nullopt;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            fail(join(path, key), "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<int> integer(const Json& j, const std::string& key, const std::string& path, bool required)
    {
        const Json* v = find(j, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_number_integer()) {
            fail(join(path, key), "expected an integer");
            return std::nullopt;
        }
        return v->get<int>();
    }

    std::optional<bool> boolean(const Json& j, const std::string& key, const std::string& path)
    {
        const Json* v = find(j, key, path, false);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) {
            fail(join(path, key), "expected true or false");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    std::optional<std::string> string(const Json& j, const std::string& key, const std::string& path, bool required)
    {
        const Json* v = find(j, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_string()) {
            fail(join(path, key), "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<Vector> vector(const Json& v, const std::string& path)
    {
        if (!v.is_array()) {
            fail(path, "expected an array of numbers");
            return std::nullopt;
        }
        Vector out(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                fail(path, "expected an array of numbers");
                return std::nullopt;
            }
            out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
        }
        return out;
    }

    std::optional<Vector> vector(const Json& j, const std::string& key, const std::string& path, bool required)
    {
        const Json* v = find(j, key, path, required);
        if (!v) return std::nullopt;
        return vector(*v, join(path, key));
    }

    std::optional<Matrix> matrix(const Json& j, const std::string& key, const std::string& path, bool required)
    {
        const Json* v = find(j, key, path, required);
        if (!v) return std::nullopt;
        const std::string p = join(path, key);
        if (!v->is_array() || v->empty() || !(*v)[0].is_array()) {
            fail(p, "expected a non-empty array of rows");
            return std::nullopt;
        }
        const std::size_t cols = (*v)[0].size();
        Matrix out(static_cast<Eigen::Index>(v->size()), static_cast<Eigen::Index>(cols));
        for (std::size_t r = 0; r < v->size(); ++r) {
            const auto row = vector((*v)[r], p);
            if (!row) return std::nullopt;
            if (static_cast<std::size_t>(row->size()) != cols) {
                fail(p, "rows have different lengths");
                return std::nullopt;
            }
            out.row(static_cast<Eigen::Index>(r)) = row->transpose();
        }
        return out;
    }

    /// A flat array is read as the diagonal.
    std::optional<Matrix> weight(const Json& j, const std::string& key, const std::string& path)
    {
        const Json* v = find(j, key, path, true);
        if (!v) return std::nullopt;
        if (v->is_array() && !v->empty() && (*v)[0].is_array()) return matrix(j, key, path, true);
        const auto d = vector(*v, join(path, key));
        if (!d) return std::nullopt;
        return Matrix(d->asDiagonal());
    }

    static std::string join(const std::string& path, const std::string& key)
    {
        return path.empty() ? key : path + "." + key;
    }
};

template <typename Parse>
auto parse_or_fail(Reader& r, const std::string& path, const std::string& value, Parse parse)
    -> std::optional<decltype(parse(value))>
{
    try {
        return parse(value);
    } catch (const ConfigError& e) {
        r.fail(path, e.what());
        return std::nullopt;
    }
}

void throw_if_problems(const Reader& r)
{
    if (r.problems.empty()) return;
    std::string msg = "invalid config (" + std::to_string(r.problems.size()) + " problem" +
                      (r.problems.size() == 1 ? "" : "s") + "):";
    for (const auto& p : r.problems) msg += "\n  " + p;
    throw ConfigError(msg);
}

std::vector<NonlinearTerm> read_terms(Reader& r, const Json& arr, const std::string& path)
{
    std::vector<NonlinearTerm> terms;
    if (!arr.is_array()) {
        r.fail(path, "expected an array of terms");
        return terms;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string tp = path + "." + std::to_string(i);
        if (!r.object(arr[i], tp, {"output", "coeff", "factors"})) continue;
        NonlinearTerm term;
        term.output = r.integer(arr[i], "output", tp, true).value_or(0);
        term.coeff = r.number(arr[i], "coeff", tp, true).value_or(0.0);
        const Json* fs = r.find(arr[i], "factors", tp, false);
        if (fs && !fs->is_array()) r.fail(tp + ".factors", "expected an array");
        if (fs && fs->is_array()) {
            for (std::size_t k = 0; k < fs->size(); ++k) {
                const std::string fp = tp + ".factors." + std::to_string(k);
                const Json& fj = (*fs)[k];
                if (!r.object(fj, fp, {"func", "var", "index", "scale", "power"})) continue;
                TermFactor f;
                const std::string func = r.string(fj, "func", fp, false).value_or("identity");
                if (func == "identity") f.func = TermFactor::Func::Identity;
                else if (func == "sin") f.func = TermFactor::Func::Sin;
                else if (func == "cos") f.func = TermFactor::Func::Cos;
                else r.fail(fp + ".func", "expected identity, sin or cos");
                const std::string var = r.string(fj, "var", fp, false).value_or("x");
                if (var != "x" && var != "u") r.fail(fp + ".var", "expected x or u");
                f.control = var == "u";
                f.index = r.integer(fj, "index", fp, true).value_or(0);
                f.scale = r.number(fj, "scale", fp, false).value_or(1.0);
                f.power = r.integer(fj, "power", fp, false).value_or(1);
                term.factors.push_back(f);
            }
        }
        terms.push_back(std::move(term));
    }
    return terms;
}

TimeVaryingModel build_model(Reader& r, const Json& mj, NormKind norm, int horizon)
{
    const std::string preset = r.string(mj, "preset", "model", true).value_or("");
    const std::string integrator = r.string(mj, "integrator", "model", false).value_or("euler");
    const Json empty = Json::object();
    const Json* params = r.find(mj, "params", "model", false);
    const Json& pj = params ? *params : empty;

    if (preset == "example1_scalar" || preset == "example1") {
        r.object(mj, "model", {"preset", "norm", "lipschitz_check"});
        throw_if_problems(r);
        return TimeVaryingModel(example1_model(norm));
    }
    if (preset == "example2_pendulum") {
        r.object(mj, "model", {"preset", "norm", "integrator", "params", "L_f", "M_f", "lipschitz_check"});
        PendulumParams p;
        if (r.object(pj, "model.params", {"m_cart", "m_pend", "length", "damping", "gravity", "dt"})) {
            p.m_cart = r.number(pj, "m_cart", "model.params", false).value_or(p.m_cart);
            p.m_pend = r.number(pj, "m_pend", "model.params", false).value_or(p.m_pend);
            p.length = r.number(pj, "length", "model.params", false).value_or(p.length);
            p.damping = r.number(pj, "damping", "model.params", false).value_or(p.damping);
            p.gravity = r.number(pj, "gravity", "model.params", false).value_or(p.gravity);
            p.dt = r.number(pj, "dt", "model.params", false).value_or(p.dt);
        }
        const auto L_f = r.number(mj, "L_f", "model", true);
        const auto M_f = r.number(mj, "M_f", "model", true);
        const auto scheme = parse_or_fail(r, "model.integrator", integrator, parse_integrator);
        throw_if_problems(r);
        return TimeVaryingModel(discretize(pendulum_dynamics(p), 4, 1, p.dt, *scheme, *L_f, *M_f, norm));
    }
    if (preset == "example3_vehicle") {
        r.object(mj, "model", {"preset", "norm", "integrator", "params", "lipschitz_check"});
        VehicleParams p;
        p.horizon = horizon;
        if (r.object(pj, "model.params",
                     {"wheelbase", "dt", "v_ref", "steer_amplitude", "steer_period", "box_speed", "box_curvature",
                      "box_heading"})) {
            p.wheelbase = r.number(pj, "wheelbase", "model.params", false).value_or(p.wheelbase);
            p.dt = r.number(pj, "dt", "model.params", false).value_or(p.dt);
            p.v_ref = r.number(pj, "v_ref", "model.params", false).value_or(p.v_ref);
            p.steer_amplitude = r.number(pj, "steer_amplitude", "model.params", false).value_or(p.steer_amplitude);
            p.steer_period = r.number(pj, "steer_period", "model.params", false).value_or(p.steer_period);
            p.box_speed = r.number(pj, "box_speed", "model.params", false).value_or(p.box_speed);
            p.box_curvature = r.number(pj, "box_curvature", "model.params", false).value_or(p.box_curvature);
            p.box_heading = r.number(pj, "box_heading", "model.params", false).value_or(p.box_heading);
        }
        if (integrator != "euler")
            r.fail("model.integrator", "the vehicle error model is derived for forward Euler only");
        throw_if_problems(r);
        return vehicle_error_model(p, vehicle_reference(p), norm);
    }
    if (preset == "custom") {
        r.object(mj, "model", {"preset", "norm", "A", "B", "nonlinearity", "terms", "L_f", "M_f", "lipschitz_check"});
        const auto A = r.matrix(mj, "A", "model", true);
        const auto B = r.matrix(mj, "B", "model", true);
        const auto L_f = r.number(mj, "L_f", "model", true);
        const auto M_f = r.number(mj, "M_f", "model", true);
        const auto builtin = r.string(mj, "nonlinearity", "model", false);
        const Json* terms_json = r.find(mj, "terms", "model", false);
        if (builtin && terms_json) r.fail("model.terms", "give either nonlinearity or terms, not both");
        std::vector<NonlinearTerm> terms;
        if (terms_json) terms = read_terms(r, *terms_json, "model.terms");
        throw_if_problems(r);
        const int n = static_cast<int>(A->rows());
        const int m = static_cast<int>(B->cols());
        Nonlinearity f = terms_json ? make_term_nonlinearity(std::move(terms), n, m)
                                    : builtin_nonlinearity(builtin.value_or("zero"), n, m);
        return TimeVaryingModel(SystemModel(*A, *B, std::move(f), *L_f, *M_f, norm));
    }
    r.fail("model.preset", preset.empty() ? "missing" : "unknown preset '" + preset + "'");
    throw_if_problems(r);
    throw ConfigError("unreachable");
}

std::string dims_message(const char* what, Eigen::Index got, int expected)
{
    return std::string(what) + " has dimension " + std::to_string(got) + ", expected " + std::to_string(expected);
}

} // namespace

std::vector<std::string> preset_names()
{
    return {"example1", "example1_scalar", "example2_pendulum", "example3_vehicle"};
}

Json preset_config(const std::string& name)
{
    if (name == "example1" || name == "example1_scalar") return example1_config();
    if (name == "example2_pendulum" || name == "example2") return example2_config();
    if (name == "example3_vehicle" || name == "example3") return example3_config();
    throw ConfigError("unknown preset '" + name + "'");
}

Json load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

void apply_override(Json& config, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }
    Json* node = &config;
    std::stringstream ss(key);
    std::string segment;
    while (std::getline(ss, segment, '.')) {
        if (segment.empty()) throw ConfigError("override key '" + key + "' has an empty segment");
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(segment);
            } catch (const std::exception&) {
                throw ConfigError("override key '" + key + "': '" + segment + "' is not an array index");
            }
            if (idx >= node->size()) throw ConfigError("override key '" + key + "': index out of range");
            node = &(*node)[idx];
        } else {
            if (!node->is_object()) *node = Json::object();
            node = &(*node)[segment];
        }
    }
    *node = std::move(value);
}

Scenario build_scenario(const Json& config)
{
    Reader r;
    r.object(config, "",
             {"name", "model", "cost", "constraints", "control_bounds", "gauges", "disturbance", "delay",
              "initial_state", "injected_error", "policy", "solver", "metrics"});
    throw_if_problems(r);

    const Json empty = Json::object();
    auto section = [&](const char* key, bool required) -> const Json& {
        const Json* s = r.find(config, key, "", required);
        return s ? *s : empty;
    };

    const std::string name = r.string(config, "name", "", false).value_or("custom");
    const Json& mj = section("model", true);
    const Json& cj = section("cost", true);
    throw_if_problems(r);

    const auto norm = parse_or_fail(r, "model.norm", r.string(mj, "norm", "model", false).value_or("two"),
                                    parse_norm_kind);
    r.object(cj, "cost", {"Q", "R", "P", "horizon"});
    const auto Q = r.weight(cj, "Q", "cost");
    const auto R = r.weight(cj, "R", "cost");
    const auto P = r.weight(cj, "P", "cost");
    const auto N = r.integer(cj, "horizon", "cost", true);
    if (N && *N < 1) r.fail("cost.horizon", "must be at least 1");
    throw_if_problems(r);

    TimeVaryingModel model = build_model(r, mj, *norm, *N);
    const int n = model.state_dim();
    const int m = model.control_dim();
    if (Q->rows() != n || Q->cols() != n) r.fail("cost.Q", dims_message("Q", Q->rows(), n));
    if (P->rows() != n || P->cols() != n) r.fail("cost.P", dims_message("P", P->rows(), n));
    if (R->rows() != m || R->cols() != m) r.fail("cost.R", dims_message("R", R->rows(), m));
    if (!model.time_invariant() && model.num_stages() < *N)
        r.fail("cost.horizon", "longer than the time-varying model");

    std::vector<PolytopeConstraint> constraints;
    if (const Json* cs = r.find(config, "constraints", "", false)) {
        if (!cs->is_array()) r.fail("constraints", "expected an array");
        else {
            for (std::size_t i = 0; i < cs->size(); ++i) {
                const std::string cp = "constraints." + std::to_string(i);
                if (!r.object((*cs)[i], cp, {"time", "rows"})) continue;
                PolytopeConstraint c;
                c.time = r.integer((*cs)[i], "time", cp, true).value_or(0);
                const Json* rows = r.find((*cs)[i], "rows", cp, true);
                if (rows && !rows->is_array()) r.fail(cp + ".rows", "expected an array");
                if (rows && rows->is_array()) {
                    for (std::size_t k = 0; k < rows->size(); ++k) {
                        const std::string rp = cp + ".rows." + std::to_string(k);
                        if (!r.object((*rows)[k], rp, {"G", "g"})) continue;
                        const auto G = r.vector((*rows)[k], "G", rp, true);
                        const auto g = r.number((*rows)[k], "g", rp, true);
                        if (G && G->size() != n) r.fail(rp + ".G", dims_message("G", G->size(), n));
                        if (G && g) c.rows.push_back({*G, *g});
                    }
                }
                try {
                    if (r.problems.empty()) validate_constraint(c, n, *N);
                } catch (const ConfigError& e) {
                    r.fail(cp, e.what());
                }
                constraints.push_back(std::move(c));
            }
        }
    }

    ControlBounds bounds = ControlBounds::unbounded(m);
    if (const Json* bj = r.find(config, "control_bounds", "", false)) {
        if (r.object(*bj, "control_bounds", {"lower", "upper"})) {
            const auto lo = r.vector(*bj, "lower", "control_bounds", false);
            const auto hi = r.vector(*bj, "upper", "control_bounds", false);
            if (lo && lo->size() != m) r.fail("control_bounds.lower", dims_message("lower", lo->size(), m));
            else if (lo) bounds.lower = *lo;
            if (hi && hi->size() != m) r.fail("control_bounds.upper", dims_message("upper", hi->size(), m));
            else if (hi) bounds.upper = *hi;
            if (lo && hi && lo->size() == m && hi->size() == m && ((*hi) - (*lo)).minCoeff() < 0.0)
                r.fail("control_bounds", "lower exceeds upper");
        }
    }

    std::optional<UnitBallPolytope> gauges;
    if (const Json* gj = r.find(config, "gauges", "", false)) {
        if (r.object(*gj, "gauges", {"G", "g", "H", "h"})) {
            const auto G = r.matrix(*gj, "G", "gauges", true);
            const auto g = r.vector(*gj, "g", "gauges", true);
            const auto H = r.matrix(*gj, "H", "gauges", true);
            const auto h = r.vector(*gj, "h", "gauges", true);
            throw_if_problems(r);
            try {
                gauges.emplace(*G, *g, *H, *h, *norm);
            } catch (const ConfigError& e) {
                r.fail("gauges", e.what());
            }
        }
    } else {
        gauges.emplace(UnitBallPolytope::default_for(n, m, *norm));
    }

    DisturbanceSpec dist;
    if (r.object(section("disturbance", true), "disturbance", {"omega", "sampler_radius", "shape"})) {
        const Json& dj = section("disturbance", true);
        dist.omega = r.number(dj, "omega", "disturbance", true).value_or(0.0);
        dist.sampler_radius = r.number(dj, "sampler_radius", "disturbance", false);
        const std::string shape = r.string(dj, "shape", "disturbance", false).value_or("uniform_ball");
        if (shape == "uniform_ball") dist.shape = DisturbanceSpec::Shape::UniformBall;
        else if (shape == "ball_surface") dist.shape = DisturbanceSpec::Shape::BallSurface;
        else r.fail("disturbance.shape", "expected uniform_ball or ball_surface");
        if (dist.omega < 0.0) r.fail("disturbance.omega", "must be non-negative");
        if (dist.sampler_radius && *dist.sampler_radius < 0.0)
            r.fail("disturbance.sampler_radius", "must be non-negative");
    }

    DelaySpec delay;
    Trajectory assumed;
    if (const Json* dj = r.find(config, "delay", "", false)) {
        if (r.object(*dj, "delay", {"delta_t", "prediction", "explicit_eps0", "assumed_controls"})) {
            delay.delta_t = r.integer(*dj, "delta_t", "delay", false).value_or(0);
            if (delay.delta_t < 0) r.fail("delay.delta_t", "must be non-negative");
            if (const auto p = r.string(*dj, "prediction", "delay", false))
                delay.prediction = parse_or_fail(r, "delay.prediction", *p, parse_prediction)
                                       .value_or(delay.prediction);
            delay.explicit_eps0 = r.number(*dj, "explicit_eps0", "delay", false);
            if (delay.explicit_eps0 && *delay.explicit_eps0 < 0.0)
                r.fail("delay.explicit_eps0", "must be non-negative");
            if (const Json* aj = r.find(*dj, "assumed_controls", "delay", false)) {
                if (!aj->is_array() || aj->size() != static_cast<std::size_t>(delay.delta_t))
                    r.fail("delay.assumed_controls", "expected delta_t control vectors");
                else
                    for (std::size_t i = 0; i < aj->size(); ++i) {
                        const auto u = r.vector((*aj)[i], "delay.assumed_controls");
                        if (u && u->size() != m) r.fail("delay.assumed_controls", dims_message("control", u->size(), m));
                        else if (u) assumed.push_back(*u);
                    }
            }
        }
    }

    const auto x0 = r.vector(config, "initial_state", "", true);
    if (x0 && x0->size() != n) r.fail("initial_state", dims_message("initial_state", x0->size(), n));
    const auto injected = r.vector(config, "injected_error", "", false);
    if (injected && injected->size() != n) r.fail("injected_error", dims_message("injected_error", injected->size(), n));

    PolicySpec policy;
    if (const Json* pj = r.find(config, "policy", "", false)) {
        if (r.object(*pj, "policy", {"kind", "eta_eps"})) {
            if (const auto k = r.string(*pj, "kind", "policy", false))
                policy.kind = parse_or_fail(r, "policy.kind", *k, parse_policy_kind).value_or(policy.kind);
            if (const auto e = r.string(*pj, "eta_eps", "policy", false))
                policy.eta_eps = parse_or_fail(r, "policy.eta_eps", *e, parse_eta_eps).value_or(policy.eta_eps);
        }
    }

    SolverOptions solver;
    if (const Json* sj = r.find(config, "solver", "", false)) {
        if (r.object(*sj, "solver",
                     {"feas_tol", "opt_tol", "max_iterations", "max_outer_iterations", "penalty_initial",
                      "penalty_growth", "penalty_max", "trust_radius", "warm_start"})) {
            solver.feas_tol = r.number(*sj, "feas_tol", "solver", false).value_or(solver.feas_tol);
            solver.opt_tol = r.number(*sj, "opt_tol", "solver", false).value_or(solver.opt_tol);
            solver.max_iterations = r.integer(*sj, "max_iterations", "solver", false).value_or(solver.max_iterations);
            solver.max_outer_iterations =
                r.integer(*sj, "max_outer_iterations", "solver", false).value_or(solver.max_outer_iterations);
            solver.penalty_initial = r.number(*sj, "penalty_initial", "solver", false).value_or(solver.penalty_initial);
            solver.penalty_growth = r.number(*sj, "penalty_growth", "solver", false).value_or(solver.penalty_growth);
            solver.penalty_max = r.number(*sj, "penalty_max", "solver", false).value_or(solver.penalty_max);
            solver.trust_radius = r.number(*sj, "trust_radius", "solver", false).value_or(solver.trust_radius);
            solver.warm_start = r.boolean(*sj, "warm_start", "solver").value_or(solver.warm_start);
            if (solver.feas_tol <= 0.0) r.fail("solver.feas_tol", "must be positive");
            if (solver.opt_tol <= 0.0) r.fail("solver.opt_tol", "must be positive");
            if (solver.max_iterations < 1) r.fail("solver.max_iterations", "must be positive");
            if (solver.penalty_growth <= 1.0) r.fail("solver.penalty_growth", "must exceed 1");
        }
    }

    std::vector<int> position_indices;
    std::optional<double> threshold;
    if (const Json* metj = r.find(config, "metrics", "", false)) {
        if (r.object(*metj, "metrics", {"position_indices", "terminal_threshold"})) {
            if (const Json* pi = r.find(*metj, "position_indices", "metrics", false)) {
                if (!pi->is_array()) r.fail("metrics.position_indices", "expected an array of indices");
                else
                    for (const auto& v : *pi) {
                        if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() >= n)
                            r.fail("metrics.position_indices", "index out of range");
                        else position_indices.push_back(v.get<int>());
                    }
            }
            threshold = r.number(*metj, "terminal_threshold", "metrics", false);
        }
    }
    throw_if_problems(r);

    Scenario sc{
        name,
        ControllerSetup{std::move(model), CostSpec(*Q, *R, *P, *N, *norm), std::move(constraints), std::move(bounds),
                        std::move(*gauges), dist.omega, solver},
        delay,
        std::move(assumed),
        injected,
        dist,
        *x0,
        policy,
        std::move(position_indices),
        threshold,
    };
    return sc;
}

std::optional<LipschitzCheck> lipschitz_check(const Json& config, const Scenario& scenario)
{
    const Json* lj = nullptr;
    if (config.contains("model") && config["model"].contains("lipschitz_check"))
        lj = &config["model"]["lipschitz_check"];
    if (!lj || lj->is_null()) return std::nullopt;
    Reader r;
    r.object(*lj, "model.lipschitz_check", {"state_box", "control_box", "samples"});
    const int n = scenario.setup.model.state_dim();
    const int m = scenario.setup.model.control_dim();
    LipschitzCheck check;
    check.samples = r.integer(*lj, "samples", "model.lipschitz_check", false).value_or(check.samples);
    const auto xb = r.vector(*lj, "state_box", "model.lipschitz_check", true);
    if (xb && xb->size() != n) r.fail("model.lipschitz_check.state_box", dims_message("state_box", xb->size(), n));
    Vector ulo = scenario.setup.bounds.lower;
    Vector uhi = scenario.setup.bounds.upper;
    if (const auto ub = r.vector(*lj, "control_box", "model.lipschitz_check", false)) {
        if (ub->size() != m) r.fail("model.lipschitz_check.control_box", dims_message("control_box", ub->size(), m));
        else {
            ulo = -*ub;
            uhi = *ub;
        }
    }
    if (!all_finite(ulo) || !all_finite(uhi))
        r.fail("model.lipschitz_check.control_box", "required when the control bounds are infinite");
    throw_if_problems(r);
    check.box = SampleBox{-*xb, *xb, ulo, uhi};
    return check;
}

std::string config_hash(const Json& config)
{
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : config.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace cloudmpc
