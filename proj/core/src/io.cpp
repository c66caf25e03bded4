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
#include "cloudmpc/io.hpp"

#include "cloudmpc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#ifndef CLOUDMPC_VERSION
#define CLOUDMPC_VERSION "unknown"
#endif

namespace cloudmpc {

namespace {

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int sign_of(double v)
{
    if (std::isnan(v)) return 0;
    return (v > 0) - (v < 0);
}

Json vec_json(const Vector& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Json metrics_json(const RunMetrics& m)
{
    Json j = {{"mre", m.mre},
              {"total_cost", m.total_cost},
              {"terminal_norm", m.terminal_norm},
              {"constraints_ok", m.constraints_ok},
              {"cloud_steps", m.cloud_steps},
              {"local_steps", m.local_steps}};
    j["switch_match"] = m.switch_match ? Json(*m.switch_match) : Json(nullptr);
    j["rms_position_error"] = m.rms_position_error ? Json(*m.rms_position_error) : Json(nullptr);
    return j;
}

Json stats_json(std::vector<double> values)
{
    if (values.empty()) return nullptr;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = values.size() > 1 ? var / static_cast<double>(values.size() - 1) : 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {{"mean", mean}, {"std", std::sqrt(var)}, {"min", *lo}, {"max", *hi}, {"count", values.size()}};
}

} // namespace

std::string tool_version() { return CLOUDMPC_VERSION; }

std::vector<std::string> trace_columns(int n, int m)
{
    std::vector<std::string> cols{"t", "choice", "local_status"};
    for (int i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i));
    for (int i = 0; i < m; ++i) cols.push_back("u" + std::to_string(i));
    for (int i = 0; i < n; ++i) cols.push_back("w" + std::to_string(i));
    for (const char* c : {"j_hat", "eta_hat", "j_bar", "eta_bar", "eps_meas", "delta_t", "trust_ok", "sign_policy",
                          "J_c", "J_l", "sign_oracle"})
        cols.emplace_back(c);
    return cols;
}

std::string trace_csv(const Scenario& sc, const SimTrace& trace, const Counterfactuals& cf)
{
    const int n = sc.setup.model.state_dim();
    const int m = sc.setup.model.control_dim();
    std::string out;
    const auto cols = trace_columns(n, m);
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
    for (const auto& s : trace.steps) {
        const auto k = static_cast<std::size_t>(s.t);
        const auto& d = s.decision;
        out += std::to_string(s.t) + "," + to_string(d.choice) + "," + to_string(s.local_status);
        for (int i = 0; i < n; ++i) out += "," + fmt(s.x[i]);
        for (int i = 0; i < m; ++i) out += "," + fmt(s.u[i]);
        for (int i = 0; i < n; ++i) out += "," + fmt(trace.disturbances[k][i]);
        out += "," + fmt(d.j_hat) + "," + fmt(d.eta_hat) + "," + fmt(d.j_bar) + "," + fmt(d.eta_bar) + "," +
               fmt(d.eps_meas) + "," + fmt(d.delta_t) + "," + (d.trust_ok ? "1" : "0") + "," +
               std::to_string(sign_of(d.j_local_wc - d.j_cloud_wc));
        out += "," + fmt(cf.J_c[k]) + "," + fmt(cf.J_l[k]) + "," + std::to_string(sign_of(cf.J_l[k] - cf.J_c[k]));
        out += '\n';
    }
    const auto N = trace.steps.size();
    out += std::to_string(N) + ",,";
    for (int i = 0; i < n; ++i) out += "," + fmt(trace.states[N][i]);
    for (int i = 0; i < m + n + 8; ++i) out += ",";
    out += "," + fmt(cf.J_c[N]) + "," + fmt(cf.J_l[N]) + ",\n";
    return out;
}

Json summary_json(const Scenario& sc, const SimTrace& trace, const RunMetrics& metrics, const std::string& hash)
{
    Json j;
    j["scenario"] = sc.name;
    j["mode"] = to_string(trace.mode);
    j["seed"] = trace.seed;
    j["config_hash"] = hash;
    j["version"] = tool_version();
    j["metrics"] = metrics_json(metrics);
    j["x_request"] = vec_json(trace.x_request);
    j["x_hat0"] = vec_json(trace.x_hat0);
    j["delta0"] = trace.delta0;
    j["terminal_state"] = vec_json(trace.states.back());
    Json flags = Json::array();
    for (std::size_t i = 0; i < trace.constraint_ok.size(); ++i)
        flags.push_back({{"time", sc.setup.constraints[i].time}, {"satisfied", static_cast<bool>(trace.constraint_ok[i])}});
    j["constraints"] = flags;
    if (sc.terminal_threshold) {
        j["terminal_threshold"] = *sc.terminal_threshold;
        j["terminal_within_threshold"] = metrics.terminal_norm <= *sc.terminal_threshold;
    }
    if (trace.cloud) {
        const auto& c = *trace.cloud;
        Json tightened = Json::array();
        for (const auto& t : c.tightened) {
            Json rhs = Json::array();
            for (const auto& row : t.rows) rhs.push_back(row.g);
            tightened.push_back({{"time", t.time}, {"rhs", rhs}});
        }
        j["cloud"] = {{"status", to_string(c.status)},
                      {"predicted_cost", c.cost_to_go.front()},
                      {"violation", c.violation},
                      {"delta", c.delta},
                      {"tightened", tightened}};
    } else {
        j["cloud"] = nullptr;
    }
    return j;
}

Json batch_json(const Scenario& sc, const std::vector<BatchRow>& rows, const std::string& hash)
{
    Json j;
    j["scenario"] = sc.name;
    j["config_hash"] = hash;
    j["version"] = tool_version();
    Json runs = Json::array();
    std::map<std::string, std::vector<const BatchRow*>> by_mode;
    std::vector<std::string> order;
    for (const auto& r : rows) {
        runs.push_back({{"seed", r.seed}, {"mode", to_string(r.mode)}, {"metrics", metrics_json(r.metrics)}});
        const std::string mode = to_string(r.mode);
        if (!by_mode.count(mode)) order.push_back(mode);
        by_mode[mode].push_back(&r);
    }
    j["runs"] = runs;
    Json agg = Json::object();
    for (const auto& mode : order) {
        const auto& rs = by_mode[mode];
        std::vector<double> cost, mre, term, match, rms;
        int ok = 0;
        for (const auto* r : rs) {
            cost.push_back(r->metrics.total_cost);
            mre.push_back(r->metrics.mre);
            term.push_back(r->metrics.terminal_norm);
            if (r->metrics.switch_match) match.push_back(*r->metrics.switch_match);
            if (r->metrics.rms_position_error) rms.push_back(*r->metrics.rms_position_error);
            ok += r->metrics.constraints_ok ? 1 : 0;
        }
        agg[mode] = {{"runs", rs.size()},
                     {"total_cost", stats_json(cost)},
                     {"mre", stats_json(mre)},
                     {"terminal_norm", stats_json(term)},
                     {"switch_match", stats_json(match)},
                     {"rms_position_error", stats_json(rms)},
                     {"constraints_ok_rate", static_cast<double>(ok) / static_cast<double>(rs.size())}};
    }
    j["aggregates"] = agg;
    return j;
}

Json audit_json(const BoundAudit& audit, const std::string& hash, std::size_t max_listed)
{
    Json v = Json::array();
    for (std::size_t i = 0; i < std::min(max_listed, audit.violations.size()); ++i) {
        const auto& b = audit.violations[i];
        v.push_back({{"seed", b.seed}, {"kind", b.kind}, {"k", b.k}, {"tau", b.tau}, {"measured", b.measured},
                     {"bound", b.bound}});
    }
    return {{"config_hash", hash},
            {"version", tool_version()},
            {"trials", audit.trials},
            {"checks", audit.checks},
            {"violation_count", audit.violations.size()},
            {"worst_ratio",
             {{"cloud_state", audit.worst_cloud_state},
              {"cloud_cost", audit.worst_cloud_cost},
              {"local_state", audit.worst_local_state},
              {"local_cost", audit.worst_local_cost}}},
            {"violations", v}};
}

Json RunManifest::to_json() const
{
    return {{"config_path", config_path}, {"config_hash", config_hash}, {"seeds", seeds}, {"outputs", outputs},
            {"version", version}};
}

void write_text_file(const std::string& path, const std::string& contents)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out) throw ConfigError("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

} // namespace cloudmpc
