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
#include "cloudmpc/io.hpp"
#include "cloudmpc/sim.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cloudmpc;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kInfeasible = 3, kBoundViolation = 4 };

struct CommonArgs {
    std::string preset;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int threads = 0;
};

/// "0..19", "3", "1,4,7" or any comma-separated mix.
std::vector<std::uint64_t> parse_seeds(const std::string& spec)
{
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            const auto dots = part.find("..");
            if (dots == std::string::npos) {
                seeds.push_back(std::stoull(part));
                continue;
            }
            const auto lo = std::stoull(part.substr(0, dots));
            const auto hi = std::stoull(part.substr(dots + 2));
            if (hi < lo) throw ConfigError("seed range '" + part + "' is descending");
            for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
        } catch (const std::logic_error&) {
            throw ConfigError("cannot parse seed list '" + spec + "'");
        }
    }
    if (seeds.empty()) throw ConfigError("empty seed list");
    return seeds;
}

std::vector<RunMode> parse_modes(const std::string& mode)
{
    if (mode == "all") return {RunMode::Fused, RunMode::CloudOnly, RunMode::LocalOnly};
    return {parse_run_mode(mode)};
}

Json resolve_config(const CommonArgs& args)
{
    if (args.preset.empty() == args.config_path.empty())
        throw ConfigError("give exactly one of --preset or --config");
    Json config = args.preset.empty() ? load_config(args.config_path) : preset_config(args.preset);
    for (const auto& o : args.overrides) apply_override(config, o);
    return config;
}

std::string output_dir(const CommonArgs& args)
{
    if (!args.out_dir.empty()) return args.out_dir;
    if (const char* env = std::getenv("CLOUDMPC_OUT_DIR")) return env;
    return "out";
}

void run_lipschitz_check(const Json& config, const Scenario& sc)
{
    const auto check = lipschitz_check(config, sc);
    if (!check) return;
    for (int t = 0; t < sc.setup.model.num_stages(); ++t) {
        const auto est = estimate_lipschitz(sc.setup.model.stage(t), check->box, check->samples, 0);
        if (est.exceeds_configured) {
            std::cerr << "warning: stage " << t << " sampled constants exceed the configured ones\n";
            return;
        }
    }
}

std::string describe(const BoundViolation& v)
{
    std::ostringstream os;
    os << v.kind << " bound violated: seed " << v.seed << ", k " << v.k << ", tau " << v.tau << ", measured "
       << v.measured << " > bound " << v.bound;
    return os.str();
}

int audit(const Scenario& sc, const std::string& hash, int trials, std::uint64_t first_seed, int threads,
          const std::string& out, std::vector<std::string>& outputs)
{
    if (trials == 0) {
        std::cerr << "warning: 0 trials requested; bound audit passes vacuously\n";
    }
    const BoundAudit a = verify_bounds(sc, trials, first_seed, threads);
    const std::string path = (std::filesystem::path(out) / "bounds.json").string();
    write_text_file(path, audit_json(a, hash).dump(2) + "\n");
    outputs.push_back(path);
    std::cout << "bound audit: " << a.trials << " trials, " << a.checks << " checks, " << a.violations.size()
              << " violations\n"
              << "worst measured/bound: cloud state " << a.worst_cloud_state << ", cloud cost " << a.worst_cloud_cost
              << ", local state " << a.worst_local_state << ", local cost " << a.worst_local_cost << "\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(a.violations.size(), 10); ++i)
        std::cerr << describe(a.violations[i]) << "\n";
    return a.violations.empty() ? kOk : kBoundViolation;
}

void write_manifest(const std::string& out, const CommonArgs& args, const std::string& hash,
                    const std::vector<std::uint64_t>& seeds, std::vector<std::string> outputs)
{
    RunManifest manifest;
    manifest.config_path = args.config_path.empty() ? "preset:" + args.preset : args.config_path;
    manifest.config_hash = hash;
    manifest.seeds = seeds;
    const std::string path = (std::filesystem::path(out) / "manifest.json").string();
    outputs.push_back(path);
    manifest.outputs = std::move(outputs);
    write_text_file(path, manifest.to_json().dump(2) + "\n");
}

int cmd_run(const CommonArgs& args, const std::string& mode, const std::string& seed_spec, int verify_trials)
{
    const Json config = resolve_config(args);
    const Scenario sc = build_scenario(config);
    run_lipschitz_check(config, sc);
    const std::string hash = config_hash(config);
    const std::string out = output_dir(args);
    const auto modes = parse_modes(mode);
    const auto seeds = parse_seeds(seed_spec);
    std::vector<std::string> outputs;
    const std::filesystem::path dir(out);

    if (modes.size() == 1 && seeds.size() == 1) {
        const SimTrace trace = run_closed_loop(sc, modes.front(), seeds.front());
        const Counterfactuals cf = counterfactual_costs(sc, trace);
        const RunMetrics metrics = compute_metrics(sc, trace, &cf);
        const std::string csv = (dir / "trace.csv").string();
        const std::string summary = (dir / "summary.json").string();
        write_text_file(csv, trace_csv(sc, trace, cf));
        write_text_file(summary, summary_json(sc, trace, metrics, hash).dump(2) + "\n");
        outputs = {csv, summary};
        std::cout << sc.name << " " << to_string(trace.mode) << " seed " << trace.seed << ": cost "
                  << metrics.total_cost << ", MRE " << metrics.mre << ", |x_N| " << metrics.terminal_norm
                  << (metrics.constraints_ok ? "" : ", constraint violated") << "\n";
    } else {
        const auto rows = run_batch(sc, modes, seeds, args.threads);
        const Json batch = batch_json(sc, rows, hash);
        const std::string path = (dir / "batch.json").string();
        write_text_file(path, batch.dump(2) + "\n");
        outputs = {path};
        for (const auto& [name, agg] : batch["aggregates"].items()) {
            std::cout << sc.name << " " << name << ": mean cost " << agg["total_cost"]["mean"] << ", mean MRE "
                      << agg["mre"]["mean"] << ", constraints ok " << agg["constraints_ok_rate"];
            if (!agg["switch_match"].is_null()) std::cout << ", switch match " << agg["switch_match"]["mean"] << "%";
            if (!agg["rms_position_error"].is_null())
                std::cout << ", RMS position " << agg["rms_position_error"]["mean"];
            std::cout << "\n";
        }
    }
    int code = kOk;
    if (verify_trials >= 0) code = audit(sc, hash, verify_trials, 0, args.threads, out, outputs);
    write_manifest(out, args, hash, seeds, outputs);
    return code;
}

int cmd_verify(const CommonArgs& args, int trials, std::uint64_t first_seed)
{
    const Json config = resolve_config(args);
    const Scenario sc = build_scenario(config);
    const std::string hash = config_hash(config);
    const std::string out = output_dir(args);
    std::vector<std::string> outputs;
    const int code = audit(sc, hash, trials, first_seed, args.threads, out, outputs);
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < trials; ++i) seeds.push_back(first_seed + static_cast<std::uint64_t>(i));
    write_manifest(out, args, hash, seeds, outputs);
    return code;
}

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--preset", args.preset, "example1, example2_pendulum or example3_vehicle");
    cmd->add_option("--config", args.config_path, "JSON experiment config");
    cmd->add_option("--override", args.overrides, "dotted key=value, repeatable");
    cmd->add_option("--out", args.out_dir, "output directory (default $CLOUDMPC_OUT_DIR or ./out)");
    cmd->add_option("--threads", args.threads, "worker threads for batches (0: all cores)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cloud-assisted nonlinear MPC experiments"};
    app.set_version_flag("--version", cloudmpc::tool_version());
    app.require_subcommand(1);

    CommonArgs run_args;
    std::string mode = "fused";
    std::string seed = "0";
    std::string seeds;
    int run_verify = -1;
    auto* run = app.add_subcommand("run", "closed-loop simulation(s)");
    add_common(run, run_args);
    run->add_option("--mode", mode, "fused, cloud, local or all")
        ->check(CLI::IsMember({"fused", "cloud", "local", "all"}));
    auto* seed_opt = run->add_option("--seed", seed, "single seed");
    run->add_option("--seeds", seeds, "seed list, e.g. 0..19")->excludes(seed_opt);
    run->add_option("--verify-bounds-trials", run_verify, "also audit the error bounds over N seeded trials");

    CommonArgs verify_args;
    int trials = 1000;
    std::uint64_t first_seed = 0;
    auto* verify = app.add_subcommand("verify-bounds", "Monte-Carlo audit of the error bounds");
    add_common(verify, verify_args);
    verify->add_option("--trials,--verify-bounds-trials", trials, "number of seeded trials")
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--first-seed", first_seed, "seed of the first trial");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_args, mode, seeds.empty() ? seed : seeds, run_verify);
        return cmd_verify(verify_args, trials, first_seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
