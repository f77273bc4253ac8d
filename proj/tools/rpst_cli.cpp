#include "rpst/commands.hpp"
#include "rpst/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random periodic solutions of dissipative SDEs via stochastic theta methods"};
    app.require_subcommand(1);
    app.set_version_flag("--version", rpst::library_version());

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;
    std::vector<std::string> overrides;

    for (const char* name : {"simulate", "pullback", "periodicity", "converge", "contraction"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "64-bit seed");
        sub->add_option("--jobs", jobs, "worker threads (outputs do not depend on it)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--set", overrides, "override a config key: --set key=value (repeatable)");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    rpst::ExperimentConfig config;
    rpst::Command command{};
    try {
        command = rpst::command_from_string(name);
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot read " << config_path << '\n';
                return kExitIo;
            }
            rpst::apply_entries(config, rpst::parse_key_values(in));
        }
        std::map<std::string, std::string> flags;
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw rpst::ParameterError("--set expects key=value, got '" + kv + "'");
            flags[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        if (seed) flags["seed"] = std::to_string(*seed);
        if (jobs) flags["jobs"] = std::to_string(*jobs);
        if (out_dir) flags["output_dir"] = *out_dir;
        rpst::apply_entries(config, flags);
        rpst::validate_config(config, command);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const rpst::RunSummary summary = rpst::run_command(command, config);
        rpst::print_summary(std::cout, summary);
        return summary.all_passed() ? 0 : kExitChecksFailed;
    } catch (const rpst::NewtonError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const rpst::ParameterError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
}
