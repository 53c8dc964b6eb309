#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "logitac/errors.hpp"
#include "logitac/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw logitac::ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string config_path;
    std::string output_dir;
    std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_output = true) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")->required();
    if (with_output) {
        cmd->add_option("--output", args.output_dir, "output directory override");
    }
    cmd->add_option("--seed", args.seed, "replace the config seed list with one seed");
}

logitac::ExperimentConfig load(const CommonArgs& args) {
    auto config = logitac::parse_config(read_file(args.config_path));
    if (args.seed >= 0) config.seeds = {static_cast<std::uint64_t>(args.seed)};
    return config;
}

std::string output_dir(const CommonArgs& args, const logitac::ExperimentConfig& config) {
    return args.output_dir.empty() ? config.output_dir : args.output_dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"actor-critic learning, logit equilibria and best-response dynamics "
                 "for continuous-action potential games"};
    app.require_subcommand(1);

    CommonArgs run_args, eq_args, dyn_args, val_args;
    CLI::App* run = app.add_subcommand("run", "actor-critic runs over the config seeds");
    add_common(run, run_args);
    CLI::App* eq = app.add_subcommand("equilibrium", "solve logit equilibria with restarts");
    add_common(eq, eq_args);
    CLI::App* dyn = app.add_subcommand("dynamics", "integrate the logit best-response flow");
    add_common(dyn, dyn_args);
    CLI::App* val = app.add_subcommand("validate-game", "check the declared potential");
    add_common(val, val_args, /*with_output=*/false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) != 0 ? logitac::kExitConfigOrIo : logitac::kExitOk;
    }

    try {
        if (run->parsed()) {
            const auto config = load(run_args);
            return logitac::cmd_run(config, output_dir(run_args, config));
        }
        if (eq->parsed()) {
            const auto config = load(eq_args);
            return logitac::cmd_equilibrium(config, output_dir(eq_args, config));
        }
        if (dyn->parsed()) {
            const auto config = load(dyn_args);
            return logitac::cmd_dynamics(config, output_dir(dyn_args, config));
        }
        const auto config = load(val_args);
        return logitac::cmd_validate_game(config);
    } catch (const logitac::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return logitac::kExitConfigOrIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return logitac::kExitRunError;
    }
}
