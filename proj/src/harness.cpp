#include "logitac/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "logitac/errors.hpp"
#include "logitac/json_io.hpp"

namespace logitac {

namespace fs = std::filesystem;

namespace {

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("LOGITAC_LOG");
        if (env == nullptr) return 1;
        const std::string v(env);
        if (v == "quiet") return 0;
        if (v == "debug") return 2;
        return 1;
    }();
    return level;
}

std::mutex log_mutex;

void log_at(int level, const std::string& message) {
    if (log_level() < level) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    std::cerr << "[logitac] " << message << "\n";
}

// Output files open under the resolved directory; any filesystem failure maps
// to the config/IO exit code.
fs::path prepare_output_dir(const std::string& output_dir) {
    fs::path dir(output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::ios_base::failure("cannot create output directory '" + output_dir + "'");
    }
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
    return out;
}

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double final_bl = 0.0;
    bool has_bl = false;
    std::vector<double> final_residuals;
};

std::vector<std::vector<GridDensity>> reference_profiles(const EquilibriumSet& set) {
    std::vector<std::vector<GridDensity>> profiles;
    profiles.reserve(set.components.size());
    for (const auto& comp : set.components) profiles.push_back(comp.profile);
    return profiles;
}

}  // namespace

void log_info(const std::string& message) { log_at(1, message); }
void log_debug(const std::string& message) { log_at(2, message); }

int cmd_run(const ExperimentConfig& config, const std::string& output_dir) {
    fs::path dir;
    try {
        dir = prepare_output_dir(output_dir);
    } catch (const std::exception& e) {
        log_info(e.what());
        return kExitConfigOrIo;
    }

    const GameSpec game = make_game(config.game);

    EquilibriumSet reference;
    std::vector<std::vector<GridDensity>> components;
    if (config.reference.solve) {
        log_info("solving reference equilibria (" + std::to_string(config.reference.restarts) +
                 " restarts)");
        FixedPointOptions opts{config.reference.damping, config.reference.tol,
                               config.reference.max_iter};
        reference = find_logit_equilibria(game, config.eta, config.grid, opts,
                                          config.reference.restarts, config.reference.seed);
        components = reference_profiles(reference);
        log_info("reference components: " + std::to_string(components.size()));
    }

    const std::vector<long> marks = checkpoint_iterations(config);
    std::vector<SeedOutcome> outcomes(config.seeds.size());

    auto run_seed = [&](std::size_t idx) {
        SeedOutcome& outcome = outcomes[idx];
        outcome.seed = config.seeds[idx];
        try {
            RunOptions opts;
            opts.eta = config.eta;
            opts.schedule = config.schedule;
            opts.iters = config.iters;
            opts.seed = outcome.seed;
            opts.checkpoints = marks;
            opts.learner = {config.grid, config.compact_every, config.compact_bins};
            opts.bl_resolution = config.bl_resolution;
            opts.reference = components.empty() ? nullptr : &components;

            auto out = open_output(dir / ("run_seed" + std::to_string(outcome.seed) + ".jsonl"));
            auto on_checkpoint = [&out](const RunCheckpoint& cp) {
                out << to_json(cp).dump() << std::endl;  // flush per record
            };
            RunRecord record = run(game, opts, on_checkpoint);

            const RunCheckpoint& last = record.checkpoints.back();
            outcome.final_residuals = last.residuals;
            if (last.bl_to_ref) {
                outcome.final_bl = *last.bl_to_ref;
                outcome.has_bl = true;
            }
            outcome.ok = true;
            log_info("seed " + std::to_string(outcome.seed) + " finished");
        } catch (const std::exception& e) {
            outcome.error = e.what();
            log_info("seed " + std::to_string(outcome.seed) + " failed: " + outcome.error);
        }
    };

    unsigned pool = config.workers > 0 ? static_cast<unsigned>(config.workers)
                                       : std::max(1u, std::thread::hardware_concurrency());
    pool = std::min<unsigned>(pool, static_cast<unsigned>(config.seeds.size()));
    if (pool <= 1) {
        for (std::size_t i = 0; i < config.seeds.size(); ++i) run_seed(i);
    } else {
        std::vector<std::thread> workers;
        std::size_t next = 0;
        std::mutex next_mutex;
        for (unsigned w = 0; w < pool; ++w) {
            workers.emplace_back([&] {
                while (true) {
                    std::size_t idx;
                    {
                        std::lock_guard<std::mutex> lock(next_mutex);
                        if (next >= config.seeds.size()) return;
                        idx = next++;
                    }
                    run_seed(idx);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    // Summary once all workers joined.
    json seeds = json::array();
    int pass_count = 0;
    bool any_error = false;
    for (const SeedOutcome& o : outcomes) {
        const bool pass = o.ok && o.has_bl && o.final_bl < config.thresholds.bl_to_ref;
        if (pass) ++pass_count;
        if (!o.ok) any_error = true;
        json entry{{"seed", o.seed},
                   {"ok", o.ok},
                   {"final_residuals", o.final_residuals},
                   {"final_bl", nullptr},
                   {"pass", pass},
                   {"error", nullptr}};
        if (o.has_bl) entry["final_bl"] = o.final_bl;
        if (!o.ok) entry["error"] = o.error;
        seeds.push_back(entry);
    }
    const int needed = static_cast<int>(
        std::ceil(config.thresholds.min_pass_fraction * static_cast<double>(outcomes.size())));
    json summary{{"game", game.name},
                 {"eta", config.eta},
                 {"iters", config.iters},
                 {"seeds", seeds},
                 {"pass_count", pass_count},
                 {"required_passes", needed},
                 {"pass", pass_count >= needed},
                 {"thresholds",
                  {{"bl_to_ref", config.thresholds.bl_to_ref},
                   {"min_pass_fraction", config.thresholds.min_pass_fraction}}},
                 {"reference",
                  {{"components", reference.components.size()},
                   {"all_converged", reference.all_converged}}}};
    try {
        auto out = open_output(dir / "summary.json");
        out << summary.dump(2) << "\n";
    } catch (const std::exception& e) {
        log_info(e.what());
        return kExitConfigOrIo;
    }
    return any_error ? kExitRunError : kExitOk;
}

int cmd_equilibrium(const ExperimentConfig& config, const std::string& output_dir) {
    fs::path dir;
    try {
        dir = prepare_output_dir(output_dir);
    } catch (const std::exception& e) {
        log_info(e.what());
        return kExitConfigOrIo;
    }
    const GameSpec game = make_game(config.game);
    FixedPointOptions opts{config.reference.damping, config.reference.tol,
                           config.reference.max_iter};
    const EquilibriumSet set = find_logit_equilibria(
        game, config.eta, config.grid, opts, config.reference.restarts, config.reference.seed);
    try {
        auto out = open_output(dir / "equilibrium.json");
        out << to_json(set).dump(2) << "\n";
    } catch (const std::exception& e) {
        log_info(e.what());
        return kExitConfigOrIo;
    }
    log_info("components: " + std::to_string(set.components.size()) +
             (set.all_converged ? " (all restarts converged)" : " (non-convergence)"));
    return set.all_converged ? kExitOk : kExitSolverFailed;
}

int cmd_dynamics(const ExperimentConfig& config, const std::string& output_dir) {
    fs::path dir;
    try {
        dir = prepare_output_dir(output_dir);
    } catch (const std::exception& e) {
        log_info(e.what());
        return kExitConfigOrIo;
    }
    const GameSpec game = make_game(config.game);
    DynamicsConfig dyn{config.eta, config.dynamics.step, config.dynamics.horizon, config.grid};

    std::vector<GridDensity> start;
    if (config.dynamics.start == "equilibrium") {
        FixedPointOptions opts{config.reference.damping, config.reference.tol,
                               config.reference.max_iter};
        const FixedPointResult fp = logit_fixed_point(game, config.eta, config.grid, opts);
        if (!fp.converged) {
            log_info("equilibrium start requested but the solver did not converge");
            return kExitSolverFailed;
        }
        start = fp.profile;
    } else {
        start = uniform_profile(game, config.grid);
    }

    const TrajectoryRecord record =
        integrate(std::move(start), game, dyn, config.dynamics.checkpoint_every,
                  config.dynamics.record_profiles);
    try {
        auto out = open_output(dir / "trajectory.jsonl");
        for (const TrajectoryPoint& point : record.checkpoints) {
            out << to_json(point).dump() << "\n";
        }
        auto summary = open_output(dir / "dynamics_summary.json");
        summary << json{{"steps", record.steps},
                        {"violations", record.lyapunov_violations},
                        {"max_violation", record.max_violation},
                        {"final_residual", record.final_residual},
                        {"monotone", record.lyapunov_violations == 0}}
                       .dump(2)
                << "\n";
    } catch (const std::exception& e) {
        log_info(e.what());
        return kExitConfigOrIo;
    }
    log_info("V-increase violations: " + std::to_string(record.lyapunov_violations));
    return kExitOk;
}

int cmd_validate_game(const ExperimentConfig& config) {
    const GameSpec game = make_game(config.game);
    Rng rng(config.validation.seed);
    const PotentialReport report =
        validate_potential(game, config.validation.samples, config.validation.tol, rng);
    std::cout << json{{"game", game.name},
                      {"samples", report.samples},
                      {"tol", report.tol},
                      {"max_residual", report.max_residual},
                      {"pass", report.pass}}
                     .dump(2)
              << std::endl;
    return report.pass ? kExitOk : kExitValidationFailed;
}

}  // namespace logitac
