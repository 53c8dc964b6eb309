#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logitac/game.hpp"
#include "logitac/learner.hpp"

namespace logitac {

struct GameConfig {
    std::string name = "quadratic_coordination";
    GameParams params;
};

struct ReferenceConfig {
    bool solve = true;
    int restarts = 8;
    double tol = 1e-9;
    double damping = 0.5;
    int max_iter = 5000;
    std::uint64_t seed = 1;
};

struct DynamicsRunConfig {
    double step = 0.05;
    double horizon = 30.0;
    std::string start = "uniform";  // "uniform" or "equilibrium"
    long checkpoint_every = 1;
    bool record_profiles = false;
};

struct ThresholdConfig {
    double bl_to_ref = 0.05;
    double min_pass_fraction = 0.9;
};

struct ValidationConfig {
    int samples = 10000;
    double tol = 1e-9;
    std::uint64_t seed = 1;
};

// Everything the experiment CLI needs; see parse_config for the JSON schema.
struct ExperimentConfig {
    GameConfig game;
    double eta = 0.1;
    StepSchedule schedule = StepSchedule::defaults();
    long iters = 1000;
    std::vector<std::uint64_t> seeds = {1};
    int grid = 256;
    long checkpoint_every = 1000;
    std::vector<long> checkpoints;  // explicit list; overrides checkpoint_every
    long compact_every = 1000;
    int compact_bins = 512;
    int bl_resolution = 512;
    int workers = 0;  // 0 = available parallelism
    std::string output_dir = "out";
    ReferenceConfig reference;
    DynamicsRunConfig dynamics;
    ThresholdConfig thresholds;
    ValidationConfig validation;
};

// Parses and fully validates a JSON config: defaults are filled, unknown keys
// are rejected, syntax errors report line and column, semantic errors name
// the offending field.
ExperimentConfig parse_config(const std::string& text);

// Canonical serialization (all fields, defaults included). parse_config of
// the result yields the same config.
std::string serialize_config(const ExperimentConfig& config);

GameSpec make_game(const GameConfig& config);

// The iterations at which a run records diagnostics.
std::vector<long> checkpoint_iterations(const ExperimentConfig& config);

}  // namespace logitac
